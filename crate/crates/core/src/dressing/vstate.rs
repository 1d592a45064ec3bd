//! The symmetric V-reduction: U = 2V′, V″C⁻¹ + C⁻¹V″ = 2[V′, [V, C⁻¹]].

use super::chain::ChainState;
use crate::error::{Error, Result};
use crate::numerics::{r, AnticommutatorSolver, CMatrix, OdeSetup, Trajectory, C64, DEFAULT_ATOL, DEFAULT_RTOL};

/// (V, V′) with constant symmetric C.
#[derive(Clone, Debug, PartialEq)]
pub struct VState {
    pub v: CMatrix,
    pub vp: CMatrix,
    pub c: CMatrix,
}

impl VState {
    pub fn new(v: CMatrix, vp: CMatrix, c: CMatrix) -> Result<Self> {
        let tol = 1e-10;
        if !v.is_symmetric(tol) || !vp.is_symmetric(tol) || !c.is_symmetric(tol) {
            return Err(Error::Domain("V, V' and C must be symmetric".into()));
        }
        Ok(VState { v, vp, c })
    }

    /// (F, B) = (CVC⁻¹ − V, CV′C⁻¹ + V′ − F²).
    pub fn to_chain(&self) -> Result<ChainState> {
        let ci = self.c.inverse()?;
        let f = &(&(&self.c * &self.v) * &ci) - &self.v;
        let b = &(&(&(&self.c * &self.vp) * &ci) + &self.vp) - &(&f * &f);
        ChainState::new(f, b, self.c.clone(), r(0.0))
    }
}

/// V″ from the reduced equation.
pub fn vxx_rhs(solver: &AnticommutatorSolver, ci: &CMatrix, v: &CMatrix, vp: &CMatrix) -> CMatrix {
    solver.solve(&vp.commutator(&v.commutator(ci)).scale_real(2.0))
}

/// ‖V″C⁻¹ + C⁻¹V″ − 2[V′, [V, C⁻¹]]‖ for given V, V′, V″.
pub fn vxx_residual(c: &CMatrix, v: &CMatrix, vp: &CMatrix, vpp: &CMatrix) -> Result<f64> {
    let ci = c.inverse()?;
    let lhs = vpp.anticommutator(&ci);
    let rhs = vp.commutator(&v.commutator(&ci)).scale_real(2.0);
    Ok((&lhs - &rhs).norm())
}

/// Integrated V-flow.
#[derive(Clone, Debug)]
pub struct VTrajectory {
    pub c: CMatrix,
    pub traj: Trajectory,
}

impl VTrajectory {
    pub fn at(&self, x: f64) -> VState {
        let d = self.c.dim();
        let y = self.traj.eval(x);
        VState {
            v: CMatrix::from_vec(d, y[..d * d].to_vec()),
            vp: CMatrix::from_vec(d, y[d * d..].to_vec()),
            c: self.c.clone(),
        }
    }

    /// U = 2V′.
    pub fn potential(&self, x: f64) -> CMatrix {
        self.at(x).vp.scale_real(2.0)
    }

    /// max symmetry defect of V along the nodes.
    pub fn symmetry_drift(&self) -> f64 {
        self.traj
            .times()
            .iter()
            .map(|&x| {
                let v = self.at(x).v;
                (&v - &v.transpose()).norm() / v.norm().max(1.0)
            })
            .fold(0.0, f64::max)
    }
}

/// Integrate the second-order V equation from x = 0 to `t_end`.
pub fn integrate_vxx(v0: &VState, t_end: f64) -> Result<VTrajectory> {
    let d = v0.c.dim();
    let ci = v0.c.inverse()?;
    let solver = AnticommutatorSolver::new(&ci)?;
    let mut y0 = v0.v.as_slice().to_vec();
    y0.extend_from_slice(v0.vp.as_slice());
    let n = d * d;
    let mut setup = OdeSetup::new(2 * n, move |_t, y: &[C64], dy: &mut [C64]| {
        let v = CMatrix::from_vec(d, y[..n].to_vec());
        let vp = CMatrix::from_vec(d, y[n..].to_vec());
        dy[..n].copy_from_slice(&y[n..]);
        dy[n..].copy_from_slice(vxx_rhs(&solver, &ci, &v, &vp).as_slice());
    })
    .tolerances(DEFAULT_RTOL, DEFAULT_ATOL);
    let traj = setup.integrate(&y0, (0.0_f64.min(t_end), 0.0_f64.max(t_end)))?;
    Ok(VTrajectory { c: v0.c.clone(), traj })
}
