//! Linearization of the chain: φ′ = −Fφ, B = φΛφ⁻¹.

use super::chain::{ChainSystem, ChainTrajectory};
use crate::error::{Error, Result};
use crate::numerics::{CMatrix, OdeSetup, Trajectory, C64, DEFAULT_ATOL, DEFAULT_RTOL};

/// Frame φ and constant Λ at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearizationData {
    pub phi: CMatrix,
    pub lambda: CMatrix,
}

/// Frame co-integrated with the chain.
#[derive(Clone, Debug)]
pub struct FrameTrajectory {
    sys: ChainSystem,
    traj: Trajectory,
    lambda: CMatrix,
}

const COND_LIMIT: f64 = 1e12;

/// Integrate φ′ = −Fφ alongside the chain, starting from φ₀ at the start of
/// `tr`. With F = Ω for the top this is the body-frame motion ġ = −Ωg; the
/// transpose g⊤ satisfies the other common convention ġ⊤ = g⊤Ω.
pub fn reconstruct_frame(tr: &ChainTrajectory, lambda: &CMatrix, phi0: &CMatrix) -> Result<FrameTrajectory> {
    let d = tr.dim();
    if phi0.cond() > COND_LIMIT {
        return Err(Error::FrameDegenerate(phi0.cond()));
    }
    let t0 = tr.traj.t_start();
    let t1 = tr.traj.t_end();
    let mut y0 = tr.traj.eval(t0);
    y0.extend_from_slice(phi0.as_slice());
    let sys = tr.sys.clone();
    let s2 = sys.clone();
    let n = 2 * d * d;
    let mut setup = OdeSetup::new(3 * d * d, move |_t, y: &[C64], dy: &mut [C64]| {
        s2.rhs_packed(&y[..n], &mut dy[..n]);
        let f = CMatrix::from_vec(d, y[..d * d].to_vec());
        let phi = CMatrix::from_vec(d, y[n..].to_vec());
        let dphi = -(&f * &phi);
        dy[n..].copy_from_slice(dphi.as_slice());
    })
    .tolerances(DEFAULT_RTOL, DEFAULT_ATOL);
    let traj = setup.integrate(&y0, (t0, t1))?;
    let ft = FrameTrajectory { sys, traj, lambda: lambda.clone() };
    for &x in ft.traj.times() {
        let cond = ft.phi(x).cond();
        if cond > COND_LIMIT {
            return Err(Error::FrameDegenerate(cond));
        }
    }
    Ok(ft)
}

impl FrameTrajectory {
    pub fn phi(&self, x: f64) -> CMatrix {
        let d = self.sys.dim();
        let y = self.traj.eval(x);
        CMatrix::from_vec(d, y[2 * d * d..].to_vec())
    }

    pub fn data(&self, x: f64) -> LinearizationData {
        LinearizationData { phi: self.phi(x), lambda: self.lambda.clone() }
    }

    pub fn b(&self, x: f64) -> CMatrix {
        self.sys.unpack(&self.traj.eval(x)).1
    }

    pub fn times(&self) -> &[f64] {
        self.traj.times()
    }

    /// max ‖B − φΛφ⁻¹‖ over the integrator nodes.
    pub fn b_drift(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for &x in self.traj.times() {
            let phi = self.phi(x);
            let rec = &(&phi * &self.lambda) * &phi.inverse()?;
            worst = worst.max((&self.b(x) - &rec).norm());
        }
        Ok(worst)
    }

    /// max ‖φ⊤φ − I‖ over the integrator nodes.
    pub fn orthogonality_drift(&self) -> f64 {
        let d = self.sys.dim();
        self.traj
            .times()
            .iter()
            .map(|&x| {
                let p = self.phi(x);
                (&(&p.transpose() * &p) - &CMatrix::identity(d)).norm()
            })
            .fold(0.0, f64::max)
    }
}
