//! Chain state, right-hand side and trajectories.

use crate::error::{Error, Result};
use crate::numerics::{r, AnticommutatorSolver, CMatrix, OdeSetup, Trajectory, C64};

/// Symmetry reduction carried by a chain state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ReductionTag {
    #[default]
    None,
    /// F skew, B and C symmetric (rigid-body reduction).
    Top,
    /// B = 0, F = Fᵀ, CCᵀ = I; gives U = Uᵀ.
    RealSymmetric,
    /// B = 0, F = F*, CC* = I; gives U = U*.
    Hermitian,
}

/// Phase point (F, B) of the period-one chain with constant C and α.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainState {
    pub f: CMatrix,
    pub b: CMatrix,
    pub c: CMatrix,
    pub alpha: C64,
    pub tag: ReductionTag,
}

const TAG_TOL: f64 = 1e-10;

impl ChainState {
    /// Validates dimensions and the condition cᵢ + cⱼ ≠ 0.
    pub fn new(f: CMatrix, b: CMatrix, c: CMatrix, alpha: C64) -> Result<Self> {
        let d = c.dim();
        if f.dim() != d || b.dim() != d {
            return Err(Error::DimensionMismatch(format!(
                "F is {0}x{0}, B is {1}x{1}, C is {2}x{2}",
                f.dim(),
                b.dim(),
                d
            )));
        }
        AnticommutatorSolver::new(&c)?;
        Ok(ChainState { f, b, c, alpha, tag: ReductionTag::None })
    }

    /// Attach a reduction tag after checking its symmetries to 1e−10.
    pub fn with_tag(mut self, tag: ReductionTag) -> Result<Self> {
        let ok = match tag {
            ReductionTag::None => true,
            ReductionTag::Top => {
                self.f.is_skew(TAG_TOL) && self.b.is_symmetric(TAG_TOL) && self.c.is_symmetric(TAG_TOL)
            }
            ReductionTag::RealSymmetric => {
                let id = CMatrix::identity(self.dim());
                self.b.norm() <= TAG_TOL * (1.0 + self.f.norm())
                    && self.f.is_symmetric(TAG_TOL)
                    && (&(&self.c * &self.c.transpose()) - &id).norm() <= TAG_TOL
            }
            ReductionTag::Hermitian => {
                let id = CMatrix::identity(self.dim());
                self.b.norm() <= TAG_TOL * (1.0 + self.f.norm())
                    && self.f.is_hermitian(TAG_TOL)
                    && (&(&self.c * &self.c.adjoint()) - &id).norm() <= TAG_TOL
            }
        };
        if !ok {
            return Err(Error::Domain(format!("state does not satisfy the {tag:?} reduction")));
        }
        self.tag = tag;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.c.dim()
    }

    /// Replace (F, B), keeping C, α and the tag.
    pub fn with_fb(&self, f: CMatrix, b: CMatrix) -> ChainState {
        ChainState { f, b, c: self.c.clone(), alpha: self.alpha, tag: self.tag }
    }

    /// Symmetry defect of the tagged reduction (0 for untagged states).
    pub fn tag_defect(&self) -> f64 {
        let s = |m: &CMatrix| m.norm().max(1.0);
        match self.tag {
            ReductionTag::None => 0.0,
            ReductionTag::Top => {
                ((&self.f + &self.f.transpose()).norm() / s(&self.f)).max((&self.b - &self.b.transpose()).norm() / s(&self.b))
            }
            ReductionTag::RealSymmetric => {
                ((&self.f - &self.f.transpose()).norm() / s(&self.f)).max(self.b.norm() / s(&self.f))
            }
            ReductionTag::Hermitian => {
                ((&self.f - &self.f.adjoint()).norm() / s(&self.f)).max(self.b.norm() / s(&self.f))
            }
        }
    }

    pub fn pack(&self) -> Vec<C64> {
        let mut y = self.f.as_slice().to_vec();
        y.extend_from_slice(self.b.as_slice());
        y
    }
}

/// Pre-factored right-hand side for a fixed (C, α).
#[derive(Clone, Debug)]
pub struct ChainSystem {
    pub c: CMatrix,
    pub alpha: C64,
    solver: AnticommutatorSolver,
    c_inv: CMatrix,
}

impl ChainSystem {
    pub fn new(c: &CMatrix, alpha: C64) -> Result<Self> {
        let solver = AnticommutatorSolver::new(c)?;
        let c_inv = c.inverse()?;
        Ok(ChainSystem { c: c.clone(), alpha, solver, c_inv })
    }

    pub fn for_state(s: &ChainState) -> Result<Self> {
        Self::new(&s.c, s.alpha)
    }

    pub fn dim(&self) -> usize {
        self.c.dim()
    }

    pub fn c_inv(&self) -> &CMatrix {
        &self.c_inv
    }

    /// Solve CX + XC = R.
    pub fn solve(&self, rhs: &CMatrix) -> CMatrix {
        self.solver.solve(rhs)
    }

    /// (F′, B′) at (F, B).
    pub fn rhs(&self, f: &CMatrix, b: &CMatrix) -> (CMatrix, CMatrix) {
        let g = &(f * f) + b;
        let mut rr = self.c.commutator(&g);
        rr += &self.c.scale(self.alpha * 2.0);
        (self.solver.solve(&rr), b.commutator(f))
    }

    /// F″ obtained by differentiating the chain relation once more.
    pub fn f_second(&self, f: &CMatrix, _b: &CMatrix, fp: &CMatrix, bp: &CMatrix) -> CMatrix {
        let gp = &(&(fp * f) + &(f * fp)) + bp;
        self.solver.solve(&self.c.commutator(&gp))
    }

    pub fn unpack(&self, y: &[C64]) -> (CMatrix, CMatrix) {
        let d = self.dim();
        (CMatrix::from_vec(d, y[..d * d].to_vec()), CMatrix::from_vec(d, y[d * d..2 * d * d].to_vec()))
    }

    /// In-place packed right-hand side, for the integrator.
    pub fn rhs_packed(&self, y: &[C64], dy: &mut [C64]) {
        let d2 = self.dim() * self.dim();
        let (f, b) = self.unpack(y);
        let (fp, bp) = self.rhs(&f, &b);
        dy[..d2].copy_from_slice(fp.as_slice());
        dy[d2..2 * d2].copy_from_slice(bp.as_slice());
    }

    /// U = −F′ + F² + B with F′ from the chain relation.
    pub fn potential(&self, f: &CMatrix, b: &CMatrix) -> CMatrix {
        let (fp, _) = self.rhs(f, b);
        &(&(f * f) + b) - &fp
    }

    /// Dressed potential CUC⁻¹ + 2αI of the period-one closure.
    pub fn conjugated(&self, u: &CMatrix) -> CMatrix {
        let mut m = &(&self.c * u) * &self.c_inv;
        m += &CMatrix::scalar(self.dim(), self.alpha * 2.0);
        m
    }
}

/// (F′, B′) for a single state.
pub fn chain_rhs(s: &ChainState) -> Result<(CMatrix, CMatrix)> {
    Ok(ChainSystem::for_state(s)?.rhs(&s.f, &s.b))
}

/// U = −F′ + F² + B, exact (F′ from the chain relation).
pub fn potential(s: &ChainState) -> Result<CMatrix> {
    Ok(ChainSystem::for_state(s)?.potential(&s.f, &s.b))
}

/// The Lax matrix 𝓛 = μ²C² − μ(CF + FC) − B.
pub fn lax_matrix(s: &ChainState, mu: C64) -> CMatrix {
    lax_from(&s.c, &s.f, &s.b, mu)
}

pub(crate) fn lax_from(c: &CMatrix, f: &CMatrix, b: &CMatrix, mu: C64) -> CMatrix {
    let c2 = c * c;
    &(&c2.scale(mu * mu) - &c.anticommutator(f).scale(mu)) - b
}

/// The companion 𝓐 = F − μC.
pub fn lax_companion(s: &ChainState, mu: C64) -> CMatrix {
    &s.f - &s.c.scale(mu)
}

/// Integrated chain with the system that generated it.
#[derive(Clone, Debug)]
pub struct ChainTrajectory {
    pub sys: ChainSystem,
    pub traj: Trajectory,
    pub tag: ReductionTag,
}

/// Integrate the chain from `s0` at x = 0 to `t_end` with the given relative
/// tolerance (absolute tolerance is 1e−2 of it).
pub fn integrate_chain(s0: &ChainState, t_end: f64, tol: f64) -> Result<ChainTrajectory> {
    integrate_chain_span(s0, 0.0, (0.0_f64.min(t_end), 0.0_f64.max(t_end)), tol)
}

/// Integrate from `s0` at x = `t0` over `span` (both directions as needed).
pub fn integrate_chain_span(s0: &ChainState, t0: f64, span: (f64, f64), tol: f64) -> Result<ChainTrajectory> {
    let sys = ChainSystem::for_state(s0)?;
    let d = s0.dim();
    let y0 = s0.pack();
    let sys2 = sys.clone();
    let mut setup = OdeSetup::new(2 * d * d, move |_t, y: &[C64], dy: &mut [C64]| sys2.rhs_packed(y, dy))
        .tolerances(tol, tol * 1e-2);
    let traj = setup.integrate_two_sided(&y0, t0, span)?;
    Ok(ChainTrajectory { sys, traj, tag: s0.tag })
}

impl ChainTrajectory {
    pub fn dim(&self) -> usize {
        self.sys.dim()
    }

    pub fn fb(&self, x: f64) -> (CMatrix, CMatrix) {
        self.sys.unpack(&self.traj.eval(x))
    }

    pub fn state(&self, x: f64) -> ChainState {
        let (f, b) = self.fb(x);
        ChainState { f, b, c: self.sys.c.clone(), alpha: self.sys.alpha, tag: self.tag }
    }

    /// (F′, B′) from differentiating the dense output (not the chain relation).
    pub fn fb_dense_deriv(&self, x: f64) -> (CMatrix, CMatrix) {
        self.sys.unpack(&self.traj.deriv(x))
    }

    pub fn potential(&self, x: f64) -> CMatrix {
        let (f, b) = self.fb(x);
        self.sys.potential(&f, &b)
    }

    /// Sample points: the integrator nodes plus the midpoints between them,
    /// thinned to at most `max` points.
    pub fn sample_points(&self, max: usize) -> Vec<f64> {
        let t = self.traj.times();
        let mut pts = Vec::with_capacity(2 * t.len());
        for w in t.windows(2) {
            pts.push(w[0]);
            pts.push(0.5 * (w[0] + w[1]));
        }
        pts.push(*t.last().unwrap());
        let stride = pts.len().div_ceil(max.max(1)).max(1);
        pts.into_iter().step_by(stride).collect()
    }

    /// max over samples of the reduction-symmetry defect.
    pub fn symmetry_drift(&self) -> f64 {
        self.sample_points(400).iter().map(|&x| self.state(x).tag_defect()).fold(0.0, f64::max)
    }

    /// max |tr F′ − dα| along the trajectory.
    pub fn trace_law_drift(&self) -> f64 {
        let d = self.dim() as f64;
        self.sample_points(400)
            .iter()
            .map(|&x| {
                let (f, b) = self.fb(x);
                let (fp, _) = self.sys.rhs(&f, &b);
                (fp.trace() - self.sys.alpha * d).norm()
            })
            .fold(0.0, f64::max)
    }
}

/// max over sampled x of ‖𝓛′ − [𝓛, 𝓐] + 2μαC‖ with 𝓛′ from the dense output.
pub fn lax_residual(tr: &ChainTrajectory, mu: C64) -> f64 {
    let c = &tr.sys.c;
    let alpha = tr.sys.alpha;
    let ctimes = c.scale(mu * alpha * 2.0);
    tr.sample_points(2000)
        .iter()
        .map(|&x| {
            let (f, b) = tr.fb(x);
            let (fp, bp) = tr.fb_dense_deriv(x);
            let l = lax_from(c, &f, &b, mu);
            let a = &f - &c.scale(mu);
            let lp = &(-&c.anticommutator(&fp).scale(mu)) - &bp;
            (&(&lp - &l.commutator(&a)) + &ctimes).norm()
        })
        .fold(0.0, f64::max)
}

/// Block matrices Û = [[0, I], [U − λ, 0]] and F̂ = [[F, I], [F² + B − λ, F]].
fn hat_u(u: &CMatrix, lambda: C64) -> CMatrix {
    let d = u.dim();
    let z = CMatrix::zeros(d);
    let id = CMatrix::identity(d);
    let ul = u - &CMatrix::scalar(d, lambda);
    CMatrix::from_blocks(&[vec![z.clone(), id], vec![ul, z]])
}

/// max over sampled x of ‖F̂′ − Û₁F̂ + F̂Û₀‖, where Û₁ uses CUC⁻¹ + 2αI and
/// F̂′ comes from the dense output.
pub fn zero_curvature_residual(tr: &ChainTrajectory, lambda: C64) -> f64 {
    let d = tr.dim();
    let id = CMatrix::identity(d);
    let lam = CMatrix::scalar(d, lambda);
    tr.sample_points(2000)
        .iter()
        .map(|&x| {
            let (f, b) = tr.fb(x);
            let (fp, bp) = tr.fb_dense_deriv(x);
            let u0 = tr.sys.potential(&f, &b);
            let u1 = tr.sys.conjugated(&u0);
            let g = &(&(&f * &f) + &b) - &lam;
            let fhat = CMatrix::from_blocks(&[vec![f.clone(), id.clone()], vec![g, f.clone()]]);
            let gp = &(&(&fp * &f) + &(&f * &fp)) + &bp;
            let fhat_p = CMatrix::from_blocks(&[vec![fp.clone(), CMatrix::zeros(d)], vec![gp, fp.clone()]]);
            let res = &(&fhat_p - &(&hat_u(&u1, lambda) * &fhat)) + &(&fhat * &hat_u(&u0, lambda));
            res.norm()
        })
        .fold(0.0, f64::max)
}

/// Largest relative change of the Lax spectrum at each μ over the samples.
pub fn lax_spectrum_drift(tr: &ChainTrajectory, mus: &[C64], n_samples: usize) -> Result<f64> {
    let xs = tr.traj.sample_times(n_samples);
    let mut worst: f64 = 0.0;
    for &mu in mus {
        let e0 = crate::numerics::eigenvalues(&lax_matrix(&tr.state(xs[0]), mu))?;
        let scale = e0.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
        for &x in &xs[1..] {
            let e = crate::numerics::eigenvalues(&lax_matrix(&tr.state(x), mu))?;
            worst = worst.max(crate::numerics::multiset_distance(&e, &e0) / scale);
        }
    }
    Ok(worst)
}

/// Darboux pair (U, Ũ = U + 2F′) along the chain through `s`, sampled from
/// the trajectory integrated over `span`.
pub fn darboux_step(
    s: &ChainState,
    span: (f64, f64),
) -> Result<(crate::spectral::PotentialEvaluator, crate::spectral::PotentialEvaluator)> {
    let tr = std::sync::Arc::new(integrate_chain_span(s, 0.0, span, crate::numerics::DEFAULT_RTOL)?);
    let d = s.dim();
    let t1 = tr.clone();
    let u = crate::spectral::PotentialEvaluator::closed(d, None, move |x| t1.potential(x));
    let t2 = tr;
    let ut = crate::spectral::PotentialEvaluator::closed(d, None, move |x| {
        let (f, b) = t2.fb(x);
        let (fp, _) = t2.sys.rhs(&f, &b);
        &t2.sys.potential(&f, &b) + &fp.scale_real(2.0)
    });
    Ok((u, ut))
}

/// A fixed point (F = 0, B commuting with C, α = 0) for smoke tests.
pub fn fixed_point(c: &CMatrix, b: &CMatrix) -> Result<ChainState> {
    ChainState::new(CMatrix::zeros(c.dim()), b.clone(), c.clone(), r(0.0))
}
