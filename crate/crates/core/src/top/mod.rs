//! The Bogoyavlenskij top Ṁ = [M, Ω] − [P, J], Ṗ = [P, Ω] with M = JΩ + ΩJ,
//! which is the reduction F = Ω, B = P, C = J, α = 0 of the dressing chain.

pub mod fig2;
pub mod pendulum;

pub use fig2::{fig2_sets, Fig2Params};
pub use pendulum::{
    pendulum_bands, pendulum_closed_form, pendulum_curve, pendulum_period, pendulum_residual, PendulumCase,
    PendulumParams,
};

use std::sync::Arc;

use crate::dressing::chain::{integrate_chain, lax_from, ChainState, ChainSystem, ChainTrajectory, ReductionTag};
use crate::dressing::residuals::commute_residual_with;
use crate::error::{Error, Result};
use crate::numerics::{r, symmetric_eigen, CMatrix, GaussPoly, Grid, OdeSetup, C64, DEFAULT_ATOL, DEFAULT_RTOL};
use crate::spectral::{curve_from_lax, BivariatePoly, GeneratingOde, PotentialEvaluator};

const SYM_TOL: f64 = 1e-10;

/// Rigid-body phase point (Ω skew, P symmetric, J diagonal positive and
/// nonincreasing), all real.
#[derive(Clone, Debug, PartialEq)]
pub struct TopState {
    pub omega: CMatrix,
    pub p: CMatrix,
    pub j: CMatrix,
}

impl TopState {
    /// Validate a state whose J is already diagonal with J₁ ≥ … ≥ J_d > 0.
    pub fn new(omega: CMatrix, p: CMatrix, j: CMatrix) -> Result<Self> {
        let d = j.dim();
        if omega.dim() != d || p.dim() != d {
            return Err(Error::DimensionMismatch("Omega, P and J must have equal size".into()));
        }
        if !omega.is_real(SYM_TOL) || !p.is_real(SYM_TOL) || !j.is_real(SYM_TOL) {
            return Err(Error::Domain("top state must be real".into()));
        }
        if !omega.is_skew(SYM_TOL) || !p.is_symmetric(SYM_TOL) {
            return Err(Error::Domain("Omega must be skew and P symmetric".into()));
        }
        for a in 0..d {
            for b in 0..d {
                if a != b && j[(a, b)].norm() > 0.0 {
                    return Err(Error::Domain("J must be diagonal; use TopState::canonical".into()));
                }
            }
        }
        let jd: Vec<f64> = (0..d).map(|k| j[(k, k)].re).collect();
        if jd.iter().any(|&x| !(x > 0.0)) || jd.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Domain("J must be positive with nonincreasing entries".into()));
        }
        Ok(TopState { omega, p, j })
    }

    /// Canonicalize a general symmetric positive J by an orthogonal change
    /// of frame Q: (Ω, P, J) ↦ (QᵀΩQ, QᵀPQ, QᵀJQ) with QᵀJQ diagonal and
    /// nonincreasing. Returns the state and Q.
    pub fn canonical(omega: CMatrix, p: CMatrix, j: CMatrix) -> Result<(Self, CMatrix)> {
        let d = j.dim();
        if !j.is_symmetric(SYM_TOL) || !j.is_real(SYM_TOL) {
            return Err(Error::Domain("J must be real symmetric".into()));
        }
        let rows: Vec<Vec<f64>> = (0..d).map(|a| (0..d).map(|b| j[(a, b)].re).collect()).collect();
        let (vals, vecs) = symmetric_eigen(&rows);
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
        let mut q = CMatrix::zeros(d);
        for (col, &k) in order.iter().enumerate() {
            for row in 0..d {
                q[(row, col)] = r(vecs[row][k]);
            }
        }
        let qt = q.transpose();
        let conj = |m: &CMatrix| &(&qt * m) * &q;
        let jd: Vec<f64> = order.iter().map(|&k| vals[k]).collect();
        let mut om = conj(&omega);
        let mut pp = conj(&p);
        // Remove rounding asymmetry introduced by the rotation.
        om = (&om - &om.transpose()).scale_real(0.5);
        pp = (&pp + &pp.transpose()).scale_real(0.5);
        Ok((TopState::new(om, pp, CMatrix::diag_real(&jd))?, q))
    }

    pub fn dim(&self) -> usize {
        self.j.dim()
    }

    /// Angular momentum M = JΩ + ΩJ.
    pub fn m(&self) -> CMatrix {
        self.j.anticommutator(&self.omega)
    }

    /// The chain state F = Ω, B = P, C = J, α = 0 tagged as a top reduction.
    pub fn to_chain(&self) -> ChainState {
        ChainState::new(self.omega.clone(), self.p.clone(), self.j.clone(), r(0.0))
            .and_then(|s| s.with_tag(ReductionTag::Top))
            .expect("valid top states give valid chain states")
    }

    pub fn from_chain(s: &ChainState) -> Result<TopState> {
        TopState::new(s.f.clone(), s.b.clone(), s.c.clone())
    }
}

/// (Ω̇, Ṗ): Ṁ = [M, Ω] − [P, J], Ω̇ solves JΩ̇ + Ω̇J = Ṁ, Ṗ = [P, Ω].
pub fn top_rhs(s: &TopState) -> (CMatrix, CMatrix) {
    let m = s.m();
    let mdot = &m.commutator(&s.omega) - &s.p.commutator(&s.j);
    let odot = crate::numerics::solve_anticommutator(&s.j, &mdot).expect("J positive, so Ji + Jj > 0");
    (odot, s.p.commutator(&s.omega))
}

/// Conserved quantities of a top state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TopInvariants {
    /// H = ½ tr(MΩ) − tr(PJ).
    pub h: f64,
    /// d = 2 only: R² = u² + v².
    pub casimir_r2: Option<f64>,
    /// d = 2 only: H₀ = ω² + βu.
    pub h0: Option<f64>,
}

/// (u, v, ω) of a 2×2 state, with u, v from the traceless part of P.
pub fn pendulum_coordinates(s: &TopState) -> Option<(f64, f64, f64)> {
    if s.dim() != 2 {
        return None;
    }
    let u = 0.5 * (s.p[(0, 0)].re - s.p[(1, 1)].re);
    Some((u, s.p[(0, 1)].re, s.omega[(0, 1)].re))
}

pub fn invariants(s: &TopState) -> TopInvariants {
    let h = 0.5 * (&s.m() * &s.omega).trace().re - (&s.p * &s.j).trace().re;
    match pendulum_coordinates(s) {
        Some((u, v, w)) => {
            let (j1, j2) = (s.j[(0, 0)].re, s.j[(1, 1)].re);
            let beta = (j1 - j2) / (j1 + j2);
            TopInvariants { h, casimir_r2: Some(u * u + v * v), h0: Some(w * w + beta * u) }
        }
        None => TopInvariants { h, casimir_r2: None, h0: None },
    }
}

/// Trajectory of the top, stored as a chain trajectory.
#[derive(Clone, Debug)]
pub struct TopTrajectory {
    pub chain: ChainTrajectory,
}

impl TopTrajectory {
    pub fn state(&self, t: f64) -> TopState {
        let s = self.chain.state(t);
        TopState { omega: s.f, p: s.b, j: s.c }
    }

    pub fn times(&self) -> &[f64] {
        self.chain.traj.times()
    }

    /// Largest drift of H (and, for d = 2, of R² and H₀) relative to max(1, |value|).
    pub fn invariant_drift(&self) -> f64 {
        let i0 = invariants(&self.state(self.chain.traj.t_start()));
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);
        self.chain
            .sample_points(2000)
            .iter()
            .map(|&t| {
                let i = invariants(&self.state(t));
                let mut w = rel(i.h, i0.h);
                if let (Some(a), Some(b)) = (i.casimir_r2, i0.casimir_r2) {
                    w = w.max(rel(a, b));
                }
                if let (Some(a), Some(b)) = (i.h0, i0.h0) {
                    w = w.max(rel(a, b));
                }
                w
            })
            .fold(0.0, f64::max)
    }
}

/// Integrate the top from t = 0 to `t_end` at the default tolerances.
pub fn integrate_top(s: &TopState, t_end: f64) -> Result<TopTrajectory> {
    Ok(TopTrajectory { chain: integrate_chain(&s.to_chain(), t_end, DEFAULT_RTOL)? })
}

/// Spectral curve det(μ²J² − μM − P + λI) by evaluation–interpolation.
pub fn top_spectral_curve(s: &TopState) -> Result<BivariatePoly> {
    let (j, f, b) = (s.j.clone(), s.omega.clone(), s.p.clone());
    curve_from_lax(move |mu| lax_from(&j, &f, &b, mu), s.dim())
}

/// S U S⁻¹ with S = √J.
pub fn symmetrize(j: &CMatrix, u: &CMatrix) -> CMatrix {
    let s = j.sqrt_diag();
    let si = s.inverse().expect("J positive");
    &(&s * u) * &si
}

/// The generating system of a top potential: (Ω, P) integrated alongside,
/// U = Ω² − Ω′ + P (or its symmetrization SUS⁻¹).
pub struct TopOde {
    state: TopState,
    sys: ChainSystem,
    symmetrized: bool,
}

impl TopOde {
    pub fn new(state: &TopState, symmetrized: bool) -> Self {
        let sys = ChainSystem::new(&state.j, r(0.0)).expect("J positive");
        TopOde { state: state.clone(), sys, symmetrized }
    }
}

impl GeneratingOde for TopOde {
    fn state_dim(&self) -> usize {
        2 * self.state.dim() * self.state.dim()
    }
    fn potential_dim(&self) -> usize {
        self.state.dim()
    }
    fn x0(&self) -> f64 {
        0.0
    }
    fn y0(&self) -> Vec<C64> {
        self.state.to_chain().pack()
    }
    fn rhs(&self, _x: f64, y: &[C64], dy: &mut [C64]) {
        self.sys.rhs_packed(y, dy);
    }
    fn potential(&self, _x: f64, y: &[C64]) -> CMatrix {
        let (f, b) = self.sys.unpack(y);
        let u = self.sys.potential(&f, &b);
        if self.symmetrized {
            symmetrize(&self.state.j, &u)
        } else {
            u
        }
    }
}

/// The Schrödinger potential U(x) = Ω² − Ω′ + P along the top trajectory
/// through `s` (time read as x), optionally symmetrized by S = √J. With a
/// period the trajectory is checked to close after one period.
pub fn top_potential(s: &TopState, period: Option<f64>, span: (f64, f64), symmetrized: bool) -> Result<PotentialEvaluator> {
    PotentialEvaluator::generated(Arc::new(TopOde::new(s, symmetrized)), period, span)
}

/// max ‖[L, J⁻¹(D + Ω)]ψ‖ over test functions on the grid, for the top
/// trajectory through `s` at x = 0; `delta` perturbs U (negative control).
pub fn commuting_operator_residual(s: &TopState, testfns: &[GaussPoly], grid: &Grid, delta: Option<&CMatrix>) -> Result<f64> {
    let chain = s.to_chain();
    let sys = ChainSystem::for_state(&chain)?;
    let tr = crate::dressing::chain::integrate_chain_span(&chain, 0.0, (grid.a.min(0.0), grid.b.max(0.0)), DEFAULT_RTOL)?;
    commute_residual_with(&sys, |x| tr.traj.eval(x), testfns, grid, delta)
}

/// Result of [`bloch_norm_identity_residual`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochNormCheck {
    /// max |d/dx |ψ|² − (μ + μ̄) ψ†Jψ| relative to max |ψ|².
    pub identity_residual: f64,
    /// max ‖(𝓛 + λ)ψ‖ / ‖ψ‖ along the solution.
    pub kernel_residual: f64,
    /// (max |ψ|² − min |ψ|²) / max |ψ|².
    pub norm_variation: f64,
    /// log(|ψ(x₁)|² / |ψ(0)|²) / x₁.
    pub growth_rate: f64,
}

/// Integrate ψ′ = (μJ − Ω)ψ along the top trajectory from the kernel vector
/// of 𝓛(μ) + λI at x = 0 and check d/dx|ψ|² = (μ + μ̄)ψ†Jψ.
pub fn bloch_norm_identity_residual(s: &TopState, mu: C64, lambda: f64, x1: f64) -> Result<BlochNormCheck> {
    let d = s.dim();
    let lam = r(lambda);
    let l0 = &lax_from(&s.j, &s.omega, &s.p, mu) + &CMatrix::scalar(d, lam);
    let curve_res = l0.det().norm() / l0.norm().powi(d as i32).max(1.0);
    if curve_res > 1e-8 {
        return Err(Error::OffCurve(curve_res));
    }
    let psi0 = kernel_vector(&l0);
    let sys = ChainSystem::new(&s.j, r(0.0))?;
    let n = 2 * d * d;
    let mut y0 = s.to_chain().pack();
    y0.extend_from_slice(&psi0);
    let j = s.j.clone();
    let mut setup = OdeSetup::new(n + d, |_x, y: &[C64], dy: &mut [C64]| {
        sys.rhs_packed(&y[..n], &mut dy[..n]);
        let (f, _) = sys.unpack(&y[..n]);
        let a = &j.scale(mu) - &f;
        dy[n..].copy_from_slice(&a.mul_vec(&y[n..]));
    })
    .tolerances(DEFAULT_RTOL, DEFAULT_ATOL);
    let tr = setup.integrate(&y0, (0.0, x1))?;
    let mut id_res: f64 = 0.0;
    let mut ker: f64 = 0.0;
    let (mut nmax, mut nmin) = (0.0f64, f64::INFINITY);
    let norms: Vec<(f64, f64, f64, f64)> = tr
        .sample_times(400)
        .into_iter()
        .map(|x| {
            let y = tr.eval(x);
            let yp = tr.deriv(x);
            let psi = &y[n..];
            let dpsi = &yp[n..];
            let nrm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
            let dn: f64 = psi.iter().zip(dpsi).map(|(a, b)| 2.0 * (a.conj() * b).re).sum();
            let jq: f64 = (0..d).map(|k| s.j[(k, k)].re * psi[k].norm_sqr()).sum();
            let (f, b) = sys.unpack(&y[..n]);
            let l = &lax_from(&s.j, &f, &b, mu) + &CMatrix::scalar(d, lam);
            let kv = l.mul_vec(psi).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() / nrm.sqrt();
            (nrm, (dn - 2.0 * mu.re * jq).abs(), kv, x)
        })
        .collect();
    for &(nrm, res, kv, _) in &norms {
        nmax = nmax.max(nrm);
        nmin = nmin.min(nrm);
        id_res = id_res.max(res);
        ker = ker.max(kv);
    }
    let (first, last) = (norms[0], norms[norms.len() - 1]);
    Ok(BlochNormCheck {
        identity_residual: id_res / nmax,
        kernel_residual: ker,
        norm_variation: (nmax - nmin) / nmax,
        growth_rate: (last.0 / first.0).ln() / (last.3 - first.3),
    })
}

/// A unit vector spanning (approximately) the kernel of a singular matrix:
/// the row of the adjugate with the largest norm, via cofactors of the
/// best-conditioned minor.
fn kernel_vector(m: &CMatrix) -> Vec<C64> {
    let d = m.dim();
    if d == 1 {
        return vec![r(1.0)];
    }
    // Solve with one pivot column fixed to 1: for each k, drop equation
    // row i and set x_k = 1; pick the combination with smallest residual.
    let mut best: Option<(f64, Vec<C64>)> = None;
    for k in 0..d {
        for i in 0..d {
            let rows: Vec<usize> = (0..d).filter(|&a| a != i).collect();
            let cols: Vec<usize> = (0..d).filter(|&b| b != k).collect();
            let mut a = CMatrix::zeros(d - 1);
            let mut rhs = vec![r(0.0); d - 1];
            for (ri, &ra) in rows.iter().enumerate() {
                for (ci, &cb) in cols.iter().enumerate() {
                    a[(ri, ci)] = m[(ra, cb)];
                }
                rhs[ri] = -m[(ra, k)];
            }
            if let Ok(lu) = a.lu() {
                if lu.pivot_ratio() < 1e-12 {
                    continue;
                }
                let sol = lu.solve(&rhs);
                let mut x = vec![r(0.0); d];
                x[k] = r(1.0);
                for (ci, &cb) in cols.iter().enumerate() {
                    x[cb] = sol[ci];
                }
                let nrm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                for z in x.iter_mut() {
                    *z /= nrm;
                }
                let res = m.mul_vec(&x).iter().map(|z| z.norm()).fold(0.0, f64::max);
                if best.as_ref().is_none_or(|b| res < b.0) {
                    best = Some((res, x));
                }
            }
        }
    }
    best.map(|b| b.1).unwrap_or_else(|| {
        let mut e = vec![r(0.0); d];
        e[0] = r(1.0);
        e
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dressing::chain_rhs;
    use crate::numerics::{c, eigenvalues};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_top(g: &mut ChaCha8Rng, d: usize) -> TopState {
        let mut om = CMatrix::zeros(d);
        let mut p = CMatrix::zeros(d);
        for a in 0..d {
            for b in a..d {
                let x = g.gen_range(-1.0..1.0);
                p[(a, b)] = r(x);
                p[(b, a)] = r(x);
                if b > a {
                    let w = g.gen_range(-1.0..1.0);
                    om[(a, b)] = r(w);
                    om[(b, a)] = r(-w);
                }
            }
        }
        let mut jd: Vec<f64> = (0..d).map(|_| g.gen_range(0.5..3.0)).collect();
        jd.sort_by(|a, b| b.total_cmp(a));
        TopState::new(om, p, CMatrix::diag_real(&jd)).unwrap()
    }

    #[test]
    fn commuting_square() {
        let mut g = ChaCha8Rng::seed_from_u64(31);
        for d in [2, 3, 4] {
            let s = random_top(&mut g, d);
            let (od, pd) = top_rhs(&s);
            let (fp, bp) = chain_rhs(&s.to_chain()).unwrap();
            assert!((&od - &fp).norm() < 1e-12 && (&pd - &bp).norm() < 1e-12);
        }
        let z = TopState::new(CMatrix::zeros(2), CMatrix::zeros(2), CMatrix::diag_real(&[2.0, 1.0])).unwrap();
        let (od, pd) = top_rhs(&z);
        assert!(od.norm() == 0.0 && pd.norm() == 0.0);
    }

    #[test]
    fn free_top() {
        let s = TopState::new(
            CMatrix::from_real(&[&[0.0, 0.7], &[-0.7, 0.0]]),
            CMatrix::scalar(2, r(3.0)),
            CMatrix::diag_real(&[2.0, 1.0]),
        )
        .unwrap();
        let (od, pd) = top_rhs(&s);
        assert!(od.norm() < 1e-15 && pd.norm() < 1e-15);
    }

    #[test]
    fn invariants_and_conservation() {
        let s = TopState::new(CMatrix::zeros(2), CMatrix::diag_real(&[1.0, 3.0]), CMatrix::diag_real(&[2.0, 1.0])).unwrap();
        assert!((invariants(&s).h + 5.0).abs() < 1e-15);
        let p = PendulumParams::new(0.5, 10.0, 10.0 / 3.0).unwrap();
        let top = TopState::new(
            CMatrix::zeros(2),
            CMatrix::from_real(&[&[10.0, 0.0], &[0.0, -10.0]]),
            CMatrix::diag_real(&[1.0, 0.5]),
        )
        .unwrap();
        assert!((invariants(&top).h0.unwrap() - p.beta() * 10.0).abs() < 1e-14);
        let mut g = ChaCha8Rng::seed_from_u64(32);
        let s3 = random_top(&mut g, 3);
        let tr = integrate_top(&s3, 10.0).unwrap();
        assert!(tr.invariant_drift() < 1e-9);
        assert!(tr.chain.symmetry_drift() < 1e-8);
    }

    #[test]
    fn canonicalization() {
        let om = CMatrix::from_real(&[&[0.0, 0.3, 0.1], &[-0.3, 0.0, 0.2], &[-0.1, -0.2, 0.0]]);
        let p = CMatrix::from_real(&[&[1.0, 0.2, 0.0], &[0.2, 0.5, 0.1], &[0.0, 0.1, -1.5]]);
        let j = CMatrix::from_real(&[&[2.0, 0.3, 0.0], &[0.3, 1.0, 0.2], &[0.0, 0.2, 1.5]]);
        let (s, q) = TopState::canonical(om.clone(), p.clone(), j.clone()).unwrap();
        assert!((&(&(&q * &s.j) * &q.transpose()) - &j).norm() < 1e-12);
        // The Lax spectrum is frame independent.
        let mu = c(0.3, 0.4);
        let e1 = eigenvalues(&lax_from(&j, &om, &p, mu)).unwrap();
        let e2 = eigenvalues(&lax_from(&s.j, &s.omega, &s.p, mu)).unwrap();
        assert!(crate::numerics::multiset_distance(&e1, &e2) < 1e-10);
        assert!(TopState::new(om, p, CMatrix::diag_real(&[1.0, 2.0, 3.0])).is_err());
    }

    #[test]
    fn curve_invariance_d3() {
        let mut g = ChaCha8Rng::seed_from_u64(33);
        let s = random_top(&mut g, 3);
        let c0 = top_spectral_curve(&s).unwrap();
        assert!(c0.is_real(1e-12));
        let tr = integrate_top(&s, 10.0).unwrap();
        for t in [2.5, 7.0, 10.0] {
            let ct = top_spectral_curve(&tr.state(t)).unwrap();
            assert!(c0.relative_distance(&ct) < 1e-8);
        }
        let s1 = TopState::new(CMatrix::zeros(1), CMatrix::diag_real(&[0.7]), CMatrix::diag_real(&[1.3])).unwrap();
        let c1 = top_spectral_curve(&s1).unwrap();
        assert!((c1.coeff(2, 0) - 1.69).norm() < 1e-12 && (c1.coeff(0, 0) + 0.7).norm() < 1e-12);
        assert!((c1.coeff(0, 1) - 1.0).norm() < 1e-12);
    }

    #[test]
    fn potential_forms() {
        let p = PendulumParams::from_h(0.5, 10.0, 10.0).unwrap();
        let s = p.initial_state();
        let pot = top_potential(&s, Some(pendulum_period(&p).unwrap()), (0.0, 1.0), false).unwrap();
        let sym = top_potential(&s, None, (0.0, 3.0), true).unwrap();
        let tr = integrate_top(&s, 3.0).unwrap();
        let (beta, h0) = (p.beta(), p.h0);
        let gamma = 2.0 * (0.5f64).sqrt() / 1.5;
        for x in [0.0, 0.4, 1.1, 2.9] {
            let (u, v, w) = pendulum_coordinates(&tr.state(x)).unwrap();
            let wd = beta * v;
            let want = CMatrix::from_real(&[&[u - w * w, v - wd], &[v + wd, -u - w * w]]);
            assert!((&pot.eval(x) - &want).norm() < 1e-7);
            let want_s = CMatrix::from_real(&[&[(1.0 + beta) * u - h0, gamma * v], &[gamma * v, -(1.0 - beta) * u - h0]]);
            assert!((&sym.eval(x) - &want_s).norm() < 1e-7);
        }
        // Ω = 0 with P commuting with J: U = P.
        let s0 = TopState::new(CMatrix::zeros(2), CMatrix::diag_real(&[1.0, -2.0]), CMatrix::diag_real(&[2.0, 1.0])).unwrap();
        let p0 = top_potential(&s0, None, (0.0, 1.0), false).unwrap();
        assert!((&p0.eval(0.6) - &s0.p).norm() < 1e-14);
        // 3D symmetrized potential is symmetric.
        let mut g = ChaCha8Rng::seed_from_u64(34);
        let s3 = random_top(&mut g, 3);
        let sym3 = top_potential(&s3, None, (0.0, 5.0), true).unwrap();
        for k in 0..20 {
            let uu = sym3.eval(0.25 * k as f64);
            assert!((&uu - &uu.transpose()).norm() < 1e-9);
        }
    }

    #[test]
    fn commuting_operator() {
        let tf = GaussPoly::family(2, 6, 41);
        let grid = Grid::new(-1.0, 1.0, 1e-3).unwrap();
        let s0 = TopState::new(CMatrix::zeros(2), CMatrix::diag_real(&[1.0, -2.0]), CMatrix::diag_real(&[2.0, 1.0])).unwrap();
        assert!(commuting_operator_residual(&s0, &tf, &grid, None).unwrap() < 1e-8);
        let s = PendulumParams::from_h(0.5, 10.0, 10.0).unwrap().initial_state();
        assert!(commuting_operator_residual(&s, &tf, &grid, None).unwrap() < 1e-6);
        let delta = CMatrix::from_real(&[&[0.0, 0.1], &[0.1, 0.0]]);
        assert!(commuting_operator_residual(&s, &tf, &grid, Some(&delta)).unwrap() > 1e-2);
    }

    #[test]
    fn bloch_norm() {
        let p = PendulumParams::from_h(0.5, 10.0, 10.0).unwrap();
        let s = p.initial_state();
        let curve = top_spectral_curve(&s).unwrap();
        // λ = 0 lies in a band of multiplicity 2: take an imaginary root.
        let roots = crate::numerics::poly_roots(&curve.at_lambda(r(0.0))).unwrap();
        let mu = *roots.iter().find(|z| z.re.abs() < 1e-9).unwrap();
        let chk = bloch_norm_identity_residual(&s, c(0.0, mu.im), 0.0, 5.0).unwrap();
        assert!(chk.identity_residual < 1e-7 && chk.norm_variation < 1e-7 && chk.kernel_residual < 1e-7);
        // λ = −20 is a gap: roots have Re μ ≠ 0 and |ψ|² grows.
        let roots = crate::numerics::poly_roots(&curve.at_lambda(r(-20.0))).unwrap();
        let mu = *roots.iter().find(|z| z.re > 1e-3).unwrap();
        let chk = bloch_norm_identity_residual(&s, mu, -20.0, 2.0).unwrap();
        assert!(chk.identity_residual < 1e-7);
        let (jmin, jmax) = (0.5, 1.0);
        assert!(chk.growth_rate >= 2.0 * mu.re * jmin - 1e-6 && chk.growth_rate <= 2.0 * mu.re * jmax + 1e-6);
        assert!(matches!(bloch_norm_identity_residual(&s, c(0.0, 1.0), 3.0, 1.0), Err(Error::OffCurve(_))));
        // Ω = 0, diagonal P: ψ′ = μJψ exactly.
        let s0 = TopState::new(CMatrix::zeros(2), CMatrix::diag_real(&[1.0, -2.0]), CMatrix::diag_real(&[2.0, 1.0])).unwrap();
        let chk = bloch_norm_identity_residual(&s0, c(0.0, 2f64.sqrt()), 0.0, 3.0).unwrap();
        assert!(chk.norm_variation < 1e-9);
    }
}
