//! The matrix Darboux dressing chain.
//!
//! A Darboux step ψ ↦ ψ′ + Fψ maps L = −D² + U to L̃ = −D² + U + 2F′, with
//! U = −F′ + F² + B. Closing the chain after one step by a constant
//! conjugation gives the period-one system
//!
//! ```text
//! CF′ + F′C = [C, F² + B] + 2αC,    B′ = [B, F],
//! ```
//!
//! which has the Lax form 𝓛′ = [𝓛, 𝓐] − 2μαC with 𝓛 = μ²C² − μ(CF+FC) − B
//! and 𝓐 = F − μC. The §2 form P + μM − μ²J² of the top's Lax matrix is
//! −𝓛 under F = Ω, C = J, B = P.

pub mod block;
pub mod chain;
pub mod frame;
pub mod integrals;
pub mod residuals;
pub mod vstate;

pub use block::{build_block_closure, cyclic_block, split_blocks};
pub use chain::{
    chain_rhs, darboux_step, fixed_point, integrate_chain, integrate_chain_span, lax_companion, lax_matrix,
    lax_residual, lax_spectrum_drift, potential, zero_curvature_residual, ChainState, ChainSystem, ChainTrajectory,
    ReductionTag,
};
pub use frame::{reconstruct_frame, FrameTrajectory, LinearizationData};
pub use integrals::{first_integrals_2x2, FirstIntegrals2x2, NormalForm};
pub use residuals::{intertwine_residual, intertwine_residual_perturbed, novikov_residual, novikov_residual_perturbed};
pub use vstate::{integrate_vxx, vxx_residual, VState, VTrajectory};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::numerics::{c, CMatrix, C64};

fn rand_c(rng: &mut ChaCha8Rng, s: f64) -> C64 {
    c(rng.gen_range(-s..s), rng.gen_range(-s..s))
}

/// Random complex matrix with entries uniform in the square of half-width `s`.
pub fn random_matrix(rng: &mut ChaCha8Rng, d: usize, s: f64) -> CMatrix {
    CMatrix::from_vec(d, (0..d * d).map(|_| rand_c(rng, s)).collect())
}

/// Random C = PDP⁻¹ with eigenvalues in the right half-plane (so every
/// cᵢ + cⱼ has real part ≥ 1), P a perturbation of the identity.
pub fn random_nondegenerate_c(rng: &mut ChaCha8Rng, d: usize) -> CMatrix {
    loop {
        let diag: Vec<C64> = (0..d).map(|_| c(rng.gen_range(0.5..2.0), rng.gen_range(-1.0..1.0))).collect();
        let p = &CMatrix::identity(d) + &random_matrix(rng, d, 0.4);
        if let Ok(pi) = p.inverse() {
            if p.cond() < 50.0 {
                return &(&p * &CMatrix::diag(&diag)) * &pi;
            }
        }
    }
}

/// Random chain state with moderate entries (scale `s`) and the given α.
pub fn random_state(rng: &mut ChaCha8Rng, d: usize, alpha: C64, s: f64) -> ChainState {
    let cm = random_nondegenerate_c(rng, d);
    let f = random_matrix(rng, d, s);
    let b = random_matrix(rng, d, s);
    ChainState::new(f, b, cm, alpha).expect("constructed C is nondegenerate")
}

/// Random 2×2 state with traceless B (entries of scale 0.4) whose orbit stays
/// in the ball ‖F‖, ‖B‖ ≤ `bound` on [0, t_end]; orbits passing near a pole
/// are resampled.
pub fn random_bounded_2x2(rng: &mut ChaCha8Rng, cm: &CMatrix, alpha: C64, t_end: f64, bound: f64) -> ChainTrajectory {
    loop {
        let f = random_matrix(rng, 2, 0.4);
        let mut b = random_matrix(rng, 2, 0.4);
        let tr = b.trace() * 0.5;
        b[(0, 0)] -= tr;
        b[(1, 1)] -= tr;
        let Ok(s) = ChainState::new(f, b, cm.clone(), alpha) else { continue };
        if let Ok(t) = integrate_chain(&s, t_end, 1e-10) {
            if !t.traj.states().iter().flatten().any(|z| z.norm() > bound) {
                return t;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::numerics::{r, GaussPoly, Grid, OdeSetup};
    use rand::SeedableRng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn skew2(w: f64) -> CMatrix {
        CMatrix::from_real(&[&[0.0, w], &[-w, 0.0]])
    }

    fn pend_p(u: f64, v: f64) -> CMatrix {
        CMatrix::from_real(&[&[u, v], &[v, -u]])
    }

    #[test]
    fn scalar_c_gives_alpha_identity() {
        let mut g = rng(1);
        let f = random_matrix(&mut g, 3, 1.0);
        let b = random_matrix(&mut g, 3, 1.0);
        let s = ChainState::new(f.clone(), b.clone(), CMatrix::scalar(3, r(2.5)), c(0.3, 0.1)).unwrap();
        let (fp, bp) = chain_rhs(&s).unwrap();
        assert!((&fp - &CMatrix::scalar(3, c(0.3, 0.1))).norm() < 1e-13);
        assert!((&bp - &b.commutator(&f)).norm() < 1e-13);
    }

    #[test]
    fn fixed_point_is_stationary() {
        let cm = CMatrix::diag_real(&[1.0, 2.0]);
        let s = fixed_point(&cm, &CMatrix::diag_real(&[0.3, -0.7])).unwrap();
        let (fp, bp) = chain_rhs(&s).unwrap();
        assert!(fp.norm() < 1e-15 && bp.norm() < 1e-15);
        let tr = integrate_chain(&s, 5.0, 1e-10).unwrap();
        assert!((&tr.state(3.7).b - &s.b).norm() < 1e-15);
        assert!(lax_residual(&tr, c(0.4, 0.2)) < 1e-13);
        assert!(zero_curvature_residual(&tr, r(1.3)) < 1e-13);
    }

    #[test]
    fn pendulum_hand_expansion() {
        // J = diag(J1, J2), Ω = ω[[0,1],[-1,0]], P = [[u,v],[v,-u]]:
        // u̇ = −2ωv, v̇ = 2ωu, ω̇ = βv with β = (J1−J2)/(J1+J2).
        let (j1, j2, u, v, w) = (2.0, 1.0, 0.7, -0.4, 1.3);
        let s = ChainState::new(skew2(w), pend_p(u, v), CMatrix::diag_real(&[j1, j2]), r(0.0)).unwrap();
        let (fp, bp) = chain_rhs(&s).unwrap();
        let beta = (j1 - j2) / (j1 + j2);
        assert!((fp[(0, 1)].re - beta * v).abs() < 1e-14 && fp[(0, 0)].norm() < 1e-14);
        assert!((bp[(0, 0)].re - -2.0 * w * v).abs() < 1e-14);
        assert!((bp[(0, 1)].re - 2.0 * w * u).abs() < 1e-14);
        // U = [[u − ω², v − ω̇], [v + ω̇, −u − ω²]]
        let um = potential(&s).unwrap();
        let wd = beta * v;
        let want = CMatrix::from_real(&[&[u - w * w, v - wd], &[v + wd, -u - w * w]]);
        assert!((&um - &want).norm() < 1e-14);
    }

    #[test]
    fn lax_special_cases() {
        let mut g = rng(2);
        let s = random_state(&mut g, 2, r(0.0), 1.0);
        assert!((&lax_matrix(&s, r(0.0)) + &s.b).norm() < 1e-15);
        let s1 = ChainState::new(
            CMatrix::diag(&[c(0.3, 0.2)]),
            CMatrix::diag(&[c(-1.0, 0.5)]),
            CMatrix::diag(&[c(1.5, 0.0)]),
            r(0.0),
        )
        .unwrap();
        let mu = c(0.7, -0.1);
        let want = mu * mu * 2.25 - mu * 2.0 * 1.5 * c(0.3, 0.2) - c(-1.0, 0.5);
        assert!((lax_matrix(&s1, mu)[(0, 0)] - want).norm() < 1e-15);
        // Top form: μ²J² − μM − P with M = JΩ + ΩJ.
        let j = CMatrix::diag_real(&[3.0, 2.0, 1.0]);
        let om = CMatrix::from_real(&[&[0.0, 1.0, 2.0], &[-1.0, 0.0, 0.5], &[-2.0, -0.5, 0.0]]);
        let p = CMatrix::from_real(&[&[1.0, 0.2, 0.0], &[0.2, -1.0, 0.3], &[0.0, 0.3, 0.5]]);
        let st = ChainState::new(om.clone(), p.clone(), j.clone(), r(0.0)).unwrap().with_tag(ReductionTag::Top).unwrap();
        let m = j.anticommutator(&om);
        let want = &(&(&j * &j).scale(mu * mu) - &m.scale(mu)) - &p;
        assert!((&lax_matrix(&st, mu) - &want).norm() < 1e-14);
    }

    #[test]
    fn top_tag_preserved_and_trace_law() {
        let j = CMatrix::diag_real(&[3.0, 2.0, 1.0]);
        let om = CMatrix::from_real(&[&[0.0, 0.4, -0.2], &[-0.4, 0.0, 0.3], &[0.2, -0.3, 0.0]]);
        let p = CMatrix::from_real(&[&[1.0, 0.2, 0.1], &[0.2, -0.5, 0.3], &[0.1, 0.3, 0.2]]);
        let s = ChainState::new(om, p, j, r(0.0)).unwrap().with_tag(ReductionTag::Top).unwrap();
        let tr = integrate_chain(&s, 10.0, 1e-10).unwrap();
        assert!(tr.symmetry_drift() < 1e-8);
        assert!(tr.trace_law_drift() < 1e-9);
    }

    #[test]
    fn trace_law_with_alpha() {
        let mut g = rng(3);
        let s = random_state(&mut g, 3, c(0.6, -0.2), 0.3);
        let tr = integrate_chain(&s, 2.0, 1e-10).unwrap();
        assert!(tr.trace_law_drift() < 1e-9);
    }

    #[test]
    fn tag_validation() {
        let bad = ChainState::new(CMatrix::identity(2), CMatrix::identity(2), CMatrix::identity(2), r(0.0)).unwrap();
        assert!(bad.with_tag(ReductionTag::Top).is_err());
        let deg = ChainState::new(CMatrix::identity(2), CMatrix::identity(2), CMatrix::diag_real(&[1.0, -1.0]), r(0.0));
        assert!(matches!(deg, Err(Error::SingularMap(_))));
    }

    #[test]
    fn isospectral_random_d3() {
        let mut g = rng(4);
        let s = random_state(&mut g, 3, r(0.0), 0.3);
        let tr = integrate_chain(&s, 10.0, 1e-10).unwrap();
        assert!(lax_spectrum_drift(&tr, &[c(0.7, 0.2)], 40).unwrap() < 1e-8);
    }

    #[test]
    fn lax_and_zero_curvature_residuals() {
        let mut g = rng(5);
        for alpha in [r(0.0), c(0.8, 0.3)] {
            let s = random_state(&mut g, 2, alpha, 0.3);
            let tr = integrate_chain(&s, 3.0, 1e-10).unwrap();
            assert!(lax_residual(&tr, c(0.9, -0.4)) < 1e-7);
            assert!(zero_curvature_residual(&tr, c(1.1, 0.2)) < 1e-7);
        }
    }

    #[test]
    fn darboux_conjugation_identity() {
        let mut g = rng(6);
        let s = random_state(&mut g, 2, r(0.0), 0.3);
        let sys = ChainSystem::for_state(&s).unwrap();
        let (u, ut) = darboux_step(&s, (-1.0, 1.0)).unwrap();
        for k in 0..11 {
            let x = -1.0 + 0.2 * k as f64;
            let conj = &(&s.c * &u.eval(x)) * sys.c_inv();
            assert!((&ut.eval(x) - &conj).norm() < 1e-9);
        }
    }

    #[test]
    fn darboux_scalar_and_constant_f() {
        // d = 1 with F′ = α: Ũ = U + 2α.
        let s = ChainState::new(
            CMatrix::diag(&[r(0.2)]),
            CMatrix::diag(&[r(0.5)]),
            CMatrix::diag(&[r(1.0)]),
            r(0.7),
        )
        .unwrap();
        let (u, ut) = darboux_step(&s, (0.0, 1.0)).unwrap();
        assert!(((ut.eval(0.5)[(0, 0)] - u.eval(0.5)[(0, 0)]) - r(1.4)).norm() < 1e-12);
        // F constant (C = I, α = 0): Ũ = U.
        let s = ChainState::new(CMatrix::identity(2), CMatrix::zeros(2), CMatrix::identity(2), r(0.0)).unwrap();
        let (u, ut) = darboux_step(&s, (0.0, 1.0)).unwrap();
        assert!((&ut.eval(0.3) - &u.eval(0.3)).norm() < 1e-14);
    }

    #[test]
    fn intertwine_harmonic_scalar() {
        // d = 1, C = 1, f = αx.
        let s = ChainState::new(CMatrix::zeros(1), CMatrix::zeros(1), CMatrix::identity(1), r(1.0)).unwrap();
        let tf = GaussPoly::family(1, 6, 11);
        let grid = Grid::new(-1.0, 1.0, 1e-3).unwrap();
        assert!(intertwine_residual(&s, &tf, &grid).unwrap() < 1e-6);
    }

    #[test]
    fn intertwine_random_and_negative_control() {
        let mut g = rng(7);
        let s = random_state(&mut g, 2, c(0.4, 0.0), 0.3);
        let tf = GaussPoly::family(2, 6, 12);
        let grid = Grid::new(0.0, 1.0, 1e-3).unwrap();
        let res = intertwine_residual(&s, &tf, &grid).unwrap();
        assert!(res < 1e-6, "{res}");
        let delta = random_matrix(&mut g, 2, 0.1);
        let bad = intertwine_residual_perturbed(&s, &tf, &grid, Some(&delta)).unwrap();
        assert!(bad > 1e-2, "{bad}");
        assert!(matches!(intertwine_residual(&s, &tf, &Grid { a: 0.0, b: 1.0, h: 0.2 }), Err(Error::GridTooCoarse(_))));
    }

    #[test]
    fn novikov_cases() {
        let tf1 = GaussPoly::family(1, 6, 13);
        let grid = Grid::new(-1.0, 1.0, 1e-3).unwrap();
        let s = ChainState::new(CMatrix::diag(&[r(0.3)]), CMatrix::diag(&[r(2.0)]), CMatrix::diag(&[r(1.5)]), r(0.0)).unwrap();
        assert!(novikov_residual(&s, &tf1, &grid).unwrap() < 1e-8);
        let j = CMatrix::diag_real(&[2.0, 1.0]);
        let st = ChainState::new(skew2(0.8), pend_p(1.0, 0.5), j, r(0.0)).unwrap();
        let tf = GaussPoly::family(2, 6, 14);
        assert!(novikov_residual(&st, &tf, &grid).unwrap() < 1e-6);
        let delta = CMatrix::from_real(&[&[0.0, 0.1], &[0.1, 0.0]]);
        assert!(novikov_residual_perturbed(&st, &tf, &grid, Some(&delta)).unwrap() > 1e-2);
        let sa = ChainState::new(skew2(0.8), pend_p(1.0, 0.5), CMatrix::diag_real(&[2.0, 1.0]), r(0.5)).unwrap();
        assert!(novikov_residual(&sa, &tf, &grid).is_err());
    }

    #[test]
    fn frame_cases() {
        // F = 0: φ constant.
        let s = fixed_point(&CMatrix::diag_real(&[1.0, 2.0]), &CMatrix::diag_real(&[1.0, 3.0])).unwrap();
        let tr = integrate_chain(&s, 2.0, 1e-10).unwrap();
        let phi0 = CMatrix::from_real(&[&[1.0, 0.5], &[0.0, 1.0]]);
        let fr = reconstruct_frame(&tr, &CMatrix::diag_real(&[1.0, 3.0]), &phi0).unwrap();
        assert!((&fr.phi(1.7) - &phi0).norm() < 1e-14);
        // Top, φ₀ = I, Λ = P₀: orthogonality and B = φΛφ⁻¹.
        let p0 = pend_p(1.0, 0.5);
        let st = ChainState::new(skew2(0.8), p0.clone(), CMatrix::diag_real(&[2.0, 1.0]), r(0.0)).unwrap();
        let tr = integrate_chain(&st, 10.0, 1e-10).unwrap();
        let fr = reconstruct_frame(&tr, &p0, &CMatrix::identity(2)).unwrap();
        assert!(fr.orthogonality_drift() < 1e-8);
        assert!(fr.b_drift().unwrap() < 1e-7);
        // General complex state with B₀ = φ₀Λφ₀⁻¹.
        let mut g = rng(8);
        let s = random_state(&mut g, 3, r(0.0), 0.3);
        let phi0 = &CMatrix::identity(3) + &random_matrix(&mut g, 3, 0.3);
        let lam = &(&phi0.inverse().unwrap() * &s.b) * &phi0;
        let tr = integrate_chain(&s, 3.0, 1e-10).unwrap();
        let fr = reconstruct_frame(&tr, &lam, &phi0).unwrap();
        assert!(fr.b_drift().unwrap() < 1e-7);
        assert!(matches!(
            reconstruct_frame(&tr, &lam, &CMatrix::from_real(&[&[1.0, 1.0, 0.0], &[1.0, 1.0, 0.0], &[0.0, 0.0, 1.0]])),
            Err(Error::FrameDegenerate(_))
        ));
    }

    #[test]
    fn vxx_trivial_and_fb_map() {
        let cm = CMatrix::diag_real(&[1.0, 0.5]);
        let v0 = VState::new(CMatrix::diag_real(&[0.3, 0.1]), CMatrix::zeros(2), cm.clone()).unwrap();
        let tr = integrate_vxx(&v0, 3.0).unwrap();
        assert!((&tr.at(2.0).v - &v0.v).norm() < 1e-14);
        let cm = CMatrix::from_real(&[&[1.0, 0.2], &[0.2, 0.6]]);
        let v0 = VState::new(
            CMatrix::from_real(&[&[0.1, 0.3], &[0.3, -0.2]]),
            CMatrix::from_real(&[&[0.4, -0.1], &[-0.1, 0.2]]),
            cm,
        )
        .unwrap();
        let tr = integrate_vxx(&v0, 2.0).unwrap();
        assert!(tr.symmetry_drift() < 1e-8);
        // The (F, B) image follows the chain: F′ = CV′C⁻¹ − V′.
        for &x in &[0.0, 0.7, 1.9] {
            let vs = tr.at(x);
            let s = vs.to_chain().unwrap();
            let (fp, _) = chain_rhs(&s).unwrap();
            let ci = vs.c.inverse().unwrap();
            let want = &(&(&vs.c * &vs.vp) * &ci) - &vs.vp;
            assert!((&fp - &want).norm() < 1e-7);
            assert!((&potential(&s).unwrap() - &vs.vp.scale_real(2.0)).norm() < 1e-7);
        }
        let vdeg = VState::new(CMatrix::zeros(2), CMatrix::zeros(2), CMatrix::diag_real(&[1.0, -1.0])).unwrap();
        assert!(matches!(integrate_vxx(&vdeg, 1.0), Err(Error::SingularMap(_))));
    }

    fn bounded_case(g: &mut ChaCha8Rng, cm: &CMatrix, alpha: C64) -> ChainTrajectory {
        random_bounded_2x2(g, cm, alpha, 5.0, 10.0)
    }

    #[test]
    fn first_integrals_both_forms() {
        let mut g = rng(9);
        let ca = CMatrix::diag_real(&[1.5, 0.5]);
        let cb = CMatrix::from_real(&[&[1.0, 1.0], &[0.0, 1.0]]);
        for alpha in [r(0.0), r(0.7)] {
            let tr = bounded_case(&mut g, &ca, alpha);
            let fi = first_integrals_2x2(&tr, NormalForm::A).unwrap();
            assert_eq!(fi.values.len(), 2);
            assert!(fi.max_drift() < 1e-8, "{:?}", fi.drift);
            let tr = bounded_case(&mut g, &cb, alpha);
            let fi = first_integrals_2x2(&tr, NormalForm::B).unwrap();
            assert_eq!(fi.values.len(), 3);
            assert!(fi.max_drift() < 1e-8, "{:?}", fi.drift);
        }
        // B = 0: g₂ = g₃ = 0 so c₄ = 0.
        let s = ChainState::new(random_matrix(&mut g, 2, 0.4), CMatrix::zeros(2), ca.clone(), r(0.0)).unwrap();
        let tr = integrate_chain(&s, 2.0, 1e-10).unwrap();
        let fi = first_integrals_2x2(&tr, NormalForm::A).unwrap();
        assert!(fi.values[1].norm() < 1e-15);
        assert!(first_integrals_2x2(&tr, NormalForm::B).is_err());
    }

    #[test]
    fn first_integrals_truncate_at_real_zero() {
        // Librating pendulum in case-(a) form: f₂ = ω changes sign.
        let s = ChainState::new(skew2(0.1), pend_p(0.0, 1.0), CMatrix::diag_real(&[1.5, 0.5]), r(0.0)).unwrap();
        let tr = integrate_chain(&s, 10.0, 1e-10).unwrap();
        let fi = first_integrals_2x2(&tr, NormalForm::A).unwrap();
        let x = fi.truncated_at.expect("ω crosses zero");
        assert!(x > 0.0 && x < 10.0);
        assert!(fi.max_drift() < 1e-8);
    }

    fn period3_rhs(cm: &CMatrix, alpha: C64, y: &[C64], d: usize) -> Vec<C64> {
        let n = d * d;
        let m = |k: usize| CMatrix::from_vec(d, y[k * n..(k + 1) * n].to_vec());
        let (f, b) = ([m(0), m(1), m(2)], [m(3), m(4), m(5)]);
        let ci = cm.inverse().unwrap();
        let gg: Vec<CMatrix> = (0..3).map(|k| &(&f[k] * &f[k]) + &b[k]).collect();
        let x1 = &gg[1] - &gg[0];
        let x2 = &gg[2] - &gg[1];
        let x3 = &(&(&(cm * &gg[0]) * &ci) + &CMatrix::scalar(d, alpha * 2.0)) - &gg[2];
        let rhs = &(&(&x1 - &x2) + &x3) * cm;
        let f1 = crate::numerics::solve_anticommutator(cm, &rhs).unwrap();
        let f2 = &x1 - &f1;
        let f3 = &x2 - &f2;
        let mut out = Vec::new();
        for fp in [&f1, &f2, &f3] {
            out.extend_from_slice(fp.as_slice());
        }
        for k in 0..3 {
            out.extend_from_slice(b[k].commutator(&f[k]).as_slice());
        }
        out
    }

    #[test]
    fn block_closure() {
        let mut g = rng(10);
        let s = random_state(&mut g, 2, r(0.0), 0.3);
        assert_eq!(build_block_closure(std::slice::from_ref(&s)).unwrap(), s);
        // Even N: the cyclic matrix has eigenvalue pairs ±√cᵢ.
        let s1 = ChainState::new(CMatrix::diag(&[r(0.1)]), CMatrix::diag(&[r(0.2)]), CMatrix::diag(&[r(2.0)]), r(0.0)).unwrap();
        assert!(matches!(build_block_closure(&[s1.clone(), s1.clone()]), Err(Error::SingularMap(_))));
        for (d, alpha) in [(1usize, r(0.0)), (2, r(0.0)), (2, c(0.6, 0.0))] {
            let cm = random_nondegenerate_c(&mut g, d);
            let states: Vec<ChainState> = (0..3)
                .map(|_| ChainState::new(random_matrix(&mut g, d, 0.3), random_matrix(&mut g, d, 0.3), cm.clone(), alpha).unwrap())
                .collect();
            let big = build_block_closure(&states).unwrap();
            let tr = integrate_chain(&big, 2.0, 1e-11).unwrap();
            let mut y0 = Vec::new();
            for s in &states {
                y0.extend_from_slice(s.f.as_slice());
            }
            for s in &states {
                y0.extend_from_slice(s.b.as_slice());
            }
            let cm2 = cm.clone();
            let mut setup = OdeSetup::new(6 * d * d, move |_t, y: &[C64], dy: &mut [C64]| {
                dy.copy_from_slice(&period3_rhs(&cm2, alpha, y, d));
            })
            .tolerances(1e-11, 1e-13);
            let direct = setup.integrate(&y0, (0.0, 2.0)).unwrap();
            for &x in &[0.5, 1.3, 2.0] {
                let blocks = split_blocks(&tr.state(x), 3, &cm);
                let y = direct.eval(x);
                for k in 0..3 {
                    let fk = CMatrix::from_vec(d, y[k * d * d..(k + 1) * d * d].to_vec());
                    let bk = CMatrix::from_vec(d, y[(3 + k) * d * d..(4 + k) * d * d].to_vec());
                    assert!((&blocks[k].f - &fk).norm() < 1e-8, "d={d} k={k}");
                    assert!((&blocks[k].b - &bk).norm() < 1e-8, "d={d} k={k}");
                }
            }
        }
    }
}
