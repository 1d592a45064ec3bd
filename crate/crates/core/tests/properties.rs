//! Property tests of the structural invariants across modules.

use dressing_lab::dressing::{
    chain_rhs, integrate_chain, lax_spectrum_drift, potential, random_nondegenerate_c, random_state, ChainState, ReductionTag,
};
use dressing_lab::families::{
    mathieu_bloch, mathieu_dispersion, soliton_nu, soliton_residual, symf_fprime, symf_potential, symf_solution, MathieuFamily,
    SolitonFamily, SymfParams,
};
use dressing_lab::numerics::{c, eigenvalues, jacobi_elliptic, r, solve_anticommutator, CMatrix, C64};
use dressing_lab::spectral::{curve_multiplicity, monodromy};
use dressing_lab::top::{integrate_top, pendulum_bands, pendulum_curve, top_spectral_curve, PendulumParams, TopState};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn cmat(d: usize) -> impl Strategy<Value = CMatrix> {
    proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64), d * d)
        .prop_map(move |v| CMatrix::from_vec(d, v.into_iter().map(|(a, b)| c(a, b)).collect()))
}

/// Random real top state with J = diag decreasing.
fn top_state(d: usize) -> impl Strategy<Value = TopState> {
    (
        proptest::collection::vec(-1.0..1.0f64, d * d),
        proptest::collection::vec(-1.0..1.0f64, d * d),
        proptest::collection::vec(0.3..2.0f64, d),
    )
        .prop_map(move |(w, p, mut j)| {
            j.sort_by(|a, b| b.total_cmp(a));
            let mut om = CMatrix::zeros(d);
            let mut pm = CMatrix::zeros(d);
            for a in 0..d {
                for b in 0..d {
                    om[(a, b)] = r(w[a * d + b] - w[b * d + a]);
                    pm[(a, b)] = r(p[a * d + b] + p[b * d + a]);
                }
            }
            TopState::new(om, pm, CMatrix::diag_real(&j)).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn anticommutator_round_trip(seed in 0u64..10_000, d in 2usize..5, x in 0usize..1) {
        let _ = x;
        let mut g = rng(seed);
        let cm = random_nondegenerate_c(&mut g, d);
        let xm = dressing_lab::dressing::random_matrix(&mut g, d, 1.0);
        let rhs = cm.anticommutator(&xm);
        let back = solve_anticommutator(&cm, &rhs).unwrap();
        prop_assert!((&back - &xm).norm() <= 1e-10 * (1.0 + xm.norm()));
    }

    #[test]
    fn eigenvalues_match_trace_and_det(m in cmat(3)) {
        let e = eigenvalues(&m).unwrap();
        let sum: C64 = e.iter().sum();
        let prod: C64 = e.iter().product();
        let scale = 1.0 + m.norm().powi(3);
        prop_assert!((sum - m.trace()).norm() <= 1e-8 * (1.0 + m.norm()));
        prop_assert!((prod - m.det()).norm() <= 1e-8 * scale);
    }

    #[test]
    fn jacobi_identities(u in -10.0..10.0f64, k in prop::sample::select(vec![0.0, 0.3, 0.7, 0.99, 1.0])) {
        let (sn, cn, dn) = jacobi_elliptic(u, k);
        prop_assert!((sn * sn + cn * cn - 1.0).abs() < 1e-12);
        prop_assert!((dn * dn + k * k * sn * sn - 1.0).abs() < 1e-12);
    }

    #[test]
    fn symf_solves_the_chain(k1 in -1.0..1.0f64, k2 in -1.0..1.0f64, w0 in -1.2..1.2f64, w1 in -3.0..3.0f64,
                             alpha in prop::sample::select(vec![0.0, 0.5]), x in -2.0..2.0f64) {
        let k1 = if alpha != 0.0 { 0.0 } else { k1 };
        let p = SymfParams { k1, k2, omega0: w0, omega1: w1, alpha };
        let s = symf_solution(&p, x).unwrap();
        let (fp, _) = chain_rhs(&s).unwrap();
        prop_assert!((&fp - &symf_fprime(&p, x)).norm() <= 1e-10);
        prop_assert!((&potential(&s).unwrap() - &symf_potential(&p, x)).norm() <= 1e-10);
    }

    #[test]
    fn soliton_psi_solves(gamma in prop::sample::select(vec![0.25, 0.5, 2.0, 4.0]), lam in -3.0..6.0f64, branch in 1u8..3) {
        let f = SolitonFamily::new(gamma).unwrap();
        let nu = soliton_nu(&f, branch, lam).unwrap();
        let xs: Vec<f64> = (0..13).map(|i| -3.0 + 0.5 * i as f64).collect();
        prop_assert!(soliton_residual(&f, branch, nu, &xs).unwrap() <= 1e-9);
    }

    #[test]
    fn mathieu_bloch_solves(a in prop::sample::select(vec![1.0, 2.0, 4.0]), lam in -2.0..10.0f64, i in 0usize..4, x in 0.0..3.14f64) {
        let rho = mathieu_dispersion(a, lam)[i];
        let b = mathieu_bloch(a, lam, rho).unwrap();
        prop_assert!(b.residual(x) <= 1e-9);
    }

    #[test]
    fn pendulum_curve_multiplicity_matches_bands(h in prop::sample::select(vec![10.0, 100.0]), lam in -40.0..40.0f64) {
        let p = PendulumParams::from_h(0.5, 10.0, h).unwrap();
        let bands = pendulum_bands(&p).unwrap();
        prop_assume!(bands.distance_to_edge(lam) > 1e-6);
        let m = curve_multiplicity(&pendulum_curve(&p), lam).unwrap();
        prop_assert_eq!(m, bands.multiplicity_at(lam));
        prop_assert_eq!(m % 2, 0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn chain_isospectral_and_trace_law(seed in 0u64..10_000, d in 2usize..4, mu_re in -1.0..1.0f64, mu_im in -1.0..1.0f64) {
        let s = random_state(&mut rng(seed), d, r(0.0), 0.3);
        let tr = integrate_chain(&s, 3.0, 1e-12).unwrap();
        let bounded = tr.traj.sample_times(200).iter().all(|&x| {
            let (f, b) = tr.fb(x);
            f.norm() <= 10.0 && b.norm() <= 10.0
        });
        prop_assume!(bounded);
        prop_assert!(lax_spectrum_drift(&tr, &[c(mu_re, mu_im)], 20).unwrap() <= 1e-8);
        prop_assert!(tr.trace_law_drift() <= 1e-9);
    }

    #[test]
    fn top_reduction_preserved(s in top_state(3)) {
        let chain = s.to_chain().with_tag(ReductionTag::Top).unwrap();
        let tr = integrate_chain(&chain, 10.0, 1e-10).unwrap();
        prop_assert!(tr.symmetry_drift() <= 1e-8);
        let top = integrate_top(&s, 10.0).unwrap();
        prop_assert!(top.invariant_drift() <= 1e-9);
        let c0 = top_spectral_curve(&s).unwrap();
        let c1 = top_spectral_curve(&top.state(10.0)).unwrap();
        prop_assert!(c0.relative_distance(&c1) <= 1e-8);
    }

    #[test]
    fn real_and_hermitian_reductions_give_self_adjoint_u(f in cmat(2), theta in 0.1..1.4f64, phase in -1.0..1.0f64) {
        let (sn, cs) = theta.sin_cos();
        let rot = CMatrix::from_real(&[&[cs, -sn], &[sn, cs]]);
        let fs = CMatrix::from_real(&[&[f[(0, 0)].re, f[(0, 1)].re], &[f[(0, 1)].re, f[(1, 1)].re]]);
        let s = ChainState::new(fs, CMatrix::zeros(2), rot.clone(), r(0.0)).unwrap().with_tag(ReductionTag::RealSymmetric).unwrap();
        let tr = integrate_chain(&s, 1.0, 1e-10).unwrap();
        prop_assert!(tr.symmetry_drift() <= 1e-8);
        for x in [0.0, 0.5, 1.0] {
            let u = tr.potential(x);
            prop_assert!((&u - &u.transpose()).norm() <= 1e-9 * (1.0 + u.norm()));
            prop_assert!(u.is_real(1e-12));
        }
        let fh = &f + &f.adjoint();
        let unitary = &rot * &CMatrix::diag(&[c(phase.cos(), phase.sin()), r(1.0)]);
        let s = ChainState::new(fh, CMatrix::zeros(2), unitary, r(0.0)).unwrap().with_tag(ReductionTag::Hermitian).unwrap();
        let tr = integrate_chain(&s, 1.0, 1e-10).unwrap();
        prop_assert!(tr.symmetry_drift() <= 1e-8);
        for x in [0.0, 0.5, 1.0] {
            let u = tr.potential(x);
            prop_assert!((&u - &u.adjoint()).norm() <= 1e-9 * (1.0 + u.norm()));
        }
    }

    #[test]
    fn monodromy_structure(a in 0.5..4.0f64, lam in -2.0..12.0f64) {
        let m = monodromy(&MathieuFamily::new(a).evaluator(), lam).unwrap();
        prop_assert!(m.reciprocity_defect() <= 1e-6);
        prop_assert!(m.conjugation_defect() <= 1e-6);
        prop_assert!((m.monodromy.det() - 1.0).norm() <= 1e-7);
    }
}
