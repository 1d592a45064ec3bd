//! The eleven acceptance criteria as runnable checks.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dressing::{
    integrate_chain, intertwine_residual, intertwine_residual_perturbed, lax_residual, lax_spectrum_drift, novikov_residual,
    novikov_residual_perturbed, random_bounded_2x2, random_matrix, random_state, first_integrals_2x2, lax_matrix, ChainState, ChainTrajectory,
    NormalForm,
};
use crate::error::Result;
use crate::families::{
    elliptic_curve, elliptic_psi, ground_state_check, integrate_phieq, mathieu_bands, mathieu_bloch, mathieu_dispersion,
    oscillator_ground_basis, oscillator_raise, oscillator_spectrum, phieq_decay_slope, phieq_invariant_drift,
    soliton_nu, soliton_residual, EllipticFamily, MathieuFamily, OscillatorFamily, SolitonFamily,
};
use crate::numerics::{c, poly_roots, r, CMatrix, GaussPoly, Grid, C64};
use crate::spectral::{
    band_structure_from_curve, compare_bands, curve_from_lax, curve_multiplicity, gap_width, locate_collision, CollisionKind,
};
use crate::top::{
    commuting_operator_residual, fig2_sets, integrate_top, pendulum_bands, pendulum_closed_form, pendulum_coordinates,
    pendulum_curve, pendulum_period, top_potential, top_spectral_curve, PendulumParams,
};

/// One measured quantity against its tolerance.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    /// `true` when the value must stay below the tolerance, `false` when it
    /// must exceed it (negative controls).
    pub upper: bool,
    pub pass: bool,
}

impl Check {
    pub fn below(name: impl Into<String>, value: f64, tolerance: f64) -> Check {
        Check { name: name.into(), value, tolerance, upper: true, pass: value <= tolerance }
    }

    pub fn above(name: impl Into<String>, value: f64, tolerance: f64) -> Check {
        Check { name: name.into(), value, tolerance, upper: false, pass: value > tolerance }
    }

    /// |value − target| ≤ tolerance, reported as the deviation.
    pub fn near(name: impl Into<String>, value: f64, target: f64, tolerance: f64) -> Check {
        let dev = (value - target).abs();
        Check { name: name.into(), value: dev, tolerance, upper: true, pass: dev <= tolerance }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub title: &'static str,
    pub checks: Vec<Check>,
    pub error: Option<String>,
    pub runtime_limit: f64,
    #[serde(skip)]
    pub elapsed: f64,
}

impl CriterionReport {
    pub fn pass(&self) -> bool {
        self.error.is_none() && self.checks.iter().all(|c| c.pass) && self.elapsed <= self.runtime_limit
    }

    pub fn failed_checks(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }

    /// One line: "criterion N PASS|FAIL title (elapsed)".
    pub fn summary(&self) -> String {
        let mut s = format!(
            "criterion {:>2} {} {} ({:.2}s / {:.0}s)",
            self.id,
            if self.pass() { "PASS" } else { "FAIL" },
            self.title,
            self.elapsed,
            self.runtime_limit
        );
        if let Some(e) = &self.error {
            s.push_str(&format!(" error: {e}"));
        }
        for c in self.failed_checks() {
            s.push_str(&format!(" [{}: {:.3e} vs {:.1e}]", c.name, c.value, c.tolerance));
        }
        s
    }
}

pub const CRITERIA: [(u8, &str, f64); 11] = [
    (1, "pendulum closed form and conservation", 1.0),
    (2, "Fig 1 band structures", 5.0),
    (3, "pendulum bands vs monodromy", 120.0),
    (4, "Mathieu A=2 edges and closed gaps", 60.0),
    (5, "Mathieu Bloch functions", 60.0),
    (6, "oscillator isospectrality", 60.0),
    (7, "chain isospectrality", 120.0),
    (8, "operator identities", 60.0),
    (9, "first integrals of 2x2 chains", 60.0),
    (10, "soliton and elliptic families", 60.0),
    (11, "3D top multiplicities", 60.0),
];

pub fn run_criterion(id: u8) -> CriterionReport {
    let &(_, title, runtime_limit) = CRITERIA.iter().find(|c| c.0 == id).expect("criterion id in 1..=11");
    let t0 = Instant::now();
    let res = match id {
        1 => criterion1(),
        2 => criterion2(),
        3 => criterion3(),
        4 => criterion4(),
        5 => criterion5(),
        6 => criterion6(),
        7 => criterion7(),
        8 => criterion8(),
        9 => criterion9(),
        10 => criterion10(),
        _ => criterion11(),
    };
    let elapsed = t0.elapsed().as_secs_f64();
    let (checks, error) = match res {
        Ok(c) => (c, None),
        Err(e) => (Vec::new(), Some(e.to_string())),
    };
    CriterionReport { id, title, checks, error, runtime_limit, elapsed }
}

pub fn run_all() -> Vec<CriterionReport> {
    CRITERIA.iter().map(|c| run_criterion(c.0)).collect()
}

fn fig1(h: f64) -> Result<PendulumParams> {
    PendulumParams::from_h(0.5, 10.0, h)
}

fn criterion1() -> Result<Vec<Check>> {
    let p = PendulumParams::new(0.5, 10.0, 20.0 / 9.0)?;
    let t = pendulum_period(&p)?;
    let tr = integrate_top(&p.initial_state(), t)?;
    let mut err: f64 = 0.0;
    for i in 0..=400 {
        let x = t * i as f64 / 400.0;
        let (_, _, w) = pendulum_coordinates(&tr.state(x)).expect("two-dimensional top");
        err = err.max((w - pendulum_closed_form(&p, x)?.0).abs());
    }
    Ok(vec![Check::below("max |omega - closed form|", err, 1e-6), Check::below("H, R^2 drift", tr.invariant_drift(), 1e-9)])
}

fn criterion2() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let left = fig1(10.0)?;
    let ana = pendulum_bands(&left)?;
    let num = band_structure_from_curve(&pendulum_curve(&left), (-60.0, 60.0), 400)?;
    out.push(Check::below("left: multiplicity pattern mismatch", (ana.multiplicities != [0, 2, 4]) as u8 as f64, 0.0));
    out.push(Check::below("left: curve pattern mismatch", (num.multiplicities != ana.multiplicities) as u8 as f64, 0.0));
    for (i, edge) in [-10.0, 10.0].into_iter().enumerate() {
        out.push(Check::near(format!("left: analytic edge {edge}"), ana.breakpoints[i], edge, 1e-8));
        out.push(Check::near(format!("left: curve edge {edge}"), num.breakpoints.get(i).copied().unwrap_or(f64::NAN), edge, 1e-8));
    }
    let right = fig1(100.0)?;
    let l0 = (-500.0 + 156400f64.sqrt()) / 4.5;
    let ana = pendulum_bands(&right)?;
    let num = band_structure_from_curve(&pendulum_curve(&right), (-60.0, 60.0), 400)?;
    out.push(Check::near("right: analytic lambda0", ana.breakpoints[0], l0, 1e-8));
    out.push(Check::near("right: curve lambda0", num.breakpoints[0], l0, 1e-8));
    out.push(Check::below("right: curve pattern mismatch", (num.multiplicities != ana.multiplicities) as u8 as f64, 0.0));
    Ok(out)
}

fn criterion3() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let grid: Vec<f64> = (0..200).map(|i| -40.0 + 80.0 * i as f64 / 199.0).collect();
    for h in [10.0, 100.0] {
        let p = fig1(h)?;
        let t = pendulum_period(&p)?;
        let pot = top_potential(&p.initial_state(), Some(t), (0.0, t), false)?;
        let cmp = compare_bands(&pendulum_bands(&p)?, &pot, &grid)?;
        out.push(Check::below(format!("h={h}: mismatches"), cmp.mismatches.len() as f64, 0.0));
        out.push(Check::above(format!("h={h}: checked points"), cmp.points.len() as f64, 150.0));
    }
    Ok(out)
}

fn criterion4() -> Result<Vec<Check>> {
    let bands = mathieu_bands(2.0)?;
    let mut out = vec![
        Check::near("edge -1", bands.breakpoints[0], -1.0, 1e-12),
        Check::near("edge 3", bands.breakpoints[1], 3.0, 1e-12),
    ];
    let pot = MathieuFamily::new(2.0).evaluator();
    for (name, l, kind) in [
        ("2-2sqrt2", 2.0 - 2.0 * 2f64.sqrt(), CollisionKind::Periodic),
        ("5-2sqrt5", 5.0 - 2.0 * 5f64.sqrt(), CollisionKind::Antiperiodic),
    ] {
        let e = locate_collision(&pot, (l - 0.05, l + 0.05), 1e-10)?;
        out.push(Check::near(format!("collision at {name}"), e.lambda, l, 1e-6));
        out.push(Check::below(format!("collision kind at {name}"), (e.kind != kind) as u8 as f64, 0.0));
        out.push(Check::below(format!("gap width at {name}"), gap_width(&pot, e.lambda, 1e-3)?, 1e-6));
    }
    Ok(out)
}

fn criterion5() -> Result<Vec<Check>> {
    let mut g = ChaCha8Rng::seed_from_u64(5);
    let xs: Vec<f64> = (0..=50).map(|i| std::f64::consts::PI * i as f64 / 50.0).collect();
    let mut out = Vec::new();
    for a in [1.0, 2.0, 4.0] {
        let mut worst: f64 = 0.0;
        for _ in 0..20 {
            let lam = g.gen_range(-2.0..10.0);
            let roots = mathieu_dispersion(a, lam);
            let rho = roots[g.gen_range(0..4)];
            let b = mathieu_bloch(a, lam, rho)?;
            for &x in &xs {
                worst = worst.max(b.residual(x));
            }
        }
        out.push(Check::below(format!("A={a}: max residual over 20 samples"), worst, 1e-9));
    }
    Ok(out)
}

fn criterion6() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for k in [0.0, 0.5] {
        for gamma in [0.0, 0.05, 0.3] {
            let p = OscillatorFamily::from_gamma(1.0, k, gamma, 0.0)?;
            let levels = oscillator_spectrum(&p, (-0.7, 4.6), 0.05, p.x_max())?;
            let tag = format!("k={k} gamma={gamma}");
            out.push(Check::near(format!("{tag}: level count"), levels.len() as f64, 3.0, 0.0));
            for (n, want) in [0.0, 2.0, 4.0].into_iter().enumerate() {
                let got = levels.get(n).map(|l| l.lambda).unwrap_or(f64::NAN);
                out.push(Check::near(format!("{tag}: level {n}"), got, want, 1e-4));
            }
            let w = 5.0;
            let xs: Vec<f64> = (0..81).map(|i| -w + 2.0 * w * i as f64 / 80.0).collect();
            let mut ladder: f64 = 0.0;
            for g0 in oscillator_ground_basis(&p, p.x_max())? {
                ladder = ladder.max(g0.residual(&p, &xs));
                let g1 = oscillator_raise(&p, &g0, &xs)?;
                let g2 = oscillator_raise(&p, &g1, &xs)?;
                ladder = ladder.max(g1.residual(&p, &xs)).max(g2.residual(&p, &xs));
            }
            out.push(Check::below(format!("{tag}: ladder residual"), ladder, 1e-5));
            let mut ann: f64 = 0.0;
            for init in [(r(1.0), r(0.0)), (r(0.0), r(1.0))] {
                ann = ann.max(ground_state_check(&p, init, &xs)?);
            }
            out.push(Check::below(format!("{tag}: A psi = 0"), ann, 1e-8));
        }
    }
    for (k, gamma) in [(0.5, 0.05), (1.0, 1.0)] {
        let mut drift: f64 = 0.0;
        for init in [(r(1.0), r(0.0)), (r(0.0), r(1.0))] {
            drift = drift.max(phieq_invariant_drift(&integrate_phieq(k, gamma, init, (-40.0, 40.0))?, k)?);
        }
        out.push(Check::below(format!("phieq invariant drift k={k} gamma={gamma}"), drift, 1e-8));
    }
    let slope = phieq_decay_slope(0.5, 0.05, (r(1.0), r(0.0)), 10.0, 40.0)?;
    out.push(Check::near("decay slope on [10,40]", slope, -0.5, 0.1));
    Ok(out)
}

/// Orbits passing near a pole of the chain are excluded from the random
/// checks: ‖F‖ and ‖B‖ must stay below this on the sampled interval.
const ORBIT_BOUND: f64 = 10.0;

fn bounded(tr: &ChainTrajectory, bound: f64) -> bool {
    tr.traj.sample_times(400).iter().all(|&x| {
        let (f, b) = tr.fb(x);
        f.norm() <= bound && b.norm() <= bound
    })
}

fn criterion7() -> Result<Vec<Check>> {
    let mut g = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    let mut accepted = 0;
    let mut attempts = 0;
    while accepted < 50 && attempts < 500 {
        attempts += 1;
        let d = 2 + accepted % 2;
        let s = random_state(&mut g, d, r(0.0), 0.3);
        let mus: Vec<C64> = (0..5).map(|_| c(g.gen_range(-1.5..1.5), g.gen_range(-1.5..1.5))).collect();
        let Ok(tr) = integrate_chain(&s, 10.0, 1e-12) else { continue };
        if !bounded(&tr, ORBIT_BOUND) {
            continue;
        }
        worst = worst.max(lax_spectrum_drift(&tr, &mus, 40)?);
        accepted += 1;
    }
    let mut lax: f64 = 0.0;
    let mut i = 0;
    while i < 10 {
        let alpha = c(g.gen_range(-1.0..1.0), g.gen_range(-1.0..1.0));
        let s = random_state(&mut g, 2 + i % 2, alpha, 0.3);
        let Ok(tr) = integrate_chain(&s, 3.0, 1e-12) else { continue };
        if !bounded(&tr, ORBIT_BOUND) {
            continue;
        }
        i += 1;
        lax = lax.max(lax_residual(&tr, c(g.gen_range(-1.0..1.0), g.gen_range(-1.0..1.0))));
    }
    Ok(vec![
        Check::near("states integrated", accepted as f64, 50.0, 0.0),
        Check::below("Lax eigenvalue drift on [0,10]", worst, 1e-8),
        Check::below("Lax residual, alpha != 0", lax, 1e-7),
    ])
}

fn criterion8() -> Result<Vec<Check>> {
    let mut g = ChaCha8Rng::seed_from_u64(8);
    let grid = Grid::new(0.0, 1.0, 1e-3)?;
    let tf = GaussPoly::family(2, 6, 81);
    let mut out = Vec::new();
    let mut good: f64 = 0.0;
    let mut bad = f64::INFINITY;
    for alpha in [r(0.0), c(0.4, 0.0), c(0.3, -0.2)] {
        let s = random_state(&mut g, 2, alpha, 0.3);
        good = good.max(intertwine_residual(&s, &tf, &grid)?);
        let delta = random_matrix(&mut g, 2, 0.1);
        bad = bad.min(intertwine_residual_perturbed(&s, &tf, &grid, Some(&delta))?);
    }
    out.push(Check::below("intertwine residual", good, 1e-6));
    out.push(Check::above("intertwine negative control", bad, 1e-2));
    let top = fig1(10.0)?.initial_state();
    let st = top.to_chain();
    let delta = CMatrix::from_real(&[&[0.0, 0.1], &[0.1, 0.0]]);
    out.push(Check::below("Novikov residual", novikov_residual(&st, &tf, &grid)?, 1e-6));
    out.push(Check::above("Novikov negative control", novikov_residual_perturbed(&st, &tf, &grid, Some(&delta))?, 1e-2));
    out.push(Check::below("commuting operator residual", commuting_operator_residual(&top, &tf, &grid, None)?, 1e-6));
    out.push(Check::above(
        "commuting operator negative control",
        commuting_operator_residual(&top, &tf, &grid, Some(&delta))?,
        1e-2,
    ));
    Ok(out)
}

fn criterion9() -> Result<Vec<Check>> {
    let mut g = ChaCha8Rng::seed_from_u64(9);
    let ca = CMatrix::diag_real(&[1.5, 0.5]);
    let cb = CMatrix::from_real(&[&[1.0, 1.0], &[0.0, 1.0]]);
    let mut out = Vec::new();
    for (name, cm, form) in [("case a", ca, NormalForm::A), ("case b", cb, NormalForm::B)] {
        let mut worst: f64 = 0.0;
        for _ in 0..10 {
            let tr = random_bounded_2x2(&mut g, &cm, r(0.0), 5.0, 10.0);
            worst = worst.max(first_integrals_2x2(&tr, form)?.max_drift());
        }
        out.push(Check::below(format!("{name}: first integral drift"), worst, 1e-8));
    }
    Ok(out)
}

fn criterion10() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let xs: Vec<f64> = (0..25).map(|i| -3.0 + 0.25 * i as f64).collect();
    let mut sol: f64 = 0.0;
    for gamma in [0.25, 4.0] {
        let f = SolitonFamily::new(gamma)?;
        for lam in [-1.0, 0.0, 0.3, 5.0] {
            for b in [1, 2] {
                let nu = soliton_nu(&f, b, lam)?;
                sol = sol.max(soliton_residual(&f, b, nu, &xs)?);
            }
        }
    }
    out.push(Check::below("soliton psi residual", sol, 1e-9));
    let f = EllipticFamily::new(-2.0, 0.5)?;
    let mut ell: f64 = 0.0;
    let mut used = 0;
    let pts: Vec<f64> = (1..20).map(|i| 0.1 * i as f64).collect();
    for lam in [0.7, -2.0, 1.3] {
        for mu in poly_roots(&elliptic_curve(&f).at_lambda(r(lam)))? {
            if let Ok(psi) = elliptic_psi(&f, lam, mu, 0.0, 2.0) {
                ell = ell.max(psi.residual(&pts)?);
                used += 1;
            }
        }
    }
    out.push(Check::below("elliptic psi residual", ell, 1e-7));
    out.push(Check::above("elliptic psi branches checked", used as f64, 5.0));
    let mut curve: f64 = 0.0;
    let mut vxx: f64 = 0.0;
    for (gamma, k) in [(-2.0, 0.5), (-0.5, 0.8), (3.0, 0.3)] {
        let f = EllipticFamily::new(gamma, k)?;
        let want = elliptic_curve(&f);
        for x in [0.0, 0.9, -2.2] {
            let s: ChainState = f.chain_state(x)?;
            let got = curve_from_lax(|mu| lax_matrix(&s, mu), 2)?.scale(r(gamma * gamma * (1.0 - gamma).powi(2)));
            curve = curve.max(want.relative_distance(&got));
            vxx = vxx.max(f.vxx_residual(x)?);
        }
    }
    out.push(Check::below("elliptic curve vs Lax", curve, 1e-8));
    out.push(Check::below("vxx residual of generating V", vxx, 1e-8));
    Ok(out)
}

fn criterion11() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (i, set) in fig2_sets().iter().enumerate() {
        let rep = set.report(600)?;
        let odd = rep.bands.multiplicities.iter().filter(|&&m| m % 2 == 1 || m > 6).count();
        out.push(Check::below(format!("set {}: odd or > 6 multiplicities", i + 1), odd as f64, 0.0));
        let s = set.state()?;
        let curve = top_spectral_curve(&s)?;
        let mut not_full = 0;
        for k in 1..40 {
            if let Ok(m) = curve_multiplicity(&curve, rep.p_max + 0.37 * k as f64) {
                not_full += (m != 6) as usize;
            }
        }
        out.push(Check::below(format!("set {}: multiplicity != 6 above max P", i + 1), not_full as f64, 0.0));
        let tr = integrate_top(&s, 10.0)?;
        let c1 = top_spectral_curve(&tr.state(10.0))?;
        out.push(Check::below(format!("set {}: curve drift over t in [0,10]", i + 1), curve.relative_distance(&c1), 1e-8));
    }
    Ok(out)
}
