//! Subcommand implementations. Each turns a JSON config into an
//! [`OutputBundle`].

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::check::{run_criterion, Check, CRITERIA};
use super::config::{self, matrix, ChainConfig, CheckConfig, FamiliesConfig, OscillatorConfig, PendulumLit, SourceConfig, TopConfig, TopLit};
use super::output::{Cell, OutputBundle, Table};
use super::svg::{band_plot, Locus};
use super::CliError;
use crate::dressing::{
    chain_rhs, integrate_chain, lax_matrix, lax_residual, lax_spectrum_drift, potential, random_state, ChainState, ReductionTag,
};
use crate::families::{
    elliptic_curve, integrate_phieq, mathieu_bands, mathieu_quartic, oscillator_ground_basis, oscillator_raise,
    oscillator_spectrum, phieq_invariant_drift, remark_curve_map_check, soliton_curve, soliton_nu, soliton_residual,
    symf_fprime, symf_potential, symf_solution, EllipticFamily, MathieuFamily, OscillatorFamily, SolitonFamily, SymfParams,
};
use crate::numerics::{poly_roots, r, CMatrix, C64};
use crate::spectral::{
    band_structure_from_curve, compare_bands, curve_from_lax, monodromy_scan, resonance_scan, BandStructure, BivariatePoly,
    CollisionKind, PotentialEvaluator,
};
use crate::top::{
    integrate_top, pendulum_bands, pendulum_closed_form, pendulum_coordinates, pendulum_curve, pendulum_period,
    top_potential, top_spectral_curve, PendulumParams, TopState,
};

/// Library errors raised while building inputs are configuration errors.
fn invalid<T>(r: crate::Result<T>) -> Result<T, CliError> {
    r.map_err(|e| CliError::Config(e.to_string()))
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn flat(m: &CMatrix) -> Value {
    json!(m.as_slice().iter().map(|z| [z.re, z.im]).collect::<Vec<_>>())
}

fn pendulum_params(p: &PendulumLit) -> Result<PendulumParams, CliError> {
    match (p.h0, p.h) {
        (Some(h0), None) => invalid(PendulumParams::new(p.delta, p.r, h0)),
        (None, Some(h)) => invalid(PendulumParams::from_h(p.delta, p.r, h)),
        _ => Err(CliError::Config("pendulum: give exactly one of h0 and h".into())),
    }
}

fn top_state(t: &TopLit) -> Result<TopState, CliError> {
    let (s, _) = invalid(TopState::canonical(matrix("omega", &t.omega)?, matrix("p", &t.p)?, matrix("j", &t.j)?))?;
    Ok(s)
}

/// Max |ω(t) − closed form| over `n` points of [0, t_end].
fn pendulum_error(p: &PendulumParams, state_at: impl Fn(f64) -> TopState, t_end: f64, n: usize) -> Result<f64, CliError> {
    let mut err: f64 = 0.0;
    for t in linspace(0.0, t_end, n) {
        let (_, _, w) = pendulum_coordinates(&state_at(t)).expect("2x2 state");
        err = err.max((w - pendulum_closed_form(p, t)?.0).abs());
    }
    Ok(err)
}

pub fn chain(v: Value) -> Result<OutputBundle, CliError> {
    let cfg: ChainConfig = config::parse(v)?;
    config::positive("t_end", cfg.t_end)?;
    config::positive("tol", cfg.tol)?;
    config::at_least("samples", cfg.samples, 2)?;
    if cfg.mu.is_empty() {
        return Err(CliError::Config("mu must list at least one spectral parameter".into()));
    }
    let alpha = cfg.alpha.value();
    let state = match (&cfg.f, &cfg.b, &cfg.c) {
        (Some(f), Some(b), Some(c)) => invalid(ChainState::new(matrix("f", f)?, matrix("b", b)?, matrix("c", c)?, alpha))?,
        (None, None, None) => {
            let rs = cfg.random.as_ref().ok_or_else(|| CliError::Config("give f, b and c, or random".into()))?;
            if !(1..=6).contains(&rs.d) {
                return Err(CliError::Config(format!("random.d must lie in 1..=6, got {}", rs.d)));
            }
            config::positive("random.scale", rs.scale)?;
            random_state(&mut ChaCha8Rng::seed_from_u64(cfg.seed), rs.d, alpha, rs.scale)
        }
        _ => return Err(CliError::Config("f, b and c must be given together".into())),
    };
    let tag = match cfg.tag.as_str() {
        "none" => ReductionTag::None,
        "top" => ReductionTag::Top,
        "real_symmetric" => ReductionTag::RealSymmetric,
        "hermitian" => ReductionTag::Hermitian,
        t => return Err(CliError::Config(format!("unknown tag '{t}'"))),
    };
    let state = invalid(state.with_tag(tag))?;
    let tr = integrate_chain(&state, cfg.t_end, cfg.tol)?;

    let effective = serde_json::to_value(&cfg).expect("config serializes");
    let mut out = OutputBundle::new("chain", effective, cfg.seed);
    let lines = linspace(0.0, cfg.t_end, cfg.samples)
        .into_iter()
        .map(|t| {
            let (f, b) = tr.fb(t);
            json!({"t": t, "f": flat(&f), "b": flat(&b)})
        })
        .collect();
    out.jsonl.push(("trajectory".into(), lines));

    let mus: Vec<C64> = cfg.mu.iter().map(|z| z.value()).collect();
    let mut report = serde_json::Map::new();
    report.insert("dimension".into(), json!(state.dim()));
    if alpha.norm() == 0.0 {
        let drift = lax_spectrum_drift(&tr, &mus, 40)?;
        report.insert("lax_eigenvalue_drift".into(), json!(drift));
        out.checks.push(Check::below("Lax eigenvalue drift", drift, 1e-8));
    } else {
        let res = mus.iter().map(|&mu| lax_residual(&tr, mu)).fold(0.0, f64::max);
        report.insert("lax_residual".into(), json!(res));
        out.checks.push(Check::below("Lax residual", res, 1e-7));
    }
    let sym = tr.symmetry_drift();
    report.insert("symmetry_drift".into(), json!(sym));
    report.insert("trace_law_drift".into(), json!(tr.trace_law_drift()));
    if tag != ReductionTag::None {
        out.checks.push(Check::below("symmetry drift", sym, 1e-8));
    }
    if tag == ReductionTag::Top && state.dim() == 2 {
        if let Some(p) = pendulum_of(&state) {
            let t_end = cfg.t_end;
            let err = pendulum_error(&p, |t| {
                let s = tr.state(t);
                TopState { omega: s.f, p: s.b, j: s.c }
            }, t_end, 400)?;
            report.insert("pendulum_closed_form_error".into(), json!(err));
            out.checks.push(Check::below("pendulum closed form", err, 1e-6));
        } else {
            out.notes.push("top state is not at an omega-maximum with J = diag(1, delta); closed form not compared".into());
        }
    }
    out.json.push(("report".into(), Value::Object(report)));
    Ok(out)
}

/// Pendulum parameters of a top-tagged 2×2 state sitting at the ω-maximum
/// (u = −R, v = 0, ω ≥ 0) with J = diag(1, δ).
fn pendulum_of(s: &ChainState) -> Option<PendulumParams> {
    let top = TopState::new(s.f.clone(), s.b.clone(), s.c.clone()).ok()?;
    let (u, v, w) = pendulum_coordinates(&top)?;
    let (j1, j2) = (top.j[(0, 0)].re, top.j[(1, 1)].re);
    if (j1 - 1.0).abs() > 1e-12 || v.abs() > 1e-12 || u >= 0.0 || w < 0.0 {
        return None;
    }
    let rr = -u;
    let beta = (1.0 - j2) / (1.0 + j2);
    let p = PendulumParams::new(j2, rr, w * w + beta * u).ok()?;
    ((p.amplitude() - w).abs() < 1e-12 * (1.0 + w)).then_some(p)
}

pub fn top(v: Value) -> Result<OutputBundle, CliError> {
    let cfg: TopConfig = config::parse(v)?;
    config::at_least("samples", cfg.samples, 2)?;
    let (state, pend) = match (&cfg.state, &cfg.pendulum) {
        (Some(s), _) => (top_state(s)?, None),
        (None, Some(p)) => {
            let p = pendulum_params(p)?;
            (p.initial_state(), Some(p))
        }
        (None, None) => return Err(CliError::Config("give pendulum or state".into())),
    };
    let t_end = match (cfg.t_end, pend) {
        (Some(t), _) => t,
        (None, Some(p)) => pendulum_period(&p)?,
        (None, None) => 10.0,
    };
    config::positive("t_end", t_end)?;
    let tr = integrate_top(&state, t_end)?;

    let effective = serde_json::to_value(&cfg).expect("config serializes");
    let mut out = OutputBundle::new("top", effective, cfg.seed);
    let lines = linspace(0.0, t_end, cfg.samples)
        .into_iter()
        .map(|t| {
            let s = tr.state(t);
            json!({"t": t, "omega": flat(&s.omega), "p": flat(&s.p)})
        })
        .collect();
    out.jsonl.push(("trajectory".into(), lines));
    let drift = tr.invariant_drift();
    out.checks.push(Check::below("invariant drift", drift, 1e-9));
    let c0 = top_spectral_curve(&state)?;
    let c1 = top_spectral_curve(&tr.state(t_end))?;
    let curve_drift = c0.relative_distance(&c1);
    out.checks.push(Check::below("spectral curve drift", curve_drift, 1e-8));
    let mut report = json!({"t_end": t_end, "invariant_drift": drift, "curve_drift": curve_drift});
    if let Some(p) = pend {
        let err = pendulum_error(&p, |t| tr.state(t), t_end, 400)?;
        out.checks.push(Check::below("pendulum closed form", err, 1e-6));
        report["closed_form_error"] = json!(err);
        report["regime"] = json!(format!("{:?}", p.regime()));
        let mut t = Table::new(&["t", "omega", "omega_closed_form"]);
        for x in linspace(0.0, t_end, cfg.samples) {
            let (_, _, w) = pendulum_coordinates(&tr.state(x)).expect("2x2 state");
            t.push(vec![x.into(), w.into(), pendulum_closed_form(&p, x)?.0.into()]);
        }
        out.tables.push(("omega".into(), t));
    }
    out.json.push(("report".into(), report));
    Ok(out)
}

/// A band source: analytic structure, a curve locus for plotting and an
/// optional periodic potential for the monodromy.
struct Source {
    bands: BandStructure,
    locus: Box<dyn Fn(f64) -> Vec<f64>>,
    y_label: &'static str,
    pot: Option<PotentialEvaluator>,
    extra_checks: Vec<Check>,
}

fn curve_locus(curve: BivariatePoly) -> Box<dyn Fn(f64) -> Vec<f64>> {
    Box::new(move |l| match poly_roots(&curve.at_lambda(r(l))) {
        Ok(roots) => roots.iter().filter(|m| m.re.abs() <= 1e-6 * m.norm().max(1.0)).map(|m| m.im).collect(),
        Err(_) => Vec::new(),
    })
}

fn source(cfg: &SourceConfig, with_potential: bool) -> Result<Source, CliError> {
    config::window("window", cfg.window)?;
    config::at_least("curve_samples", cfg.curve_samples, 16)?;
    let win = (cfg.window[0], cfg.window[1]);
    match cfg.source.as_str() {
        "pendulum" => {
            let p = pendulum_params(&cfg.pendulum)?;
            let bands = pendulum_bands(&p)?;
            let curve = pendulum_curve(&p);
            let from_curve = band_structure_from_curve(&curve, win, cfg.curve_samples)?;
            let inside: Vec<f64> = bands.breakpoints.iter().copied().filter(|b| *b > win.0 && *b < win.1).collect();
            let dev = if inside.len() == from_curve.breakpoints.len() {
                inside.iter().zip(&from_curve.breakpoints).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
            } else {
                f64::INFINITY
            };
            let pot = if with_potential {
                let t = pendulum_period(&p)?;
                Some(top_potential(&p.initial_state(), Some(t), (0.0, t), cfg.symmetrized)?)
            } else {
                None
            };
            Ok(Source {
                bands,
                locus: curve_locus(curve),
                y_label: "Im μ",
                pot,
                extra_checks: vec![Check::below("curve breakpoints vs analytic", dev, 1e-8)],
            })
        }
        "mathieu" => {
            config::finite("a", cfg.a)?;
            let a = cfg.a;
            Ok(Source {
                bands: mathieu_bands(a)?,
                locus: Box::new(move |l| match poly_roots(&mathieu_quartic(a, l)) {
                    Ok(roots) => roots.iter().filter(|z| z.im.abs() <= 1e-6 * z.norm().max(1.0)).map(|z| z.re).collect(),
                    Err(_) => Vec::new(),
                }),
                y_label: "ρ",
                pot: with_potential.then(|| MathieuFamily::new(a).evaluator()),
                extra_checks: Vec::new(),
            })
        }
        "elliptic" => {
            let f = invalid(EllipticFamily::new(cfg.gamma, cfg.k))?;
            let curve = elliptic_curve(&f);
            let pot = if with_potential && f.period().is_some() { Some(f.evaluator()?) } else { None };
            Ok(Source {
                bands: band_structure_from_curve(&curve, win, cfg.curve_samples)?,
                locus: curve_locus(curve),
                y_label: "Im μ",
                pot,
                extra_checks: Vec::new(),
            })
        }
        "soliton" => {
            let f = invalid(SolitonFamily::new(cfg.gamma))?;
            let curve = soliton_curve(&f);
            Ok(Source {
                bands: band_structure_from_curve(&curve, win, cfg.curve_samples)?,
                locus: curve_locus(curve),
                y_label: "Im μ",
                pot: None,
                extra_checks: Vec::new(),
            })
        }
        "top-trajectory" => {
            let lit = cfg.state.as_ref().ok_or_else(|| CliError::Config("top-trajectory needs state".into()))?;
            let s = top_state(lit)?;
            let curve = top_spectral_curve(&s)?;
            let pot = match (with_potential, cfg.period) {
                (true, Some(t)) => {
                    config::positive("period", t)?;
                    Some(top_potential(&s, Some(t), (0.0, t), cfg.symmetrized)?)
                }
                _ => None,
            };
            Ok(Source {
                bands: band_structure_from_curve(&curve, win, cfg.curve_samples)?,
                locus: curve_locus(curve),
                y_label: "Im μ",
                pot,
                extra_checks: Vec::new(),
            })
        }
        s => Err(CliError::Config(format!("unknown source '{s}' (pendulum|mathieu|elliptic|soliton|top-trajectory)"))),
    }
}

fn edges_table(b: &BandStructure) -> Table {
    let mut t = Table::new(&["lo", "hi", "multiplicity"]);
    let mut lo = f64::NEG_INFINITY;
    for (i, &m) in b.multiplicities.iter().enumerate() {
        let hi = b.breakpoints.get(i).copied().unwrap_or(f64::INFINITY);
        t.push(vec![lo.into(), hi.into(), m.into()]);
        lo = hi;
    }
    t
}

pub fn bands(v: Value) -> Result<OutputBundle, CliError> {
    let cfg: SourceConfig = config::parse(v)?;
    config::at_least("points", cfg.points, 2)?;
    let src = source(&cfg, true)?;
    let effective = serde_json::to_value(&cfg).expect("config serializes");
    let mut out = OutputBundle::new("bands", effective, cfg.seed);
    let grid = linspace(cfg.window[0], cfg.window[1], cfg.points);
    let numeric: Vec<Option<usize>> = match &src.pot {
        Some(pot) => {
            let cmp = compare_bands(&src.bands, pot, &grid)?;
            out.checks.push(Check::below("band mismatches", cmp.mismatches.len() as f64, 0.0));
            out.notes.push(format!(
                "{} points compared, {} skipped near edges, {} mismatches",
                cmp.points.len(),
                cmp.skipped.len(),
                cmp.mismatches.len()
            ));
            let mut it = cmp.points.iter().peekable();
            grid.iter()
                .map(|&l| match it.peek() {
                    Some(p) if p.0 == l => it.next().map(|p| p.2),
                    _ => None,
                })
                .collect()
        }
        None => {
            out.notes.push("no periodic potential for this source; numeric column left empty".into());
            vec![None; grid.len()]
        }
    };
    out.checks.extend(src.extra_checks.iter().cloned());
    let mut t = Table::new(&["lambda", "analytic_mult", "numeric_unit_count"]);
    for (l, n) in grid.iter().zip(numeric) {
        t.push(vec![(*l).into(), src.bands.multiplicity_at(*l).into(), n.into()]);
    }
    out.tables.push(("bands".into(), t));
    out.tables.push(("edges".into(), edges_table(&src.bands)));
    let lambdas = linspace(cfg.window[0], cfg.window[1], 801);
    let ys = lambdas.iter().map(|&l| (src.locus)(l)).collect();
    let title = format!("{} band structure", cfg.source);
    out.svg.push(("bands".into(), band_plot(&title, src.y_label, (cfg.window[0], cfg.window[1]), &src.bands, &Locus { lambdas, ys })));
    out.notes.push(format!("breakpoints {:?}, multiplicities {:?}", src.bands.breakpoints, src.bands.multiplicities));
    Ok(out)
}

pub fn monodromy(v: Value) -> Result<OutputBundle, CliError> {
    let cfg: SourceConfig = config::parse(v)?;
    config::at_least("points", cfg.points, 2)?;
    let src = source(&cfg, true)?;
    let pot = src.pot.ok_or_else(|| CliError::Config(format!("source '{}' has no periodic potential here", cfg.source)))?;
    let grid = match &cfg.lambdas {
        Some(ls) => {
            for &l in ls {
                config::finite("lambdas", l)?;
            }
            ls.clone()
        }
        None => linspace(cfg.window[0], cfg.window[1], cfg.points),
    };
    let effective = serde_json::to_value(&cfg).expect("config serializes");
    let mut out = OutputBundle::new("monodromy", effective, cfg.seed);
    let res = monodromy_scan(&pot, &grid)?;
    let n = 2 * pot.dim();
    let mut header = vec!["lambda".to_string(), "unit_count".into(), "analytic_mult".into(), "reciprocity_defect".into()];
    for k in 0..n {
        header.push(format!("tau{k}_re"));
        header.push(format!("tau{k}_im"));
    }
    let mut t = Table { header, rows: Vec::new() };
    // Past |τ| ~ 1e6 the small multipliers are below the integrator's
    // resolution, so the defect is only summarised on the rest.
    let mut recip: f64 = 0.0;
    let mut resolved = 0;
    for m in &res {
        let d = m.reciprocity_defect();
        if m.multipliers.iter().all(|t| t.norm() <= 1e6) {
            recip = recip.max(d);
            resolved += 1;
        }
        let mut row = vec![m.lambda.into(), m.unit_count.into(), src.bands.multiplicity_at(m.lambda).into(), d.into()];
        for tau in &m.multipliers {
            row.push(tau.re.into());
            row.push(tau.im.into());
        }
        t.rows.push(row);
    }
    out.tables.push(("monodromy".into(), t));
    out.notes.push(format!(
        "{} lambda values, max reciprocity defect {recip:.3e} on the {resolved} with |tau| <= 1e6",
        res.len()
    ));
    if cfg.collisions {
        let events = resonance_scan(&pot, (cfg.window[0], cfg.window[1]), cfg.points)?;
        let mut t = Table::new(&["lambda", "tau_re", "tau_im", "distance", "kind"]);
        for e in &events {
            let kind = match e.kind {
                CollisionKind::Periodic => "periodic",
                CollisionKind::Antiperiodic => "antiperiodic",
                CollisionKind::Resonance => "resonance",
            };
            t.push(vec![e.lambda.into(), e.tau.re.into(), e.tau.im.into(), e.distance.into(), kind.into()]);
        }
        out.notes.push(format!("{} multiplier collisions", events.len()));
        out.tables.push(("collisions".into(), t));
    }
    Ok(out)
}

pub fn oscillator(v: Value) -> Result<OutputBundle, CliError> {
    let cfg: OscillatorConfig = config::parse(v)?;
    config::positive("alpha", cfg.alpha)?;
    config::window("x_range", cfg.x_range)?;
    config::window("phi_range", cfg.phi_range)?;
    config::window("window", cfg.window)?;
    config::positive("step", cfg.step)?;
    config::at_least("points", cfg.points, 2)?;
    let p = invalid(OscillatorFamily::from_gamma(cfg.alpha, cfg.k, cfg.gamma, cfg.chi0))?;
    let effective = serde_json::to_value(&cfg).expect("config serializes");
    let mut out = OutputBundle::new("oscillator", effective, cfg.seed);
    let xs = linspace(cfg.x_range[0], cfg.x_range[1], cfg.points);

    let mut t = Table::new(&["x", "u11_re", "u11_im", "u12_re", "u12_im", "u21_re", "u21_im", "u22_re", "u22_im"]);
    for &x in &xs {
        let u = p.potential(x);
        let mut row = vec![x.into()];
        for z in u.as_slice() {
            row.push(z.re.into());
            row.push(z.im.into());
        }
        t.push(row);
    }
    out.tables.push(("potential".into(), t));

    let gamma = p.gamma();
    let phi = integrate_phieq(cfg.k, gamma, (r(1.0), r(0.0)), (cfg.phi_range[0], cfg.phi_range[1]))?;
    let mut t = Table::new(&["x", "phi_re", "phi_im", "phi_abs"]);
    for x in linspace(cfg.phi_range[0], cfg.phi_range[1], cfg.points) {
        let y = phi.eval(x);
        t.push(vec![x.into(), y[0].re.into(), y[0].im.into(), y[0].norm().into()]);
    }
    out.tables.push(("phi".into(), t));
    if cfg.k != 0.0 {
        let drift = phieq_invariant_drift(&phi, cfg.k)?;
        out.checks.push(Check::below("phieq invariant drift", drift, 1e-8));
    }

    // Ground states and two raisings, checked on the inner grid.
    let inner: Vec<f64> = xs.iter().copied().filter(|x| x.abs() <= 5.0).step_by(4).collect();
    let basis = oscillator_ground_basis(&p, p.x_max())?;
    let mut ladder = [0.0f64; 3];
    let mut states = Vec::new();
    for g in basis.iter() {
        let g1 = oscillator_raise(&p, g, &inner)?;
        let g2 = oscillator_raise(&p, &g1, &inner)?;
        for (n, s) in [g, &g1, &g2].into_iter().enumerate() {
            ladder[n] = ladder[n].max(s.residual(&p, &inner));
        }
        states.push([g.clone(), g1, g2]);
    }
    let mut t = Table::new(&["x", "psi0_1_re", "psi0_1_im", "psi0_2_re", "psi0_2_im", "psi1_1_re", "psi1_1_im", "psi1_2_re", "psi1_2_im"]);
    for &x in &xs {
        let mut row = vec![x.into()];
        for s in [&states[0][0], &states[0][1]] {
            for z in s.eval(x) {
                row.push(z.re.into());
                row.push(z.im.into());
            }
        }
        t.push(row);
    }
    out.tables.push(("eigenfunctions".into(), t));

    let levels = oscillator_spectrum(&p, (cfg.window[0], cfg.window[1]), cfg.step, p.x_max())?;
    let mut t = Table::new(&["n", "expected", "lambda", "multiplicity", "min_singular", "ladder_residual"]);
    let mut n = 0;
    loop {
        let want = 2.0 * cfg.alpha * n as f64;
        if want > cfg.window[1] {
            break;
        }
        if want >= cfg.window[0] {
            let lvl = levels.iter().min_by(|a, b| (a.lambda - want).abs().total_cmp(&(b.lambda - want).abs()));
            let got = lvl.map(|l| l.lambda).unwrap_or(f64::NAN);
            out.checks.push(Check::near(format!("level {n}"), got, want, 1e-4));
            let res = ladder.get(n).copied();
            if let Some(res) = res {
                out.checks.push(Check::below(format!("ladder residual n={n}"), res, 1e-5));
            }
            t.push(vec![
                n.into(),
                want.into(),
                got.into(),
                lvl.map(|l| l.multiplicity).into(),
                lvl.map(|l| l.min_singular).unwrap_or(f64::NAN).into(),
                res.map(Cell::from).unwrap_or(Cell::Empty),
            ]);
        }
        n += 1;
    }
    out.notes.push(format!("levels {:?}", levels.iter().map(|l| l.lambda).collect::<Vec<_>>()));
    out.tables.push(("spectrum".into(), t));
    Ok(out)
}

pub fn families(v: Value) -> Result<OutputBundle, CliError> {
    let cfg: FamiliesConfig = config::parse(v)?;
    let effective = serde_json::to_value(&cfg).expect("config serializes");
    let mut out = OutputBundle::new("families", effective, cfg.seed);
    let mut report = serde_json::Map::new();

    config::finite("mathieu_a", cfg.mathieu_a)?;
    let mb = mathieu_bands(cfg.mathieu_a)?;
    report.insert("mathieu".into(), json!({"a": cfg.mathieu_a, "breakpoints": mb.breakpoints, "multiplicities": mb.multiplicities}));

    let s = cfg.symf;
    let sp = SymfParams { k1: s.k1, k2: s.k2, omega0: s.omega0, omega1: s.omega1, alpha: s.alpha };
    let mut chain_res: f64 = 0.0;
    for x in linspace(-2.0, 2.0, 21) {
        let st = invalid(symf_solution(&sp, x))?;
        let (fp, _) = chain_rhs(&st)?;
        chain_res = chain_res.max((&fp - &symf_fprime(&sp, x)).norm()).max((&potential(&st)? - &symf_potential(&sp, x)).norm());
    }
    out.checks.push(Check::below("closed-form F solves the chain", chain_res, 1e-10));
    let mut sym = json!({"chain_residual": chain_res});
    if s.alpha == 0.0 {
        let rep = invalid(remark_curve_map_check(s.k1, s.k2, s.omega0, s.omega1))?;
        out.checks.push(Check::below("chain curve maps to the Mathieu quartic", rep.mismatch, 1e-8));
        out.checks.push(Check::below("chain curve x-independence", rep.x_drift, 1e-8));
        sym["curve_mismatch"] = json!(rep.mismatch);
        sym["curve_x_drift"] = json!(rep.x_drift);
    }
    report.insert("symf".into(), sym);

    let f = invalid(EllipticFamily::new(cfg.elliptic_gamma, cfg.elliptic_k))?;
    let want = elliptic_curve(&f);
    let g = cfg.elliptic_gamma;
    let (mut curve, mut vxx) = (0.0f64, 0.0f64);
    for x in [0.0, 0.4, 0.9, -2.2] {
        let st = f.chain_state(x)?;
        let got = curve_from_lax(|mu| lax_matrix(&st, mu), 2)?.scale(r(g * g * (1.0 - g).powi(2)));
        curve = curve.max(want.relative_distance(&got));
        vxx = vxx.max(f.vxx_residual(x)?);
    }
    out.checks.push(Check::below("elliptic curve vs Lax", curve, 1e-8));
    out.checks.push(Check::below("elliptic vxx residual", vxx, 1e-8));
    report.insert("elliptic".into(), json!({"gamma": g, "k": cfg.elliptic_k, "period": f.period(), "curve_mismatch": curve, "vxx_residual": vxx}));

    let sf = invalid(SolitonFamily::new(cfg.soliton_gamma))?;
    let xs = linspace(-3.0, 3.0, 25);
    let mut sol: f64 = 0.0;
    for lam in [-1.0, 0.0, 0.3, 5.0] {
        for b in [1, 2] {
            sol = sol.max(soliton_residual(&sf, b, soliton_nu(&sf, b, lam)?, &xs)?);
        }
    }
    out.checks.push(Check::below("soliton psi residual", sol, 1e-9));
    report.insert("soliton".into(), json!({"gamma": cfg.soliton_gamma, "threshold": sf.threshold(), "psi_residual": sol}));
    out.json.push(("families".into(), Value::Object(report)));
    Ok(out)
}

pub fn check(v: Value) -> Result<OutputBundle, CliError> {
    let cfg: CheckConfig = config::parse(v)?;
    for id in &cfg.only {
        if !CRITERIA.iter().any(|c| c.0 == *id) {
            return Err(CliError::Config(format!("unknown criterion {id}")));
        }
    }
    let ids: Vec<u8> = if cfg.only.is_empty() { CRITERIA.iter().map(|c| c.0).collect() } else { cfg.only.clone() };
    let effective = serde_json::to_value(&cfg).expect("config serializes");
    let mut out = OutputBundle::new("check", effective, cfg.seed);
    let mut reports = Vec::new();
    for id in ids {
        let rep = run_criterion(id);
        out.notes.push(rep.summary());
        for c in &rep.checks {
            let mut c = c.clone();
            c.name = format!("criterion {id}: {}", c.name);
            out.checks.push(c);
        }
        if let Some(e) = &rep.error {
            out.checks.push(Check::below(format!("criterion {id}: error {e}"), 1.0, 0.0));
        }
        reports.push(rep);
    }
    out.json.push(("acceptance".into(), serde_json::to_value(&reports).expect("reports serialize")));
    Ok(out)
}
