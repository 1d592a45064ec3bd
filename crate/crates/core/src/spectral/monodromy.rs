//! Bloch–Floquet monodromy of −ψ″ + Uψ = λψ written as Ψ′ = ÛΨ,
//! Û = [[0, I], [U − λ, 0]].

use rayon::prelude::*;

use super::curve::BandStructure;
use super::potential::PotentialEvaluator;
use crate::error::{Error, Result};
use crate::numerics::{eigenvalues_qr, r, CMatrix, OdeSetup, C64};

/// Unit-circle tolerance for multipliers.
pub const EPS_TAU: f64 = 1e-6;
/// Edge exclusion used by [`compare_bands`].
pub const EDGE_EXCLUSION: f64 = 1e-4;
/// Pairwise distance below which two multipliers count as colliding.
pub const COLLISION_DIST: f64 = 1e-4;

const MONO_RTOL: f64 = 1e-12;
const MONO_ATOL: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq)]
pub struct MonodromyResult {
    pub lambda: f64,
    pub monodromy: CMatrix,
    pub multipliers: Vec<C64>,
    pub unit_count: usize,
}

impl MonodromyResult {
    /// Number of multipliers with ||τ| − 1| ≤ eps.
    pub fn unit_count_with(&self, eps: f64) -> usize {
        self.multipliers.iter().filter(|t| (t.norm() - 1.0).abs() <= eps).count()
    }

    /// Distance between the multisets {τᵢ} and {1/τᵢ}, relative per element.
    pub fn reciprocity_defect(&self) -> f64 {
        let inv: Vec<C64> = self.multipliers.iter().map(|t| 1.0 / t).collect();
        relative_multiset_distance(&self.multipliers, &inv)
    }

    /// Distance between {τᵢ} and {τ̄ᵢ}, relative per element.
    pub fn conjugation_defect(&self) -> f64 {
        let conj: Vec<C64> = self.multipliers.iter().map(|t| t.conj()).collect();
        relative_multiset_distance(&self.multipliers, &conj)
    }

    /// Smallest distance between two multipliers near the unit circle.
    pub fn min_unit_pair_distance(&self, band: f64) -> Option<(f64, C64)> {
        let near: Vec<C64> = self.multipliers.iter().copied().filter(|t| (t.norm() - 1.0).abs() <= band).collect();
        let mut best: Option<(f64, C64)> = None;
        for i in 0..near.len() {
            for j in i + 1..near.len() {
                let dist = (near[i] - near[j]).norm();
                if best.is_none_or(|b| dist < b.0) {
                    best = Some((dist, (near[i] + near[j]) * 0.5));
                }
            }
        }
        best
    }
}

fn relative_multiset_distance(a: &[C64], b: &[C64]) -> f64 {
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let mut best = (f64::INFINITY, 0);
        for (k, y) in b.iter().enumerate() {
            if !used[k] {
                let dd = (x - y).norm() / x.norm().max(y.norm()).max(1.0);
                if dd < best.0 {
                    best = (dd, k);
                }
            }
        }
        used[best.1] = true;
        worst = worst.max(best.0);
    }
    worst
}

/// Integrate Ψ′ = ÛΨ from Ψ(x₀) = I over one period. Generated potentials
/// are co-integrated with their generating ODE.
pub fn monodromy(pot: &PotentialEvaluator, lambda: f64) -> Result<MonodromyResult> {
    let t = pot.period().ok_or(Error::PeriodMissing)?;
    let d = pot.dim();
    let n = 2 * d;
    let x0 = pot.origin();
    let lam = r(lambda);
    let apply = move |u: &CMatrix, psi: &[C64], dpsi: &mut [C64]| {
        // Rows 0..d: Ψ′_top = Ψ_bottom; rows d..2d: Ψ′_bottom = (U − λ)Ψ_top.
        for i in 0..d {
            for j in 0..n {
                dpsi[i * n + j] = psi[(d + i) * n + j];
                let mut s = -lam * psi[i * n + j];
                for k in 0..d {
                    s += u[(i, k)] * psi[k * n + j];
                }
                dpsi[(d + i) * n + j] = s;
            }
        }
    };
    let mut psi0 = vec![r(0.0); n * n];
    for i in 0..n {
        psi0[i * n + i] = r(1.0);
    }
    let m = match pot.generating() {
        None => {
            let mut setup = OdeSetup::new(n * n, |x, y: &[C64], dy: &mut [C64]| apply(&pot.eval(x), y, dy))
                .tolerances(MONO_RTOL, MONO_ATOL);
            let tr = setup.integrate(&psi0, (x0, x0 + t))?;
            tr.last().to_vec()
        }
        Some(ode) => {
            let gd = ode.state_dim();
            let mut y0 = ode.y0();
            y0.extend_from_slice(&psi0);
            let mut setup = OdeSetup::new(gd + n * n, |x, y: &[C64], dy: &mut [C64]| {
                ode.rhs(x, &y[..gd], &mut dy[..gd]);
                let u = ode.potential(x, &y[..gd]);
                apply(&u, &y[gd..], &mut dy[gd..]);
            })
            .tolerances(MONO_RTOL, MONO_ATOL);
            let tr = setup.integrate(&y0, (x0, x0 + t))?;
            tr.last()[gd..].to_vec()
        }
    };
    let monodromy = CMatrix::from_vec(n, m);
    let multipliers = eigenvalues_qr(&monodromy)?;
    let unit_count = multipliers.iter().filter(|t| (t.norm() - 1.0).abs() <= EPS_TAU).count();
    Ok(MonodromyResult { lambda, monodromy, multipliers, unit_count })
}

/// Monodromy over a λ-grid, in parallel, results in grid order.
pub fn monodromy_scan(pot: &PotentialEvaluator, lambdas: &[f64]) -> Result<Vec<MonodromyResult>> {
    lambdas.par_iter().map(|&l| monodromy(pot, l)).collect()
}

/// Outcome of [`compare_bands`].
#[derive(Clone, Debug, PartialEq)]
pub struct BandComparison {
    /// (λ, analytic multiplicity, numeric unit count) for every checked point.
    pub points: Vec<(f64, usize, usize)>,
    /// λ values where the two disagree.
    pub mismatches: Vec<f64>,
    /// Grid points skipped for being within 1e−4 of an edge.
    pub skipped: Vec<f64>,
}

/// Compare unit counts of the monodromy with an analytic band structure.
pub fn compare_bands(analytic: &BandStructure, pot: &PotentialEvaluator, grid: &[f64]) -> Result<BandComparison> {
    let (skipped, checked): (Vec<f64>, Vec<f64>) =
        grid.iter().partition(|&&l| analytic.distance_to_edge(l) <= EDGE_EXCLUSION);
    let res = monodromy_scan(pot, &checked)?;
    let points: Vec<(f64, usize, usize)> =
        res.iter().map(|m| (m.lambda, analytic.multiplicity_at(m.lambda), m.unit_count)).collect();
    let mismatches = points.iter().filter(|p| p.1 != p.2).map(|p| p.0).collect();
    Ok(BandComparison { points, mismatches, skipped })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CollisionKind {
    /// τ = +1.
    Periodic,
    /// τ = −1.
    Antiperiodic,
    /// Elsewhere on the unit circle.
    Resonance,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CollisionEvent {
    pub lambda: f64,
    pub tau: C64,
    pub distance: f64,
    pub kind: CollisionKind,
}

fn classify(tau: C64) -> CollisionKind {
    if (tau - 1.0).norm() < 1e-3 {
        CollisionKind::Periodic
    } else if (tau + 1.0).norm() < 1e-3 {
        CollisionKind::Antiperiodic
    } else {
        CollisionKind::Resonance
    }
}

const NEAR_BAND: f64 = 1e-3;

fn pair_distance(pot: &PotentialEvaluator, lambda: f64) -> Result<(f64, C64)> {
    let m = monodromy(pot, lambda)?;
    Ok(m.min_unit_pair_distance(NEAR_BAND).unwrap_or((f64::INFINITY, r(0.0))))
}

/// Golden-section minimisation of the closest-pair distance on [a, b].
pub fn locate_collision(pot: &PotentialEvaluator, bracket: (f64, f64), tol: f64) -> Result<CollisionEvent> {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = bracket;
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let mut f1 = pair_distance(pot, x1)?;
    let mut f2 = pair_distance(pot, x2)?;
    while b - a > tol {
        if f1.0 <= f2.0 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = pair_distance(pot, x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = pair_distance(pot, x2)?;
        }
    }
    let (lambda, (distance, tau)) = if f1.0 <= f2.0 { (x1, f1) } else { (x2, f2) };
    Ok(CollisionEvent { lambda, tau, distance, kind: classify(tau) })
}

/// Scan `n` points of `window`, refine every local minimum of the closest
/// unit-circle pair distance and report those that reach below 1e−4.
pub fn resonance_scan(pot: &PotentialEvaluator, window: (f64, f64), n: usize) -> Result<Vec<CollisionEvent>> {
    if n < 3 {
        return Err(Error::Domain("resonance scan needs at least 3 points".into()));
    }
    let h = (window.1 - window.0) / (n - 1) as f64;
    let grid: Vec<f64> = (0..n).map(|k| window.0 + k as f64 * h).collect();
    let dist: Vec<f64> = grid.par_iter().map(|&l| pair_distance(pot, l).map(|p| p.0)).collect::<Result<_>>()?;
    let candidates: Vec<usize> = (0..n)
        .filter(|&k| {
            let left = if k > 0 { dist[k - 1] } else { f64::INFINITY };
            let right = if k + 1 < n { dist[k + 1] } else { f64::INFINITY };
            dist[k].is_finite() && dist[k] <= left && dist[k] <= right
        })
        .collect();
    let mut events: Vec<CollisionEvent> = candidates
        .par_iter()
        .map(|&k| {
            let lo = grid[k.saturating_sub(1)];
            let hi = grid[(k + 1).min(n - 1)];
            locate_collision(pot, (lo, hi), 1e-10)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|e| e.distance < COLLISION_DIST)
        .collect();
    events.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    events.dedup_by(|a, b| (a.lambda - b.lambda).abs() < 1e-8);
    Ok(events)
}

/// Width of the λ-set around `center` where the unit count drops below its
/// value at center ± `probe`; zero when it never drops (a closed gap).
pub fn gap_width(pot: &PotentialEvaluator, center: f64, probe: f64) -> Result<f64> {
    let base = monodromy(pot, center - probe)?.unit_count.min(monodromy(pot, center + probe)?.unit_count);
    let inside = |l: f64| -> Result<bool> { Ok(monodromy(pot, l)?.unit_count < base) };
    if !inside(center)? {
        return Ok(0.0);
    }
    let edge = |mut out: f64, mut inn: f64| -> Result<f64> {
        while (out - inn).abs() > 1e-12 {
            let mid = 0.5 * (out + inn);
            if inside(mid)? {
                inn = mid;
            } else {
                out = mid;
            }
        }
        Ok(0.5 * (out + inn))
    };
    Ok(edge(center + probe, center)? - edge(center - probe, center)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn zero(d: usize) -> PotentialEvaluator {
        PotentialEvaluator::periodic(d, PI, move |_| CMatrix::zeros(d)).unwrap()
    }

    #[test]
    fn free_multipliers() {
        let m = monodromy(&zero(2), 4.0).unwrap();
        assert_eq!(m.unit_count, 4);
        assert!(m.multipliers.iter().all(|t| (t - 1.0).norm() < 1e-8));
        assert!((m.monodromy.det() - 1.0).norm() < 1e-7);
        let m = monodromy(&zero(1), -1.0).unwrap();
        assert_eq!(m.unit_count, 0);
        assert!(m.reciprocity_defect() < 1e-6);
        let np = PotentialEvaluator::closed(1, None, |_| CMatrix::zeros(1));
        assert_eq!(monodromy(&np, 1.0), Err(Error::PeriodMissing));
    }

    #[test]
    fn free_collisions_at_squares() {
        let ev = resonance_scan(&zero(1), (0.5, 10.0), 60).unwrap();
        let ls: Vec<f64> = ev.iter().map(|e| e.lambda).collect();
        assert_eq!(ls.len(), 3, "{ev:?}");
        for (e, m) in ev.iter().zip([1.0, 4.0, 9.0]) {
            assert!((e.lambda - m).abs() < 1e-6, "{e:?}");
        }
        assert_eq!(ev[0].kind, CollisionKind::Antiperiodic);
        assert_eq!(ev[1].kind, CollisionKind::Periodic);
    }

    #[test]
    fn scalar_mathieu_has_open_gap() {
        // −ψ″ + 2cos(2x)ψ: the first gap around λ ≈ 1 is open.
        let pot = PotentialEvaluator::periodic(1, PI, |x| CMatrix::diag(&[r(2.0 * (2.0 * x).cos())])).unwrap();
        // Band edges b₁(1) ≈ −0.1102 and a₁(1) ≈ 1.8591 of the Mathieu equation.
        let w = gap_width(&pot, 1.1, 1.4).unwrap();
        assert!((w - 1.9693).abs() < 1e-3, "{w}");
        let m = monodromy(&pot, 1.0).unwrap();
        assert!(m.conjugation_defect() < 1e-6 && m.reciprocity_defect() < 1e-6);
        assert!((m.monodromy.det() - 1.0).norm() < 1e-7);
    }
}
