//! U = A[[cos 2x, sin 2x], [sin 2x, −cos 2x]] and its parent family
//! U = k²I + 2β N(2γx + δ).

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::{c, r, CMatrix, CPoly, C64};
use crate::spectral::{curve_from_lax, BandStructure, BivariatePoly, PotentialEvaluator};

use super::symf::{symf_f, SymfParams};

/// N(χ) = [[cos χ, sin χ], [sin χ, −cos χ]].
pub fn reflection(chi: f64) -> CMatrix {
    let (s, c) = chi.sin_cos();
    CMatrix::from_real(&[&[c, s], &[s, -c]])
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MathieuFamily {
    pub a: f64,
}

impl MathieuFamily {
    pub fn new(a: f64) -> Self {
        MathieuFamily { a }
    }

    pub fn potential(&self, x: f64) -> CMatrix {
        mathieu_potential(self.a, x)
    }

    /// π-periodic evaluator for the spectral module.
    pub fn evaluator(&self) -> PotentialEvaluator {
        let a = self.a;
        PotentialEvaluator::closed(2, Some(PI), move |x| mathieu_potential(a, x))
    }
}

pub fn mathieu_potential(a: f64, x: f64) -> CMatrix {
    reflection(2.0 * x).scale_real(a)
}

/// ρ⁴ − 2(λ+1)ρ² + (λ−1)² − A² as a polynomial in ρ.
pub fn mathieu_quartic(a: f64, lambda: f64) -> CPoly {
    CPoly::from_real(&[(lambda - 1.0).powi(2) - a * a, 0.0, -2.0 * (lambda + 1.0), 0.0, 1.0])
}

/// The four roots ρ of the characteristic equation, from
/// ρ² = λ + 1 ± √(4λ + A²).
pub fn mathieu_dispersion(a: f64, lambda: f64) -> [C64; 4] {
    let disc = r(4.0 * lambda + a * a).sqrt();
    let p = (r(lambda + 1.0) + disc).sqrt();
    let m = (r(lambda + 1.0) - disc).sqrt();
    [p, -p, m, -m]
}

/// Number of real ρ (with multiplicity 2 counted once per sign) from the
/// inequality system: 2 when (λ−1)² < A², 4 when λ > −1, (λ−1)² > A² and
/// λ > −A²/4, otherwise 0.
pub fn mathieu_multiplicity(a: f64, lambda: f64) -> usize {
    let b = (lambda - 1.0).powi(2) - a * a;
    if b < 0.0 {
        2
    } else if lambda > -1.0 && b > 0.0 && lambda > -a * a / 4.0 {
        4
    } else {
        0
    }
}

/// Band structure from the inequalities; the candidate edges are −1,
/// −A²/4, 1 − A and 1 + A.
pub fn mathieu_bands(a: f64) -> Result<BandStructure> {
    if !(a >= 0.0) {
        return Err(Error::Domain(format!("amplitude must be nonnegative, got {a}")));
    }
    let mut pts = vec![-1.0, -a * a / 4.0, 1.0 - a, 1.0 + a];
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|x, y| (*x - *y).abs() < 1e-15);
    let mut mults = Vec::with_capacity(pts.len() + 1);
    mults.push(mathieu_multiplicity(a, pts[0] - 1.0));
    for w in pts.windows(2) {
        mults.push(mathieu_multiplicity(a, 0.5 * (w[0] + w[1])));
    }
    mults.push(mathieu_multiplicity(a, pts[pts.len() - 1] + 1.0));
    // Drop interior points that do not separate different multiplicities.
    let mut bp = Vec::new();
    let mut m = vec![mults[0]];
    for (i, &p) in pts.iter().enumerate() {
        if mults[i + 1] != *m.last().unwrap() {
            bp.push(p);
            m.push(mults[i + 1]);
        }
    }
    BandStructure::new(bp, m)
}

/// Explicit Bloch solution ψ(x) = Rᵀ(x) e^{iρx} φ₀ with
/// φ₀ = (2iρ, λ − A − 1 − ρ²) and R(x) the rotation by −x.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MathieuBloch {
    pub a: f64,
    pub lambda: f64,
    pub rho: C64,
    pub phi0: [C64; 2],
}

/// Bloch function for an on-curve (ρ, λ); the curve residual is measured
/// relative to the size of the quartic's terms.
pub fn mathieu_bloch(a: f64, lambda: f64, rho: C64) -> Result<MathieuBloch> {
    let q = mathieu_quartic(a, lambda);
    let res = q.eval(rho).norm() / q.abs_scale(rho).max(1.0);
    if res > 1e-8 {
        return Err(Error::OffCurve(res));
    }
    let phi0 = [c(0.0, 2.0) * rho, r(lambda - a - 1.0) - rho * rho];
    if phi0[0].norm() + phi0[1].norm() < 1e-12 {
        // ρ = 0, λ = A + 1: the constant-coefficient matrix is diag(0, −2A).
        return Ok(MathieuBloch { a, lambda, rho, phi0: [r(1.0), r(0.0)] });
    }
    Ok(MathieuBloch { a, lambda, rho, phi0 })
}

impl MathieuBloch {
    /// (ψ, ψ′, ψ″) at x.
    pub fn jet(&self, x: f64) -> [[C64; 2]; 3] {
        let (s, co) = x.sin_cos();
        let e = (c(0.0, 1.0) * self.rho * x).exp();
        let g = [self.phi0[0] * e, self.phi0[1] * e];
        let ir = c(0.0, 1.0) * self.rho;
        // Rᵀ = [[cos, −sin], [sin, cos]], (Rᵀ)′ = [[−sin, −cos], [cos, −sin]], (Rᵀ)″ = −Rᵀ.
        let rt = |v: [C64; 2]| [v[0] * co - v[1] * s, v[0] * s + v[1] * co];
        let rtp = |v: [C64; 2]| [-v[0] * s - v[1] * co, v[0] * co - v[1] * s];
        let psi = rt(g);
        let a1 = rtp(g);
        let b1 = rt([g[0] * ir, g[1] * ir]);
        let psi_p = [a1[0] + b1[0], a1[1] + b1[1]];
        let a2 = rtp([g[0] * ir, g[1] * ir]);
        let b2 = rt([g[0] * (ir * ir), g[1] * (ir * ir)]);
        let psi_pp = [-psi[0] + a2[0] * 2.0 + b2[0], -psi[1] + a2[1] * 2.0 + b2[1]];
        [psi, psi_p, psi_pp]
    }

    pub fn eval(&self, x: f64) -> [C64; 2] {
        self.jet(x)[0]
    }

    /// |−ψ″ + Uψ − λψ| / max(1, |ψ|) at x.
    pub fn residual(&self, x: f64) -> f64 {
        let [psi, _, pp] = self.jet(x);
        let u = mathieu_potential(self.a, x);
        let upsi = u.mul_vec(&psi);
        let res = (0..2).map(|i| (-pp[i] + upsi[i] - psi[i] * self.lambda).norm_sqr()).sum::<f64>().sqrt();
        let n = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        res / n.max(1.0)
    }

    /// Floquet multiplier τ = −e^{iρπ} over one period.
    pub fn multiplier(&self) -> C64 {
        -(c(0.0, PI) * self.rho).exp()
    }
}

/// Reduction of U = k²I + 2βN(2γx + δ) (β = k₁k₂/cos ω₀, γ = k₁ tan ω₀,
/// δ = ω₁ − ω₀) to the canonical form: with x′ = γx + δ/2 and
/// λ′ = (λ − k²)/γ², the operator becomes γ²(−D′² + A N(2x′) − λ′) with
/// A = 2β/γ². A negative A is flipped by the shift x′ → x′ + π/2.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MathieuReduction {
    pub k2: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    /// Canonical amplitude, ≥ 0.
    pub a: f64,
    /// Extra x′ shift (0 or π/2) used to make A nonnegative.
    pub flip: f64,
}

impl MathieuReduction {
    pub fn new(k1: f64, k2: f64, omega0: f64, omega1: f64) -> Result<Self> {
        let cw = omega0.cos();
        if cw.abs() < 1e-12 {
            return Err(Error::Domain("cos ω0 must not vanish".into()));
        }
        let gamma = k1 * omega0.tan();
        if gamma.abs() < 1e-12 {
            return Err(Error::Domain("γ = k1 tan ω0 vanishes: the potential is constant".into()));
        }
        let beta = k1 * k2 / cw;
        let a = 2.0 * beta / (gamma * gamma);
        let (a, flip) = if a < 0.0 { (-a, PI / 2.0) } else { (a, 0.0) };
        Ok(MathieuReduction { k2: k1 * k1 + k2 * k2, beta, gamma, delta: omega1 - omega0, a, flip })
    }

    /// U = k²I + 2βN(2γx + δ).
    pub fn original_potential(&self, x: f64) -> CMatrix {
        &CMatrix::scalar(2, r(self.k2)) + &reflection(2.0 * self.gamma * x + self.delta).scale_real(2.0 * self.beta)
    }

    pub fn x_canonical(&self, x: f64) -> f64 {
        self.gamma * x + 0.5 * self.delta + self.flip
    }

    pub fn lambda_canonical(&self, lambda: f64) -> f64 {
        (lambda - self.k2) / (self.gamma * self.gamma)
    }

    pub fn lambda_original(&self, lambda_c: f64) -> f64 {
        self.k2 + self.gamma * self.gamma * lambda_c
    }
}

fn bp_add(p: &BivariatePoly, q: &BivariatePoly) -> BivariatePoly {
    let di = p.deg_mu().max(q.deg_mu());
    let dj = p.deg_lambda().max(q.deg_lambda());
    let mut out = BivariatePoly::zeros(di, dj);
    for i in 0..=di {
        for j in 0..=dj {
            out.set(i, j, p.coeff(i, j) + q.coeff(i, j));
        }
    }
    out
}

fn bp_mul(p: &BivariatePoly, q: &BivariatePoly) -> BivariatePoly {
    let mut out = BivariatePoly::zeros(p.deg_mu() + q.deg_mu(), p.deg_lambda() + q.deg_lambda());
    for i in 0..=p.deg_mu() {
        for j in 0..=p.deg_lambda() {
            let a = p.coeff(i, j);
            if a == r(0.0) {
                continue;
            }
            for k in 0..=q.deg_mu() {
                for l in 0..=q.deg_lambda() {
                    let cur = out.coeff(i + k, j + l);
                    out.set(i + k, j + l, cur + a * q.coeff(k, l));
                }
            }
        }
    }
    out
}

fn bp_const(v: C64) -> BivariatePoly {
    let mut p = BivariatePoly::zeros(0, 0);
    p.set(0, 0, v);
    p
}

/// Report of the characteristic-curve / chain-curve comparison.
#[derive(Clone, Debug)]
pub struct RemarkMapReport {
    /// det(μC² − (CF+FC) − νI) in (μ, ν).
    pub chain_curve: BivariatePoly,
    /// The characteristic quartic after ρ = i(aμ + k₁ sin ω₀),
    /// λ = ν − a²μ² − bμ + c, A = 2k₂ cos ω₀.
    pub mapped_quartic: BivariatePoly,
    /// Max coefficient difference relative to the largest coefficient.
    pub mismatch: f64,
    /// Spread of the chain curve over x (it should not depend on x).
    pub x_drift: f64,
}

/// Compare the chain curve of the α = 0 solution with the mapped quartic
/// using a = −sin ω₀ cos ω₀, b = cos 2ω₀ − 2k₁ sin²ω₀ cos ω₀,
/// c = 1 − k₁² sin²ω₀ + 2k₁ cos ω₀.
pub fn remark_curve_map_check(k1: f64, k2: f64, omega0: f64, omega1: f64) -> Result<RemarkMapReport> {
    let p = SymfParams { k1, k2, omega0, omega1, alpha: 0.0 };
    let cm = p.c_matrix();
    let c2 = &cm * &cm;
    let chain_at = |x: f64| -> Result<BivariatePoly> {
        let f = symf_f(&p, x);
        let cf = cm.anticommutator(&f);
        // curve_from_lax gives det(L(μ) + λI); with λ = −ν the ν^j
        // coefficients pick up (−1)^j.
        let raw = curve_from_lax(|mu| &c2.scale(mu) - &cf, 2)?;
        let mut out = BivariatePoly::zeros(raw.deg_mu(), raw.deg_lambda());
        for i in 0..=raw.deg_mu() {
            for j in 0..=raw.deg_lambda() {
                out.set(i, j, raw.coeff(i, j) * if j % 2 == 0 { 1.0 } else { -1.0 });
            }
        }
        Ok(out)
    };
    let chain = chain_at(0.0)?;
    let x_drift = [0.37, 1.3, -2.1].iter().map(|&x| chain_at(x).map(|q| chain.relative_distance(&q))).try_fold(0.0f64, |m, d| d.map(|d| m.max(d)))?;

    let (s, co) = omega0.sin_cos();
    let a = -s * co;
    let b = (2.0 * omega0).cos() - 2.0 * k1 * s * s * co;
    let cc = 1.0 - k1 * k1 * s * s + 2.0 * k1 * co;
    let amp = 2.0 * k2 * co;
    let mut rho = BivariatePoly::zeros(1, 0);
    rho.set(0, 0, c(0.0, s * k1));
    rho.set(1, 0, c(0.0, a));
    let mut lam = BivariatePoly::zeros(2, 1);
    lam.set(0, 1, r(1.0));
    lam.set(2, 0, r(-a * a));
    lam.set(1, 0, r(-b));
    lam.set(0, 0, r(cc));
    let rho2 = bp_mul(&rho, &rho);
    let rho4 = bp_mul(&rho2, &rho2);
    let lp1 = bp_add(&lam, &bp_const(r(1.0)));
    let lm1 = bp_add(&lam, &bp_const(r(-1.0)));
    let t2 = bp_mul(&bp_mul(&lp1, &rho2), &bp_const(r(-2.0)));
    let t3 = bp_mul(&lm1, &lm1);
    let mapped = bp_add(&bp_add(&rho4, &t2), &bp_add(&t3, &bp_const(r(-amp * amp))));
    let mismatch = chain.relative_distance(&mapped);
    Ok(RemarkMapReport { chain_curve: chain, mapped_quartic: mapped, mismatch, x_drift })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::poly_roots;
    use crate::spectral::{compare_bands, monodromy};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn potential_values() {
        assert!((&mathieu_potential(2.0, 0.0) - &CMatrix::diag_real(&[2.0, -2.0])).norm() < 1e-15);
        let off = mathieu_potential(2.0, PI / 4.0);
        assert!((&off - &CMatrix::from_real(&[&[0.0, 2.0], &[2.0, 0.0]])).norm() < 1e-15);
        assert!((&mathieu_potential(1.3, 0.4 + PI) - &mathieu_potential(1.3, 0.4)).norm() < 1e-14);
    }

    #[test]
    fn dispersion_roots() {
        let l = 2.0 - 2.0 * 2f64.sqrt();
        let rs = mathieu_dispersion(2.0, l);
        assert!((rs[0] - 1.0).norm() < 1e-14 && (rs[1] + 1.0).norm() < 1e-14);
        let l = 5.0 - 2.0 * 5f64.sqrt();
        let rs = mathieu_dispersion(2.0, l);
        assert!((rs[0] - 2.0).norm() < 1e-14);
        // A = 0: (ρ² − (√λ+1)²)(ρ² − (√λ−1)²).
        let mut got: Vec<f64> = mathieu_dispersion(0.0, 4.0).iter().map(|z| z.re).collect();
        got.sort_by(f64::total_cmp);
        assert_eq!(got, vec![-3.0, -1.0, 1.0, 3.0]);
        // Agreement with a general root finder.
        let mut g = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let (a, l) = (g.gen_range(0.0..5.0), g.gen_range(-5.0..10.0));
            let ours = mathieu_dispersion(a, l);
            let gen = poly_roots(&mathieu_quartic(a, l)).unwrap();
            assert!(crate::numerics::multiset_distance(&ours, &gen) < 1e-7);
        }
    }

    #[test]
    fn bands_from_inequalities() {
        let b2 = mathieu_bands(2.0).unwrap();
        assert_eq!(b2.breakpoints, vec![-1.0, 3.0]);
        assert_eq!(b2.multiplicities, vec![0, 2, 4]);
        let b0 = mathieu_bands(0.0).unwrap();
        assert_eq!(b0.breakpoints, vec![0.0]);
        assert_eq!(b0.multiplicities, vec![0, 4]);
        let b4 = mathieu_bands(4.0).unwrap();
        assert_eq!(b4.breakpoints, vec![-3.0, 5.0]);
        assert_eq!(b4.multiplicities, vec![0, 2, 4]);
        let b1 = mathieu_bands(1.0).unwrap();
        assert_eq!(b1.breakpoints, vec![-0.25, 0.0, 2.0]);
        assert_eq!(b1.multiplicities, vec![0, 4, 2, 4]);
        assert!(mathieu_bands(-1.0).is_err());
    }

    #[test]
    fn bands_match_real_root_count() {
        for a in [0.5, 1.0, 2.0, 3.0, 4.0] {
            let bs = mathieu_bands(a).unwrap();
            for k in 0..400 {
                let l = -6.0 + 0.0513 * k as f64;
                if bs.distance_to_edge(l) < 1e-6 {
                    continue;
                }
                let real = mathieu_dispersion(a, l).iter().filter(|z| z.im.abs() < 1e-9).count();
                assert_eq!(bs.multiplicity_at(l), real, "A = {a}, λ = {l}");
            }
        }
    }

    #[test]
    fn bands_match_monodromy() {
        for a in [2.0, 4.0] {
            let fam = MathieuFamily::new(a);
            let grid: Vec<f64> = (0..100).map(|k| -6.0 + 0.137 * k as f64).collect();
            let rep = compare_bands(&mathieu_bands(a).unwrap(), &fam.evaluator(), &grid).unwrap();
            assert!(rep.mismatches.is_empty(), "A = {a}: {:?}", rep.mismatches);
        }
        let m = monodromy(&MathieuFamily::new(2.0).evaluator(), -0.5).unwrap();
        assert_eq!(m.unit_count, 2);
    }

    #[test]
    fn bloch_functions() {
        let l = 2.0 - 2.0 * 2f64.sqrt();
        let b = mathieu_bloch(2.0, l, r(1.0)).unwrap();
        for k in 0..50 {
            let x = PI * k as f64 / 49.0;
            assert!(b.residual(x) < 1e-9);
            let (p0, p1) = (b.eval(x), b.eval(x + PI));
            assert!((p0[0] - p1[0]).norm() + (p0[1] - p1[1]).norm() < 1e-12);
        }
        assert!((b.multiplier() - 1.0).norm() < 1e-14);
        assert!(matches!(mathieu_bloch(2.0, l, r(1.5)), Err(Error::OffCurve(_))));
        let mut g = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..10 {
            let (a, l) = (g.gen_range(0.5..4.0), g.gen_range(-3.0..8.0));
            for rho in mathieu_dispersion(a, l) {
                let b = mathieu_bloch(a, l, rho).unwrap();
                for x in [0.0, 0.7, 2.3] {
                    let n = b.eval(x).iter().map(|z| z.norm()).fold(0.0, f64::max);
                    assert!(b.residual(x) < 1e-9 * n.max(1.0));
                }
            }
        }
        // A = 0: plane waves.
        let b = mathieu_bloch(0.0, 4.0, r(3.0)).unwrap();
        assert!(b.residual(0.9) < 1e-12);
    }

    #[test]
    fn canonical_reduction() {
        for (k1, k2, w0, w1) in [(0.7, 0.4, 0.3, 0.1), (1.2, -0.5, -0.8, 2.0)] {
            let red = MathieuReduction::new(k1, k2, w0, w1).unwrap();
            for x in [0.0, 0.3, 1.7] {
                let orig = red.original_potential(x);
                let canon = mathieu_potential(red.a, red.x_canonical(x));
                // U − k² = γ² · U_canonical.
                let want = &CMatrix::scalar(2, r(red.k2)) + &canon.scale_real(red.gamma * red.gamma);
                assert!((&orig - &want).norm() < 1e-12);
                // The α = 0 chain potential F² − F′ is the same function.
                let p = SymfParams { k1, k2, omega0: w0, omega1: w1, alpha: 0.0 };
                assert!((&super::super::symf::symf_potential(&p, x) - &orig).norm() < 1e-12);
            }
            assert!((red.lambda_original(red.lambda_canonical(3.3)) - 3.3).abs() < 1e-14);
        }
        assert!(MathieuReduction::new(0.0, 1.0, 0.3, 0.0).is_err());
    }

    #[test]
    fn remark_map_holds() {
        let mut g = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..3 {
            let (k1, k2, w0, w1) = (g.gen_range(-1.5..1.5), g.gen_range(-1.5..1.5), g.gen_range(-1.2..1.2), g.gen_range(-3.0..3.0));
            let rep = remark_curve_map_check(k1, k2, w0, w1).unwrap();
            assert!(rep.x_drift < 1e-10);
            assert!(rep.mismatch < 1e-8, "{k1} {k2} {w0}: {}", rep.mismatch);
        }
        // ω₀ = 0: a = 0 and the map is a pure λ shift.
        let rep = remark_curve_map_check(0.5, 0.8, 0.0, 0.2).unwrap();
        assert!(rep.mismatch < 1e-8);
        let rep = remark_curve_map_check(0.0, 0.8, 0.6, 0.2).unwrap();
        assert!(rep.mismatch < 1e-8);
    }
}
