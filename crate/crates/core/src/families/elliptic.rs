//! Elliptic potentials of the symmetric V-reduction with C⁻¹ = diag(1, γ):
//! U = 2V′ = (1/(1−γ)) [[−2γk²s², 2√(−γ)ks′], [2√(−γ)ks′, 2k²s² − (1+k²)(1+γ)]],
//! s = sn(x, k).

use crate::dressing::{lax_matrix, ChainState, VState};
use crate::error::{Error, Result};
use crate::numerics::fd::{d2, gauss_legendre, integrate_gl, stencil};
use crate::numerics::{complete_elliptic_k, jacobi_elliptic, r, CMatrix, C64};
use crate::spectral::{BivariatePoly, PotentialEvaluator};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EllipticFamily {
    pub gamma: f64,
    pub k: f64,
}

struct Sn {
    s: f64,
    sp: f64,
    spp: f64,
}

impl EllipticFamily {
    pub fn new(gamma: f64, k: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma == 0.0 || (gamma.abs() - 1.0).abs() < 1e-12 {
            return Err(Error::Domain(format!("gamma must avoid 0 and ±1, got {gamma}")));
        }
        if !(0.0..=1.0).contains(&k) {
            return Err(Error::Domain(format!("modulus must lie in [0, 1], got {k}")));
        }
        Ok(EllipticFamily { gamma, k })
    }

    /// U is real symmetric only for γ < 0; otherwise complex symmetric.
    pub fn is_real(&self) -> bool {
        self.gamma < 0.0
    }

    fn sq(&self) -> C64 {
        r(-self.gamma).sqrt()
    }

    fn sn(&self, x: f64) -> Sn {
        let k = self.k;
        let (s, cn, dn) = jacobi_elliptic(x, k);
        Sn { s, sp: cn * dn, spp: -(1.0 + k * k) * s + 2.0 * k * k * s * s * s }
    }

    /// C = diag(1, 1/γ).
    pub fn c_matrix(&self) -> CMatrix {
        CMatrix::diag_real(&[1.0, 1.0 / self.gamma])
    }

    /// Period of U: 4K(k), or None at k = 1.
    pub fn period(&self) -> Option<f64> {
        if self.k >= 1.0 {
            None
        } else {
            complete_elliptic_k(self.k).ok().map(|kk| 4.0 * kk)
        }
    }

    pub fn potential(&self, x: f64) -> CMatrix {
        let (g, k) = (self.gamma, self.k);
        let e = self.sn(x);
        let off = self.sq() * (2.0 * k * e.sp / (1.0 - g));
        CMatrix::from_rows(&[
            vec![r(-2.0 * g * k * k * e.s * e.s / (1.0 - g)), off],
            vec![off, r((2.0 * k * k * e.s * e.s - (1.0 + k * k) * (1.0 + g)) / (1.0 - g))],
        ])
    }

    /// U′ from s′ = cn dn and s″ = −(1+k²)s + 2k²s³.
    pub fn potential_prime(&self, x: f64) -> CMatrix {
        let (g, k) = (self.gamma, self.k);
        let e = self.sn(x);
        let off = self.sq() * (2.0 * k * e.spp / (1.0 - g));
        CMatrix::from_rows(&[
            vec![r(-4.0 * g * k * k * e.s * e.sp / (1.0 - g)), off],
            vec![off, r(4.0 * k * k * e.s * e.sp / (1.0 - g))],
        ])
    }

    /// Generating V with V(0) = 0 and V′ = U/2; the diagonal is a quadrature.
    pub fn v(&self, x: f64) -> CMatrix {
        let (g, k) = (self.gamma, self.k);
        let nodes = gauss_legendre(16);
        let panels = 1 + (x.abs() / 0.5).ceil() as usize;
        let s2 = integrate_gl(|t| r(self.sn(t).s.powi(2)), 0.0, x, panels, &nodes).re;
        let off = self.sq() * (k * self.sn(x).s / (1.0 - g));
        CMatrix::from_rows(&[
            vec![r(-g * k * k * s2 / (1.0 - g)), off],
            vec![off, r((k * k * s2 - 0.5 * (1.0 + k * k) * (1.0 + g) * x) / (1.0 - g))],
        ])
    }

    pub fn v_state(&self, x: f64) -> Result<VState> {
        VState::new(self.v(x), self.potential(x).scale_real(0.5), self.c_matrix())
    }

    /// ‖V″C⁻¹ + C⁻¹V″ − 2[V′, [V, C⁻¹]]‖ with V″ = U′/2.
    pub fn vxx_residual(&self, x: f64) -> Result<f64> {
        let vs = self.v_state(x)?;
        crate::dressing::vxx_residual(&vs.c, &vs.v, &vs.vp, &self.potential_prime(x).scale_real(0.5))
    }

    /// (F, B, C) = (CVC⁻¹ − V, CV′C⁻¹ + V′ − F², C).
    pub fn chain_state(&self, x: f64) -> Result<ChainState> {
        self.v_state(x)?.to_chain()
    }

    pub fn evaluator(&self) -> Result<PotentialEvaluator> {
        let f = *self;
        match self.period() {
            Some(t) => PotentialEvaluator::periodic(2, t, move |x| f.potential(x)),
            None => Ok(PotentialEvaluator::closed(2, None, move |x| f.potential(x))),
        }
    }
}

/// R(λ, μ) = (1−γ)²(γ²λ² + μ⁴) + (1+k²)(1−γ²)γ²(λ + μ²)
///         + (1−γ)(1−γ+γ²−γ³)λμ² + k²γ²(1+γ)².
pub fn elliptic_curve(f: &EllipticFamily) -> BivariatePoly {
    let (g, k) = (f.gamma, f.k);
    let a = (1.0 - g).powi(2);
    let b = (1.0 + k * k) * (1.0 - g * g) * g * g;
    let mut p = BivariatePoly::zeros(4, 2);
    p.set(0, 2, r(a * g * g));
    p.set(4, 0, r(a));
    p.set(0, 1, r(b));
    p.set(2, 0, r(b));
    p.set(2, 1, r((1.0 - g) * (1.0 - g + g * g - g * g * g)));
    p.set(0, 0, r(k * k * g * g * (1.0 + g).powi(2)));
    p
}

/// ψ = ψ₁(1, −(𝓛₁₁+λ)/𝓛₁₂) with ψ₁ = exp ∫ ψ₁′/ψ₁ from x₀.
#[derive(Clone, Debug)]
pub struct EllipticPsi {
    pub family: EllipticFamily,
    pub lambda: f64,
    pub mu: C64,
    pub x0: f64,
    nodes: (Vec<f64>, Vec<f64>),
}

/// Build ψ for a point (λ, μ) of the curve; the denominator γs′ + (γ−1)μs
/// must not vanish on [x0, x1].
pub fn elliptic_psi(f: &EllipticFamily, lambda: f64, mu: C64, x0: f64, x1: f64) -> Result<EllipticPsi> {
    let curve = elliptic_curve(f);
    let scale: f64 = (0..=4)
        .flat_map(|i| (0..=2).map(move |j| (i, j)))
        .map(|(i, j)| curve.coeff(i, j).norm() * mu.norm().powi(i as i32) * lambda.abs().powi(j as i32))
        .sum();
    let rel = curve.eval(mu, r(lambda)).norm() / scale.max(f64::MIN_POSITIVE);
    if rel > 1e-8 {
        return Err(Error::OffCurve(rel));
    }
    if f.k == 0.0 && (mu * mu + lambda).norm() > 1e-8 * (1.0 + lambda.abs()) {
        return Err(Error::Domain("at k = 0 the kernel is e₂ off the branch μ² = −λ, so ψ₁ vanishes".into()));
    }
    let (lo, hi) = (x0.min(x1), x0.max(x1));
    let n = 2000;
    let denom_scale = f.gamma.abs() + (f.gamma - 1.0).abs() * mu.norm();
    let den = |x: f64| {
        let e = f.sn(x);
        r(f.gamma * e.sp) + mu * ((f.gamma - 1.0) * e.s)
    };
    // Distance from 0 to each chord of the sampled denominator curve.
    let mut prev = (lo, den(lo));
    for i in 1..=n {
        let x = lo + (hi - lo) * i as f64 / n as f64;
        let d = den(x);
        let seg = d - prev.1;
        let t = if seg.norm_sqr() > 0.0 { (-(prev.1.conj() * seg).re / seg.norm_sqr()).clamp(0.0, 1.0) } else { 0.0 };
        if (prev.1 + seg * t).norm() < 1e-6 * denom_scale {
            return Err(Error::DenominatorZero(prev.0 + t * (x - prev.0)));
        }
        prev = (x, d);
    }
    Ok(EllipticPsi { family: *f, lambda, mu, x0, nodes: gauss_legendre(20) })
}

/// (𝓛₁₁ + λ)/𝓛₁₂, taken as 0 when 𝓛 is diagonal (k = 0).
fn kernel_ratio(l: &CMatrix, lambda: f64) -> C64 {
    if l[(0, 1)].norm() <= 1e-14 * l.norm() {
        r(0.0)
    } else {
        (l[(0, 0)] + lambda) / l[(0, 1)]
    }
}

impl EllipticPsi {
    /// (γμs′ + k²γs³ + ((1−γ)/(1+γ))(γλ − μ²)s) / (γs′ + (γ−1)μs).
    pub fn log_derivative(&self, x: f64) -> C64 {
        let (g, k, mu, lam) = (self.family.gamma, self.family.k, self.mu, self.lambda);
        let e = self.family.sn(x);
        let num = mu * (g * e.sp) + k * k * g * e.s.powi(3) + (r(g * lam) - mu * mu) * ((1.0 - g) / (1.0 + g) * e.s);
        num / (r(g * e.sp) + mu * ((g - 1.0) * e.s))
    }

    /// −(𝓐₁₁ − 𝓐₁₂(𝓛₁₁+λ)/𝓛₁₂) from the Lax pair, 𝓐 = F − μC.
    pub fn log_derivative_lax(&self, x: f64) -> Result<C64> {
        let s = self.family.chain_state(x)?;
        let l = lax_matrix(&s, self.mu);
        let a = &s.f - &s.c.scale(self.mu);
        Ok(-(a[(0, 0)] - a[(0, 1)] * kernel_ratio(&l, self.lambda)))
    }

    pub fn psi1(&self, x: f64) -> C64 {
        let panels = 1 + ((x - self.x0).abs() / 0.25).ceil() as usize;
        integrate_gl(|t| self.log_derivative(t), self.x0, x, panels, &self.nodes).exp()
    }

    pub fn eval(&self, x: f64) -> Result<Vec<C64>> {
        let s = self.family.chain_state(x)?;
        let l = lax_matrix(&s, self.mu);
        let p1 = self.psi1(x);
        Ok(vec![p1, -p1 * kernel_ratio(&l, self.lambda)])
    }

    /// max ‖−ψ″ + Uψ − λψ‖ / max ‖ψ‖ over `xs`.
    pub fn residual(&self, xs: &[f64]) -> Result<f64> {
        let h = 1e-2;
        let mut num: f64 = 0.0;
        let mut den: f64 = 0.0;
        for &x in xs {
            let mut err = None;
            let st = stencil(
                |t| {
                    self.eval(t).unwrap_or_else(|e| {
                        err = Some(e);
                        vec![r(f64::NAN); 2]
                    })
                },
                x,
                h,
            );
            if let Some(e) = err {
                return Err(e);
            }
            let pp = d2(&st, h);
            let psi = self.eval(x)?;
            let up = self.family.potential(x).mul_vec(&psi);
            num = num.max((0..2).map(|i| (-pp[i] + up[i] - psi[i] * self.lambda).norm_sqr()).sum::<f64>().sqrt());
            den = den.max(psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt());
        }
        Ok(num / den.max(f64::MIN_POSITIVE))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::curve_from_lax;

    fn sample() -> Vec<f64> {
        (0..41).map(|i| -3.0 + 0.15 * i as f64).collect()
    }

    fn on_curve_mu(f: &EllipticFamily, lambda: f64) -> Vec<C64> {
        crate::numerics::poly_roots(&elliptic_curve(f).at_lambda(r(lambda))).unwrap()
    }

    #[test]
    fn potential_forms() {
        let f = EllipticFamily::new(-2.0, 0.5).unwrap();
        assert!(f.is_real());
        for x in sample() {
            let u = f.potential(x);
            assert!(u.is_real(0.0) && u.is_symmetric(0.0));
        }
        // x = 0: s = 0, s′ = 1.
        let u = f.potential(0.0);
        assert!((u[(0, 1)].re - 2f64.sqrt() / 3.0).abs() < 1e-15);
        assert!((u[(1, 1)].re - 1.25 / 3.0).abs() < 1e-15);
        let z = EllipticFamily::new(-3.0, 0.0).unwrap();
        for x in [0.3, 2.0] {
            assert!((&z.potential(x) - &CMatrix::diag_real(&[0.0, 0.5])).norm() < 1e-15);
        }
        let t = f.period().unwrap();
        for x in [0.1, 0.7] {
            assert!((&f.potential(x + t) - &f.potential(x)).norm() < 1e-12);
        }
        assert!(!EllipticFamily::new(2.0, 0.5).unwrap().potential(0.4).is_real(1e-12));
        assert!(EllipticFamily::new(1.0, 0.5).is_err());
        assert!(EllipticFamily::new(-2.0, 1.5).is_err());
    }

    #[test]
    fn hyperbolic_degeneration() {
        let (g, f) = (-2.0, EllipticFamily::new(-2.0, 1.0).unwrap());
        assert!(f.period().is_none());
        for x in [-1.5, 0.2, 2.4] {
            let (th, sh) = (f64::tanh(x), 1.0 / f64::cosh(x));
            let sq = (-g as f64).sqrt();
            let want = CMatrix::from_real(&[
                &[-2.0 * g * th * th / (1.0 - g), 2.0 * sq * sh * sh / (1.0 - g)],
                &[2.0 * sq * sh * sh / (1.0 - g), (2.0 * th * th - 2.0 * (1.0 + g)) / (1.0 - g)],
            ]);
            assert!((&f.potential(x) - &want).norm() < 1e-12);
        }
    }

    #[test]
    fn generating_v() {
        for (g, k) in [(-2.0, 0.5), (-3.0, 0.9), (0.5, 0.3)] {
            let f = EllipticFamily::new(g, k).unwrap();
            for x in [-2.0, 0.0, 0.8, 3.3] {
                assert!(f.vxx_residual(x).unwrap() < 1e-8);
                let s = f.chain_state(x).unwrap();
                assert!((&crate::dressing::potential(&s).unwrap() - &f.potential(x)).norm() < 1e-10);
            }
            // V′ = U/2 against a difference quotient of V.
            let h = 1e-3;
            let dv = &f.v(1.1 + h) - &f.v(1.1 - h);
            assert!((&dv.scale_real(0.5 / h) - &f.potential(1.1).scale_real(0.5)).norm() < 1e-6);
        }
    }

    #[test]
    fn curve_matches_lax() {
        for (g, k) in [(-2.0, 0.5), (-3.0, 0.9), (0.5, 0.3), (-0.4, 1.0)] {
            let f = EllipticFamily::new(g, k).unwrap();
            let want = elliptic_curve(&f);
            for x in [0.0, 0.9, -2.2] {
                let s = f.chain_state(x).unwrap();
                let got = curve_from_lax(|mu| lax_matrix(&s, mu), 2).unwrap().scale(r(g * g * (1.0 - g).powi(2)));
                assert!(want.relative_distance(&got) < 1e-8, "γ={g} k={k} x={x}");
            }
        }
    }

    #[test]
    fn psi_quadrature() {
        let mut checked = 0;
        for (g, k, lam) in [(-2.0, 0.5, 0.7), (-2.0, 0.5, -2.0), (-3.0, 0.8, 1.3), (-2.0, 0.0, 0.4)] {
            let f = EllipticFamily::new(g, k).unwrap();
            for mu in on_curve_mu(&f, lam) {
                let psi = match elliptic_psi(&f, lam, mu, 0.0, 2.0) {
                    Ok(p) => p,
                    Err(Error::DenominatorZero(_)) => continue,
                    Err(Error::Domain(_)) if k == 0.0 => continue,
                    Err(e) => panic!("{e}"),
                };
                for x in [0.3, 1.1, 1.8] {
                    let (a, b) = (psi.log_derivative(x), psi.log_derivative_lax(x).unwrap());
                    assert!((a - b).norm() < 1e-8 * (1.0 + a.norm()), "γ={g} k={k} λ={lam} μ={mu} x={x} {a} {b}");
                }
                let xs: Vec<f64> = (1..20).map(|i| 0.1 * i as f64).collect();
                assert!(psi.residual(&xs).unwrap() < 1e-7, "γ={g} k={k} λ={lam} μ={mu}");
                checked += 1;
            }
        }
        assert!(checked >= 8, "{checked}");
        let f = EllipticFamily::new(-2.0, 0.5).unwrap();
        assert!(matches!(elliptic_psi(&f, 0.7, r(0.3), 0.0, 1.0), Err(Error::OffCurve(_))));
    }

    #[test]
    fn bands_match_monodromy() {
        use crate::spectral::{band_structure_from_curve, compare_bands};
        for (g, k) in [(-2.0, 0.5), (-0.5, 0.8)] {
            let f = EllipticFamily::new(g, k).unwrap();
            let bs = band_structure_from_curve(&elliptic_curve(&f), (-6.0, 10.0), 800).unwrap();
            assert_eq!(bs.multiplicities, vec![0, 2, 0, 4]);
            let grid: Vec<f64> = (0..200).map(|i| -6.0 + 16.0 * i as f64 / 199.0).collect();
            let cmp = compare_bands(&bs, &f.evaluator().unwrap(), &grid).unwrap();
            assert!(cmp.mismatches.is_empty(), "{:?}", cmp.mismatches);
        }
    }
}
