//! Soliton-like potential
//! U = (1/((1−γ)cosh²x)) [[2γ, −2√γ sinh x], [−2√γ sinh x, (1+γ)cosh²x − 2]]
//! with explicit ψ-functions on the two components of its reducible curve.

use crate::error::{Error, Result};
use crate::numerics::fd::{d2, stencil};
use crate::numerics::{r, CMatrix, C64};
use crate::spectral::BivariatePoly;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolitonFamily {
    pub gamma: f64,
}

impl SolitonFamily {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0) || (gamma - 1.0).abs() < 1e-12 || !gamma.is_finite() {
            return Err(Error::Domain(format!("gamma must be positive and != 1, got {gamma}")));
        }
        Ok(SolitonFamily { gamma })
    }

    /// (1+γ)/(1−γ): the lower-right entry of U at |x| → ∞. Positive for
    /// γ ∈ (0, 1), negative for γ > 1.
    pub fn threshold(&self) -> f64 {
        (1.0 + self.gamma) / (1.0 - self.gamma)
    }

    pub fn potential(&self, x: f64) -> CMatrix {
        let g = self.gamma;
        let ch2 = x.cosh().powi(2);
        let d = (1.0 - g) * ch2;
        let off = -2.0 * g.sqrt() * x.sinh() / d;
        CMatrix::from_real(&[&[2.0 * g / d, off], &[off, ((1.0 + g) * ch2 - 2.0) / d]])
    }

    /// diag(0, (1+γ)/(1−γ)).
    pub fn limit(&self) -> CMatrix {
        CMatrix::diag_real(&[0.0, self.threshold()])
    }
}

/// (μ² + λ)(μ² + γ²(λ − (1+γ)/(1−γ))).
pub fn soliton_curve(f: &SolitonFamily) -> BivariatePoly {
    let g2 = f.gamma * f.gamma;
    let t = f.threshold();
    let mut p = BivariatePoly::zeros(4, 2);
    p.set(4, 0, r(1.0));
    p.set(2, 1, r(1.0 + g2));
    p.set(2, 0, r(-g2 * t));
    p.set(0, 2, r(g2));
    p.set(0, 1, r(-g2 * t));
    p
}

/// ν² on branch 1 (−λ) or branch 2 ((1+γ)/(1−γ) − λ).
pub fn soliton_nu(f: &SolitonFamily, branch: u8, lambda: f64) -> Result<C64> {
    if !lambda.is_finite() {
        return Err(Error::BranchDomain(format!("lambda = {lambda}")));
    }
    match branch {
        1 => Ok(r(-lambda).sqrt()),
        2 => Ok(r(f.threshold() - lambda).sqrt()),
        _ => Err(Error::BranchDomain(format!("branch must be 1 or 2, got {branch}"))),
    }
}

/// ψ at x for the principal ν of the branch.
pub fn soliton_psi(f: &SolitonFamily, branch: u8, lambda: f64, x: f64) -> Result<Vec<C64>> {
    let nu = soliton_nu(f, branch, lambda)?;
    soliton_psi_nu(f, branch, nu, x)
}

/// ψ for either sign of ν. Branch 1:
/// e^{νx}((γ−1)ν − γ tanh x, −√γ sech x). Branch 2:
/// e^{νx}(sech x, (γ² + (1−γ)²λ − sech²x) / (√γ((γ−1)ν − tanh x))), whose
/// second entry equals −(tanh x + (γ−1)ν)/√γ; that form is used where the
/// quotient is 0/0.
pub fn soliton_psi_nu(f: &SolitonFamily, branch: u8, nu: C64, x: f64) -> Result<Vec<C64>> {
    let g = f.gamma;
    let sg = g.sqrt();
    let (th, sh) = (x.tanh(), 1.0 / x.cosh());
    let e = (nu * x).exp();
    match branch {
        1 => Ok(vec![e * (nu * (g - 1.0) - g * th), e * (-sg * sh)]),
        2 => {
            let lambda = r(f.threshold()) - nu * nu;
            let den = (nu * (g - 1.0) - th) * sg;
            let second = if den.norm() > 1e-6 {
                (lambda * (1.0 - g).powi(2) + g * g - sh * sh) / den
            } else {
                -(nu * (g - 1.0) + th) / sg
            };
            Ok(vec![e * sh, e * second])
        }
        _ => Err(Error::BranchDomain(format!("branch must be 1 or 2, got {branch}"))),
    }
}

/// max ‖−ψ″ + Uψ − λψ‖ / max ‖ψ‖ on `xs`, λ recovered from ν.
pub fn soliton_residual(f: &SolitonFamily, branch: u8, nu: C64, xs: &[f64]) -> Result<f64> {
    let lambda = match branch {
        1 => -nu * nu,
        2 => r(f.threshold()) - nu * nu,
        _ => return Err(Error::BranchDomain(format!("branch must be 1 or 2, got {branch}"))),
    };
    let h = 1e-2;
    let mut num: f64 = 0.0;
    let mut den: f64 = 0.0;
    for &x in xs {
        let pp = d2(&stencil(|t| soliton_psi_nu(f, branch, nu, t).unwrap(), x, h), h);
        let psi = soliton_psi_nu(f, branch, nu, x)?;
        let up = f.potential(x).mul_vec(&psi);
        num = num.max((0..2).map(|i| (-pp[i] + up[i] - psi[i] * lambda).norm_sqr()).sum::<f64>().sqrt());
        den = den.max(psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt());
    }
    Ok(num / den.max(f64::MIN_POSITIVE))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::c;

    fn xs() -> Vec<f64> {
        (0..25).map(|i| -3.0 + 0.25 * i as f64).collect()
    }

    #[test]
    fn potential_and_limit() {
        let f = SolitonFamily::new(4.0).unwrap();
        let u = f.potential(0.0);
        assert!((&u - &CMatrix::diag_real(&[-8.0 / 3.0, -1.0])).norm() < 1e-14);
        assert!(u.is_symmetric(0.0));
        for x in [-30.0, 30.0] {
            assert!((&f.potential(x) - &f.limit()).norm() < 1e-10);
        }
        assert!(f.threshold() < 0.0 && SolitonFamily::new(0.25).unwrap().threshold() > 0.0);
        assert!(SolitonFamily::new(1.0).is_err() && SolitonFamily::new(-0.5).is_err());
    }

    #[test]
    fn curve_factorizes() {
        let f = SolitonFamily::new(0.25).unwrap();
        let p = soliton_curve(&f);
        for (mu, lam) in [(c(0.3, 0.2), -0.7), (r(1.5), 2.0), (c(0.0, 1.1), 0.4)] {
            let want = (mu * mu + lam) * (mu * mu + f.gamma.powi(2) * (lam - f.threshold()));
            assert!((p.eval(mu, r(lam)) - want).norm() < 1e-13);
        }
    }

    #[test]
    fn psi_residuals() {
        let f = SolitonFamily::new(4.0).unwrap();
        let nu = soliton_nu(&f, 1, -1.0).unwrap();
        assert!(soliton_residual(&f, 1, nu, &xs()).unwrap() < 1e-9);
        let q = SolitonFamily::new(0.25).unwrap();
        let nu = soliton_nu(&q, 2, 0.0).unwrap();
        assert!(soliton_residual(&q, 2, nu, &xs()).unwrap() < 1e-9);
        for g in [0.25, 4.0, 9.0] {
            let f = SolitonFamily::new(g).unwrap();
            for lam in [-2.0, 0.3, 5.0] {
                for b in [1, 2] {
                    let nu = soliton_nu(&f, b, lam).unwrap();
                    for s in [nu, -nu] {
                        assert!(soliton_residual(&f, b, s, &xs()).unwrap() < 1e-9, "γ={g} λ={lam} branch {b}");
                    }
                }
            }
        }
        assert!(matches!(soliton_psi(&f, 3, 0.0, 0.0), Err(Error::BranchDomain(_))));
    }

    #[test]
    fn removable_point() {
        // γ = 1/4, λ = 0: (γ−1)ν = −√(1−γ²) equals tanh x at one real x.
        let f = SolitonFamily::new(0.25).unwrap();
        let nu = soliton_nu(&f, 2, 0.0).unwrap();
        let x0 = (-(1.0 - 0.0625f64).sqrt()).atanh();
        let near = soliton_psi_nu(&f, 2, nu, x0 + 1e-4).unwrap();
        let at = soliton_psi_nu(&f, 2, nu, x0).unwrap();
        assert!((near[1] - at[1]).norm() < 1e-3);
        assert!(at.iter().all(|z| z.is_finite()));
    }

    #[test]
    fn asymptotic_plane_waves() {
        // Far out, branch 1 is e^{νx} times a constant vector in the first slot.
        let f = SolitonFamily::new(4.0).unwrap();
        let nu = c(0.0, 0.7);
        let a = soliton_psi_nu(&f, 1, nu, 25.0).unwrap();
        let want = (nu * 25.0).exp() * (nu * 3.0 - 4.0);
        assert!((a[0] - want).norm() < 1e-9 && a[1].norm() < 1e-9);
    }
}
