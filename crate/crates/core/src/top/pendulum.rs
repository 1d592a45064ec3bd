//! The two-dimensional top: a pendulum in the variables
//! u = (P₁₁ − P₂₂)/2, v = P₁₂, ω = Ω₁₂ with u̇ = −2ωv, v̇ = 2ωu, ω̇ = βv.

use crate::error::{Error, Result};
use crate::numerics::{complete_elliptic_k, jacobi_elliptic, r, CMatrix};
use crate::spectral::{BandStructure, BivariatePoly};

use super::TopState;

/// Pendulum data with J = diag(1, δ).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PendulumParams {
    /// J₂/J₁ ∈ (0, 1].
    pub delta: f64,
    /// Casimir radius, u² + v² = R².
    pub r: f64,
    /// Energy H₀ = ω² + βu.
    pub h0: f64,
}

/// Which branch of the band picture applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PendulumCase {
    /// h₋ ≤ h ≤ h*: bands [−R, R] (2) and [R, ∞) (4).
    A,
    /// h > h*: an extra band [λ₀, −R] of multiplicity 4.
    B,
}

/// Motion type of the orbit through the ω-maximum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    Equilibrium,
    Libration,
    Separatrix,
    Rotation,
}

impl PendulumParams {
    pub fn new(delta: f64, r: f64, h0: f64) -> Result<Self> {
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::Domain(format!("delta must lie in (0, 1], got {delta}")));
        }
        if !(r > 0.0) {
            return Err(Error::Domain(format!("R must be positive, got {r}")));
        }
        let p = PendulumParams { delta, r, h0 };
        let floor = -p.beta() * r;
        if !h0.is_finite() || h0 < floor - 1e-12 * r {
            return Err(Error::Domain(format!("H0 = {h0} lies below the minimum energy {floor}")));
        }
        Ok(p)
    }

    /// Parameters from the scaled energy h = (1+δ)²/δ · H₀.
    pub fn from_h(delta: f64, r: f64, h: f64) -> Result<Self> {
        Self::new(delta, r, h * delta / ((1.0 + delta) * (1.0 + delta)))
    }

    pub fn beta(&self) -> f64 {
        (1.0 - self.delta) / (1.0 + self.delta)
    }

    pub fn h(&self) -> f64 {
        (1.0 + self.delta).powi(2) / self.delta * self.h0
    }

    pub fn h_minus(&self) -> f64 {
        -(1.0 / self.delta - self.delta) * self.r
    }

    pub fn h_plus(&self) -> f64 {
        (1.0 / self.delta - self.delta) * self.r
    }

    pub fn h_star(&self) -> f64 {
        (self.delta + 1.0 / self.delta) * self.r
    }

    /// A with A² = H₀ + βR (the maximum of ω).
    pub fn amplitude(&self) -> f64 {
        (self.h0 + self.beta() * self.r).max(0.0).sqrt()
    }

    /// k² = 2βR / (βR + H₀); infinite at the equilibrium.
    pub fn modulus_sq(&self) -> f64 {
        let br = self.beta() * self.r;
        let den = br + self.h0;
        if den <= 0.0 {
            f64::INFINITY
        } else {
            2.0 * br / den
        }
    }

    pub fn regime(&self) -> Regime {
        let a2 = self.h0 + self.beta() * self.r;
        if a2 <= 1e-14 * self.r.max(1.0) {
            return Regime::Equilibrium;
        }
        let k2 = self.modulus_sq();
        if (k2 - 1.0).abs() < 1e-14 {
            Regime::Separatrix
        } else if k2 < 1.0 {
            Regime::Rotation
        } else {
            Regime::Libration
        }
    }

    pub fn case(&self) -> PendulumCase {
        if self.h() <= self.h_star() {
            PendulumCase::A
        } else {
            PendulumCase::B
        }
    }

    /// The top state at the ω-maximum: u = −R, v = 0, ω = A.
    pub fn initial_state(&self) -> TopState {
        let (u, w) = (-self.r, self.amplitude());
        TopState::new(
            CMatrix::from_real(&[&[0.0, w], &[-w, 0.0]]),
            CMatrix::from_real(&[&[u, 0.0], &[0.0, -u]]),
            CMatrix::diag_real(&[1.0, self.delta]),
        )
        .expect("pendulum states are valid")
    }
}

/// (ω, ω̇) at time t on the orbit through the ω-maximum at t = 0:
/// ω = A dn(At, k) when k ≤ 1, ω = A cn(kAt, 1/k) when k > 1.
pub fn pendulum_closed_form(p: &PendulumParams, t: f64) -> Result<(f64, f64)> {
    let a = p.amplitude();
    match p.regime() {
        Regime::Equilibrium => Ok((0.0, 0.0)),
        Regime::Separatrix => {
            let s = 1.0 / (a * t).cosh();
            Ok((a * s, -a * a * s * (a * t).tanh()))
        }
        Regime::Rotation => {
            let k2 = p.modulus_sq();
            let (sn, cn, dn) = jacobi_elliptic(a * t, k2.sqrt());
            Ok((a * dn, -a * a * k2 * sn * cn))
        }
        Regime::Libration => {
            let k = p.modulus_sq().sqrt();
            let (sn, cn, dn) = jacobi_elliptic(k * a * t, 1.0 / k);
            Ok((a * cn, -k * a * a * sn * dn))
        }
    }
}

/// |ω̇² − (β²R² − (H₀ − ω²)²)| / max(1, β²R²) at time t.
pub fn pendulum_residual(p: &PendulumParams, t: f64) -> Result<f64> {
    let (w, wd) = pendulum_closed_form(p, t)?;
    let br = p.beta() * p.r;
    let rhs = br * br - (p.h0 - w * w).powi(2);
    Ok((wd * wd - rhs).abs() / (br * br).max(1.0))
}

/// Period of (u, v, ω): 2K(k)/A for rotations, 4K(1/k)/(kA) for librations
/// (2π/√(2βR) in the small-amplitude limit).
pub fn pendulum_period(p: &PendulumParams) -> Result<f64> {
    let a = p.amplitude();
    match p.regime() {
        Regime::Separatrix => Err(Error::Domain("the separatrix orbit has no period".into())),
        Regime::Equilibrium => {
            let br = p.beta() * p.r;
            if br > 0.0 {
                Ok(2.0 * std::f64::consts::PI / (2.0 * br).sqrt())
            } else {
                Err(Error::Domain("equilibrium of the spherical top has no period".into()))
            }
        }
        Regime::Rotation => Ok(2.0 * complete_elliptic_k(p.modulus_sq().sqrt())? / a),
        Regime::Libration => {
            let k = p.modulus_sq().sqrt();
            Ok(4.0 * complete_elliptic_k(1.0 / k)? / (k * a))
        }
    }
}

/// Spectral curve in μ with J = diag(1, δ):
/// δ²μ⁴ + μ²[(1+δ)²H₀ + (1+δ²)λ] + λ² − R².
pub fn pendulum_curve(p: &PendulumParams) -> BivariatePoly {
    let d = p.delta;
    let mut c = BivariatePoly::zeros(4, 2);
    c.set(4, 0, r(d * d));
    c.set(2, 0, r((1.0 + d).powi(2) * p.h0));
    c.set(2, 1, r(1.0 + d * d));
    c.set(0, 2, r(1.0));
    c.set(0, 0, r(-p.r * p.r));
    c
}

/// λ₀: the largest root of (δ−δ⁻¹)²λ² + 2h(δ+δ⁻¹)λ + h² + 4R² = 0
/// (linear when δ = 1).
pub fn lambda0(p: &PendulumParams) -> Result<f64> {
    let (d, h, rr) = (p.delta, p.h(), p.r);
    let a = (d - 1.0 / d).powi(2);
    let b = 2.0 * h * (d + 1.0 / d);
    let c = h * h + 4.0 * rr * rr;
    if a <= 1e-14 * b.abs() {
        if b == 0.0 {
            return Err(Error::Domain("degenerate λ0 equation".into()));
        }
        return Ok(-c / b);
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Err(Error::Domain(format!("λ0 equation has no real root (discriminant {disc:.3e})")));
    }
    // Stable form of (−b + √disc) / 2a.
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    let (r1, r2) = (q / a, c / q);
    Ok(r1.max(r2))
}

/// Analytic band structure of the pendulum potential.
pub fn pendulum_bands(p: &PendulumParams) -> Result<BandStructure> {
    let h = p.h();
    if h < p.h_minus() - 1e-12 * p.r {
        return Err(Error::Domain(format!("h = {h} is below h- = {}", p.h_minus())));
    }
    match p.case() {
        PendulumCase::A => BandStructure::new(vec![-p.r, p.r], vec![0, 2, 4]),
        PendulumCase::B => BandStructure::new(vec![lambda0(p)?, -p.r, p.r], vec![0, 4, 2, 4]),
    }
}
