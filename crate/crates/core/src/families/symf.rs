//! Closed-form 2×2 chain solutions with B = 0, F symmetric and C a rotation:
//! f′ = α − κ(f+h)g, h′ = α + κ(f+h)g, 2g′ = κ(f² − h²), κ = tan ω₀.

use crate::dressing::ChainState;
use crate::error::Result;
use crate::numerics::{r, CMatrix};

use super::mathieu::reflection;

/// F = (αx + k₁)I + k₂N(χ₁), χ₁ = κ(αx² + 2k₁x) + ω₁.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymfParams {
    pub k1: f64,
    pub k2: f64,
    pub omega0: f64,
    pub omega1: f64,
    pub alpha: f64,
}

impl SymfParams {
    pub fn kappa(&self) -> f64 {
        self.omega0.tan()
    }

    pub fn chi1(&self, x: f64) -> f64 {
        self.kappa() * (self.alpha * x * x + 2.0 * self.k1 * x) + self.omega1
    }

    /// C = [[cos ω₀, −sin ω₀], [sin ω₀, cos ω₀]].
    pub fn c_matrix(&self) -> CMatrix {
        let (s, c) = self.omega0.sin_cos();
        CMatrix::from_real(&[&[c, -s], &[s, c]])
    }

    /// (I₁, I₂) = (f + h − 2αx, (f − h)² + 4g²); constant along solutions.
    pub fn first_integrals(&self, f: &CMatrix, x: f64) -> (f64, f64) {
        let (ff, g, h) = (f[(0, 0)].re, f[(0, 1)].re, f[(1, 1)].re);
        (ff + h - 2.0 * self.alpha * x, (ff - h).powi(2) + 4.0 * g * g)
    }
}

pub fn symf_f(p: &SymfParams, x: f64) -> CMatrix {
    &CMatrix::scalar(2, r(p.alpha * x + p.k1)) + &reflection(p.chi1(x)).scale_real(p.k2)
}

/// F′ = αI + k₂χ₁′ N(χ₁ + π/2).
pub fn symf_fprime(p: &SymfParams, x: f64) -> CMatrix {
    let dchi = 2.0 * p.kappa() * (p.alpha * x + p.k1);
    &CMatrix::scalar(2, r(p.alpha)) + &reflection(p.chi1(x) + std::f64::consts::FRAC_PI_2).scale_real(p.k2 * dchi)
}

/// U = F² − F′.
pub fn symf_potential(p: &SymfParams, x: f64) -> CMatrix {
    let f = symf_f(p, x);
    &(&f * &f) - &symf_fprime(p, x)
}

/// The chain state (F(x), 0, C, α).
pub fn symf_solution(p: &SymfParams, x: f64) -> Result<ChainState> {
    ChainState::new(symf_f(p, x), CMatrix::zeros(2), p.c_matrix(), r(p.alpha))
}
