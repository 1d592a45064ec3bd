//! First integrals of the 2×2 chain in its two normal forms.
//!
//! Case (a): C = diag(1+γ, 1−γ), with h = f₂f₃, g₂ = b₂/f₂, g₃ = b₃/f₃:
//! c₃ = h − γb₁, c₄ = b₁² + g₂g₃h.
//!
//! Case (b): C = [[1, 1], [0, 1]], with F = [[X+g, f₂], [c₂, X−g]]:
//! c₃ = b₂b₃ + b₁², c₄ = 2c₂f₂ − b₃ + 2g², c₅ = c₂X² + c₂b₂ + (X+f₂)b₃ + 2(b₁−α)g.
//!
//! Here B = [[b₁, b₂], [b₃, −b₁]] + (tr B/2)I; the trace part is constant and
//! drops out of the flow.

use super::chain::ChainTrajectory;
use crate::error::{Error, Result};
use crate::numerics::{CMatrix, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormalForm {
    A,
    B,
}

/// Values of the first integrals at the initial point, their drifts, and the
/// point where the trajectory was truncated at a coordinate singularity.
#[derive(Clone, Debug, PartialEq)]
pub struct FirstIntegrals2x2 {
    pub case: NormalForm,
    pub values: Vec<C64>,
    pub drift: Vec<f64>,
    pub truncated_at: Option<f64>,
}

impl FirstIntegrals2x2 {
    pub fn max_drift(&self) -> f64 {
        self.drift.iter().cloned().fold(0.0, f64::max)
    }
}

/// Read γ off a case-(a) C, or check the case-(b) form.
fn check_form(c: &CMatrix, form: NormalForm) -> Result<f64> {
    if c.dim() != 2 {
        return Err(Error::DimensionMismatch("first integrals need d = 2".into()));
    }
    let tol = 1e-12;
    match form {
        NormalForm::A => {
            let g = 0.5 * (c[(0, 0)] - c[(1, 1)]).re;
            let ok = c[(0, 1)].norm() < tol
                && c[(1, 0)].norm() < tol
                && (c[(0, 0)] - (1.0 + g)).norm() < tol
                && (c[(1, 1)] - (1.0 - g)).norm() < tol;
            if ok {
                Ok(g)
            } else {
                Err(Error::Domain("C is not diag(1+γ, 1−γ)".into()))
            }
        }
        NormalForm::B => {
            let want = CMatrix::from_real(&[&[1.0, 1.0], &[0.0, 1.0]]);
            if (c - &want).norm() < tol {
                Ok(0.0)
            } else {
                Err(Error::Domain("C is not [[1,1],[0,1]]".into()))
            }
        }
    }
}

fn integrals_at(f: &CMatrix, b: &CMatrix, form: NormalForm, gamma: f64, alpha: C64) -> Option<Vec<C64>> {
    let b1 = 0.5 * (b[(0, 0)] - b[(1, 1)]);
    let (b2, b3) = (b[(0, 1)], b[(1, 0)]);
    match form {
        NormalForm::A => {
            let (f2, f3) = (f[(0, 1)], f[(1, 0)]);
            let scale = f.norm().max(1e-300);
            if f2.norm() < 1e-12 * scale || f3.norm() < 1e-12 * scale {
                return None;
            }
            let h = f2 * f3;
            let (g2, g3) = (b2 / f2, b3 / f3);
            Some(vec![h - b1 * gamma, b1 * b1 + g2 * g3 * h])
        }
        NormalForm::B => {
            let x = 0.5 * (f[(0, 0)] + f[(1, 1)]);
            let g = 0.5 * (f[(0, 0)] - f[(1, 1)]);
            let (f2, c2) = (f[(0, 1)], f[(1, 0)]);
            Some(vec![
                b2 * b3 + b1 * b1,
                c2 * f2 * 2.0 - b3 + g * g * 2.0,
                c2 * x * x + c2 * b2 + (x + f2) * b3 + (b1 - alpha) * g * 2.0,
            ])
        }
    }
}

/// Evaluate c₃, c₄ (and c₅) along the trajectory and report relative drift
/// |c(x) − c(0)| / max(1, |c(0)|). In case (a), a zero of f₂ or f₃ (or a real
/// sign change) truncates the check at that point.
pub fn first_integrals_2x2(tr: &ChainTrajectory, form: NormalForm) -> Result<FirstIntegrals2x2> {
    let gamma = check_form(&tr.sys.c, form)?;
    let alpha = tr.sys.alpha;
    let xs = tr.sample_points(4000);
    let (f0, b0) = tr.fb(xs[0]);
    let values = integrals_at(&f0, &b0, form, gamma, alpha).ok_or(Error::CoordinateSingularity(xs[0]))?;
    let mut drift = vec![0.0; values.len()];
    let mut truncated_at = None;
    let mut prev: Option<(C64, C64)> = None;
    for &x in &xs[1..] {
        let (f, b) = tr.fb(x);
        if form == NormalForm::A {
            let cur = (f[(0, 1)], f[(1, 0)]);
            if let Some(p) = prev {
                let real = |z: C64| z.im.abs() <= 1e-14 * z.norm().max(1e-300);
                let flip = |a: C64, b: C64| real(a) && real(b) && a.re * b.re < 0.0;
                if flip(p.0, cur.0) || flip(p.1, cur.1) {
                    truncated_at = Some(x);
                    break;
                }
            }
            prev = Some(cur);
        }
        match integrals_at(&f, &b, form, gamma, alpha) {
            Some(v) => {
                for (k, (a, z)) in v.iter().zip(&values).enumerate() {
                    drift[k] = f64::max(drift[k], (a - z).norm() / z.norm().max(1.0));
                }
            }
            None => {
                truncated_at = Some(x);
                break;
            }
        }
    }
    Ok(FirstIntegrals2x2 { case: form, values, drift, truncated_at })
}
