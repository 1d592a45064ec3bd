//! Matrix harmonic oscillators
//! U = (α²x² + k² − α)I + (2αkx / cos ω₀) N(γx² + ω₁ − ω₀), γ = α tan ω₀,
//! with F = αxI + kN(γx² + ω₁), C the rotation by ω₀ and L = ĀA.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::fd::{d1, stencil};
use crate::numerics::{c, r, symmetric_eigen, CMatrix, OdeSetup, Trajectory, C64};

use super::mathieu::reflection;

const PHIEQ_RTOL: f64 = 1e-12;
const PHIEQ_ATOL: f64 = 1e-14;
/// Singular-value threshold for accepting a shooting eigenvalue.
pub const MATCH_THRESHOLD: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OscillatorFamily {
    pub alpha: f64,
    pub k: f64,
    pub omega0: f64,
    pub omega1: f64,
}

impl OscillatorFamily {
    pub fn new(alpha: f64, k: f64, omega0: f64, omega1: f64) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
        }
        if omega0.cos().abs() < 1e-12 {
            return Err(Error::Domain("cos ω0 must not vanish".into()));
        }
        Ok(OscillatorFamily { alpha, k, omega0, omega1 })
    }

    /// Parameters from (α, k, γ) and the phase χ₀ = ω₁ − ω₀ of U.
    pub fn from_gamma(alpha: f64, k: f64, gamma: f64, chi0: f64) -> Result<Self> {
        let omega0 = (gamma / alpha).atan();
        Self::new(alpha, k, omega0, chi0 + omega0)
    }

    pub fn gamma(&self) -> f64 {
        self.alpha * self.omega0.tan()
    }

    fn chi1(&self, x: f64) -> f64 {
        self.gamma() * x * x + self.omega1
    }

    pub fn potential(&self, x: f64) -> CMatrix {
        let (a, k) = (self.alpha, self.k);
        let chi = self.gamma() * x * x + self.omega1 - self.omega0;
        &CMatrix::scalar(2, r(a * a * x * x + k * k - a)) + &reflection(chi).scale_real(2.0 * a * k * x / self.omega0.cos())
    }

    pub fn f(&self, x: f64) -> CMatrix {
        &CMatrix::scalar(2, r(self.alpha * x)) + &reflection(self.chi1(x)).scale_real(self.k)
    }

    pub fn fprime(&self, x: f64) -> CMatrix {
        let dchi = 2.0 * self.gamma() * x;
        &CMatrix::scalar(2, r(self.alpha)) + &reflection(self.chi1(x) + std::f64::consts::FRAC_PI_2).scale_real(self.k * dchi)
    }

    pub fn c_matrix(&self) -> CMatrix {
        let (s, c) = self.omega0.sin_cos();
        CMatrix::from_real(&[&[c, -s], &[s, c]])
    }

    /// Default shooting half-width X = 12/√α.
    pub fn x_max(&self) -> f64 {
        12.0 / self.alpha.sqrt()
    }
}

/// φ″ − 2iγxφ′ − k²φ = 0 integrated from x = 0 with (φ, φ′)(0) = `init`.
pub fn integrate_phieq(k: f64, gamma: f64, init: (C64, C64), span: (f64, f64)) -> Result<Trajectory> {
    let mut setup = OdeSetup::new(2, move |x, y: &[C64], dy: &mut [C64]| {
        dy[0] = y[1];
        dy[1] = c(0.0, 2.0 * gamma * x) * y[1] + y[0] * (k * k);
    })
    .tolerances(PHIEQ_RTOL, PHIEQ_ATOL);
    setup.integrate_two_sided(&[init.0, init.1], 0.0, span)
}

/// I = (r′)² + w² − 4k²r² with r = (|φ|² + k⁻²|φ′|²)/2, w = i(φφ̄′ − φ′φ̄)
/// and r′ = 2 Re(φ̄φ′) (which holds along solutions).
pub fn phieq_invariant(phi: C64, phip: C64, k: f64) -> Result<f64> {
    if k == 0.0 {
        return Err(Error::Domain("the invariant needs k != 0".into()));
    }
    let rr = 0.5 * (phi.norm_sqr() + phip.norm_sqr() / (k * k));
    let w = (c(0.0, 1.0) * (phi * phip.conj() - phip * phi.conj())).re;
    let rp = 2.0 * (phi.conj() * phip).re;
    Ok(rp * rp + w * w - 4.0 * k * k * rr * rr)
}

/// Max |I(x) − I(0)| along a phieq trajectory, relative to
/// max(1, |I(0)|, 4k²r(x)²), the size of the terms that cancel in I.
pub fn phieq_invariant_drift(traj: &Trajectory, k: f64) -> Result<f64> {
    let y0 = traj.eval(0.0);
    let i0 = phieq_invariant(y0[0], y0[1], k)?;
    let mut m: f64 = 0.0;
    for x in traj.sample_times(2000) {
        let y = traj.eval(x);
        let rr = 0.5 * (y[0].norm_sqr() + y[1].norm_sqr() / (k * k));
        let scale = i0.abs().max(1.0).max(4.0 * k * k * rr * rr);
        m = m.max((phieq_invariant(y[0], y[1], k)? - i0).abs() / scale);
    }
    Ok(m)
}

/// Least-squares slope of log|φ| against log x on [x0, x1].
pub fn phieq_decay_slope(k: f64, gamma: f64, init: (C64, C64), x0: f64, x1: f64) -> Result<f64> {
    let tr = integrate_phieq(k, gamma, init, (0.0, x1))?;
    let n = 400;
    let pts: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let x = x0 + (x1 - x0) * i as f64 / (n - 1) as f64;
            (x.ln(), tr.eval(x)[0].norm().ln())
        })
        .collect();
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n as f64;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n as f64;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

type JetFn = dyn Fn(f64) -> (Vec<C64>, Vec<C64>) + Send + Sync;

/// An eigenfunction carried as its 1-jet x ↦ (ψ, ψ′).
#[derive(Clone)]
pub struct OscEigenfunction {
    pub lambda: f64,
    jet: Arc<JetFn>,
}

impl std::fmt::Debug for OscEigenfunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OscEigenfunction").field("lambda", &self.lambda).finish()
    }
}

impl OscEigenfunction {
    pub fn eval(&self, x: f64) -> Vec<C64> {
        (self.jet)(x).0
    }

    pub fn jet(&self, x: f64) -> (Vec<C64>, Vec<C64>) {
        (self.jet)(x)
    }

    /// max ‖−ψ″ + Uψ − λψ‖ / max ‖ψ‖ over `xs`, ψ″ by differencing ψ′.
    pub fn residual(&self, p: &OscillatorFamily, xs: &[f64]) -> f64 {
        let h = 1e-3;
        let mut num: f64 = 0.0;
        let mut den: f64 = 0.0;
        for &x in xs {
            let (psi, _) = self.jet(x);
            let pp = d1(&stencil(|t| self.jet(t).1, x, h), h);
            let up = p.potential(x).mul_vec(&psi);
            let res = (0..2).map(|i| (-pp[i] + up[i] - psi[i] * self.lambda).norm_sqr()).sum::<f64>().sqrt();
            num = num.max(res);
            den = den.max(psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt());
        }
        num / den.max(f64::MIN_POSITIVE)
    }

    /// max ‖ψ′ + Fψ‖ / max ‖ψ‖ over `xs`.
    pub fn annihilator_residual(&self, p: &OscillatorFamily, xs: &[f64]) -> f64 {
        let mut num: f64 = 0.0;
        let mut den: f64 = 0.0;
        for &x in xs {
            let (psi, dpsi) = self.jet(x);
            let fpsi = p.f(x).mul_vec(&psi);
            num = num.max((0..2).map(|i| (dpsi[i] + fpsi[i]).norm_sqr()).sum::<f64>().sqrt());
            den = den.max(psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt());
        }
        num / den.max(f64::MIN_POSITIVE)
    }
}

/// Two ground states (λ = 0) built from phieq solutions with
/// (φ, φ′)(0) = (1, 0) and (0, 1): φ = e^{−αx²/2}φ̃ = ψ₁ + iψ₂ and
/// φ̄ = −e^{−iχ₁}e^{−αx²/2}φ̃′/k = ψ₁ − iψ₂. For k = 0, ψ = e^{−αx²/2}eⱼ.
pub fn oscillator_ground_basis(p: &OscillatorFamily, x_max: f64) -> Result<[OscEigenfunction; 2]> {
    let a = p.alpha;
    if p.k == 0.0 {
        let mk = |j: usize| {
            let jet = move |x: f64| {
                let e = (-0.5 * a * x * x).exp();
                let mut v = vec![r(0.0); 2];
                let mut dv = vec![r(0.0); 2];
                v[j] = r(e);
                dv[j] = r(-a * x * e);
                (v, dv)
            };
            OscEigenfunction { lambda: 0.0, jet: Arc::new(jet) }
        };
        return Ok([mk(0), mk(1)]);
    }
    let mut out = Vec::with_capacity(2);
    for init in [(r(1.0), r(0.0)), (r(0.0), r(1.0))] {
        let tr = Arc::new(integrate_phieq(p.k, p.gamma(), init, (-x_max, x_max))?);
        let q = *p;
        let jet = move |x: f64| {
            let y = tr.eval(x);
            let (v, vp) = (y[0], y[1]);
            let vpp = c(0.0, 2.0 * q.gamma() * x) * vp + v * (q.k * q.k);
            ground_jet(&q, x, v, vp, vpp)
        };
        out.push(OscEigenfunction { lambda: 0.0, jet: Arc::new(jet) });
    }
    Ok([out[0].clone(), out[1].clone()])
}

fn ground_jet(p: &OscillatorFamily, x: f64, v: C64, vp: C64, vpp: C64) -> (Vec<C64>, Vec<C64>) {
    let (a, k) = (p.alpha, p.k);
    let e = (-0.5 * a * x * x).exp();
    let chi = p.chi1(x);
    let dchi = 2.0 * p.gamma() * x;
    let em = (c(0.0, -chi)).exp();
    let phi = v * e;
    let phib = -em * vp * e / k;
    let dphi = (vp - v * (a * x)) * e;
    // d/dx of −e^{−iχ₁}e^{−αx²/2}φ̃′/k.
    let dphib = -em * e / k * (vpp - vp * (c(0.0, dchi) + a * x));
    let half = r(0.5);
    let mhi = c(0.0, -0.5);
    let psi = vec![(phi + phib) * half, (phi - phib) * mhi];
    let dpsi = vec![(dphi + dphib) * half, (dphi - dphib) * mhi];
    (psi, dpsi)
}

/// Annihilator residual of a ground state with ψ′ taken from the derivative
/// of the dense output of φ̃′ (independent of the phieq right-hand side).
pub fn ground_state_check(p: &OscillatorFamily, init: (C64, C64), xs: &[f64]) -> Result<f64> {
    if p.k == 0.0 {
        return Ok(0.0);
    }
    let lo = xs.iter().cloned().fold(0.0, f64::min);
    let hi = xs.iter().cloned().fold(0.0, f64::max);
    let tr = integrate_phieq(p.k, p.gamma(), init, (lo, hi))?;
    let mut num: f64 = 0.0;
    let mut den: f64 = 0.0;
    for &x in xs {
        let y = tr.eval(x);
        let vpp = tr.deriv(x)[1];
        let (psi, dpsi) = ground_jet(p, x, y[0], y[1], vpp);
        let fpsi = p.f(x).mul_vec(&psi);
        num = num.max((0..2).map(|i| (dpsi[i] + fpsi[i]).norm_sqr()).sum::<f64>().sqrt());
        den = den.max(psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt());
    }
    Ok(num / den)
}

/// ψ̃ = (−D + F)Cψ, an eigenfunction at λ + 2α. ψ″ = (U − λ)ψ is used for
/// the derivative of ψ̃. The input must satisfy Lψ = λψ to 1e−6 on `xs`.
pub fn oscillator_raise(p: &OscillatorFamily, psi: &OscEigenfunction, xs: &[f64]) -> Result<OscEigenfunction> {
    let res = psi.residual(p, xs);
    if res > 1e-6 {
        return Err(Error::ResidualTooLarge(res));
    }
    let q = *p;
    let cm = p.c_matrix();
    let lam = psi.lambda;
    let inner = psi.jet.clone();
    let jet = move |x: f64| {
        let (v, dv) = inner(x);
        let f = q.f(x);
        let cv = cm.mul_vec(&v);
        let cdv = cm.mul_vec(&dv);
        let ddv = (&q.potential(x) - &CMatrix::scalar(2, r(lam))).mul_vec(&v);
        let cddv = cm.mul_vec(&ddv);
        let fcv = f.mul_vec(&cv);
        let fcdv = f.mul_vec(&cdv);
        let fpcv = q.fprime(x).mul_vec(&cv);
        let nv: Vec<C64> = (0..2).map(|i| fcv[i] - cdv[i]).collect();
        let ndv: Vec<C64> = (0..2).map(|i| fpcv[i] + fcdv[i] - cddv[i]).collect();
        (nv, ndv)
    };
    Ok(OscEigenfunction { lambda: lam + 2.0 * p.alpha, jet: Arc::new(jet) })
}

/// One shooting evaluation: singular values (ascending) of the 4×4 matching
/// matrix [[Ψ_L, Ψ_R], [Ψ_L′, Ψ_R′]] at x = 0 with orthonormalized columns,
/// where Ψ_L(−X) = 0, Ψ_L′(−X) = I and Ψ_R(X) = 0, Ψ_R′(X) = I.
pub fn matching_singular_values(p: &OscillatorFamily, lambda: f64, x_max: f64) -> Result<[f64; 4]> {
    let q = *p;
    let rhs = move |x: f64, y: &[C64], dy: &mut [C64]| {
        let m = &q.potential(x) - &CMatrix::scalar(2, r(lambda));
        // y = (Ψ, Ψ′) column-major pairs: y[0..4] = Ψ, y[4..8] = Ψ′.
        let psi = CMatrix::from_vec(2, y[..4].to_vec());
        dy[..4].copy_from_slice(&y[4..]);
        dy[4..].copy_from_slice((&m * &psi).as_slice());
    };
    let mut y0 = vec![r(0.0); 8];
    y0[4] = r(1.0);
    y0[7] = r(1.0);
    let left = OdeSetup::new(8, rhs).tolerances(1e-11, 1e-13).integrate(&y0, (-x_max, 0.0))?;
    let right = OdeSetup::new(8, rhs).tolerances(1e-11, 1e-13).integrate(&y0, (x_max, 0.0))?;
    let col = |y: &[C64], j: usize| -> Vec<f64> { vec![y[j].re, y[2 + j].re, y[4 + j].re, y[6 + j].re] };
    let (yl, yr) = (left.eval(0.0), right.eval(0.0));
    let mut cols = vec![col(&yl, 0), col(&yl, 1), col(&yr, 0), col(&yr, 1)];
    for pair in [0usize, 2] {
        let n0 = cols[pair].iter().map(|v| v * v).sum::<f64>().sqrt();
        cols[pair].iter_mut().for_each(|v| *v /= n0);
        let dot: f64 = (0..4).map(|i| cols[pair][i] * cols[pair + 1][i]).sum();
        for i in 0..4 {
            cols[pair + 1][i] -= dot * cols[pair][i];
        }
        let n1 = cols[pair + 1].iter().map(|v| v * v).sum::<f64>().sqrt();
        cols[pair + 1].iter_mut().for_each(|v| *v /= n1);
    }
    let gram: Vec<Vec<f64>> = (0..4).map(|i| (0..4).map(|j| (0..4).map(|k| cols[i][k] * cols[j][k]).sum()).collect()).collect();
    let (ev, _) = symmetric_eigen(&gram);
    let mut sv: Vec<f64> = ev.iter().map(|e| e.max(0.0).sqrt()).collect();
    sv.sort_by(f64::total_cmp);
    Ok([sv[0], sv[1], sv[2], sv[3]])
}

/// A computed level and its multiplicity (number of singular values below
/// 1e−4 at the minimizer).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Level {
    pub lambda: f64,
    pub multiplicity: usize,
    pub min_singular: f64,
}

/// Levels in [λ_lo, λ_hi] by bidirectional shooting on [−X, X]: local minima
/// of the smallest matching singular value on a grid, refined by golden
/// section and accepted below [`MATCH_THRESHOLD`].
pub fn oscillator_spectrum(p: &OscillatorFamily, window: (f64, f64), step: f64, x_max: f64) -> Result<Vec<Level>> {
    let n = ((window.1 - window.0) / step).ceil() as usize + 1;
    let grid: Vec<f64> = (0..n).map(|i| window.0 + i as f64 * step).collect();
    let s: Vec<f64> = grid
        .par_iter()
        .map(|&l| matching_singular_values(p, l, x_max).map(|v| v[0]))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    for i in 1..n - 1 {
        if s[i] <= s[i - 1] && s[i] < s[i + 1] {
            let f = |l: f64| matching_singular_values(p, l, x_max).map(|v| v[0]);
            let (mut a, mut b) = (grid[i - 1], grid[i + 1]);
            let g = 0.5 * (5f64.sqrt() - 1.0);
            let mut x1 = b - g * (b - a);
            let mut x2 = a + g * (b - a);
            let (mut f1, mut f2) = (f(x1)?, f(x2)?);
            while b - a > 1e-10 {
                if f1 < f2 {
                    b = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = b - g * (b - a);
                    f1 = f(x1)?;
                } else {
                    a = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = a + g * (b - a);
                    f2 = f(x2)?;
                }
            }
            let lam = 0.5 * (a + b);
            let sv = matching_singular_values(p, lam, x_max)?;
            if sv[0] < MATCH_THRESHOLD {
                out.push(Level { lambda: lam, multiplicity: sv.iter().filter(|&&v| v < 1e-4).count(), min_singular: sv[0] });
            }
        }
    }
    Ok(out)
}
