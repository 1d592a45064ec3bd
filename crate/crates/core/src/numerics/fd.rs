//! Richardson-extrapolated central differences, smooth test functions and
//! Gauss–Legendre quadrature.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::cmatrix::{c, r, C64};
use crate::error::{Error, Result};

/// Stencil offsets (in units of h) needed by [`d1`] and [`d2`].
pub const OFFSETS: [i32; 7] = [-4, -2, -1, 0, 1, 2, 4];

/// Values of a vector function on the seven-point stencil [`OFFSETS`].
pub type Stencil = [Vec<C64>; 7];

fn idx(off: i32) -> usize {
    OFFSETS.iter().position(|&o| o == off).unwrap()
}

fn combine(s: &Stencil, w: &[(i32, f64)], scale: f64) -> Vec<C64> {
    let n = s[0].len();
    (0..n)
        .map(|i| w.iter().map(|&(o, a)| s[idx(o)][i] * a).sum::<C64>() * scale)
        .collect()
}

/// First derivative: five-point central difference plus one Richardson step,
/// (16 D_h − D_2h)/15.
pub fn d1(s: &Stencil, h: f64) -> Vec<C64> {
    let dh = combine(s, &[(-2, 1.0), (-1, -8.0), (1, 8.0), (2, -1.0)], 1.0 / (12.0 * h));
    let d2h = combine(s, &[(-4, 1.0), (-2, -8.0), (2, 8.0), (4, -1.0)], 1.0 / (24.0 * h));
    dh.iter().zip(&d2h).map(|(a, b)| (a * 16.0 - b) / 15.0).collect()
}

/// Second derivative: five-point central difference plus one Richardson step.
pub fn d2(s: &Stencil, h: f64) -> Vec<C64> {
    let w = |k: i32| [(-2 * k, -1.0), (-k, 16.0), (0, -30.0), (k, 16.0), (2 * k, -1.0)];
    let dh = combine(s, &w(1), 1.0 / (12.0 * h * h));
    let d2h = combine(s, &w(2), 1.0 / (48.0 * h * h));
    dh.iter().zip(&d2h).map(|(a, b)| (a * 16.0 - b) / 15.0).collect()
}

/// Sample `f` on the stencil around `x`.
pub fn stencil<F: FnMut(f64) -> Vec<C64>>(mut f: F, x: f64, h: f64) -> Stencil {
    OFFSETS.map(|o| f(x + o as f64 * h))
}

/// Uniform grid on [a, b] with spacing `h`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub a: f64,
    pub b: f64,
    pub h: f64,
}

impl Grid {
    pub fn new(a: f64, b: f64, h: f64) -> Result<Grid> {
        if h > 0.1 {
            return Err(Error::GridTooCoarse(h));
        }
        assert!(b > a && h > 0.0);
        Ok(Grid { a, b, h })
    }

    /// Grid points whose full stencil (±4h) stays inside [a, b].
    pub fn interior(&self) -> Vec<f64> {
        let n = ((self.b - self.a) / self.h).round() as i64;
        (4..=n - 4).map(|i| self.a + i as f64 * self.h).collect()
    }

    /// Every `stride`-th interior point.
    pub fn interior_strided(&self, stride: usize) -> Vec<f64> {
        self.interior().into_iter().step_by(stride.max(1)).collect()
    }
}

/// Vector test function whose components are polynomials of degree ≤ 5
/// times exp(−x²), with analytic first and second derivatives.
#[derive(Clone, Debug)]
pub struct GaussPoly {
    coeffs: Vec<[C64; 6]>,
}

impl GaussPoly {
    pub fn new(coeffs: Vec<[C64; 6]>) -> Self {
        GaussPoly { coeffs }
    }

    pub fn random(dim: usize, rng: &mut ChaCha8Rng) -> Self {
        let coeffs = (0..dim)
            .map(|_| {
                let mut a = [r(0.0); 6];
                for z in a.iter_mut() {
                    *z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                }
                a
            })
            .collect();
        GaussPoly { coeffs }
    }

    /// `count` seeded instances of dimension `dim`.
    pub fn family(dim: usize, count: usize, seed: u64) -> Vec<GaussPoly> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count).map(|_| Self::random(dim, &mut rng)).collect()
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    /// (ψ, ψ′, ψ″) at x.
    pub fn jet(&self, x: f64) -> (Vec<C64>, Vec<C64>, Vec<C64>) {
        let g = (-x * x).exp();
        let mut v = Vec::with_capacity(self.dim());
        let mut d = Vec::with_capacity(self.dim());
        let mut dd = Vec::with_capacity(self.dim());
        for a in &self.coeffs {
            let (mut p, mut p1, mut p2) = (r(0.0), r(0.0), r(0.0));
            for k in (0..6).rev() {
                p2 = p2 * x + p1 * 2.0;
                p1 = p1 * x + p;
                p = p * x + a[k];
            }
            // (p g)′ = (p′ − 2xp) g, (p g)″ = (p″ − 4xp′ + (4x² − 2)p) g
            v.push(p * g);
            d.push((p1 - p * (2.0 * x)) * g);
            dd.push((p2 - p1 * (4.0 * x) + p * (4.0 * x * x - 2.0)) * g);
        }
        (v, d, dd)
    }

    pub fn eval(&self, x: f64) -> Vec<C64> {
        self.jet(x).0
    }
}

/// Gauss–Legendre nodes and weights on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Composite Gauss–Legendre integral of a complex function over [a, b].
pub fn integrate_gl<F: FnMut(f64) -> C64>(mut f: F, a: f64, b: f64, panels: usize, nodes: &(Vec<f64>, Vec<f64>)) -> C64 {
    let h = (b - a) / panels as f64;
    let mut s = r(0.0);
    for p in 0..panels {
        let lo = a + p as f64 * h;
        for (xi, wi) in nodes.0.iter().zip(&nodes.1) {
            s += f(lo + 0.5 * h * (xi + 1.0)) * (0.5 * h * wi);
        }
    }
    s
}
