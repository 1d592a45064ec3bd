//! Eigenvalues by Hessenberg reduction and shifted complex QR.
//!
//! Used where eigenvalues may be defective or tightly clustered (monodromy
//! matrices near I), which the characteristic-polynomial route resolves only
//! to about ε^{1/m} for an m-fold root.

use super::cmatrix::{r, CMatrix, C64};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 60;

fn householder_hessenberg(h: &mut [Vec<C64>]) {
    let n = h.len();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<C64> = (k + 1..n).map(|i| h[i][k]).collect();
        let xnorm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let phase = if x[0].norm() > 0.0 { x[0] / x[0].norm() } else { r(1.0) };
        let mut v = x;
        v[0] += phase * xnorm;
        let vn = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vn == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vn;
        }
        for j in 0..n {
            let s: C64 = (0..v.len()).map(|i| v[i].conj() * h[k + 1 + i][j]).sum();
            for i in 0..v.len() {
                h[k + 1 + i][j] -= v[i] * s * 2.0;
            }
        }
        for row in h.iter_mut() {
            let s: C64 = (0..v.len()).map(|j| row[k + 1 + j] * v[j]).sum();
            for j in 0..v.len() {
                row[k + 1 + j] -= s * v[j].conj() * 2.0;
            }
        }
        for i in k + 2..n {
            h[i][k] = r(0.0);
        }
    }
}

fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let m1 = (a + d) * 0.5 + disc;
    let m2 = (a + d) * 0.5 - disc;
    if (m1 - d).norm() < (m2 - d).norm() {
        m1
    } else {
        m2
    }
}

/// All eigenvalues of `m`, in no particular order.
pub fn eigenvalues_qr(m: &CMatrix) -> Result<Vec<C64>> {
    let n = m.dim();
    let mut h: Vec<Vec<C64>> = (0..n).map(|i| (0..n).map(|j| m[(i, j)]).collect()).collect();
    householder_hessenberg(&mut h);
    let scale = m.norm().max(f64::MIN_POSITIVE);
    let eps = f64::EPSILON;
    let mut out = Vec::with_capacity(n);
    let mut hi = n - 1;
    let mut iter = 0usize;
    loop {
        if hi == 0 {
            out.push(h[0][0]);
            break;
        }
        let mut l = hi;
        while l > 0 {
            let off = h[l][l - 1].norm();
            let diag = h[l][l].norm() + h[l - 1][l - 1].norm();
            if off <= eps * diag || off <= eps * 1e-3 * scale {
                h[l][l - 1] = r(0.0);
                break;
            }
            l -= 1;
        }
        if l == hi {
            out.push(h[hi][hi]);
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        if iter > MAX_SWEEPS * n {
            return Err(Error::NoConvergence(iter));
        }
        let mu = if iter % 11 == 0 {
            h[hi][hi] + C64::new(0.75, 0.4) * h[hi][hi - 1].norm()
        } else {
            wilkinson_shift(h[hi - 1][hi - 1], h[hi - 1][hi], h[hi][hi - 1], h[hi][hi])
        };
        for (i, row) in h.iter_mut().enumerate().take(hi + 1).skip(l) {
            row[i] -= mu;
        }
        let mut rots = Vec::with_capacity(hi - l);
        for k in l..hi {
            let (x, y) = (h[k][k], h[k + 1][k]);
            let rr = (x.norm_sqr() + y.norm_sqr()).sqrt();
            let (c, s) = if rr == 0.0 { (r(1.0), r(0.0)) } else { (x / rr, y / rr) };
            for j in k..=hi {
                let (a, b) = (h[k][j], h[k + 1][j]);
                h[k][j] = c.conj() * a + s.conj() * b;
                h[k + 1][j] = -s * a + c * b;
            }
            rots.push((c, s));
        }
        for (idx, k) in (l..hi).enumerate() {
            let (c, s) = rots[idx];
            for row in h.iter_mut().take((k + 1).min(hi) + 1).skip(l) {
                let (a, b) = (row[k], row[k + 1]);
                row[k] = a * c + b * s;
                row[k + 1] = -a * s.conj() + b * c.conj();
            }
        }
        for (i, row) in h.iter_mut().enumerate().take(hi + 1).skip(l) {
            row[i] += mu;
        }
    }
    Ok(out)
}

/// Real symmetric eigen-decomposition by cyclic Jacobi rotations:
/// returns eigenvalues and the orthogonal Q (columns are eigenvectors) with
/// A = Q diag(λ) Qᵀ.
pub fn symmetric_eigen(a: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut q: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    for _ in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| m[i][j] * m[i][j]).sum();
        let tot: f64 = m.iter().flatten().map(|x| x * x).sum();
        if off <= 1e-30 * tot.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for r in p + 1..n {
                if m[p][r] == 0.0 {
                    continue;
                }
                let theta = (m[r][r] - m[p][p]) / (2.0 * m[p][r]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkr) = (m[k][p], m[k][r]);
                    m[k][p] = c * mkp - s * mkr;
                    m[k][r] = s * mkp + c * mkr;
                }
                for k in 0..n {
                    let (mpk, mrk) = (m[p][k], m[r][k]);
                    m[p][k] = c * mpk - s * mrk;
                    m[r][k] = s * mpk + c * mrk;
                }
                for row in q.iter_mut() {
                    let (qp, qr) = (row[p], row[r]);
                    row[p] = c * qp - s * qr;
                    row[r] = s * qp + c * qr;
                }
            }
        }
    }
    ((0..n).map(|i| m[i][i]).collect(), q)
}
