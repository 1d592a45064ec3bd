//! Complex polynomials, simultaneous root finding and eigenvalues via the
//! characteristic polynomial.

use std::f64::consts::PI;

use super::cmatrix::{r, CMatrix, C64};
use crate::error::{Error, Result};

/// Relative clustering radius for repeated roots.
pub const CLUSTER_RADIUS: f64 = 1e-7;

const MAX_ITER: usize = 800;

/// Polynomial with complex coefficients, `coeffs[i]` multiplying `z^i`.
#[derive(Clone, Debug, PartialEq)]
pub struct CPoly {
    coeffs: Vec<C64>,
}

impl CPoly {
    /// Build and trim trailing (leading-order) zeros.
    pub fn new(coeffs: Vec<C64>) -> Self {
        let mut p = CPoly { coeffs };
        p.trim();
        p
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&x| r(x)).collect())
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[C64]) -> Self {
        let mut c = vec![r(1.0)];
        for &z in roots {
            let mut next = vec![r(0.0); c.len() + 1];
            for (i, &a) in c.iter().enumerate() {
                next[i + 1] += a;
                next[i] -= a * z;
            }
            c = next;
        }
        Self::new(c)
    }

    fn trim(&mut self) {
        while self.coeffs.len() > 1 && *self.coeffs.last().unwrap() == r(0.0) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.coeffs.push(r(0.0));
        }
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == r(0.0)
    }

    pub fn leading(&self) -> C64 {
        *self.coeffs.last().unwrap()
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs.iter().rev().fold(r(0.0), |acc, &a| acc * z + a)
    }

    /// Value and first derivative by Horner's scheme.
    pub fn eval_with_deriv(&self, z: C64) -> (C64, C64) {
        let mut p = r(0.0);
        let mut dp = r(0.0);
        for &a in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + a;
        }
        (p, dp)
    }

    pub fn derivative(&self) -> CPoly {
        if self.coeffs.len() <= 1 {
            return CPoly::new(vec![r(0.0)]);
        }
        CPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &a)| a * i as f64)
                .collect(),
        )
    }

    /// Σ|aᵢ||z|ⁱ, the natural scale for residuals at z.
    pub fn abs_scale(&self, z: C64) -> f64 {
        let m = z.norm();
        self.coeffs.iter().rev().fold(0.0, |acc, a| acc * m + a.norm())
    }

    pub fn mul(&self, other: &CPoly) -> CPoly {
        let mut c = vec![r(0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        CPoly::new(c)
    }
}

/// A group of numerically coincident roots.
#[derive(Clone, Debug, PartialEq)]
pub struct RootCluster {
    pub value: C64,
    pub multiplicity: usize,
}

/// Upper Cauchy bound: the positive root of |aₙ|xⁿ − Σ|aᵢ|xⁱ.
fn cauchy_bound(a: &[C64]) -> f64 {
    let n = a.len() - 1;
    let an = a[n].norm();
    let f = |x: f64| {
        let mut v = an * x.powi(n as i32);
        for (i, ai) in a.iter().enumerate().take(n) {
            v -= ai.norm() * x.powi(i as i32);
        }
        v
    };
    let mut hi = 1.0 + a[..n].iter().map(|z| z.norm() / an).fold(0.0, f64::max);
    let mut lo = 0.0;
    if f(hi) < 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    hi
}

/// All roots of `p`, with repetition, by Aberth–Ehrlich iteration.
///
/// Roots closer than `1e-7·(1+|r|)` are merged into their mean and repeated
/// with the cluster's multiplicity, so a double root comes back as two equal
/// values rather than two values split by `O(√ε)`.
pub fn poly_roots(p: &CPoly) -> Result<Vec<C64>> {
    let deg = p.degree();
    if deg == 0 {
        return Err(Error::Domain("poly_roots needs degree >= 1".into()));
    }
    let mut a = p.coeffs.clone();
    let mut zeros = 0;
    while a[0] == r(0.0) {
        a.remove(0);
        zeros += 1;
    }
    let lead = *a.last().unwrap();
    let a: Vec<C64> = a.iter().map(|&x| x / lead).collect();
    let q = CPoly { coeffs: a };
    let n = q.degree();
    let mut roots = vec![r(0.0); zeros];
    if n == 0 {
        return Ok(roots);
    }
    let rad = cauchy_bound(&q.coeffs);
    let mut z: Vec<C64> = (0..n)
        .map(|k| C64::from_polar(rad, 2.0 * PI * k as f64 / n as f64 + 0.4))
        .collect();
    let mut done = vec![false; n];
    let mut iter = 0;
    while done.iter().any(|d| !d) {
        iter += 1;
        if iter > MAX_ITER {
            return Err(Error::NoConvergence(MAX_ITER));
        }
        for k in 0..n {
            if done[k] {
                continue;
            }
            let (pv, dpv) = q.eval_with_deriv(z[k]);
            if pv == r(0.0) {
                done[k] = true;
                continue;
            }
            let ratio = pv / dpv;
            let mut s = r(0.0);
            for j in 0..n {
                if j != k {
                    let d = z[k] - z[j];
                    if d != r(0.0) {
                        s += 1.0 / d;
                    }
                }
            }
            let w = ratio / (r(1.0) - ratio * s);
            if !w.re.is_finite() || !w.im.is_finite() {
                let bump = C64::from_polar(1e-8 * (1.0 + z[k].norm()), iter as f64);
                z[k] += bump;
                continue;
            }
            z[k] -= w;
            if w.norm() <= 4.0 * f64::EPSILON * (1.0 + z[k].norm())
                || q.eval(z[k]).norm() <= 4.0 * f64::EPSILON * q.abs_scale(z[k])
            {
                done[k] = true;
            }
        }
    }
    // Newton polish, kept only when it lowers the residual.
    for zk in z.iter_mut() {
        for _ in 0..3 {
            let (pv, dpv) = q.eval_with_deriv(*zk);
            if dpv == r(0.0) {
                break;
            }
            let cand = *zk - pv / dpv;
            if q.eval(cand).norm() < pv.norm() {
                *zk = cand;
            } else {
                break;
            }
        }
    }
    for cl in cluster_roots(&z) {
        for _ in 0..cl.multiplicity {
            roots.push(cl.value);
        }
    }
    Ok(roots)
}

/// Group roots lying within `1e-7·(1+|r|)` of each other (single linkage).
pub fn cluster_roots(z: &[C64]) -> Vec<RootCluster> {
    let n = z.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(l: &mut Vec<usize>, i: usize) -> usize {
        let mut i = i;
        while l[i] != i {
            l[i] = l[l[i]];
            i = l[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            let tol = CLUSTER_RADIUS * (1.0 + z[i].norm().max(z[j].norm()));
            if (z[i] - z[j]).norm() <= tol {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                if a != b {
                    label[b] = a;
                }
            }
        }
    }
    let mut groups: Vec<(usize, Vec<C64>)> = Vec::new();
    for i in 0..n {
        let root = find(&mut label, i);
        match groups.iter_mut().find(|g| g.0 == root) {
            Some(g) => g.1.push(z[i]),
            None => groups.push((root, vec![z[i]])),
        }
    }
    groups
        .into_iter()
        .map(|(_, v)| RootCluster {
            value: v.iter().sum::<C64>() / v.len() as f64,
            multiplicity: v.len(),
        })
        .collect()
}

/// Characteristic polynomial det(zI − M) by Faddeev–LeVerrier.
pub fn char_poly(m: &CMatrix) -> CPoly {
    let n = m.dim();
    let mut coeffs = vec![r(0.0); n + 1];
    coeffs[n] = r(1.0);
    let mut mk = CMatrix::zeros(n);
    let id = CMatrix::identity(n);
    for k in 1..=n {
        mk = &(m * &mk) + &id.scale(coeffs[n - k + 1]);
        let amk = m * &mk;
        coeffs[n - k] = -amk.trace() / k as f64;
    }
    CPoly::new(coeffs)
}

/// Eigenvalues as roots of the characteristic polynomial. Limited to d ≤ 12.
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<C64>> {
    let n = m.dim();
    if n > 12 {
        return Err(Error::Domain(format!("eigenvalues limited to dim <= 12, got {n}")));
    }
    let s = m.max_abs();
    if s == 0.0 {
        return Ok(vec![r(0.0); n]);
    }
    let scaled = m.scale_real(1.0 / s);
    let roots = poly_roots(&char_poly(&scaled))?;
    Ok(roots.into_iter().map(|z| z * s).collect())
}

/// Greedy matching distance between two equal-size multisets.
pub fn multiset_distance(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    let mut order: Vec<usize> = (0..a.len()).collect();
    order.sort_by(|&i, &j| a[j].norm().partial_cmp(&a[i].norm()).unwrap());
    for i in order {
        let (mut best, mut bj) = (f64::INFINITY, 0);
        for (j, &bv) in b.iter().enumerate() {
            if !used[j] && (a[i] - bv).norm() < best {
                best = (a[i] - bv).norm();
                bj = j;
            }
        }
        used[bj] = true;
        worst = worst.max(best);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::cmatrix::c;
    use proptest::prelude::*;

    fn sorted(mut v: Vec<C64>) -> Vec<C64> {
        v.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
        v
    }

    #[test]
    fn z2_plus_1() {
        let rts = sorted(poly_roots(&CPoly::from_real(&[1.0, 0.0, 1.0])).unwrap());
        assert!((rts[0] - c(0.0, -1.0)).norm() < 1e-14);
        assert!((rts[1] - c(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn mathieu_quartic_at_closed_gap() {
        // ρ⁴−2(λ+1)ρ²+(λ−1)²−A² at A=2, λ=2−2√2: roots ±1 and an imaginary pair.
        let l = 2.0 - 2.0 * 2f64.sqrt();
        let p = CPoly::from_real(&[(l - 1.0).powi(2) - 4.0, 0.0, -2.0 * (l + 1.0), 0.0, 1.0]);
        let rts = poly_roots(&p).unwrap();
        let real: Vec<_> = rts.iter().filter(|z| z.im.abs() < 1e-9).collect();
        assert_eq!(real.len(), 2);
        for z in real {
            assert!((z.re.abs() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn pendulum_quartic_quadratic_oracle() {
        let p = CPoly::from_real(&[300.0, 0.0, -60.0, 0.0, 1.0]);
        let rts = poly_roots(&p).unwrap();
        let z1 = (60.0 + 2400f64.sqrt()) / 2.0;
        let z2 = (60.0 - 2400f64.sqrt()) / 2.0;
        let mut want = vec![z1.sqrt(), -z1.sqrt(), z2.sqrt(), -z2.sqrt()];
        want.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let got: Vec<f64> = sorted(rts).iter().map(|z| z.re).collect();
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-12 * w.abs());
        }
    }

    #[test]
    fn double_root_clustered() {
        let p = CPoly::from_roots(&[c(1.0, 0.5), c(1.0, 0.5), c(-2.0, 0.0)]);
        let rts = poly_roots(&p).unwrap();
        let cl = cluster_roots(&rts);
        assert_eq!(cl.len(), 2);
        let d = cl.iter().find(|c| c.multiplicity == 2).unwrap();
        assert!((d.value - c(1.0, 0.5)).norm() < 1e-9);
    }

    #[test]
    fn zero_roots_factored() {
        let p = CPoly::from_real(&[0.0, 0.0, -1.0, 1.0]);
        let rts = sorted(poly_roots(&p).unwrap());
        assert_eq!(rts.iter().filter(|z| z.norm() == 0.0).count(), 2);
    }

    #[test]
    fn eig_trivial() {
        let e = sorted(eigenvalues(&CMatrix::diag_real(&[1.0, 2.0, 3.0])).unwrap());
        for (k, z) in e.iter().enumerate() {
            assert!((z - r(k as f64 + 1.0)).norm() < 1e-12);
        }
        let e = sorted(eigenvalues(&CMatrix::from_real(&[&[0.0, 1.0], &[-1.0, 0.0]])).unwrap());
        assert!((e[0] - c(0.0, -1.0)).norm() < 1e-14 && (e[1] - c(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn eig_matches_explicit_cubic() {
        let m = CMatrix::from_rows(&[
            vec![c(0.3, 1.0), c(-1.2, 0.1), c(0.7, 0.0)],
            vec![c(2.0, -0.5), c(0.1, 0.2), c(-0.4, 1.1)],
            vec![c(0.9, 0.0), c(1.5, -0.3), c(-1.0, 0.6)],
        ]);
        // det(M − zI) = −z³ + tr z² − (sum of principal 2-minors) z + det
        let tr = m.trace();
        let m2 = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)] + m[(0, 0)] * m[(2, 2)]
            - m[(0, 2)] * m[(2, 0)]
            + m[(1, 1)] * m[(2, 2)]
            - m[(1, 2)] * m[(2, 1)];
        let det = m[(0, 0)] * (m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)])
            - m[(0, 1)] * (m[(1, 0)] * m[(2, 2)] - m[(1, 2)] * m[(2, 0)])
            + m[(0, 2)] * (m[(1, 0)] * m[(2, 1)] - m[(1, 1)] * m[(2, 0)]);
        let cubic = CPoly::new(vec![det, -m2, tr, r(-1.0)]);
        let want = poly_roots(&cubic).unwrap();
        let got = eigenvalues(&m).unwrap();
        assert!(multiset_distance(&got, &want) < 1e-10);
        for z in got {
            let mut s = m.clone();
            for i in 0..3 {
                s[(i, i)] -= z;
            }
            assert!(s.det().norm() <= 1e-8 * m.norm().powi(3));
        }
    }

    fn cplx() -> impl Strategy<Value = C64> {
        (-3.0..3.0f64, -3.0..3.0f64).prop_map(|(a, b)| c(a, b))
    }

    proptest! {
        #[test]
        fn vieta_relations(coeffs in proptest::collection::vec(cplx(), 3..9)) {
            let mut coeffs = coeffs;
            if coeffs.last().unwrap().norm() < 0.1 {
                *coeffs.last_mut().unwrap() = r(1.0);
            }
            let p = CPoly::new(coeffs.clone());
            let n = p.degree();
            let rts = poly_roots(&p).unwrap();
            prop_assert_eq!(rts.len(), n);
            let an = p.leading();
            let sum: C64 = rts.iter().sum();
            let want_sum = -p.coeffs()[n - 1] / an;
            prop_assert!((sum - want_sum).norm() <= 1e-8 * (1.0 + want_sum.norm() + rts.iter().map(|z| z.norm()).sum::<f64>()));
            let prod: C64 = rts.iter().product();
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let want_prod = p.coeffs()[0] / an * sign;
            prop_assert!((prod - want_prod).norm() <= 1e-8 * (1.0 + rts.iter().map(|z| z.norm()).product::<f64>()));
            for z in &rts {
                prop_assert!(p.eval(*z).norm() <= 1e-10 * p.abs_scale(*z));
            }
        }

        #[test]
        fn eig_trace_det(entries in proptest::collection::vec(cplx(), 16)) {
            let m = CMatrix::from_vec(4, entries);
            let e = eigenvalues(&m).unwrap();
            let s: C64 = e.iter().sum();
            let p: C64 = e.iter().product();
            prop_assert!((s - m.trace()).norm() <= 1e-8 * (1.0 + m.norm()));
            prop_assert!((p - m.det()).norm() <= 1e-8 * (1.0 + m.norm().powi(4)));
        }
    }
}
