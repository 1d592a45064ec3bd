//! Small dense complex matrices.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;

use crate::error::Error;

/// Complex scalar used throughout the crate.
pub type C64 = Complex64;

/// Shorthand for a complex number.
#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Shorthand for a real complex number.
#[inline]
pub fn r(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<C64>,
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.n, self.n)?;
        for i in 0..self.n {
            write!(f, "  ")?;
            for j in 0..self.n {
                let z = self[(i, j)];
                write!(f, "{:+.6e}{:+.6e}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "matrix dimension must be at least 1");
        CMatrix { n, data: vec![C64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = r(1.0);
        }
        m
    }

    pub fn scalar(n: usize, s: C64) -> Self {
        Self::identity(n).scale(s)
    }

    /// Build from a row-major slice of length n².
    pub fn from_vec(n: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), n * n, "data length must be n*n");
        assert!(n >= 1);
        CMatrix { n, data }
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "matrix must be square");
            for (j, &z) in row.iter().enumerate() {
                m[(i, j)] = z;
            }
        }
        m
    }

    /// Build a real matrix from rows of f64.
    pub fn from_real(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "matrix must be square");
            for (j, &x) in row.iter().enumerate() {
                m[(i, j)] = r(x);
            }
        }
        m
    }

    pub fn diag(entries: &[C64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &z) in entries.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    pub fn diag_real(entries: &[f64]) -> Self {
        let v: Vec<C64> = entries.iter().map(|&x| r(x)).collect();
        Self::diag(&v)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn scale(&self, s: C64) -> Self {
        CMatrix { n: self.n, data: self.data.iter().map(|&z| z * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(r(s))
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m[(j, i)] = self[(i, j)];
            }
        }
        m
    }

    pub fn conj(&self) -> Self {
        CMatrix { n: self.n, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn adjoint(&self) -> Self {
        self.transpose().conj()
    }

    pub fn trace(&self) -> C64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `AB - BA`.
    pub fn commutator(&self, other: &CMatrix) -> CMatrix {
        &(self * other) - &(other * self)
    }

    /// `AB + BA`.
    pub fn anticommutator(&self, other: &CMatrix) -> CMatrix {
        &(self * other) + &(other * self)
    }

    fn tol_scale(&self, eps: f64) -> f64 {
        eps * self.norm().max(f64::MIN_POSITIVE)
    }

    pub fn is_symmetric(&self, eps: f64) -> bool {
        (self - &self.transpose()).norm() <= self.tol_scale(eps)
    }

    pub fn is_skew(&self, eps: f64) -> bool {
        (self + &self.transpose()).norm() <= self.tol_scale(eps)
    }

    pub fn is_hermitian(&self, eps: f64) -> bool {
        (self - &self.adjoint()).norm() <= self.tol_scale(eps)
    }

    pub fn is_real(&self, eps: f64) -> bool {
        let im: f64 = self.data.iter().map(|z| z.im * z.im).sum::<f64>().sqrt();
        im <= self.tol_scale(eps)
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    pub fn lu(&self) -> Result<Lu, Error> {
        Lu::factor(self.n, self.data.clone())
    }

    pub fn det(&self) -> C64 {
        match self.lu() {
            Ok(lu) => lu.det(),
            Err(_) => r(0.0),
        }
    }

    pub fn inverse(&self) -> Result<CMatrix, Error> {
        let lu = self.lu()?;
        let n = self.n;
        let mut inv = CMatrix::zeros(n);
        let mut e = vec![r(0.0); n];
        for j in 0..n {
            e.iter_mut().for_each(|z| *z = r(0.0));
            e[j] = r(1.0);
            let col = lu.solve(&e);
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        Ok(inv)
    }

    /// Condition number estimate ‖A‖_F ‖A⁻¹‖_F.
    pub fn cond(&self) -> f64 {
        match self.inverse() {
            Ok(inv) => self.norm() * inv.norm(),
            Err(_) => f64::INFINITY,
        }
    }

    /// Block `(bi, bj)` of size `b` (blocks indexed from 0).
    pub fn block(&self, b: usize, bi: usize, bj: usize) -> CMatrix {
        let mut m = CMatrix::zeros(b);
        for i in 0..b {
            for j in 0..b {
                m[(i, j)] = self[(bi * b + i, bj * b + j)];
            }
        }
        m
    }

    pub fn set_block(&mut self, bi: usize, bj: usize, blk: &CMatrix) {
        let b = blk.n;
        for i in 0..b {
            for j in 0..b {
                self[(bi * b + i, bj * b + j)] = blk[(i, j)];
            }
        }
    }

    /// Assemble a square block matrix from an `m × m` grid of equal-sized blocks.
    pub fn from_blocks(blocks: &[Vec<CMatrix>]) -> CMatrix {
        let m = blocks.len();
        let b = blocks[0][0].n;
        let mut out = CMatrix::zeros(m * b);
        for (bi, row) in blocks.iter().enumerate() {
            assert_eq!(row.len(), m);
            for (bj, blk) in row.iter().enumerate() {
                assert_eq!(blk.n, b, "blocks must share a size");
                out.set_block(bi, bj, blk);
            }
        }
        out
    }

    /// Square root of a real symmetric positive diagonal matrix.
    pub fn sqrt_diag(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.n);
        for i in 0..self.n {
            m[(i, i)] = self[(i, i)].sqrt();
        }
        m
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.n + j]
    }
}

impl<'a> Add<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;
    fn add(self, o: &CMatrix) -> CMatrix {
        assert_eq!(self.n, o.n);
        CMatrix { n: self.n, data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect() }
    }
}

impl<'a> Sub<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;
    fn sub(self, o: &CMatrix) -> CMatrix {
        assert_eq!(self.n, o.n);
        CMatrix { n: self.n, data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect() }
    }
}

impl<'a> Mul<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;
    fn mul(self, o: &CMatrix) -> CMatrix {
        assert_eq!(self.n, o.n);
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * o.data[k * n + j];
                }
            }
        }
        out
    }
}

impl Add for CMatrix {
    type Output = CMatrix;
    fn add(self, o: CMatrix) -> CMatrix {
        &self + &o
    }
}

impl Sub for CMatrix {
    type Output = CMatrix;
    fn sub(self, o: CMatrix) -> CMatrix {
        &self - &o
    }
}

impl Mul for CMatrix {
    type Output = CMatrix;
    fn mul(self, o: CMatrix) -> CMatrix {
        &self * &o
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        self.scale_real(-1.0)
    }
}

impl Neg for CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        self.scale_real(-1.0)
    }
}

impl AddAssign<&CMatrix> for CMatrix {
    fn add_assign(&mut self, o: &CMatrix) {
        assert_eq!(self.n, o.n);
        self.data.iter_mut().zip(&o.data).for_each(|(a, b)| *a += b);
    }
}

impl SubAssign<&CMatrix> for CMatrix {
    fn sub_assign(&mut self, o: &CMatrix) {
        assert_eq!(self.n, o.n);
        self.data.iter_mut().zip(&o.data).for_each(|(a, b)| *a -= b);
    }
}

/// LU factorization with partial pivoting of an n×n complex matrix.
#[derive(Clone, Debug)]
pub struct Lu {
    n: usize,
    lu: Vec<C64>,
    perm: Vec<usize>,
    sign: f64,
}

impl Lu {
    /// Factor a row-major n×n matrix. Fails with `Singular` on a zero pivot
    /// (relative to the largest entry).
    pub fn factor(n: usize, mut a: Vec<C64>) -> Result<Lu, Error> {
        let scale = a.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if scale == 0.0 || !scale.is_finite() {
            return Err(Error::Singular);
        }
        let tiny = scale * 1e-300_f64.max(f64::EPSILON * 1e-3);
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, a[i * n + k].norm()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pmax <= tiny {
                return Err(Error::Singular);
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let piv = a[k * n + k];
            for i in k + 1..n {
                let f = a[i * n + k] / piv;
                a[i * n + k] = f;
                if f != C64::new(0.0, 0.0) {
                    for j in k + 1..n {
                        let t = a[k * n + j];
                        a[i * n + j] -= f * t;
                    }
                }
            }
        }
        Ok(Lu { n, lu: a, perm, sign })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.n;
        assert_eq!(b.len(), n);
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s / self.lu[i * n + i];
        }
        x
    }

    pub fn det(&self) -> C64 {
        let mut d = r(self.sign);
        for i in 0..self.n {
            d *= self.lu[i * self.n + i];
        }
        d
    }

    /// Smallest pivot modulus relative to the largest; a cheap conditioning hint.
    pub fn pivot_ratio(&self) -> f64 {
        let p: Vec<f64> = (0..self.n).map(|i| self.lu[i * self.n + i].norm()).collect();
        let mx = p.iter().cloned().fold(0.0, f64::max);
        let mn = p.iter().cloned().fold(f64::INFINITY, f64::min);
        mn / mx
    }
}
