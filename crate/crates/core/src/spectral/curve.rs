//! Spectral curves det(𝓛(μ) + λI) = 0 and band structures read off from the
//! number of purely imaginary μ-roots.

use crate::error::{Error, Result};
use crate::numerics::{poly_roots, r, CMatrix, CPoly, Lu, C64};

/// Relative tolerance for "purely imaginary".
pub const EPS_IM: f64 = 1e-7;
/// Bisection width for band edges.
pub const EDGE_WIDTH: f64 = 1e-10;

/// Polynomial Σ c[i][j] μ^i λ^j.
#[derive(Clone, Debug, PartialEq)]
pub struct BivariatePoly {
    coeffs: Vec<Vec<C64>>,
}

impl BivariatePoly {
    /// `coeffs[i][j]` multiplies μ^i λ^j; all rows must have equal length.
    pub fn new(coeffs: Vec<Vec<C64>>) -> Self {
        let w = coeffs.iter().map(|row| row.len()).max().unwrap_or(0);
        let coeffs = coeffs
            .into_iter()
            .map(|mut row| {
                row.resize(w, r(0.0));
                row
            })
            .collect();
        BivariatePoly { coeffs }
    }

    pub fn zeros(deg_mu: usize, deg_lambda: usize) -> Self {
        BivariatePoly { coeffs: vec![vec![r(0.0); deg_lambda + 1]; deg_mu + 1] }
    }

    pub fn coeff(&self, i: usize, j: usize) -> C64 {
        self.coeffs.get(i).and_then(|row| row.get(j)).copied().unwrap_or(r(0.0))
    }

    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.coeffs[i][j] = v;
    }

    pub fn coeffs(&self) -> &[Vec<C64>] {
        &self.coeffs
    }

    pub fn deg_mu(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn deg_lambda(&self) -> usize {
        self.coeffs.first().map_or(0, |row| row.len().saturating_sub(1))
    }

    pub fn eval(&self, mu: C64, lambda: C64) -> C64 {
        self.at_lambda(lambda).eval(mu)
    }

    /// The polynomial in μ at fixed λ.
    pub fn at_lambda(&self, lambda: C64) -> CPoly {
        CPoly::new(
            self.coeffs
                .iter()
                .map(|row| row.iter().rev().fold(r(0.0), |acc, &c| acc * lambda + c))
                .collect(),
        )
    }

    /// The polynomial in λ at fixed μ.
    pub fn at_mu(&self, mu: C64) -> CPoly {
        let w = self.deg_lambda() + 1;
        CPoly::new(
            (0..w)
                .map(|j| self.coeffs.iter().rev().fold(r(0.0), |acc, row| acc * mu + row[j]))
                .collect(),
        )
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// max |cᵢⱼ − c′ᵢⱼ| / max |cᵢⱼ|.
    pub fn relative_distance(&self, other: &BivariatePoly) -> f64 {
        let di = self.deg_mu().max(other.deg_mu());
        let dj = self.deg_lambda().max(other.deg_lambda());
        let mut worst: f64 = 0.0;
        for i in 0..=di {
            for j in 0..=dj {
                worst = worst.max((self.coeff(i, j) - other.coeff(i, j)).norm());
            }
        }
        worst / self.max_abs().max(other.max_abs()).max(f64::MIN_POSITIVE)
    }

    /// True when every coefficient is real to `tol` relative.
    pub fn is_real(&self, tol: f64) -> bool {
        let s = self.max_abs();
        self.coeffs.iter().flatten().all(|z| z.im.abs() <= tol * s)
    }

    pub fn scale(&self, s: C64) -> BivariatePoly {
        BivariatePoly { coeffs: self.coeffs.iter().map(|row| row.iter().map(|&z| z * s).collect()).collect() }
    }
}

/// n Chebyshev points scaled to [−2, 2].
fn cheb_nodes(n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| 2.0 * (std::f64::consts::PI * (2 * k + 1) as f64 / (2 * n) as f64).cos())
        .collect()
}

/// Solve the Vandermonde system Σⱼ xⱼ tₖʲ = yₖ and check its residual.
fn vandermonde_solve(nodes: &[f64], y: &[C64]) -> Result<Vec<C64>> {
    let n = nodes.len();
    let mut a = Vec::with_capacity(n * n);
    for &t in nodes {
        let mut p = 1.0;
        for _ in 0..n {
            a.push(r(p));
            p *= t;
        }
    }
    let lu = Lu::factor(n, a.clone())?;
    let x = lu.solve(y);
    let mut res: f64 = 0.0;
    let xn = x.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let yn = y.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let an = a.iter().map(|z| z.norm()).fold(0.0, f64::max);
    for k in 0..n {
        let s: C64 = (0..n).map(|j| a[k * n + j] * x[j]).sum();
        res = res.max((s - y[k]).norm());
    }
    let rel = res / (yn + an * xn).max(f64::MIN_POSITIVE);
    if rel > 1e-8 {
        return Err(Error::IllConditioned(rel));
    }
    Ok(x)
}

/// Recover det(𝓛(μ) + λI) from a quadratic matrix polynomial 𝓛 by
/// evaluation on a (2d+1)×(d+1) Chebyshev tensor grid.
pub fn curve_from_lax<F: Fn(C64) -> CMatrix>(lax: F, d: usize) -> Result<BivariatePoly> {
    let mu_nodes = cheb_nodes(2 * d + 1);
    let lam_nodes = cheb_nodes(d + 1);
    let mut q = Vec::with_capacity(mu_nodes.len());
    for &m in &mu_nodes {
        let l = lax(r(m));
        if l.dim() != d {
            return Err(Error::DimensionMismatch(format!("Lax matrix is {0}x{0}, expected {d}", l.dim())));
        }
        let vals: Vec<C64> = lam_nodes.iter().map(|&lam| (&l + &CMatrix::scalar(d, r(lam))).det()).collect();
        q.push(vandermonde_solve(&lam_nodes, &vals)?);
    }
    let mut out = BivariatePoly::zeros(2 * d, d);
    for j in 0..=d {
        let col: Vec<C64> = q.iter().map(|row| row[j]).collect();
        let cj = vandermonde_solve(&mu_nodes, &col)?;
        for (i, v) in cj.into_iter().enumerate() {
            out.set(i, j, v);
        }
    }
    Ok(out)
}

fn count_imaginary(curve: &BivariatePoly, lambda: f64) -> Result<(usize, usize)> {
    let p = curve.at_lambda(r(lambda));
    if p.degree() == 0 {
        return Ok((0, 0));
    }
    let roots = poly_roots(&p)?;
    let mut count = 0;
    let mut near = 0;
    for z in roots {
        let t = EPS_IM * (1.0 + z.norm());
        let re = z.re.abs();
        if re <= t {
            count += 1;
        }
        if re > t / 10.0 && re < 10.0 * t {
            near += 1;
        }
    }
    Ok((count, near))
}

/// Number of purely imaginary μ-roots of the curve at real λ.
/// Roots within a factor 10 of the threshold raise `BoundaryWarning`, which
/// carries the count anyway.
pub fn curve_multiplicity(curve: &BivariatePoly, lambda: f64) -> Result<usize> {
    let (count, near) = count_imaginary(curve, lambda)?;
    if near > 0 {
        return Err(Error::BoundaryWarning { count: near, multiplicity: count });
    }
    Ok(count)
}

/// Multiplicity ignoring boundary warnings.
fn multiplicity_lenient(curve: &BivariatePoly, lambda: f64) -> Result<usize> {
    match curve_multiplicity(curve, lambda) {
        Err(Error::BoundaryWarning { multiplicity, .. }) => Ok(multiplicity),
        other => other,
    }
}

/// One interval of a band structure; `hi` is +∞ for the last one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Band {
    pub lo: f64,
    pub hi: f64,
    pub multiplicity: usize,
}

/// Breakpoints with the multiplicity on each interval: `multiplicities[0]`
/// holds below the first breakpoint, `multiplicities[k]` on
/// [breakpoints[k−1], breakpoints[k]).
#[derive(Clone, Debug, PartialEq)]
pub struct BandStructure {
    pub breakpoints: Vec<f64>,
    pub multiplicities: Vec<usize>,
}

impl BandStructure {
    /// Build, merging equal neighbours.
    pub fn new(breakpoints: Vec<f64>, multiplicities: Vec<usize>) -> Result<Self> {
        if multiplicities.len() != breakpoints.len() + 1 {
            return Err(Error::DimensionMismatch("need one more multiplicity than breakpoints".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Domain("breakpoints must be sorted".into()));
        }
        let mut bp = Vec::new();
        let mut mu = vec![multiplicities[0]];
        for (k, &b) in breakpoints.iter().enumerate() {
            if multiplicities[k + 1] != *mu.last().unwrap() {
                bp.push(b);
                mu.push(multiplicities[k + 1]);
            }
        }
        Ok(BandStructure { breakpoints: bp, multiplicities: mu })
    }

    /// Multiplicity at λ, taking the right limit at breakpoints.
    pub fn multiplicity_at(&self, lambda: f64) -> usize {
        let k = self.breakpoints.iter().filter(|&&b| b <= lambda).count();
        self.multiplicities[k]
    }

    /// Distance from λ to the nearest breakpoint.
    pub fn distance_to_edge(&self, lambda: f64) -> f64 {
        self.breakpoints.iter().map(|b| (b - lambda).abs()).fold(f64::INFINITY, f64::min)
    }

    /// Intervals of positive multiplicity.
    pub fn bands(&self) -> Vec<Band> {
        let n = self.breakpoints.len();
        (0..=n)
            .filter(|&k| self.multiplicities[k] > 0)
            .map(|k| Band {
                lo: if k == 0 { f64::NEG_INFINITY } else { self.breakpoints[k - 1] },
                hi: if k == n { f64::INFINITY } else { self.breakpoints[k] },
                multiplicity: self.multiplicities[k],
            })
            .collect()
    }

    pub fn max_multiplicity(&self) -> usize {
        self.multiplicities.iter().copied().max().unwrap_or(0)
    }
}

/// Scan the multiplicity on `n_samples` points of `range`, refine each change
/// by bisection to width 1e−10.
pub fn band_structure_from_curve(curve: &BivariatePoly, range: (f64, f64), n_samples: usize) -> Result<BandStructure> {
    if n_samples < 100 || !(range.0 < range.1) || !range.0.is_finite() || !range.1.is_finite() {
        return Err(Error::Domain("need a finite range and at least 100 samples".into()));
    }
    let step = (range.1 - range.0) / (n_samples - 1) as f64;
    let grid: Vec<f64> = (0..n_samples).map(|k| range.0 + k as f64 * step).collect();
    let mults = grid.iter().map(|&l| multiplicity_lenient(curve, l)).collect::<Result<Vec<_>>>()?;
    let mut breakpoints = Vec::new();
    let mut labels = vec![mults[0]];
    for k in 0..n_samples - 1 {
        let (mut a, mut ma) = (grid[k], mults[k]);
        let (b, mb) = (grid[k + 1], mults[k + 1]);
        // Several edges may share one grid cell.
        while ma != mb {
            let (mut lo, mut hi) = (a, b);
            let mut mhi = mb;
            while hi - lo > EDGE_WIDTH {
                let mid = 0.5 * (lo + hi);
                let m = multiplicity_lenient(curve, mid)?;
                if m == ma {
                    lo = mid;
                } else {
                    hi = mid;
                    mhi = m;
                }
            }
            breakpoints.push(0.5 * (lo + hi));
            labels.push(mhi);
            a = hi;
            ma = mhi;
        }
    }
    BandStructure::new(breakpoints, labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::c;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn scalar_lax(cc: f64, f: f64, b: f64) -> impl Fn(C64) -> CMatrix {
        move |mu| CMatrix::diag(&[mu * mu * cc * cc - mu * 2.0 * cc * f - b])
    }

    #[test]
    fn scalar_curve() {
        let p = curve_from_lax(scalar_lax(1.5, 0.3, 0.7), 1).unwrap();
        assert!((p.coeff(2, 0) - 2.25).norm() < 1e-12);
        assert!((p.coeff(1, 0) + 0.9).norm() < 1e-12);
        assert!((p.coeff(0, 0) + 0.7).norm() < 1e-12);
        assert!((p.coeff(0, 1) - 1.0).norm() < 1e-12);
        assert!(p.coeff(1, 1).norm() < 1e-12 && p.coeff(2, 1).norm() < 1e-12);
    }

    #[test]
    fn random_d3_probes() {
        let mut g = ChaCha8Rng::seed_from_u64(21);
        let rm = |g: &mut ChaCha8Rng| CMatrix::from_vec(3, (0..9).map(|_| c(g.gen_range(-1.0..1.0), g.gen_range(-1.0..1.0))).collect());
        let (cm, f, b) = (rm(&mut g), rm(&mut g), rm(&mut g));
        let lax = |mu: C64| crate::dressing::chain::lax_from(&cm, &f, &b, mu);
        let p = curve_from_lax(lax, 3).unwrap();
        assert_eq!((p.deg_mu(), p.deg_lambda()), (6, 3));
        for _ in 0..20 {
            let mu = c(g.gen_range(-2.0..2.0), g.gen_range(-2.0..2.0));
            let lam = c(g.gen_range(-2.0..2.0), g.gen_range(-2.0..2.0));
            let direct = (&lax(mu) + &CMatrix::scalar(3, lam)).det();
            assert!((p.eval(mu, lam) - direct).norm() <= 1e-9 * direct.norm().max(1.0));
        }
    }

    #[test]
    fn free_scalar_bands() {
        // μ²J² + λ − P: imaginary roots iff λ > P.
        let p = curve_from_lax(|mu: C64| CMatrix::diag(&[mu * mu * 4.0 - 1.5]), 1).unwrap();
        assert_eq!(curve_multiplicity(&p, 3.0).unwrap(), 2);
        assert_eq!(curve_multiplicity(&p, 0.0).unwrap(), 0);
        let bs = band_structure_from_curve(&p, (-5.0, 5.0), 100).unwrap();
        assert_eq!(bs.breakpoints.len(), 1);
        assert!((bs.breakpoints[0] - 1.5).abs() < 1e-10);
        assert_eq!(bs.multiplicities, vec![0, 2]);
    }

    #[test]
    fn band_structure_helpers() {
        let bs = BandStructure::new(vec![-1.0, 0.5, 3.0], vec![0, 2, 2, 4]).unwrap();
        assert_eq!(bs.breakpoints, vec![-1.0, 3.0]);
        assert_eq!(bs.multiplicity_at(-1.0), 2);
        assert_eq!(bs.multiplicity_at(10.0), 4);
        let bands = bs.bands();
        assert_eq!(bands.len(), 2);
        assert!(bands[1].hi.is_infinite());
        assert!(BandStructure::new(vec![1.0], vec![0]).is_err());
    }

    #[test]
    fn two_edges_in_one_cell() {
        // Two separate scalar factors with edges 0.12 and 0.18 inside a coarse grid cell.
        let lax = |mu: C64| CMatrix::diag(&[mu * mu - 0.12, mu * mu * 4.0 - 0.18]);
        let p = curve_from_lax(lax, 2).unwrap();
        let bs = band_structure_from_curve(&p, (-10.0, 10.0), 100).unwrap();
        assert_eq!(bs.multiplicities, vec![0, 2, 4]);
        assert!((bs.breakpoints[0] - 0.12).abs() < 1e-9 && (bs.breakpoints[1] - 0.18).abs() < 1e-9);
    }
}
