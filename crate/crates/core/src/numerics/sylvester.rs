//! The linear map X ↦ CX + XC and its inverse.

use super::cmatrix::{CMatrix, Lu, C64};
use super::poly::eigenvalues;
use crate::error::{Error, Result};

/// Pre-factored inverse of X ↦ CX + XC for a fixed C.
///
/// The map is assembled as a d²×d² dense system and LU-factored with partial
/// pivoting, so non-diagonalizable C is handled like any other.
#[derive(Clone, Debug)]
pub struct AnticommutatorSolver {
    c: CMatrix,
    lu: Lu,
    min_pair: f64,
}

impl AnticommutatorSolver {
    /// Factor the map for `c`. Fails with `SingularMap` when some pair of
    /// eigenvalues satisfies |cᵢ + cⱼ| ≤ 1e−10·‖C‖.
    pub fn new(c: &CMatrix) -> Result<Self> {
        let d = c.dim();
        let ev = eigenvalues(c)?;
        let mut min_pair = f64::INFINITY;
        for i in 0..d {
            for j in i..d {
                min_pair = min_pair.min((ev[i] + ev[j]).norm());
            }
        }
        let eps = 1e-10 * c.norm();
        if min_pair <= eps {
            return Err(Error::SingularMap(min_pair));
        }
        let n = d * d;
        let mut k = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..d {
            for j in 0..d {
                let row = i * d + j;
                for m in 0..d {
                    // (CX)_{ij} = Σ C_{im} X_{mj}
                    k[row * n + m * d + j] += c[(i, m)];
                    // (XC)_{ij} = Σ X_{im} C_{mj}
                    k[row * n + i * d + m] += c[(m, j)];
                }
            }
        }
        let lu = Lu::factor(n, k).map_err(|_| Error::SingularMap(min_pair))?;
        Ok(AnticommutatorSolver { c: c.clone(), lu, min_pair })
    }

    pub fn c(&self) -> &CMatrix {
        &self.c
    }

    /// min |cᵢ + cⱼ| over eigenvalue pairs (including i = j).
    pub fn min_pair(&self) -> f64 {
        self.min_pair
    }

    /// The X with CX + XC = R.
    pub fn solve(&self, rhs: &CMatrix) -> CMatrix {
        let d = self.c.dim();
        assert_eq!(rhs.dim(), d, "dimension mismatch in anticommutator solve");
        CMatrix::from_vec(d, self.lu.solve(rhs.as_slice()))
    }
}

/// One-shot solve of CX + XC = R.
pub fn solve_anticommutator(c: &CMatrix, rhs: &CMatrix) -> Result<CMatrix> {
    if c.dim() != rhs.dim() {
        return Err(Error::DimensionMismatch(format!("C is {}x{}, R is {}x{}", c.dim(), c.dim(), rhs.dim(), rhs.dim())));
    }
    Ok(AnticommutatorSolver::new(c)?.solve(rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::cmatrix::{c, r};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, d: usize) -> CMatrix {
        CMatrix::from_vec(d, (0..d * d).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect())
    }

    #[test]
    fn identity_halves() {
        let rm = CMatrix::from_rows(&[vec![c(1.0, 2.0), c(3.0, 0.0)], vec![c(-1.0, 0.0), c(0.5, 0.5)]]);
        let x = solve_anticommutator(&CMatrix::identity(2), &rm).unwrap();
        assert!((&x - &rm.scale_real(0.5)).norm() < 1e-15);
    }

    #[test]
    fn diagonal_entrywise() {
        let cm = CMatrix::diag_real(&[1.0, 2.0]);
        let rm = CMatrix::from_real(&[&[2.0, 3.0], &[3.0, 4.0]]);
        let x = solve_anticommutator(&cm, &rm).unwrap();
        let want = CMatrix::from_real(&[&[1.0, 1.0], &[1.0, 1.0]]);
        assert!((&x - &want).norm() < 1e-14);
    }

    #[test]
    fn opposite_eigenvalues_rejected() {
        let cm = CMatrix::diag_real(&[1.0, -1.0]);
        assert!(matches!(AnticommutatorSolver::new(&cm), Err(Error::SingularMap(_))));
    }

    #[test]
    fn jordan_block_solvable() {
        let cm = CMatrix::from_real(&[&[1.0, 1.0], &[0.0, 1.0]]);
        let rm = CMatrix::from_rows(&[vec![c(0.3, 1.0), r(2.0)], vec![r(-1.0), c(0.0, 0.5)]]);
        let x = solve_anticommutator(&cm, &rm).unwrap();
        assert!((&cm.anticommutator(&x) - &rm).norm() < 1e-14);
    }

    #[test]
    fn roundtrip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..100 {
            let d = 2 + trial % 3;
            let cm = random_matrix(&mut rng, d);
            let x = random_matrix(&mut rng, d);
            let rm = cm.anticommutator(&x);
            let solver = match AnticommutatorSolver::new(&cm) {
                Ok(s) => s,
                Err(_) => continue,
            };
            let y = solver.solve(&rm);
            let res = (&cm.anticommutator(&y) - &rm).norm();
            assert!(res <= 1e-10 * (rm.norm() + cm.norm() * y.norm()), "trial {trial}: {res}");
        }
    }
}
