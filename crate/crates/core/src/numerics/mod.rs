//! Numerical kernel: dense complex linear algebra, polynomial roots, the
//! anticommutator solve, adaptive ODE integration and elliptic functions.

pub mod cmatrix;
pub mod eig;
pub mod elliptic;
pub mod fd;
pub mod ode;
pub mod poly;
pub mod sylvester;

pub use cmatrix::{c, r, CMatrix, Lu, C64};
pub use eig::{eigenvalues_qr, symmetric_eigen};
pub use elliptic::{complete_elliptic_k, jacobi_elliptic};
pub use fd::{GaussPoly, Grid};
pub use ode::{OdeSetup, Trajectory, DEFAULT_ATOL, DEFAULT_RTOL};
pub use poly::{char_poly, cluster_roots, eigenvalues, multiset_distance, poly_roots, CPoly, RootCluster};
pub use sylvester::{solve_anticommutator, AnticommutatorSolver};
