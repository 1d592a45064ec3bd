//! Error type shared by all modules.

use thiserror::Error as ThisError;

#[derive(Debug, Clone, PartialEq, ThisError)]
pub enum Error {
    #[error("singular matrix")]
    Singular,
    #[error("anticommutator map X -> CX+XC is singular (min |c_i+c_j| = {0:.3e})")]
    SingularMap(f64),
    #[error("root finder did not converge after {0} iterations")]
    NoConvergence(usize),
    #[error("step size underflow at t = {0}")]
    StepSizeUnderflow(f64),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("grid spacing {0} is too coarse (must be <= 0.1)")]
    GridTooCoarse(f64),
    #[error("frame matrix degenerate (condition number {0:.3e})")]
    FrameDegenerate(f64),
    #[error("coordinate singularity at t = {0}")]
    CoordinateSingularity(f64),
    #[error("{count} roots within the boundary band of the imaginary axis")]
    BoundaryWarning { count: usize, multiplicity: usize },
    #[error("ill-conditioned interpolation (residual {0:.3e})")]
    IllConditioned(f64),
    #[error("potential has no period")]
    PeriodMissing,
    #[error("point is off the spectral curve (residual {0:.3e})")]
    OffCurve(f64),
    #[error("denominator vanishes at x = {0}")]
    DenominatorZero(f64),
    #[error("parameter outside branch domain: {0}")]
    BranchDomain(String),
    #[error("residual {0:.3e} too large for input")]
    ResidualTooLarge(f64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
