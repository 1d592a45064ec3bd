//! Matrix Darboux dressing chains, the Bogoyavlenskij top, and spectral
//! theory of the matrix Schrödinger operators they generate.
//!
//! The crate is organised bottom-up:
//!
//! - [`numerics`]: small dense complex linear algebra, Aberth root finding,
//!   Dormand–Prince integration, Jacobi elliptic functions.
//! - [`dressing`]: the period-one chain `CF′+F′C = [C,F²+B]+2αC`, `B′=[B,F]`,
//!   its Lax and zero-curvature forms, reductions and first integrals.
//! - [`top`]: the rigid body in a quadratic potential, its embedding in the
//!   chain, and the solvable 2D pendulum.
//! - [`spectral`]: spectral curves `det(𝓛+λI)=0`, band structures and
//!   Bloch–Floquet monodromy.
//! - [`families`]: explicitly solvable potentials (Mathieu-type, oscillator,
//!   elliptic, soliton).
//! - [`cli`]: the `dressing-lab` command-line front end.

pub mod cli;
pub mod dressing;
pub mod error;
pub mod families;
pub mod numerics;
pub mod spectral;
pub mod top;

pub use error::{Error, Result};
