//! Spectral curves, band structures and Bloch–Floquet monodromy.

pub mod curve;
pub mod monodromy;
pub mod potential;

pub use curve::{
    band_structure_from_curve, curve_from_lax, curve_multiplicity, Band, BandStructure, BivariatePoly, EPS_IM,
};
pub use monodromy::{
    compare_bands, gap_width, locate_collision, monodromy, monodromy_scan, resonance_scan, BandComparison,
    CollisionEvent, CollisionKind, MonodromyResult, EPS_TAU,
};
pub use potential::{GeneratingOde, PotentialEvaluator, SymmetryFlags};
