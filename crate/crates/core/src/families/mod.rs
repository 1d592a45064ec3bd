//! Explicit potential families: Mathieu-type, matrix oscillators, elliptic
//! and soliton-like potentials, plus the closed-form symmetric chain
//! solutions behind the first two.

pub mod elliptic;
pub mod mathieu;
pub mod oscillator;
pub mod soliton;
pub mod symf;

pub use elliptic::{elliptic_curve, elliptic_psi, EllipticFamily, EllipticPsi};
pub use mathieu::{
    mathieu_bands, mathieu_bloch, mathieu_dispersion, mathieu_multiplicity, mathieu_potential, mathieu_quartic,
    reflection, remark_curve_map_check, MathieuBloch, MathieuFamily, MathieuReduction, RemarkMapReport,
};
pub use oscillator::{
    ground_state_check, integrate_phieq, matching_singular_values, oscillator_ground_basis, oscillator_raise,
    oscillator_spectrum, phieq_decay_slope, phieq_invariant, phieq_invariant_drift, Level, OscEigenfunction,
    OscillatorFamily,
};
pub use soliton::{soliton_curve, soliton_nu, soliton_psi, soliton_psi_nu, soliton_residual, SolitonFamily};
pub use symf::{symf_f, symf_fprime, symf_potential, symf_solution, SymfParams};
