//! Three-dimensional top parameter sets with genus-four spectral curves.

use crate::error::Result;
use crate::numerics::{eigenvalues, CMatrix};
use crate::spectral::{band_structure_from_curve, BandStructure};

use super::{top_spectral_curve, TopState};

/// (J₁, J₂, J₃; u₁, u₂; v₁, v₂, v₃; ω₁, ω₂, ω₃) with
/// Ω = [[0, ω₁, ω₂], [−ω₁, 0, ω₃], [−ω₂, −ω₃, 0]],
/// P = [[u₁, v₁, v₂], [v₁, u₂, v₃], [v₂, v₃, −u₁−u₂]].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Fig2Params {
    pub j: [f64; 3],
    pub u: [f64; 2],
    pub v: [f64; 3],
    pub omega: [f64; 3],
}

/// The four parameter sets, in plot order. The second set lists only ten
/// numbers; it is read as u = (1, 2), v = (1, 2, 10), ω = (5, 2, 2) with
/// J = (1, 2, 3).
pub fn fig2_sets() -> [Fig2Params; 4] {
    [
        Fig2Params { j: [1.0, 2.0, 3.0], u: [8.0, 0.0], v: [1.0, 2.0, 1.0], omega: [0.0, 1.0, 1.0] },
        Fig2Params { j: [1.0, 2.0, 3.0], u: [1.0, 2.0], v: [1.0, 2.0, 10.0], omega: [5.0, 2.0, 2.0] },
        Fig2Params { j: [1.0, 2.0, 3.0], u: [1.0, 2.0], v: [1.0, 2.0, 1.0], omega: [1.0, 2.0, 2.0] },
        Fig2Params { j: [1.0, 2.0, 10.0], u: [1.0, 2.0], v: [1.0, 2.0, 30.0], omega: [5.0, 2.0, 2.0] },
    ]
}

/// Multiplicity pattern of one parameter set.
#[derive(Clone, Debug)]
pub struct Fig2Report {
    pub bands: BandStructure,
    /// Largest eigenvalue of P.
    pub p_max: f64,
    /// Number of finite intervals of multiplicity 6.
    pub finite_max_bands: usize,
}

impl Fig2Params {
    pub fn matrices(&self) -> (CMatrix, CMatrix, CMatrix) {
        let [w1, w2, w3] = self.omega;
        let [u1, u2] = self.u;
        let [v1, v2, v3] = self.v;
        (
            CMatrix::from_real(&[&[0.0, w1, w2], &[-w1, 0.0, w3], &[-w2, -w3, 0.0]]),
            CMatrix::from_real(&[&[u1, v1, v2], &[v1, u2, v3], &[v2, v3, -u1 - u2]]),
            CMatrix::diag_real(&self.j),
        )
    }

    /// Canonical state (J reordered to nonincreasing by a permutation).
    pub fn state(&self) -> Result<TopState> {
        let (om, p, j) = self.matrices();
        Ok(TopState::canonical(om, p, j)?.0)
    }

    /// Band structure of the spectral curve on a window that contains every
    /// multiplicity change.
    pub fn report(&self, n_samples: usize) -> Result<Fig2Report> {
        let s = self.state()?;
        let curve = top_spectral_curve(&s)?;
        let ev = eigenvalues(&s.p)?;
        let p_max = ev.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        let scale = s.p.norm() + s.m().norm().powi(2) / s.j[(s.dim() - 1, s.dim() - 1)].re.powi(2) + 1.0;
        let bands = band_structure_from_curve(&curve, (-4.0 * scale, p_max + 1.0), n_samples)?;
        let last = bands.multiplicities.len() - 1;
        let finite_max_bands = bands.multiplicities[..last].iter().filter(|&&m| m == 6).count();
        Ok(Fig2Report { bands, p_max, finite_max_bands })
    }
}
