//! Period-N chains embedded as one period-one chain of dimension Nd.
//!
//! With F = diag(F₁, …, F_N), B = diag(B₁, …, B_N) and the cyclic block
//! matrix with identities above the diagonal and C in the bottom-left corner,
//! the period-one equation reproduces F′ₙ₊₁ + F′ₙ = Fₙ₊₁² − Fₙ² + Bₙ₊₁ − Bₙ with
//! Fₙ₊N = CFₙC⁻¹, Bₙ₊N = CBₙC⁻¹ + 2αI.
//!
//! For α ≠ 0 the embedded chain carries α/N and its blocks are shifted,
//! B̂ₙ = Bₙ − 2(n−1)(α/N)I; [`split_blocks`] undoes the shift.
//! Since the cyclic matrix has eigenvalues that are N-th roots of those of C,
//! even N always violates cᵢ + cⱼ ≠ 0 and is rejected.

use super::chain::ChainState;
use crate::error::{Error, Result};
use crate::numerics::{CMatrix, C64};

/// The cyclic companion of `c` for period `n`.
pub fn cyclic_block(c: &CMatrix, n: usize) -> CMatrix {
    let d = c.dim();
    if n == 1 {
        return c.clone();
    }
    let mut m = CMatrix::zeros(n * d);
    for k in 0..n - 1 {
        m.set_block(k, k + 1, &CMatrix::identity(d));
    }
    m.set_block(n - 1, 0, c);
    m
}

/// Embed N states sharing C and α (the period-N α) as one state of size Nd.
pub fn build_block_closure(states: &[ChainState]) -> Result<ChainState> {
    let n = states.len();
    if n == 0 {
        return Err(Error::DimensionMismatch("need at least one state".into()));
    }
    let d = states[0].dim();
    let c = &states[0].c;
    let alpha = states[0].alpha;
    for s in states {
        if s.dim() != d || (&s.c - c).norm() > 1e-14 * c.norm() || s.alpha != alpha {
            return Err(Error::DimensionMismatch("states must share dimension, C and alpha".into()));
        }
    }
    if n == 1 {
        return Ok(states[0].clone());
    }
    let a_big = alpha / n as f64;
    let mut f = CMatrix::zeros(n * d);
    let mut b = CMatrix::zeros(n * d);
    for (k, s) in states.iter().enumerate() {
        f.set_block(k, k, &s.f);
        let shift = CMatrix::scalar(d, a_big * (2.0 * k as f64));
        b.set_block(k, k, &(&s.b - &shift));
    }
    ChainState::new(f, b, cyclic_block(c, n), a_big)
}

/// Recover the N period-N states from an embedded state.
pub fn split_blocks(big: &ChainState, n: usize, c: &CMatrix) -> Vec<ChainState> {
    let d = big.dim() / n;
    let alpha: C64 = big.alpha * n as f64;
    (0..n)
        .map(|k| {
            let shift = CMatrix::scalar(d, big.alpha * (2.0 * k as f64));
            ChainState {
                f: big.f.block(d, k, k),
                b: &big.b.block(d, k, k) + &shift,
                c: c.clone(),
                alpha,
                tag: Default::default(),
            }
        })
        .collect()
}
