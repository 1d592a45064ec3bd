//! Operator identities checked on test functions: the intertwining relation
//! AL = L̃A and the commutation [L, C⁻¹(D + F)] = 0.
//!
//! The operators are expanded so that the third derivatives of ψ cancel
//! exactly. The remaining derivatives of products such as Fψ and Uψ are
//! taken by Richardson-extrapolated central differences. Coefficients at the
//! stencil points come from short Runge–Kutta steps started at the
//! interpolated state, so they are smooth on the stencil scale.

use super::chain::{integrate_chain_span, ChainState, ChainSystem};
use crate::error::{Error, Result};
use crate::numerics::fd::{d1, d2, Grid, OFFSETS};
use crate::numerics::ode::rk_step;
use crate::numerics::{CMatrix, GaussPoly, C64, DEFAULT_RTOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Identity {
    Intertwine,
    Commute,
}

/// Core residual evaluation given a chain system and a state provider.
fn operator_residual<S>(
    sys: &ChainSystem,
    state_at: S,
    testfns: &[GaussPoly],
    grid: &Grid,
    which: Identity,
    perturb: Option<&CMatrix>,
) -> f64
where
    S: Fn(f64) -> Vec<C64>,
{
    let d = sys.dim();
    let h = grid.h;
    let mut worst: f64 = 0.0;
    let mut rhs = |_t: f64, y: &[C64], dy: &mut [C64]| sys.rhs_packed(y, dy);
    for x in grid.interior() {
        let y0 = state_at(x);
        // F and U on the stencil, from the local flow through the state at x.
        let mut fs = Vec::with_capacity(OFFSETS.len());
        let mut us = Vec::with_capacity(OFFSETS.len());
        for &o in OFFSETS.iter() {
            let y = if o == 0 { y0.clone() } else { rk_step(&mut rhs, x, &y0, o as f64 * h, 1.0) };
            let (f, b) = sys.unpack(&y);
            let mut u = sys.potential(&f, &b);
            if let Some(p) = perturb {
                u += p;
            }
            fs.push(f);
            us.push(u);
        }
        let f0 = &fs[3];
        let u0 = &us[3];
        let ut0 = sys.conjugated(u0);
        for tf in testfns {
            assert_eq!(tf.dim(), d, "test function dimension must match the chain");
            let psis: Vec<Vec<C64>> = OFFSETS.iter().map(|&o| tf.eval(x + o as f64 * h)).collect();
            let (psi, dpsi, ddpsi) = tf.jet(x);
            let prod = |m: &[CMatrix]| -> [Vec<C64>; 7] { std::array::from_fn(|k| m[k].mul_vec(&psis[k])) };
            let d_upsi = d1(&prod(&us), h);
            let dd_fpsi = d2(&prod(&fs), h);
            let f_dd = f0.mul_vec(&ddpsi);
            let fu_psi = f0.mul_vec(&u0.mul_vec(&psi));
            let res: Vec<C64> = match which {
                Identity::Intertwine => {
                    // (Uψ)′ − Fψ″ + FUψ + (Fψ)″ − Ũψ′ − ŨFψ
                    let ut_d = ut0.mul_vec(&dpsi);
                    let ut_f = ut0.mul_vec(&f0.mul_vec(&psi));
                    (0..d).map(|i| d_upsi[i] - f_dd[i] + fu_psi[i] + dd_fpsi[i] - ut_d[i] - ut_f[i]).collect()
                }
                Identity::Commute => {
                    // −C⁻¹(Fψ)″ + UC⁻¹ψ′ + UC⁻¹Fψ − C⁻¹(Uψ)′ + C⁻¹Fψ″ − C⁻¹FUψ
                    let ci = sys.c_inv();
                    let inner: Vec<C64> =
                        (0..d).map(|i| -dd_fpsi[i] - d_upsi[i] + f_dd[i] - fu_psi[i]).collect();
                    let a = ci.mul_vec(&inner);
                    let ucd = u0.mul_vec(&ci.mul_vec(&dpsi));
                    let ucf = u0.mul_vec(&ci.mul_vec(&f0.mul_vec(&psi)));
                    (0..d).map(|i| a[i] + ucd[i] + ucf[i]).collect()
                }
            };
            let n = res.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            worst = worst.max(n);
        }
    }
    worst
}

fn local_trajectory(s: &ChainState, grid: &Grid) -> Result<super::chain::ChainTrajectory> {
    let lo = grid.a.min(0.0);
    let hi = grid.b.max(0.0);
    integrate_chain_span(s, 0.0, (lo, hi), DEFAULT_RTOL)
}

/// max ‖(AL − L̃A)ψ‖ over test functions and interior grid points, with
/// A = D + F, L = −D² + U, L̃ = −D² + CUC⁻¹ + 2α. The state `s` sits at x = 0.
pub fn intertwine_residual(s: &ChainState, testfns: &[GaussPoly], grid: &Grid) -> Result<f64> {
    intertwine_residual_perturbed(s, testfns, grid, None)
}

/// As [`intertwine_residual`], with `delta` added to U (negative control).
pub fn intertwine_residual_perturbed(
    s: &ChainState,
    testfns: &[GaussPoly],
    grid: &Grid,
    delta: Option<&CMatrix>,
) -> Result<f64> {
    Grid::new(grid.a, grid.b, grid.h)?;
    let tr = local_trajectory(s, grid)?;
    Ok(operator_residual(&tr.sys, |x| tr.traj.eval(x), testfns, grid, Identity::Intertwine, delta))
}

/// max ‖[L, C⁻¹(D + F)]ψ‖ for an α = 0 period-one state at x = 0.
pub fn novikov_residual(s: &ChainState, testfns: &[GaussPoly], grid: &Grid) -> Result<f64> {
    novikov_residual_perturbed(s, testfns, grid, None)
}

/// As [`novikov_residual`], with `delta` added to U (negative control).
pub fn novikov_residual_perturbed(
    s: &ChainState,
    testfns: &[GaussPoly],
    grid: &Grid,
    delta: Option<&CMatrix>,
) -> Result<f64> {
    Grid::new(grid.a, grid.b, grid.h)?;
    if s.alpha.norm() != 0.0 {
        return Err(Error::Domain("the commuting operator requires alpha = 0".into()));
    }
    let tr = local_trajectory(s, grid)?;
    Ok(operator_residual(&tr.sys, |x| tr.traj.eval(x), testfns, grid, Identity::Commute, delta))
}

/// Commutator residual for an arbitrary provider of packed chain states
/// (used by the top module, whose trajectories are integrated separately).
pub fn commute_residual_with<S>(
    sys: &ChainSystem,
    state_at: S,
    testfns: &[GaussPoly],
    grid: &Grid,
    delta: Option<&CMatrix>,
) -> Result<f64>
where
    S: Fn(f64) -> Vec<C64>,
{
    Grid::new(grid.a, grid.b, grid.h)?;
    Ok(operator_residual(sys, state_at, testfns, grid, Identity::Commute, delta))
}
