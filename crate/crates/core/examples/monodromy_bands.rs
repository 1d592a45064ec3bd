//! Band structure of the pendulum potential from the monodromy, against
//! the analytic one.

use dressing_lab::spectral::{compare_bands, monodromy};
use dressing_lab::top::{pendulum_bands, pendulum_period, top_potential, PendulumParams};

fn main() -> dressing_lab::Result<()> {
    let p = PendulumParams::from_h(0.5, 10.0, 100.0)?;
    let t = pendulum_period(&p)?;
    let pot = top_potential(&p.initial_state(), Some(t), (0.0, t), false)?;
    let bands = pendulum_bands(&p)?;

    for lam in [-30.0, -20.0, 0.0, 20.0] {
        let m = monodromy(&pot, lam)?;
        let mods: Vec<String> = m.multipliers.iter().map(|z| format!("{:.4}", z.norm())).collect();
        println!("lambda = {lam:6.1}: |tau| = [{}]  units {} (analytic {})", mods.join(", "), m.unit_count, bands.multiplicity_at(lam));
    }
    let grid: Vec<f64> = (0..100).map(|i| -40.0 + 0.8 * i as f64).collect();
    let cmp = compare_bands(&bands, &pot, &grid)?;
    println!("{} points, {} mismatches, {} skipped near edges", cmp.points.len(), cmp.mismatches.len(), cmp.skipped.len());
    Ok(())
}
