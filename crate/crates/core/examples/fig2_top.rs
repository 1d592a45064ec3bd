//! Spectral-curve multiplicities of the 3D top for the four Fig 2 parameter sets.

use dressing_lab::spectral::curve_multiplicity;
use dressing_lab::top::{fig2_sets, integrate_top, top_spectral_curve};

fn main() -> dressing_lab::Result<()> {
    for (i, set) in fig2_sets().iter().enumerate() {
        let rep = set.report(600)?;
        println!("set {}: J = {:?}, max eig P = {:.4}", i + 1, set.j, rep.p_max);
        for b in rep.bands.bands() {
            println!("  [{:10.4}, {:10.4})  {}", b.lo, b.hi, b.multiplicity);
        }
        let s = set.state()?;
        let c0 = top_spectral_curve(&s)?;
        let c1 = top_spectral_curve(&integrate_top(&s, 10.0)?.state(10.0))?;
        println!(
            "  multiplicity at max eig P + 1: {}, curve drift over [0,10]: {:.2e}",
            curve_multiplicity(&c0, rep.p_max + 1.0)?,
            c0.relative_distance(&c1)
        );
    }
    Ok(())
}
