//! Matrix Mathieu potential: bands from the dispersion quartic, and the
//! closed gaps seen as multiplier collisions of the monodromy.

use dressing_lab::families::{mathieu_bands, MathieuFamily};
use dressing_lab::spectral::{gap_width, resonance_scan};

fn main() -> dressing_lab::Result<()> {
    let a = 2.0;
    let b = mathieu_bands(a)?;
    println!("A = {a}: breakpoints {:?}, multiplicities {:?}", b.breakpoints, b.multiplicities);

    let pot = MathieuFamily::new(a).evaluator();
    for e in resonance_scan(&pot, (-2.0, 8.0), 500)? {
        println!(
            "collision at lambda = {:.10}  tau = {:+.6}{:+.6}i  {:?}  gap width {:.1e}",
            e.lambda,
            e.tau.re,
            e.tau.im,
            e.kind,
            gap_width(&pot, e.lambda, 1e-3)?
        );
    }
    println!("expected 2-2*sqrt2 = {:.10}, 5-2*sqrt5 = {:.10}", 2.0 - 8f64.sqrt(), 5.0 - 20f64.sqrt());
    Ok(())
}
