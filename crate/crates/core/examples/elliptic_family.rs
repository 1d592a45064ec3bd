//! Elliptic two-gap potential: its curve, the curve from the Lax matrix, and
//! the explicit Baker-Akhiezer function.

use dressing_lab::dressing::lax_matrix;
use dressing_lab::families::{elliptic_curve, elliptic_psi, EllipticFamily};
use dressing_lab::numerics::{poly_roots, r};
use dressing_lab::spectral::{band_structure_from_curve, curve_from_lax};

fn main() -> dressing_lab::Result<()> {
    let f = EllipticFamily::new(-2.0, 0.5)?;
    let curve = elliptic_curve(&f);
    let g = f.gamma;
    let s = f.chain_state(0.7)?;
    let lax = curve_from_lax(|mu| lax_matrix(&s, mu), 2)?.scale(r(g * g * (1.0 - g).powi(2)));
    println!("period {:?}, curve vs Lax: {:.2e}", f.period(), curve.relative_distance(&lax));

    let b = band_structure_from_curve(&curve, (-5.0, 5.0), 800)?;
    println!("breakpoints {:?}, multiplicities {:?}", b.breakpoints, b.multiplicities);

    let lam = 0.7;
    let xs: Vec<f64> = (1..20).map(|i| 0.1 * i as f64).collect();
    for mu in poly_roots(&curve.at_lambda(r(lam)))? {
        match elliptic_psi(&f, lam, mu, 0.0, 2.0) {
            Ok(psi) => println!("mu = {:+.6}{:+.6}i  residual {:.1e}", mu.re, mu.im, psi.residual(&xs)?),
            Err(e) => println!("mu = {:+.6}{:+.6}i  {e}", mu.re, mu.im),
        }
    }
    println!("vxx residual of the generating V at x = 0.3: {:.1e}", f.vxx_residual(0.3)?);
    Ok(())
}
