//! Soliton-like potential with a reducible spectral curve.

use dressing_lab::families::{soliton_nu, soliton_psi, soliton_residual, SolitonFamily};

fn main() -> dressing_lab::Result<()> {
    let f = SolitonFamily::new(0.25)?;
    println!("threshold (1+g)/(1-g) = {}", f.threshold());
    let xs: Vec<f64> = (0..25).map(|i| -3.0 + 0.25 * i as f64).collect();
    for lam in [-1.0, 0.5, 3.0] {
        for branch in [1, 2] {
            let nu = soliton_nu(&f, branch, lam)?;
            let psi = soliton_psi(&f, branch, lam, 1.0)?;
            println!(
                "lambda = {lam:5.2} branch {branch}: nu = {:+.4}{:+.4}i  psi(1) = ({:.4}, {:.4})  residual {:.1e}",
                nu.re,
                nu.im,
                psi[0],
                psi[1],
                soliton_residual(&f, branch, nu, &xs)?
            );
        }
    }
    Ok(())
}
