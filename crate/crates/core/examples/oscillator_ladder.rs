//! Matrix oscillator: the spectrum {0, 2, 4, ...} does not depend on (k, gamma).

use dressing_lab::families::{oscillator_ground_basis, oscillator_raise, oscillator_spectrum, OscillatorFamily};

fn main() -> dressing_lab::Result<()> {
    let xs: Vec<f64> = (0..81).map(|i| -5.0 + 0.125 * i as f64).collect();
    for (k, gamma) in [(0.0, 0.0), (0.5, 0.05), (0.5, 0.3)] {
        let p = OscillatorFamily::from_gamma(1.0, k, gamma, 0.0)?;
        let levels = oscillator_spectrum(&p, (-0.7, 4.6), 0.05, p.x_max())?;
        let shown: Vec<String> = levels.iter().map(|l| format!("{:.8} (x{})", l.lambda, l.multiplicity)).collect();
        println!("k = {k}, gamma = {gamma}: {}", shown.join(", "));

        let g = &oscillator_ground_basis(&p, p.x_max())?[0];
        let g1 = oscillator_raise(&p, g, &xs)?;
        let g2 = oscillator_raise(&p, &g1, &xs)?;
        println!(
            "  ladder residuals: {:.1e} {:.1e} {:.1e}",
            g.residual(&p, &xs),
            g1.residual(&p, &xs),
            g2.residual(&p, &xs)
        );
    }
    Ok(())
}
