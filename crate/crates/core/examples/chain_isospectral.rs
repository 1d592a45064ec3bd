//! Integrate a random 3×3 dressing chain and watch the Lax spectrum stay put.

use dressing_lab::dressing::{integrate_chain, lax_matrix, lax_spectrum_drift, random_state};
use dressing_lab::numerics::{c, eigenvalues, r};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> dressing_lab::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let s = random_state(&mut rng, 3, r(0.0), 0.3);
    let tr = integrate_chain(&s, 10.0, 1e-12)?;
    let mu = c(0.7, 0.2);

    for t in [0.0, 2.5, 5.0, 7.5, 10.0] {
        let mut e = eigenvalues(&lax_matrix(&tr.state(t), mu))?;
        e.sort_by(|a, b| a.re.total_cmp(&b.re));
        let shown: Vec<String> = e.iter().map(|z| format!("{:+.8}{:+.8}i", z.re, z.im)).collect();
        println!("t = {t:4.1}  ‖F‖ = {:7.4}  eig = {}", tr.state(t).f.norm(), shown.join("  "));
    }
    println!("relative drift: {:.2e}", lax_spectrum_drift(&tr, &[mu, c(-0.3, 1.0)], 40)?);
    println!("tr F' - d*alpha: {:.2e}", tr.trace_law_drift());
    Ok(())
}
