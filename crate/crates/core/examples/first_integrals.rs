//! First integrals of the 2×2 chain in its two normal forms.

use dressing_lab::dressing::{first_integrals_2x2, random_bounded_2x2, NormalForm};
use dressing_lab::numerics::{c, r, CMatrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> dressing_lab::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let cases = [
        ("a", CMatrix::diag_real(&[1.5, 0.5]), NormalForm::A),
        ("b", CMatrix::from_real(&[&[1.0, 1.0], &[0.0, 1.0]]), NormalForm::B),
    ];
    for (name, cm, form) in cases {
        for alpha in [r(0.0), c(0.7, 0.0)] {
            let tr = random_bounded_2x2(&mut rng, &cm, alpha, 5.0, 10.0);
            let fi = first_integrals_2x2(&tr, form)?;
            let vals: Vec<String> = fi.values.iter().map(|z| format!("{:+.6}{:+.6}i", z.re, z.im)).collect();
            println!("case {name}, alpha = {}: {}  drift {:.1e}", alpha.re, vals.join("  "), fi.max_drift());
        }
    }
    Ok(())
}
