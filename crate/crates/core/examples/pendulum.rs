//! The two-dimensional top as a pendulum: integrate it, compare with the
//! elliptic-function closed form and print the Fig 1 band structures.

use dressing_lab::top::{
    integrate_top, pendulum_bands, pendulum_closed_form, pendulum_coordinates, pendulum_period, PendulumParams,
};

fn main() -> dressing_lab::Result<()> {
    let p = PendulumParams::new(0.5, 10.0, 20.0 / 9.0)?;
    let t = pendulum_period(&p)?;
    println!("delta = {}, R = {}, H0 = {:.6}: {:?}, period {t:.6}", p.delta, p.r, p.h0, p.regime());

    let tr = integrate_top(&p.initial_state(), t)?;
    println!("{:>8} {:>14} {:>14}", "t", "omega", "closed form");
    for i in 0..=8 {
        let x = t * i as f64 / 8.0;
        let (_, _, w) = pendulum_coordinates(&tr.state(x)).unwrap();
        println!("{x:8.4} {w:14.10} {:14.10}", pendulum_closed_form(&p, x)?.0);
    }
    println!("invariant drift over one period: {:.2e}", tr.invariant_drift());

    for h in [10.0, 100.0] {
        let q = PendulumParams::from_h(0.5, 10.0, h)?;
        let b = pendulum_bands(&q)?;
        println!("h = {h}: case {:?}", q.case());
        for band in b.bands() {
            println!("  [{:9.4}, {:9.4})  multiplicity {}", band.lo, band.hi, band.multiplicity);
        }
    }
    Ok(())
}
