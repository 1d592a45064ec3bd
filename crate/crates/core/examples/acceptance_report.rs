//! Run selected acceptance criteria, e.g. `cargo run --example acceptance_report -- 1 4`.

use dressing_lab::cli::check::{run_criterion, CRITERIA};

fn main() {
    let ids: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let ids = if ids.is_empty() { CRITERIA.iter().map(|c| c.0).collect() } else { ids };
    for id in ids {
        let rep = run_criterion(id);
        println!("{}", rep.summary());
        for c in &rep.checks {
            println!("    {:<50} {:.3e} (tol {:.1e}) {}", c.name, c.value, c.tolerance, if c.pass { "ok" } else { "FAIL" });
        }
    }
}
