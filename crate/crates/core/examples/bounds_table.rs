//! Every bound for a few points on the a = 2b line.
//!
//! ```bash
//! cargo run --example bounds_table
//! ```

use sbm_recovery::bounds::BoundReport;
use sbm_recovery::cli::sig6;

fn main() -> sbm_recovery::Result<()> {
    println!(
        "{:>6} {:>12} {:>12} {:>12} {:>12} {:>12}  corr",
        "a", "necessary", "alpha", "refined", "iter1", "iter2"
    );
    for a in [5.0, 12.0, 20.0, 60.0, 72.0, 100.0, 200.0, 400.0] {
        let rep = BoundReport::compute(a, a / 2.0, 2)?;
        let cell = |v: Option<f64>| v.map(sig6).unwrap_or_else(|| "-".into());
        println!(
            "{:>6} {:>12} {:>12} {:>12} {:>12} {:>12}  {}",
            a,
            sig6(rep.necessary),
            if rep.alpha_hp.saturated {
                "0.5 (sat)".into()
            } else {
                sig6(rep.alpha_hp.alpha)
            },
            cell(rep.refined),
            cell(rep.iterated.first().copied()),
            cell(rep.iterated.get(1).copied()),
            rep.correlated_possible
        );
    }
    Ok(())
}
