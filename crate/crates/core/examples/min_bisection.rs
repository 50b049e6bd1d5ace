//! Exact and local-search minimum bisection on one small instance.
//!
//! ```bash
//! cargo run --example min_bisection
//! ```

use sbm_recovery::decoders::{BisectionDecoder, ExactBisection, LocalSearchBisection};
use sbm_recovery::model::{generate, recovery_error};
use sbm_recovery::SbmParams;

fn main() -> sbm_recovery::Result<()> {
    let params = SbmParams::new(10.0, 1.0, 20)?;
    let (truth, graph) = generate(&params, 42);
    println!(
        "n = {}, edges = {}, true cut = {}",
        graph.n(),
        graph.edge_count(),
        graph.cut_size(&truth)
    );

    let exact = ExactBisection.decode(&graph, 0)?;
    let local = LocalSearchBisection::new(10).decode(&graph, 0)?;
    for (name, res) in [("exact", &exact), ("local", &local)] {
        let err = recovery_error(&truth, &res.labels)?;
        println!(
            "{name:<6} cut {:>3}  labels {}  r = {}",
            res.cut_size,
            res.labels.to_line(),
            err.r
        );
    }
    Ok(())
}
