//! Draw one SBM graph, print its edge list and check the community imbalance.
//!
//! ```bash
//! cargo run --example generate_graph -- 6 3 30 7
//! ```
//! Arguments: a, b, n, seed.

use std::io;

use sbm_recovery::model::{generate, hoeffding_radius, imbalance_check};
use sbm_recovery::SbmParams;

fn main() -> sbm_recovery::Result<()> {
    let args: Vec<f64> = std::env::args()
        .skip(1)
        .filter_map(|s| s.parse().ok())
        .collect();
    let get = |i: usize, d: f64| args.get(i).copied().unwrap_or(d);
    let params = SbmParams::new(get(0, 6.0), get(1, 3.0), get(2, 30.0) as usize)?;

    let (labels, graph) = generate(&params, get(3, 7.0) as u64);
    graph.write_edge_list(io::stdout().lock())?;
    println!("labels {}", labels.to_line());

    let stats = imbalance_check(&labels)?;
    println!(
        "n1 = {}, n2 = {}, delta = {:.4}, radius = {:.4}, within = {}",
        stats.n1,
        stats.n2,
        stats.delta,
        hoeffding_radius(labels.len()),
        stats.hoeffding_ok
    );
    Ok(())
}
