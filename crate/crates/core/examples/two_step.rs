//! Practical two-step decoding against the converse and refined bounds.
//!
//! ```bash
//! cargo run --release --example two_step -- 100 50 1000 40
//! ```
//! Arguments: a, b, n, trials (defaults 100 50 1000 40).

use sbm_recovery::bounds::BoundReport;
use sbm_recovery::cli::sig6;
use sbm_recovery::simulation::{run_trials, DecoderSpec, TrialPlan};
use sbm_recovery::SbmParams;

fn main() -> sbm_recovery::Result<()> {
    let args: Vec<f64> = std::env::args()
        .skip(1)
        .filter_map(|s| s.parse().ok())
        .collect();
    let get = |i: usize, d: f64| args.get(i).copied().unwrap_or(d);
    let (a, b, n, trials) = (
        get(0, 100.0),
        get(1, 50.0),
        get(2, 1000.0) as usize,
        get(3, 40.0) as usize,
    );

    let params = SbmParams::new(a, b, n)?;
    let report = BoundReport::compute(a, b, 2)?;
    println!("a = {a}, b = {b}, n = {n}");
    println!("  necessary         {}", sig6(report.necessary));
    match report.refined {
        Some(r) => println!("  refined           {}", sig6(r)),
        None => println!(
            "  refined           absent (alpha = {})",
            sig6(report.alpha_hp.alpha)
        ),
    }

    for decoder in [
        DecoderSpec::LocalBisection { restarts: 20 },
        DecoderSpec::TwoStep {
            restarts: 20,
            faithful: false,
            threshold_rule: false,
        },
        DecoderSpec::TwoStep {
            restarts: 20,
            faithful: false,
            threshold_rule: true,
        },
    ] {
        let out = run_trials(&TrialPlan::new(params, decoder, trials, 7))?;
        let s = out.stats;
        println!(
            "  {:<34} mean r {} +/- {} ({} ms)",
            format!("{decoder:?}"),
            sig6(s.mean_r),
            sig6(s.stderr),
            s.runtime_ms
        );
    }
    Ok(())
}
