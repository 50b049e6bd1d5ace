//! Monte Carlo comparison of every decoder at one parameter point.
//!
//! ```bash
//! cargo run --release --example monte_carlo
//! ```

use sbm_recovery::cli::{render_stats_text, sig6};
use sbm_recovery::simulation::{random_guess_expected_error, run_trials, DecoderSpec, TrialPlan};
use sbm_recovery::SbmParams;

fn main() -> sbm_recovery::Result<()> {
    let params = SbmParams::new(20.0, 4.0, 200)?;
    println!(
        "random guess, exact expectation {}",
        sig6(random_guess_expected_error(params.n()))
    );
    // the faithful variant reruns the first step once per node
    for (name, trials) in [
        ("random-guess", 50),
        ("local-bisection", 50),
        ("two-step", 50),
        ("two-step-faithful", 5),
    ] {
        let decoder = DecoderSpec::from_name(name, 5)?;
        let out = run_trials(&TrialPlan::new(params, decoder, trials, 2024))?;
        println!("-- {name}");
        print!("{}", render_stats_text(&out.stats));
    }
    Ok(())
}
