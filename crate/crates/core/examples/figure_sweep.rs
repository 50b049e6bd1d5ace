//! Bounds along a = 2b as CSV, ready for plotting.
//!
//! ```bash
//! cargo run --example figure_sweep > sweep.csv
//! ```
//! Pass `sim` as the first argument to add local-search estimates at n = 400.

use std::io;

use sbm_recovery::cli::{cmd_sweep, write_sweep_csv, SweepArgs};

fn main() -> sbm_recovery::Result<()> {
    let simulate = std::env::args().nth(1).as_deref() == Some("sim");
    let args = SweepArgs {
        a_min: 10.0,
        a_max: 400.0,
        points: 40,
        ratio: 2.0,
        n: 400,
        decoder: simulate.then(|| "two-step".to_string()),
        restarts: 5,
        trials: 20,
        seed: 0,
        iterations: 2,
    };
    let rows = cmd_sweep(&args)?;
    write_sweep_csv(&rows, io::stdout().lock())
}
