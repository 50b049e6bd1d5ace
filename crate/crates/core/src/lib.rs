//! Partial-recovery bounds for the sparse symmetric two-community stochastic
//! block model, the decoders behind them, and a seeded Monte Carlo harness
//! that checks the bounds empirically.
//!
//! | module         | contents                                                      |
//! |----------------|---------------------------------------------------------------|
//! | [`bounds`]     | Poisson test error, converse bound, alpha root, refined and iterated bounds |
//! | [`model`]      | parameters, labels, sparse graphs, generator, recovery metric |
//! | [`decoders`]   | exact and local-search minimum bisection, genie test, two-step procedure |
//! | [`simulation`] | trial plans, statistics, sweeps along `a = ratio * b`         |
//! | [`cli`]        | command implementations and output formats for the `sbm` binary |
//!
//! Runnable walkthroughs live in `examples/`:
//!
//! ```bash
//! cargo run --release --example bounds_table
//! cargo run --release --example figure_sweep > sweep.csv
//! cargo run --release --example genie_test
//! ```
//!
//! ```
//! use sbm_recovery::bounds::{necessary_bound, solve_alpha};
//!
//! assert!(solve_alpha(60.0, 30.0).unwrap().saturated);
//! assert!(necessary_bound(8.0, 2.0).unwrap() < 0.5);
//! ```

pub mod bounds;
pub mod cli;
pub mod decoders;
mod error;
pub mod model;
pub mod rng;
pub mod simulation;

pub use bounds::{BoundReport, PoissonTestSpec, Provenance};
pub use error::{Error, Result};
pub use model::{CommunityLabels, SbmParams, SparseGraph};
