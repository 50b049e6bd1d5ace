//! Decoders analyzed by the achievability and converse arguments.
//!
//! * [`ExactBisection`] and [`LocalSearchBisection`]: balanced two-way splits
//!   minimizing the number of crossing edges.
//! * [`genie_single_node_test`]: the optimal single-node test when every other
//!   label is revealed.
//! * [`TwoStep`]: a rough global split followed by per-node neighbor-majority
//!   refinement.

mod bisection;
mod genie;
mod two_step;

pub use bisection::{
    BisectionDecoder, BisectionResult, ExactBisection, LocalSearchBisection, MAX_EXACT_NODES,
};
pub use genie::{genie_single_node_test, neighbor_counts, threshold_decision, NeighborCounts};
pub use two_step::{aligned_leave_one_out, two_step_decode, RefinementRule, TwoStep};
