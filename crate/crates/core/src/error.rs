use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of a mathematical function.
    #[error("domain error: {0}")]
    Domain(String),

    /// Model parameters violate a constraint (e.g. `a > b > 0`).
    #[error("invalid parameters: {0}")]
    Param(String),

    #[error("label vectors differ in length: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error(
        "bisection decoders need an even node count, got n = {0}; drop one node and \
         assign it at random (two_step_decode does this automatically)"
    )]
    OddNodeCount(usize),

    #[error(
        "exhaustive bisection is limited to n <= {max}, got n = {n}; use the \
         local-search decoder (`local-bisection`) instead"
    )]
    Budget { n: usize, max: usize },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("trial {index} failed: {source}")]
    Trial {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
