//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by instance construction, distribution estimation and the
/// solvers.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    /// Instance or configuration parameters violate a documented invariant.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A path contains a symbol outside the instance alphabet.
    #[error("invalid path: symbol {symbol} at position {position} is not in the alphabet")]
    InvalidPath { symbol: i32, position: usize },

    /// An operation was called with arguments outside its contract
    /// (wrong path length, unnormalized distribution, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    /// Rejection sampling exhausted its attempt budget before collecting the
    /// requested number of feasible solutions.
    #[error("sampling failed: {accepted} feasible solutions after {attempts} attempts (budget {budget})")]
    SamplingFailure {
        attempts: u64,
        accepted: usize,
        budget: u64,
    },

    /// Every trellis node died at some stage, so no path survives to the
    /// horizon. Only possible when partial-feasibility pruning over-prunes.
    #[error("no path survives to stage {stage}")]
    NoFeasiblePath { stage: usize },

    /// The binary-search driver found the relaxed solve infeasible at β = 0,
    /// so there is no feasible anchor to bracket from.
    #[error("no feasible anchor: the β = 0 solution already violates the constraints")]
    NoFeasibleAnchor,

    /// Exhaustive search refused to enumerate a search space larger than the
    /// configured cap.
    #[error("search space of {size} paths exceeds the exhaustive-search cap of {cap}")]
    SearchSpaceTooLarge { size: u128, cap: u128 },

    /// The requested conditional mode is not available for this problem
    /// (the constraint-specific builder needs a budget-style instance).
    #[error("conditional mode not supported by this problem: {0}")]
    UnsupportedMode(String),

    /// An instance, prior or report document failed to parse.
    #[error("malformed document: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
