//! Information-assisted dynamic programming for constrained discrete
//! resource allocation.
//!
//! This crate solves stage-separable allocation problems — pick one symbol
//! per stage from a small alphabet to maximize a per-stage reward sum —
//! whose constraints are arbitrary path predicates (budgets, orderings,
//! couplings). Plain constrained dynamic programming breaks on such
//! problems: the best feasible prefix is not necessarily a prefix of the
//! best feasible path. Instead the constraints are folded into a
//! probabilistic description and the search runs over a relaxed objective
//!
//! ```text
//! minimize   I(π) − β · f(π)
//! ```
//!
//! where `I(π)` is the *information-to-go*: the accumulated KL divergence
//! between a constraint-aware forward conditional `p` and an empirical prior
//! `q` estimated from sampled feasible solutions. Low `I` means the path is
//! one the feasible population would expect; `β` prices reward against that
//! description cost. A Viterbi pass over an `M`-state trellis minimizes the
//! relaxed objective for each `β`, and a sweep (or bisection) over `β`
//! traces the reward/information trade-off and picks the best feasible
//! solution.
//!
//! # Modules
//!
//! * [`problem`] — alphabets, paths, the [`Problem`] contract and the
//!   table-backed generic instance.
//! * [`bitalloc`] — the budgeted ADC bit-allocation instance family.
//! * [`dist`] — conditional models, KL divergence, the sampled prior.
//! * [`builders`] — the constraint-specific (sigmoid) and iterative
//!   self-consistent conditional builders.
//! * [`trellis`] — the Viterbi solver with its operation counters, plus an
//!   exact budget-augmented variant.
//! * [`driver`] — β sweeps, bisection, trade-off CSV I/O.
//! * [`baselines`] — exhaustive search and branch-and-bound oracles.
//!
//! # Quick start
//!
//! ```
//! use iadp::prelude::*;
//!
//! let instance = iadp::bitalloc::canonical_instance();
//! let prior = estimate_prior(
//!     &instance,
//!     &PriorConfig { k: 120, n1: 20, seed: 7, ..Default::default() },
//! )?;
//! let report = viterbi_solve(&instance, &prior, 1.0, &SolveOptions::specific())?;
//! assert!(report.feasible);
//! assert!(instance.power(&report.solution) <= instance.p_b);
//! # Ok::<(), iadp::Error>(())
//! ```

pub mod baselines;
pub mod bitalloc;
pub mod builders;
pub mod dist;
pub mod driver;
pub mod error;
pub mod problem;
pub mod seed;
pub mod trellis;

pub use bitalloc::BitAllocInstance;
pub use dist::ConditionalModel;
pub use error::{Error, Result};
pub use problem::{Alphabet, Path, Problem, Symbol, TableProblem};
pub use trellis::{SolveOptions, SolveReport};

/// The handful of names almost every caller needs.
pub mod prelude {
    pub use crate::baselines::{exhaustive_search, nlbb_solve};
    pub use crate::bitalloc::{generate_instance, BitAllocInstance, RewardPreset};
    pub use crate::dist::{estimate_prior, kl_divergence, ConditionalModel, PriorConfig};
    pub use crate::driver::{binary_search_beta, sweep, BsConfig, SweepConfig};
    pub use crate::problem::{Alphabet, Path, Problem, TableProblem};
    pub use crate::trellis::{viterbi_solve, SolveOptions, SolveReport};
}
