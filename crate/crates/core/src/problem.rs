//! Problem model: alphabets, paths and the solver-facing problem contract.
//!
//! A problem assigns one symbol from a finite alphabet to each of `N` stages.
//! The objective is stage-separable — the total reward of a path is the sum
//! of one table entry per stage — while the constraints may couple all stages
//! and are exposed only through feasibility oracles:
//!
//! * [`Problem::csf`] decides whether a complete length-`N` path satisfies
//!   every constraint,
//! * [`Problem::csf_partial`] decides whether a strict prefix still has at
//!   least one feasible completion. Implementations may be conservative
//!   (answer `true` when uncertain) but must never answer `false` for a
//!   prefix that can be completed.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::builders::{ConditionalRow, SigmoidConditionalConfig};
use crate::error::{Error, Result};

/// One decision symbol. Alphabets are small sets of integers (bit widths,
/// resource levels, ...).
pub type Symbol = i32;

/// Ordered set of the `M` symbols a stage may take.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Alphabet {
    values: Vec<Symbol>,
}

impl Alphabet {
    /// Builds an alphabet from strictly increasing, distinct symbols.
    pub fn new(values: Vec<Symbol>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::Config(format!(
                "alphabet needs at least 2 symbols, got {}",
                values.len()
            )));
        }
        if !values.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Config(
                "alphabet symbols must be strictly increasing".into(),
            ));
        }
        Ok(Self { values })
    }

    /// The four-level alphabet `{1, 2, 3, 4}` used by the bit-allocation
    /// case study.
    pub fn bits_1_to_4() -> Self {
        Self { values: vec![1, 2, 3, 4] }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Symbol] {
        &self.values
    }

    pub fn symbol(&self, index: usize) -> Symbol {
        self.values[index]
    }

    pub fn min_symbol(&self) -> Symbol {
        self.values[0]
    }

    pub fn max_symbol(&self) -> Symbol {
        *self.values.last().unwrap()
    }

    /// Position of `symbol` in the alphabet, if present.
    pub fn index_of(&self, symbol: Symbol) -> Option<usize> {
        self.values.iter().position(|&v| v == symbol)
    }
}

/// A (possibly partial) assignment: the symbols chosen for stages `1..=k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Path {
    states: Vec<Symbol>,
}

impl Path {
    pub fn new(states: Vec<Symbol>) -> Self {
        Self { states }
    }

    pub fn empty() -> Self {
        Self { states: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[Symbol] {
        &self.states
    }

    /// Symbol at 1-based stage `k`.
    pub fn at(&self, k: usize) -> Symbol {
        self.states[k - 1]
    }

    pub fn last(&self) -> Option<Symbol> {
        self.states.last().copied()
    }

    pub fn push(&mut self, s: Symbol) {
        self.states.push(s);
    }

    pub fn pop(&mut self) -> Option<Symbol> {
        self.states.pop()
    }

    /// The prefix consisting of the first `k` stages.
    pub fn prefix(&self, k: usize) -> Path {
        Path::new(self.states[..k].to_vec())
    }

    /// Checks every symbol against `alphabet`.
    pub fn validate(&self, alphabet: &Alphabet) -> Result<()> {
        for (i, &s) in self.states.iter().enumerate() {
            if alphabet.index_of(s).is_none() {
                return Err(Error::InvalidPath { symbol: s, position: i + 1 });
            }
        }
        Ok(())
    }
}

impl From<Vec<Symbol>> for Path {
    fn from(states: Vec<Symbol>) -> Self {
        Path::new(states)
    }
}

impl From<&[Symbol]> for Path {
    fn from(states: &[Symbol]) -> Self {
        Path::new(states.to_vec())
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, s) in self.states.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, "}}")
    }
}

/// The contract every solvable instance implements.
///
/// Rewards are addressed by alphabet index so the inner solver loops never
/// search the alphabet; the path-level helpers validate symbols and handle
/// the index translation.
pub trait Problem: Send + Sync {
    /// Number of stages `N`.
    fn horizon(&self) -> usize;

    fn alphabet(&self) -> &Alphabet;

    /// Reward contribution of choosing the symbol at `sym_idx` in 1-based
    /// `stage`. Finite for every valid pair.
    fn reward_term(&self, stage: usize, sym_idx: usize) -> f64;

    /// Constraint-satisfaction function on a complete path: `true` iff every
    /// constraint holds. Defined exactly for length-`N` paths.
    fn csf(&self, path: &Path) -> Result<bool>;

    /// Forward-looking constraint satisfaction on a strict prefix
    /// (`1 <= k < N`): may a feasible completion exist? Conservative
    /// implementations return `true` when uncertain.
    fn csf_partial(&self, prefix: &Path) -> Result<bool>;

    /// Structural transition filter: `false` only when *every* path taking
    /// this step violates a constraint, regardless of budget state. The
    /// trellis only wires edges this allows.
    fn edge_allowed(&self, _from: Symbol, _to: Symbol) -> bool {
        true
    }

    /// Constraint-specific forward conditional over next symbols given a
    /// non-empty prefix, when the problem can derive one from its own
    /// constraints. `None` means the solver must use a problem-agnostic
    /// builder instead.
    fn specific_conditional(
        &self,
        _prefix: &Path,
        _config: &SigmoidConditionalConfig,
    ) -> Option<Result<ConditionalRow>> {
        None
    }

    /// Total reward of a (possibly partial) path.
    fn reward(&self, path: &Path) -> Result<f64> {
        if path.len() > self.horizon() {
            return Err(Error::Contract(format!(
                "path length {} exceeds horizon {}",
                path.len(),
                self.horizon()
            )));
        }
        let mut total = 0.0;
        for (i, &s) in path.states().iter().enumerate() {
            let idx = self
                .alphabet()
                .index_of(s)
                .ok_or(Error::InvalidPath { symbol: s, position: i + 1 })?;
            total += self.reward_term(i + 1, idx);
        }
        Ok(total)
    }
}

type PathPredicate = Arc<dyn Fn(&Path) -> bool + Send + Sync>;
type EdgePredicate = Arc<dyn Fn(Symbol, Symbol) -> bool + Send + Sync>;

/// A problem described by an explicit reward table and caller-supplied
/// feasibility predicates. The workhorse for toy instances and tests.
#[derive(Clone)]
pub struct TableProblem {
    alphabet: Alphabet,
    reward_table: Vec<Vec<f64>>,
    feasibility: PathPredicate,
    partial_feasibility: PathPredicate,
    edge_mask: Option<EdgePredicate>,
    metadata: String,
}

impl TableProblem {
    /// `reward_table[stage][sym_idx]` gives the per-stage reward; the two
    /// predicates implement the full and prefix feasibility oracles. The
    /// prefix predicate may be conservative.
    pub fn new(
        alphabet: Alphabet,
        reward_table: Vec<Vec<f64>>,
        feasibility: impl Fn(&Path) -> bool + Send + Sync + 'static,
        partial_feasibility: impl Fn(&Path) -> bool + Send + Sync + 'static,
    ) -> Result<Self> {
        if reward_table.is_empty() {
            return Err(Error::Config("reward table must cover at least one stage".into()));
        }
        for (i, row) in reward_table.iter().enumerate() {
            if row.len() != alphabet.len() {
                return Err(Error::Config(format!(
                    "reward row {} has {} entries, alphabet has {}",
                    i,
                    row.len(),
                    alphabet.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::Config(format!("reward row {i} contains a non-finite value")));
            }
        }
        Ok(Self {
            alphabet,
            reward_table,
            feasibility: Arc::new(feasibility),
            partial_feasibility: Arc::new(partial_feasibility),
            edge_mask: None,
            metadata: String::new(),
        })
    }

    /// An unconstrained problem: every complete path is feasible.
    pub fn unconstrained(alphabet: Alphabet, reward_table: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(alphabet, reward_table, |_| true, |_| true)
    }

    pub fn with_edge_mask(
        mut self,
        mask: impl Fn(Symbol, Symbol) -> bool + Send + Sync + 'static,
    ) -> Self {
        self.edge_mask = Some(Arc::new(mask));
        self
    }

    pub fn with_metadata(mut self, metadata: impl Into<String>) -> Self {
        self.metadata = metadata.into();
        self
    }

    pub fn metadata(&self) -> &str {
        &self.metadata
    }
}

impl Problem for TableProblem {
    fn horizon(&self) -> usize {
        self.reward_table.len()
    }

    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn reward_term(&self, stage: usize, sym_idx: usize) -> f64 {
        self.reward_table[stage - 1][sym_idx]
    }

    fn csf(&self, path: &Path) -> Result<bool> {
        if path.len() != self.horizon() {
            return Err(Error::Contract(format!(
                "csf needs a complete path of length {}, got {}",
                self.horizon(),
                path.len()
            )));
        }
        path.validate(&self.alphabet)?;
        Ok((self.feasibility)(path))
    }

    fn csf_partial(&self, prefix: &Path) -> Result<bool> {
        if prefix.is_empty() || prefix.len() >= self.horizon() {
            return Err(Error::Contract(format!(
                "csf_partial needs a strict prefix (1..{}), got length {}",
                self.horizon(),
                prefix.len()
            )));
        }
        prefix.validate(&self.alphabet)?;
        Ok((self.partial_feasibility)(prefix))
    }

    fn edge_allowed(&self, from: Symbol, to: Symbol) -> bool {
        match &self.edge_mask {
            Some(mask) => mask(from, to),
            None => true,
        }
    }
}
