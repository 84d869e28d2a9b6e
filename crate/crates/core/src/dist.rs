//! Discrete conditional distributions, KL divergence and the sampled prior.
//!
//! A [`ConditionalModel`] holds one `M × M` row-stochastic table per
//! transition (stage `t` to `t+1`) plus a distribution over the first stage.
//! The same container serves two roles: the forward conditional `p` built by
//! the conditional builders, and the prior `q` estimated from sampled
//! feasible solutions.
//!
//! The prior estimator draws `K` feasible solutions by rejection sampling
//! (i.i.d. uniform symbols per stage, keep complete paths that satisfy the
//! constraints), retains the `N1` best by reward, and turns transition
//! frequencies among the retained set into conditional rows. Each row is
//! normalized by the count of its own conditioning event, so the table is
//! row-stochastic by construction; rows whose conditioning event never
//! occurred fall back to uniform and are flagged unsupported. A small
//! additive smoothing `ε` (default `1/(10·N1)`) keeps every cell positive so
//! the path metric never divides by zero on transitions the retained set
//! happened to miss.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::{Path, Problem};

/// Tolerance on row normalization everywhere in this crate.
pub const ROW_SUM_TOL: f64 = 1e-9;

/// Per-stage conditional transition tables plus the first-stage distribution.
///
/// `stages[t][j][i]` is `Pr(X_{t+2} = symbol i | X_{t+1} = symbol j)` with
/// 0-based `t`; symbols are addressed by alphabet index throughout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionalModel {
    initial: Vec<f64>,
    stages: Vec<Vec<Vec<f64>>>,
    unsupported: Vec<Vec<bool>>,
}

impl ConditionalModel {
    /// Validates row-stochasticity of the initial distribution and every row.
    pub fn new(initial: Vec<f64>, stages: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let m = initial.len();
        let unsupported = vec![vec![false; m]; stages.len()];
        Self::with_flags(initial, stages, unsupported)
    }

    /// As [`ConditionalModel::new`], with explicit unsupported-row flags.
    pub fn with_flags(
        initial: Vec<f64>,
        stages: Vec<Vec<Vec<f64>>>,
        unsupported: Vec<Vec<bool>>,
    ) -> Result<Self> {
        let m = initial.len();
        if m < 2 {
            return Err(Error::Config("conditional model needs at least 2 symbols".into()));
        }
        check_distribution(&initial)?;
        if unsupported.len() != stages.len() {
            return Err(Error::Config("unsupported flags must cover every stage".into()));
        }
        for (t, table) in stages.iter().enumerate() {
            if table.len() != m || unsupported[t].len() != m {
                return Err(Error::Config(format!("stage {t} table is not {m}×{m}")));
            }
            for row in table {
                if row.len() != m {
                    return Err(Error::Config(format!("stage {t} table is not {m}×{m}")));
                }
                check_distribution(row)?;
            }
        }
        Ok(Self { initial, stages, unsupported })
    }

    /// A uniform model over `m` symbols across `n_stages + 1` stages.
    pub fn uniform(m: usize, n_transitions: usize) -> Self {
        let row = vec![1.0 / m as f64; m];
        Self {
            initial: row.clone(),
            stages: vec![vec![row; m]; n_transitions],
            unsupported: vec![vec![false; m]; n_transitions],
        }
    }

    /// Number of transition tables (`N − 1` for a horizon-`N` model).
    pub fn transitions(&self) -> usize {
        self.stages.len()
    }

    pub fn symbol_count(&self) -> usize {
        self.initial.len()
    }

    /// Distribution over the first stage.
    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    /// Row `Pr(next | current = symbol j)` of 0-based transition `t`.
    pub fn row(&self, t: usize, j: usize) -> &[f64] {
        &self.stages[t][j]
    }

    pub fn is_unsupported(&self, t: usize, j: usize) -> bool {
        self.unsupported[t][j]
    }

    /// Marginal over the state *entering* 0-based transition `t`, obtained by
    /// propagating the initial distribution through the first `t` tables.
    pub fn stage_marginal(&self, t: usize) -> Vec<f64> {
        let m = self.symbol_count();
        let mut mu = self.initial.clone();
        for table in self.stages.iter().take(t) {
            let mut next = vec![0.0; m];
            for (j, row) in table.iter().enumerate() {
                for (i, &p) in row.iter().enumerate() {
                    next[i] += mu[j] * p;
                }
            }
            mu = next;
        }
        mu
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: Self = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::with_flags(raw.initial, raw.stages, raw.unsupported)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }
}

pub(crate) fn check_distribution(row: &[f64]) -> Result<()> {
    if row.iter().any(|&p| !(0.0..=1.0 + ROW_SUM_TOL).contains(&p)) {
        return Err(Error::Contract("distribution entries must lie in [0, 1]".into()));
    }
    let sum: f64 = row.iter().sum();
    if (sum - 1.0).abs() > ROW_SUM_TOL {
        return Err(Error::Contract(format!("distribution sums to {sum}, expected 1")));
    }
    Ok(())
}

/// KL divergence `Σ p·log2(p/q)` in bits between two distributions over the
/// same support. Uses the `0·log(0/q) = 0` convention; a cell with `p > 0`
/// and `q = 0` yields `+∞`.
pub fn kl_divergence(p_row: &[f64], q_row: &[f64]) -> Result<f64> {
    if p_row.len() != q_row.len() {
        return Err(Error::Contract("KL rows must have equal length".into()));
    }
    check_distribution(p_row)?;
    check_distribution(q_row)?;
    let mut total = 0.0;
    for (&p, &q) in p_row.iter().zip(q_row) {
        if p == 0.0 {
            continue;
        }
        if q == 0.0 {
            return Ok(f64::INFINITY);
        }
        total += p * (p / q).log2();
    }
    // Rounding can push a vanishing divergence a hair below zero.
    Ok(total.max(0.0))
}

/// Feasible solutions retained by the prior sampler, best-reward first.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    /// Retained paths with their rewards, sorted by descending reward,
    /// ties broken by ascending path order.
    pub solutions: Vec<(Path, f64)>,
    /// Number of feasible solutions sampled.
    pub k: usize,
    /// Number retained (the `solutions` length).
    pub n1: usize,
}

/// Configuration of the prior sampler.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorConfig {
    /// Feasible solutions to sample.
    pub k: usize,
    /// Top solutions (by reward) to retain.
    pub n1: usize,
    pub seed: u64,
    /// Additive smoothing per cell; `None` selects `1/(10·n1)`.
    pub smoothing: Option<f64>,
    /// Cap on sampling attempts before giving up.
    pub attempt_budget: u64,
}

impl Default for PriorConfig {
    fn default() -> Self {
        // k is sized so the canonical eight-stage family (feasible fraction
        // around 3e-4 of the uniform draw) finishes well inside the attempt
        // budget.
        Self { k: 150, n1: 15, seed: 0, smoothing: None, attempt_budget: 1_000_000 }
    }
}

impl PriorConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    pub fn epsilon(&self) -> f64 {
        self.smoothing.unwrap_or(1.0 / (10.0 * self.n1 as f64))
    }
}

/// Rejection-samples `k` feasible solutions and keeps the best `n1`.
///
/// Symbols are drawn i.i.d. uniform per stage; a draw is abandoned as soon
/// as its prefix provably has no feasible completion (which never changes
/// the accepted distribution — every accepted complete path is uniform over
/// the feasible set). Deterministic given the seed.
pub fn sample_feasible<P: Problem + ?Sized>(problem: &P, config: &PriorConfig) -> Result<SampleSet> {
    if config.n1 == 0 || config.k < config.n1 {
        return Err(Error::Config(format!(
            "sampler needs k >= n1 >= 1, got k={} n1={}",
            config.k, config.n1
        )));
    }
    let n = problem.horizon();
    let alphabet = problem.alphabet();
    let m = alphabet.len();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut accepted: Vec<(Path, f64)> = Vec::with_capacity(config.k);
    let mut attempts: u64 = 0;
    while accepted.len() < config.k {
        if attempts >= config.attempt_budget {
            return Err(Error::SamplingFailure {
                attempts,
                accepted: accepted.len(),
                budget: config.attempt_budget,
            });
        }
        attempts += 1;
        let mut path = Path::empty();
        let mut dead = false;
        for stage in 0..n {
            path.push(alphabet.symbol(rng.gen_range(0..m)));
            if stage + 1 < n && !problem.csf_partial(&path)? {
                dead = true;
                break;
            }
        }
        if dead || !problem.csf(&path)? {
            continue;
        }
        let reward = problem.reward(&path)?;
        accepted.push((path, reward));
    }
    // Descending reward, ascending path on ties: deterministic retention.
    accepted.sort_by(|x, y| {
        y.1.partial_cmp(&x.1).unwrap_or(std::cmp::Ordering::Equal).then_with(|| x.0.cmp(&y.0))
    });
    accepted.truncate(config.n1);
    Ok(SampleSet { solutions: accepted, k: config.k, n1: config.n1 })
}

/// Builds a conditional prior from an explicit list of solutions.
///
/// Cell `(t, j, i)` counts how often symbol `j` at stage `t+1` is followed by
/// symbol `i`; `epsilon` is added to every cell (and to every initial-symbol
/// count) before each row is normalized by its own total. Rows whose
/// conditioning symbol never occurs are flagged unsupported and come out
/// uniform.
pub fn prior_from_solutions<P: Problem + ?Sized>(
    problem: &P,
    solutions: &[Path],
    epsilon: f64,
) -> Result<ConditionalModel> {
    if solutions.is_empty() {
        return Err(Error::Config("prior needs at least one solution".into()));
    }
    if epsilon < 0.0 {
        return Err(Error::Config("smoothing must be non-negative".into()));
    }
    let n = problem.horizon();
    let alphabet = problem.alphabet();
    let m = alphabet.len();
    let mut first = vec![0.0_f64; m];
    let mut counts = vec![vec![vec![0.0_f64; m]; m]; n.saturating_sub(1)];
    for path in solutions {
        if path.len() != n {
            return Err(Error::Contract(format!(
                "prior solutions must have length {n}, got {}",
                path.len()
            )));
        }
        path.validate(alphabet)?;
        let idx: Vec<usize> =
            path.states().iter().map(|&s| alphabet.index_of(s).unwrap()).collect();
        first[idx[0]] += 1.0;
        for t in 0..n - 1 {
            counts[t][idx[t]][idx[t + 1]] += 1.0;
        }
    }

    let normalize = |cells: &[f64]| -> Option<Vec<f64>> {
        let total: f64 = cells.iter().sum::<f64>() + epsilon * m as f64;
        if total == 0.0 {
            return None;
        }
        Some(cells.iter().map(|&c| (c + epsilon) / total).collect())
    };

    let initial = normalize(&first).expect("solutions are non-empty");
    let mut stages = Vec::with_capacity(counts.len());
    let mut unsupported = Vec::with_capacity(counts.len());
    for table in &counts {
        let mut rows = Vec::with_capacity(m);
        let mut flags = Vec::with_capacity(m);
        for row_counts in table {
            let supported = row_counts.iter().sum::<f64>() > 0.0;
            flags.push(!supported);
            match normalize(row_counts) {
                Some(row) => rows.push(row),
                // Unsupported row with zero smoothing: uniform fallback.
                None => rows.push(vec![1.0 / m as f64; m]),
            }
        }
        stages.push(rows);
        unsupported.push(flags);
    }
    ConditionalModel::with_flags(initial, stages, unsupported)
}

/// Samples feasible solutions and estimates the conditional prior from the
/// retained top-`N1` set. Deterministic given `(seed, k, n1)`.
pub fn estimate_prior<P: Problem + ?Sized>(
    problem: &P,
    config: &PriorConfig,
) -> Result<ConditionalModel> {
    let samples = sample_feasible(problem, config)?;
    let paths: Vec<Path> = samples.solutions.into_iter().map(|(p, _)| p).collect();
    prior_from_solutions(problem, &paths, config.epsilon())
}
