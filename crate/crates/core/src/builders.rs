//! Forward-conditional builders.
//!
//! The path metric needs a conditional `p(next | current)` at every trellis
//! transition. Two builders are provided:
//!
//! * [`sigmoid_conditional`] — constraint-specific. For a budgeted
//!   allocation it weights each candidate next symbol `x` by
//!   `S(p_b − (used + 2^x))`, the logistic function of the power that would
//!   remain, then zeroes candidates the ordering constraint forbids and
//!   normalizes. A tiny seeded Gaussian perturbation keeps rows from being
//!   exactly degenerate.
//! * [`baa_conditional`] — problem-agnostic. It solves the stage-local
//!   trade-off between staying close to the prior marginal and avoiding
//!   high-cost candidates by iterating the self-consistent pair
//!
//!   ```text
//!   m(i)      = Σ_j μ(j) · p(i|j)
//!   p'(i|j)   = m(i) · exp(−β·g(i)) / Σ_l m(l) · exp(−β·g(l))
//!   ```
//!
//!   until the rows stop moving. This is the classic alternating-update
//!   scheme from rate-distortion theory with the candidate cost `g` playing
//!   the distortion. Updates run in log space with max-subtraction so large
//!   `β·g` never overflows.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::bitalloc::BitAllocInstance;
use crate::dist::check_distribution;
use crate::error::{Error, Result};
use crate::problem::{Path, Problem};
use crate::seed::fnv1a64;

/// Configuration of the constraint-specific (sigmoid) builder.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmoidConditionalConfig {
    /// Standard deviation of the additive row noise. Zero makes every row a
    /// deterministic function of (prefix power, current symbol, budget).
    pub sigma: f64,
    pub noise_seed: u64,
}

impl Default for SigmoidConditionalConfig {
    fn default() -> Self {
        Self { sigma: 1e-3, noise_seed: 0 }
    }
}

/// How a builder row was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowStatus {
    Ok,
    /// Every candidate weight vanished (budget exhausted): the row
    /// degenerated to the largest allowed symbol.
    Exhausted,
    /// Iteration stopped at the sweep cap before reaching tolerance.
    Unconverged,
}

/// A distribution over next symbols plus its provenance flag.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalRow {
    pub probs: Vec<f64>,
    pub status: RowStatus,
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Builds `p(next | prefix)` for a budgeted allocation: logistic weights on
/// the residual budget after each candidate, ordering-forbidden candidates
/// zeroed, negatives clamped, then normalized.
///
/// Noise is keyed by `(noise_seed, stage, current symbol, prefix power)`, so
/// re-evaluating the same edge inside one solve sees the same row.
pub fn sigmoid_conditional(
    instance: &BitAllocInstance,
    prefix: &Path,
    config: &SigmoidConditionalConfig,
) -> Result<ConditionalRow> {
    if prefix.is_empty() {
        return Err(Error::Contract("sigmoid conditional needs a non-empty prefix".into()));
    }
    if config.sigma < 0.0 {
        return Err(Error::Config("sigma must be non-negative".into()));
    }
    prefix.validate(&instance.alphabet)?;
    let current = prefix.last().unwrap();
    let used = instance.power(prefix);
    let alphabet = instance.alphabet();
    let m = alphabet.len();

    let noise = if config.sigma > 0.0 {
        let key = fnv1a64(&[
            config.noise_seed,
            prefix.len() as u64,
            current as u64,
            used.to_bits(),
        ]);
        let mut rng = ChaCha8Rng::seed_from_u64(key);
        let normal = Normal::new(0.0, config.sigma).expect("sigma validated");
        (0..m).map(|_| normal.sample(&mut rng)).collect()
    } else {
        vec![0.0; m]
    };

    let mut weights = vec![0.0_f64; m];
    for (i, &x) in alphabet.values().iter().enumerate() {
        if !instance.edge_allowed(current, x) {
            continue;
        }
        let residual = instance.p_b - (used + (x as f64).exp2());
        weights[i] = (sigmoid(residual) + noise[i]).max(0.0);
    }

    let total: f64 = weights.iter().sum();
    if total == 0.0 {
        // Budget exhausted so hard that every sigmoid underflowed: fall back
        // to the largest symbol the ordering still allows.
        let fallback = (0..m)
            .rev()
            .find(|&i| instance.edge_allowed(current, alphabet.symbol(i)))
            .expect("self-transition is always allowed");
        weights[fallback] = 1.0;
        return Ok(ConditionalRow { probs: weights, status: RowStatus::Exhausted });
    }
    weights.iter_mut().for_each(|w| *w /= total);
    Ok(ConditionalRow { probs: weights, status: RowStatus::Ok })
}

/// Configuration of the iterative builder.
#[derive(Debug, Clone, PartialEq)]
pub struct BaaConfig {
    pub max_iters: usize,
    /// Convergence threshold on the largest per-row L1 change per sweep.
    pub tolerance: f64,
}

impl Default for BaaConfig {
    fn default() -> Self {
        Self { max_iters: 200, tolerance: 1e-8 }
    }
}

impl BaaConfig {
    fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters must be at least 1".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Config("tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// One synchronous sweep of the self-consistent pair: recomputes the next
/// marginal from `conditional` under the fixed conditioning marginal
/// `mu_prev`, then rebuilds every row as `m(i)·exp(−β·g(i))`, normalized in
/// log space. Returns `(rows, marginal)`.
///
/// `values` may contain `+∞` to bar a candidate; at `β = 0` the exponential
/// is identically 1 and the updated rows equal the marginal.
pub fn baa_update(
    conditional: &[Vec<f64>],
    mu_prev: &[f64],
    values: &[f64],
    beta: f64,
) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let m = mu_prev.len();
    if conditional.len() != m || values.len() != m {
        return Err(Error::Contract("baa_update inputs must agree on the symbol count".into()));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::Contract("candidate values must not be NaN".into()));
    }
    check_distribution(mu_prev)?;
    for row in conditional {
        check_distribution(row)?;
    }

    let mut marginal = vec![0.0_f64; m];
    for (j, row) in conditional.iter().enumerate() {
        for (i, &p) in row.iter().enumerate() {
            marginal[i] += mu_prev[j] * p;
        }
    }

    // log m(i) − β·g(i), with β = 0 short-circuited so that an infinite g
    // does not poison the exponent.
    let log_weights: Vec<f64> = marginal
        .iter()
        .zip(values)
        .map(|(&mi, &gi)| {
            let base = mi.ln();
            if beta == 0.0 {
                base
            } else {
                base - beta * gi
            }
        })
        .collect();
    let max = log_weights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Err(Error::Contract("every candidate has zero weight".into()));
    }
    let mut row: Vec<f64> = log_weights.iter().map(|&w| (w - max).exp()).collect();
    let z: f64 = row.iter().sum();
    row.iter_mut().for_each(|w| *w /= z);

    // The exponent is independent of the conditioning symbol, so every row
    // is the same after one sweep.
    Ok((vec![row; m], marginal))
}

/// Result of [`baa_conditional`]: converged rows plus the sweep count that
/// feeds the complexity counters.
#[derive(Debug, Clone, PartialEq)]
pub struct BaaOutcome {
    pub rows: Vec<Vec<f64>>,
    pub iterations: usize,
    pub status: RowStatus,
}

/// Iterates [`baa_update`] from `init_rows` until the largest per-row L1
/// change drops below tolerance or the sweep cap is hit.
pub fn baa_conditional(
    init_rows: &[Vec<f64>],
    mu_prev: &[f64],
    values: &[f64],
    beta: f64,
    config: &BaaConfig,
) -> Result<BaaOutcome> {
    config.validate()?;
    let mut rows = init_rows.to_vec();
    for iter in 1..=config.max_iters {
        let (next, _) = baa_update(&rows, mu_prev, values, beta)?;
        let delta = rows
            .iter()
            .zip(&next)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>())
            .fold(0.0_f64, f64::max);
        rows = next;
        if delta < config.tolerance {
            return Ok(BaaOutcome { rows, iterations: iter, status: RowStatus::Ok });
        }
    }
    Ok(BaaOutcome { rows, iterations: config.max_iters, status: RowStatus::Unconverged })
}
