//! The trellis solver: an `M`-state, `N`-stage Viterbi pass whose path
//! metric trades information cost against reward.
//!
//! For a path `π` the accumulated metric is
//!
//! ```text
//! G(π, β) = I(π) − β · f(π)
//! ```
//!
//! where `f` is the stage-separable reward and `I` is the information cost:
//! `−log2 q(X_1 = π(1))` to enter the trellis plus, at every transition, the
//! KL divergence in bits between the forward conditional row `p(·|π_t)` and
//! the prior row `q(·|π(t))`. Minimizing `G` favors paths the prior already
//! expects (cheap to "describe") while `β` scales how much reward can buy
//! back description cost. A survivor per node is kept with the classic
//! add-compare-select recursion; ties go to the smaller predecessor symbol
//! so runs are reproducible.
//!
//! Transitions the problem structurally forbids ([`Problem::edge_allowed`])
//! are never wired. Pruning by the forward-looking feasibility oracle is
//! opt-in ([`SolveOptions::prune_partial`]): with it the solver only emits
//! feasible paths (when one survives), without it the solver reports the
//! metric optimum even when infeasible — the β driver owns feasibility
//! filtering, and the high-β regime of the benchmark tables is exactly the
//! infeasible reward-chasing region.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bitalloc::BitAllocInstance;
use crate::builders::{
    baa_conditional, sigmoid_conditional, BaaConfig, SigmoidConditionalConfig,
};
use crate::dist::{kl_divergence, ConditionalModel};
use crate::error::{Error, Result};
use crate::problem::{Path, Problem};

/// Which conditional builder feeds the path metric.
#[derive(Debug, Clone)]
pub enum ConditionalMode {
    /// Constraint-specific builder (the sigmoid residual-budget rows).
    Specific,
    /// Iterative self-consistent rows driven by the survivor values.
    Baa,
    /// A fixed, path-independent conditional model. With this mode the
    /// metric is stage-Markov and the Viterbi pass is exact.
    Fixed(Arc<ConditionalModel>),
}

/// Tag recorded in the report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeTag {
    Specific,
    Baa,
    Fixed,
}

/// How the per-transition information term is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MetricVariant {
    /// KL divergence of the whole row `p(·|current)` against `q(·|current)`,
    /// plus the candidate's reward term. The information term depends only
    /// on the source node.
    #[default]
    RowKl,
    /// Per-edge log ratio `log2 p(next|current)/q(next|current)` instead of
    /// the row expectation.
    EdgeLogRatio,
}

/// Solver options shared by every β.
#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub mode: ConditionalMode,
    pub sigmoid: SigmoidConditionalConfig,
    pub baa: BaaConfig,
    pub metric: MetricVariant,
    /// Prune extensions whose prefix fails the forward-looking feasibility
    /// oracle (and final extensions that fail the full check). Off by
    /// default: the plain solver mirrors the soft, information-guided
    /// search and may return infeasible paths at large β.
    pub prune_partial: bool,
}

impl SolveOptions {
    pub fn specific() -> Self {
        Self {
            mode: ConditionalMode::Specific,
            sigmoid: SigmoidConditionalConfig::default(),
            baa: BaaConfig::default(),
            metric: MetricVariant::RowKl,
            prune_partial: false,
        }
    }

    pub fn baa() -> Self {
        Self { mode: ConditionalMode::Baa, ..Self::specific() }
    }

    pub fn fixed(model: Arc<ConditionalModel>) -> Self {
        Self { mode: ConditionalMode::Fixed(model), ..Self::specific() }
    }

    pub fn mode_tag(&self) -> ModeTag {
        match self.mode {
            ConditionalMode::Specific => ModeTag::Specific,
            ConditionalMode::Baa => ModeTag::Baa,
            ConditionalMode::Fixed(_) => ModeTag::Fixed,
        }
    }
}

/// Operation counters, matching the closed-form trellis cost model: per
/// stage the add-compare-select scan touches all `M²` (node, predecessor)
/// pairs — the entry stage is counted as one such scan — and each
/// transition costs `M²` conditional-cell evaluations per builder sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Counters {
    pub acs_ops: u64,
    pub conditional_evals: u64,
    pub baa_iters_total: u64,
}

/// Outcome of one solve at a fixed β.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub beta: f64,
    pub solution: Path,
    pub reward: f64,
    /// Accumulated KL bits along the winning path (the entry term
    /// `−log2 q(X_1)` is not included).
    pub information_to_go: f64,
    /// Constraint-satisfaction result on the returned path.
    pub feasible: bool,
    pub counters: Counters,
    pub conditional_mode: ModeTag,
}

impl SolveReport {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// One retained path into a trellis node.
#[derive(Debug, Clone, PartialEq)]
pub struct Survivor {
    /// Accumulated metric `ig_accum − β · reward_accum`.
    pub metric: f64,
    /// Information bits including the entry term.
    pub ig_accum: f64,
    /// KL bits only (what the report exposes).
    pub kl_accum: f64,
    pub reward_accum: f64,
    /// Predecessor symbol index at the previous stage.
    pub back_pointer: Option<usize>,
    /// Cached prefix statistic for budget-style builders.
    pub prefix_power: f64,
}

/// Extension metric for one edge: the information increment plus the scaled
/// candidate reward, `kl − β · reward`.
pub fn path_metric_increment(
    p_row: &[f64],
    q_row: &[f64],
    beta: f64,
    candidate_reward: f64,
) -> Result<f64> {
    if !candidate_reward.is_finite() {
        return Err(Error::Contract("candidate reward must be finite".into()));
    }
    Ok(kl_divergence(p_row, q_row)? - beta * candidate_reward)
}

fn edge_log_ratio(p: f64, q: f64) -> f64 {
    if p == 0.0 {
        // An edge the conditional rules out costs +∞ and is pruned by the
        // metric itself.
        f64::INFINITY
    } else if q == 0.0 {
        f64::INFINITY
    } else {
        (p / q).log2()
    }
}

struct Trellis {
    /// `nodes[stage][sym_idx]`, `None` once a node is dead.
    nodes: Vec<Vec<Option<Survivor>>>,
}

impl Trellis {
    fn backtrace<P: Problem + ?Sized>(&self, problem: &P, stage: usize, node: usize) -> Path {
        let mut rev = Vec::with_capacity(stage + 1);
        let mut cur = node;
        let mut t = stage;
        loop {
            rev.push(problem.alphabet().symbol(cur));
            match self.nodes[t][cur].as_ref().and_then(|s| s.back_pointer) {
                Some(prev) => {
                    cur = prev;
                    t -= 1;
                }
                None => break,
            }
        }
        rev.reverse();
        Path::new(rev)
    }
}

/// Runs the forward pass and backtrace. Stage-1 metrics are seeded as
/// `−log2 q(X_1 = x) − β · r_1(x)`; each transition extends every survivor
/// along allowed edges with [`path_metric_increment`] and keeps the best
/// incoming path per node. The returned path is the metric optimum; its
/// feasibility is evaluated and reported, not enforced (see
/// [`SolveOptions::prune_partial`]).
pub fn viterbi_solve<P: Problem + ?Sized>(
    problem: &P,
    prior: &ConditionalModel,
    beta: f64,
    options: &SolveOptions,
) -> Result<SolveReport> {
    let n = problem.horizon();
    let m = problem.alphabet().len();
    if prior.symbol_count() != m || prior.transitions() + 1 < n {
        return Err(Error::Contract(format!(
            "prior covers {} symbols over {} transitions; problem needs {m} over {}",
            prior.symbol_count(),
            prior.transitions(),
            n - 1
        )));
    }
    if !beta.is_finite() || beta < 0.0 {
        return Err(Error::Config(format!("beta must be finite and non-negative, got {beta}")));
    }

    let mut counters = Counters::default();
    let mut trellis = Trellis { nodes: Vec::with_capacity(n) };

    // Entry stage. Counted as a full table scan in the cost model.
    counters.acs_ops += (m * m) as u64;
    let mut first: Vec<Option<Survivor>> = Vec::with_capacity(m);
    for i in 0..m {
        let q1 = prior.initial()[i];
        let entry_bits = if q1 > 0.0 { -q1.log2() } else { f64::INFINITY };
        let reward = problem.reward_term(1, i);
        let survivor = Survivor {
            metric: entry_bits - beta * reward,
            ig_accum: entry_bits,
            kl_accum: 0.0,
            reward_accum: reward,
            back_pointer: None,
            prefix_power: (problem.alphabet().symbol(i) as f64).exp2(),
        };
        first.push(survivor.metric.is_finite().then_some(survivor));
    }
    if first.iter().all(Option::is_none) {
        return Err(Error::NoFeasiblePath { stage: 1 });
    }
    trellis.nodes.push(first);

    for stage in 1..n {
        // `stage` is the 0-based index of the stage being entered; the
        // transition uses prior table `stage - 1`.
        let t = stage - 1;
        let prev = &trellis.nodes[t];

        // Information increment per source node (row KL), or full rows for
        // the per-edge variant.
        let mut rows: Vec<Option<Vec<f64>>> = vec![None; m];
        let mut row_kl = vec![f64::INFINITY; m];
        match &options.mode {
            ConditionalMode::Specific => {
                for (j, slot) in prev.iter().enumerate() {
                    if slot.is_none() {
                        continue;
                    }
                    let prefix = trellis.backtrace(problem, t, j);
                    let row = problem
                        .specific_conditional(&prefix, &options.sigmoid)
                        .ok_or_else(|| {
                            Error::UnsupportedMode(
                                "this problem has no constraint-specific builder".into(),
                            )
                        })??;
                    counters.conditional_evals += m as u64;
                    row_kl[j] = kl_divergence(&row.probs, prior.row(t, j))?;
                    rows[j] = Some(row.probs);
                }
            }
            ConditionalMode::Fixed(model) => {
                if model.symbol_count() != m || model.transitions() + 1 < n {
                    return Err(Error::Contract(
                        "fixed conditional model does not cover the horizon".into(),
                    ));
                }
                for (j, slot) in prev.iter().enumerate() {
                    if slot.is_none() {
                        continue;
                    }
                    counters.conditional_evals += m as u64;
                    row_kl[j] = kl_divergence(model.row(t, j), prior.row(t, j))?;
                    rows[j] = Some(model.row(t, j).to_vec());
                }
            }
            ConditionalMode::Baa => {
                // Candidate cost: best reachable survivor value extended by
                // the candidate's scaled reward; +∞ bars unreachable
                // candidates (at β = 0 the exponent vanishes anyway).
                let mut values = vec![f64::INFINITY; m];
                for (i, v) in values.iter_mut().enumerate() {
                    let to = problem.alphabet().symbol(i);
                    let mut best = f64::INFINITY;
                    for (j, slot) in prev.iter().enumerate() {
                        let from = problem.alphabet().symbol(j);
                        if let Some(s) = slot {
                            if problem.edge_allowed(from, to) && s.metric < best {
                                best = s.metric;
                            }
                        }
                    }
                    if best.is_finite() {
                        *v = best - beta * problem.reward_term(stage + 1, i);
                    }
                }
                let mu = prior.stage_marginal(t);
                let init: Vec<Vec<f64>> =
                    (0..m).map(|j| prior.row(t, j).to_vec()).collect();
                let outcome = baa_conditional(&init, &mu, &values, beta, &options.baa)?;
                counters.baa_iters_total += outcome.iterations as u64;
                counters.conditional_evals += (outcome.iterations * m * m) as u64;
                for (j, slot) in prev.iter().enumerate() {
                    if slot.is_none() {
                        continue;
                    }
                    row_kl[j] = kl_divergence(&outcome.rows[j], prior.row(t, j))?;
                    rows[j] = Some(outcome.rows[j].clone());
                }
            }
        }

        let mut next: Vec<Option<Survivor>> = vec![None; m];
        for i in 0..m {
            let to = problem.alphabet().symbol(i);
            let candidate_reward = problem.reward_term(stage + 1, i);
            let mut best: Option<(f64, f64, usize)> = None;
            for (j, slot) in prev.iter().enumerate() {
                counters.acs_ops += 1;
                let Some(s) = slot else { continue };
                let from = problem.alphabet().symbol(j);
                if !problem.edge_allowed(from, to) {
                    continue;
                }
                let info = match options.metric {
                    MetricVariant::RowKl => row_kl[j],
                    MetricVariant::EdgeLogRatio => {
                        let p = rows[j].as_ref().expect("row built for alive survivor")[i];
                        edge_log_ratio(p, prior.row(t, j)[i])
                    }
                };
                let metric = s.metric + info - beta * candidate_reward;
                if metric.is_nan() || metric == f64::INFINITY {
                    continue;
                }
                if options.prune_partial {
                    let mut prefix = trellis.backtrace(problem, t, j);
                    prefix.push(to);
                    let ok = if stage + 1 == n {
                        problem.csf(&prefix)?
                    } else {
                        problem.csf_partial(&prefix)?
                    };
                    if !ok {
                        continue;
                    }
                }
                // Strict improvement keeps the smaller predecessor on ties.
                if best.map_or(true, |(b, _, _)| metric < b) {
                    best = Some((metric, info, j));
                }
            }
            let Some((metric, info, j)) = best else { continue };
            let s = prev[j].as_ref().unwrap();
            next[i] = Some(Survivor {
                metric,
                ig_accum: s.ig_accum + info,
                kl_accum: s.kl_accum + info,
                reward_accum: s.reward_accum + candidate_reward,
                back_pointer: Some(j),
                prefix_power: s.prefix_power + (to as f64).exp2(),
            });
        }
        if next.iter().all(Option::is_none) {
            return Err(Error::NoFeasiblePath { stage: stage + 1 });
        }
        trellis.nodes.push(next);
    }

    // Terminal select: minimum metric, ties to the smaller symbol.
    let last = &trellis.nodes[n - 1];
    let mut winner: Option<(f64, usize)> = None;
    for (i, slot) in last.iter().enumerate() {
        if let Some(s) = slot {
            if winner.map_or(true, |(b, _)| s.metric < b) {
                winner = Some((s.metric, i));
            }
        }
    }
    let (_, node) = winner.ok_or(Error::NoFeasiblePath { stage: n })?;
    let survivor = last[node].as_ref().unwrap();
    let solution = trellis.backtrace(problem, n - 1, node);
    let feasible = problem.csf(&solution)?;

    Ok(SolveReport {
        beta,
        reward: survivor.reward_accum,
        information_to_go: survivor.kl_accum,
        feasible,
        counters,
        conditional_mode: options.mode_tag(),
        solution,
    })
}

/// Exact budget-aware variant for bit allocation: the trellis state is
/// `(symbol, consumed-power bucket)` so two prefixes with different residual
/// budgets never collapse into one survivor. With bucket width 2 and the
/// integer alphabet every reachable power gets its own bucket, which makes
/// the pass an exact minimizer of the (noise-free) metric over all
/// ordering-feasible paths — at `O(N·M²·P_b/2)` cost instead of `O(N·M²)`.
pub fn viterbi_solve_augmented(
    instance: &BitAllocInstance,
    prior: &ConditionalModel,
    beta: f64,
    options: &SolveOptions,
) -> Result<SolveReport> {
    if !matches!(options.mode, ConditionalMode::Specific) {
        return Err(Error::UnsupportedMode(
            "the augmented trellis is built around the constraint-specific rows".into(),
        ));
    }
    let n = instance.horizon();
    let m = instance.alphabet().len();
    if prior.symbol_count() != m || prior.transitions() + 1 < n {
        return Err(Error::Contract("prior does not cover the horizon".into()));
    }
    const BUCKET: f64 = 2.0;
    // Powers beyond max_power all land in the overflow bucket: once the
    // budget is exhausted the sigmoid rows no longer distinguish them.
    let max_power = instance.p_b + (instance.alphabet().max_symbol() as f64).exp2();
    let buckets = (max_power / BUCKET).ceil() as usize + 2;
    let bucket_of = |power: f64| -> usize { ((power / BUCKET) as usize).min(buckets - 1) };

    #[derive(Clone)]
    struct AugSurvivor {
        metric: f64,
        kl_accum: f64,
        reward_accum: f64,
        power: f64,
        path: Path,
    }

    let mut counters = Counters::default();
    counters.acs_ops += (m * m) as u64;
    let mut layer: Vec<Option<AugSurvivor>> = vec![None; m * buckets];
    for i in 0..m {
        let q1 = prior.initial()[i];
        if q1 <= 0.0 {
            continue;
        }
        let sym = instance.alphabet().symbol(i);
        let power = (sym as f64).exp2();
        let s = AugSurvivor {
            metric: -q1.log2() - beta * instance.reward_term(1, i),
            kl_accum: 0.0,
            reward_accum: instance.reward_term(1, i),
            power,
            path: Path::from(vec![sym]),
        };
        layer[i * buckets + bucket_of(power)] = Some(s);
    }

    for stage in 1..n {
        let t = stage - 1;
        let mut next: Vec<Option<AugSurvivor>> = vec![None; m * buckets];
        for (slot_idx, slot) in layer.iter().enumerate() {
            let Some(s) = slot else { continue };
            let j = slot_idx / buckets;
            let from = instance.alphabet().symbol(j);
            let row = sigmoid_conditional(instance, &s.path, &options.sigmoid)?;
            counters.conditional_evals += m as u64;
            let kl = kl_divergence(&row.probs, prior.row(t, j))?;
            for i in 0..m {
                counters.acs_ops += 1;
                let to = instance.alphabet().symbol(i);
                if !instance.edge_allowed(from, to) {
                    continue;
                }
                let metric = s.metric + kl - beta * instance.reward_term(stage + 1, i);
                if !metric.is_finite() {
                    continue;
                }
                let power = s.power + (to as f64).exp2();
                let key = i * buckets + bucket_of(power);
                let replace = match &next[key] {
                    Some(existing) => metric < existing.metric,
                    None => true,
                };
                if replace {
                    let mut path = s.path.clone();
                    path.push(to);
                    next[key] = Some(AugSurvivor {
                        metric,
                        kl_accum: s.kl_accum + kl,
                        reward_accum: s.reward_accum + instance.reward_term(stage + 1, i),
                        power,
                        path,
                    });
                }
            }
        }
        if next.iter().all(Option::is_none) {
            return Err(Error::NoFeasiblePath { stage: stage + 1 });
        }
        layer = next;
    }

    let best = layer
        .iter()
        .flatten()
        .min_by(|a, b| a.metric.partial_cmp(&b.metric).unwrap().then(a.path.cmp(&b.path)))
        .expect("at least one survivor");
    let feasible = instance.csf(&best.path)?;
    Ok(SolveReport {
        beta,
        solution: best.path.clone(),
        reward: best.reward_accum,
        information_to_go: best.kl_accum,
        feasible,
        counters,
        conditional_mode: ModeTag::Specific,
    })
}
