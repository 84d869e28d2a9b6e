//! Ground-truth solvers: exhaustive search and depth-first branch-and-bound.
//!
//! Exhaustive search enumerates all `M^N` assignments, filters by the
//! constraint-satisfaction function, and keeps the maximum-reward feasible
//! path. It is exact by construction and serves as the optimality oracle for
//! everything else, so it refuses search spaces beyond a configurable cap
//! instead of silently taking hours.
//!
//! The branch-and-bound walks the assignment tree depth first in symbol
//! order, pruning subtrees whose prefix cannot be completed feasibly and
//! subtrees whose optimistic bound — reward so far plus the per-stage column
//! maxima of the remaining stages — cannot beat the incumbent. Because the
//! reward is stage-separable the column-maxima bound is a true upper bound,
//! so the search is exact; pruning only saves work.

use crate::error::{Error, Result};
use crate::problem::{Path, Problem};

/// Result of an exhaustive enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct EsOutcome {
    /// Maximum-reward feasible path, lexicographically smallest on exact
    /// reward ties. `None` when nothing is feasible.
    pub best: Option<(Path, f64)>,
    /// Paths enumerated (always `M^N`).
    pub enumerated: u64,
}

pub const DEFAULT_ES_CAP: u128 = 1 << 24;

/// Enumerates every assignment and returns the feasible reward maximum.
pub fn exhaustive_search<P: Problem + ?Sized>(problem: &P) -> Result<EsOutcome> {
    exhaustive_search_capped(problem, DEFAULT_ES_CAP)
}

pub fn exhaustive_search_capped<P: Problem + ?Sized>(
    problem: &P,
    cap: u128,
) -> Result<EsOutcome> {
    let n = problem.horizon();
    let m = problem.alphabet().len();
    let size = (m as u128)
        .checked_pow(n as u32)
        .ok_or(Error::SearchSpaceTooLarge { size: u128::MAX, cap })?;
    if size > cap {
        return Err(Error::SearchSpaceTooLarge { size, cap });
    }

    let mut indices = vec![0usize; n];
    let mut best: Option<(Path, f64)> = None;
    let mut enumerated: u64 = 0;
    loop {
        enumerated += 1;
        let path = Path::new(
            indices.iter().map(|&i| problem.alphabet().symbol(i)).collect(),
        );
        if problem.csf(&path)? {
            let reward = problem.reward(&path)?;
            let better = match &best {
                None => true,
                Some((bp, br)) => reward > *br || (reward == *br && path < *bp),
            };
            if better {
                best = Some((path, reward));
            }
        }
        // Odometer increment over symbol indices.
        let mut k = n;
        loop {
            if k == 0 {
                return Ok(EsOutcome { best, enumerated });
            }
            k -= 1;
            indices[k] += 1;
            if indices[k] < m {
                break;
            }
            indices[k] = 0;
        }
    }
}

/// Branch-and-bound switches, both on by default.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NlbbOptions {
    /// Prune prefixes that provably have no feasible completion.
    pub prune_constraints: bool,
    /// Prune prefixes whose optimistic bound cannot beat the incumbent.
    pub prune_bound: bool,
}

impl Default for NlbbOptions {
    fn default() -> Self {
        Self { prune_constraints: true, prune_bound: true }
    }
}

/// Result of a branch-and-bound run.
#[derive(Debug, Clone, PartialEq)]
pub struct NlbbOutcome {
    pub best: Option<(Path, f64)>,
    /// Tree nodes visited (every expanded prefix counts once).
    pub nodes_visited: u64,
}

/// Depth-first branch-and-bound with constraint and dominance pruning.
pub fn nlbb_solve<P: Problem + ?Sized>(problem: &P) -> Result<NlbbOutcome> {
    nlbb_solve_with(problem, NlbbOptions::default())
}

pub fn nlbb_solve_with<P: Problem + ?Sized>(
    problem: &P,
    options: NlbbOptions,
) -> Result<NlbbOutcome> {
    let n = problem.horizon();
    let m = problem.alphabet().len();
    // suffix_max[k] = best possible reward from stages k+1..=N.
    let mut suffix_max = vec![0.0_f64; n + 1];
    for stage in (1..=n).rev() {
        let col = (0..m)
            .map(|i| problem.reward_term(stage, i))
            .fold(f64::NEG_INFINITY, f64::max);
        suffix_max[stage - 1] = suffix_max[stage] + col;
    }

    struct Dfs<'a, P: ?Sized> {
        problem: &'a P,
        options: NlbbOptions,
        suffix_max: Vec<f64>,
        best: Option<(Path, f64)>,
        nodes: u64,
    }

    impl<P: Problem + ?Sized> Dfs<'_, P> {
        fn walk(&mut self, prefix: &mut Path, reward_so_far: f64) -> Result<()> {
            let n = self.problem.horizon();
            let k = prefix.len();
            for i in 0..self.problem.alphabet().len() {
                let symbol = self.problem.alphabet().symbol(i);
                let reward = reward_so_far + self.problem.reward_term(k + 1, i);
                prefix.push(symbol);
                self.nodes += 1;
                let complete = prefix.len() == n;
                let feasible_here = if complete {
                    self.problem.csf(prefix)?
                } else if self.options.prune_constraints {
                    self.problem.csf_partial(prefix)?
                } else {
                    true
                };
                let bound_ok = !self.options.prune_bound
                    || self.best.as_ref().map_or(true, |(_, incumbent)| {
                        reward + self.suffix_max[prefix.len()] > *incumbent
                    });
                if complete {
                    if feasible_here {
                        let better = match &self.best {
                            None => true,
                            Some((bp, br)) => {
                                reward > *br || (reward == *br && *prefix < *bp)
                            }
                        };
                        if better {
                            self.best = Some((prefix.clone(), reward));
                        }
                    }
                } else if feasible_here && bound_ok {
                    self.walk(prefix, reward)?;
                }
                prefix.pop();
            }
            Ok(())
        }
    }

    let mut dfs = Dfs { problem, options, suffix_max, best: None, nodes: 0 };
    let mut prefix = Path::empty();
    dfs.walk(&mut prefix, 0.0)?;
    Ok(NlbbOutcome { best: dfs.best, nodes_visited: dfs.nodes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitalloc::canonical_instance;
    use crate::problem::{Alphabet, TableProblem};

    fn toy() -> TableProblem {
        // N = 3, M = 2 over symbols {0, 1}. Feasible: at most two ones.
        // Hand enumeration of all 8 paths:
        //   000 → 1.0   001 → 4.0   010 → 2.5   011 → 5.5
        //   100 → 3.0   101 → 6.0   110 → 4.5   111 → 7.5 (infeasible)
        // Optimum among feasible: {1,0,1} with 6.0.
        TableProblem::new(
            Alphabet::new(vec![0, 1]).unwrap(),
            vec![vec![0.0, 2.0], vec![0.5, 2.0], vec![0.5, 3.5]],
            |p| p.states().iter().filter(|&&s| s == 1).count() <= 2,
            |p| p.states().iter().filter(|&&s| s == 1).count() <= 2,
        )
        .unwrap()
        .with_metadata("hand-enumerated toy")
    }

    #[test]
    fn es_matches_hand_enumeration() {
        let out = exhaustive_search(&toy()).unwrap();
        let (path, reward) = out.best.unwrap();
        assert_eq!(path, Path::from(vec![1, 0, 1]));
        assert!((reward - 6.0).abs() < 1e-12);
        assert_eq!(out.enumerated, 8);
    }

    #[test]
    fn es_single_stage_is_the_column_argmax() {
        let p = TableProblem::unconstrained(
            Alphabet::new(vec![1, 2, 3, 4]).unwrap(),
            vec![vec![0.3, 0.9, 0.1, 0.7]],
        )
        .unwrap();
        let out = exhaustive_search(&p).unwrap();
        assert_eq!(out.best.unwrap().0, Path::from(vec![2]));
    }

    #[test]
    fn es_refuses_oversized_spaces() {
        let p = TableProblem::unconstrained(
            Alphabet::new(vec![0, 1]).unwrap(),
            vec![vec![0.0, 1.0]; 30],
        )
        .unwrap();
        match exhaustive_search_capped(&p, 1 << 20) {
            Err(Error::SearchSpaceTooLarge { size, cap }) => {
                assert_eq!(size, 1 << 30);
                assert_eq!(cap, 1 << 20);
            }
            other => panic!("expected cap refusal, got {other:?}"),
        }
    }

    #[test]
    fn es_reports_empty_results_explicitly() {
        let p = TableProblem::new(
            Alphabet::new(vec![0, 1]).unwrap(),
            vec![vec![0.0, 1.0]; 3],
            |_| false,
            |_| true,
        )
        .unwrap();
        let out = exhaustive_search(&p).unwrap();
        assert!(out.best.is_none());
        assert_eq!(out.enumerated, 8);
    }

    #[test]
    fn canonical_es_respects_budget_and_ordering() {
        let inst = canonical_instance();
        let out = exhaustive_search(&inst).unwrap();
        assert_eq!(out.enumerated, 65536);
        let (path, _) = out.best.unwrap();
        assert!(inst.power(&path) <= 32.0);
        assert!(path.states().windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn nlbb_agrees_with_es() {
        let out_es = exhaustive_search(&toy()).unwrap();
        let out_bb = nlbb_solve(&toy()).unwrap();
        assert_eq!(out_es.best, out_bb.best);

        let inst = canonical_instance();
        let es = exhaustive_search(&inst).unwrap().best.unwrap();
        let bb = nlbb_solve(&inst).unwrap().best.unwrap();
        assert_eq!(es.0, bb.0);
        assert!((es.1 - bb.1).abs() < 1e-12);
    }

    #[test]
    fn nlbb_unconstrained_returns_the_column_argmax_path() {
        let p = TableProblem::unconstrained(
            Alphabet::new(vec![1, 2, 3]).unwrap(),
            vec![vec![0.1, 0.9, 0.5], vec![0.7, 0.2, 0.3], vec![0.4, 0.4, 0.8]],
        )
        .unwrap();
        let out = nlbb_solve(&p).unwrap();
        assert_eq!(out.best.unwrap().0, Path::from(vec![2, 1, 3]));
    }

    #[test]
    fn nlbb_without_pruning_visits_the_whole_tree() {
        let inst = canonical_instance();
        let off = NlbbOptions { prune_constraints: false, prune_bound: false };
        let out = nlbb_solve_with(&inst, off).unwrap();
        // Σ_{k=1..8} 4^k
        let expected: u64 = (1..=8).map(|k| 4u64.pow(k)).sum();
        assert_eq!(out.nodes_visited, expected);
    }

    #[test]
    fn nlbb_pruning_shrinks_the_visit_count() {
        let inst = canonical_instance();
        let on = nlbb_solve(&inst).unwrap();
        let expected_full: u64 = (1..=8).map(|k| 4u64.pow(k)).sum();
        assert!(on.nodes_visited < 65536);
        assert!(on.nodes_visited < expected_full);
    }
}
