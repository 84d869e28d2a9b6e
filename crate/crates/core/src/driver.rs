//! β orchestration: dense sweeps for trade-off curves and a bisection
//! driver for the feasibility boundary.
//!
//! Small β lets the information term dominate — solutions hug the prior and
//! tend to satisfy the constraints; large β chases reward into infeasible
//! territory. The sweep exposes the whole trade-off and groups the grid into
//! contiguous intervals that share one solution; the binary search exploits
//! the monotone feasible-to-infeasible transition to reach the boundary in
//! `⌈log2(β_max / t_range)⌉ + 2` solves instead of a full grid.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::dist::ConditionalModel;
use crate::error::{Error, Result};
use crate::problem::{Path, Problem};
use crate::trellis::{viterbi_solve, SolveOptions, SolveReport};

/// Dense β grid: `beta_min`, `beta_min + step`, … through `beta_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub beta_min: f64,
    pub beta_max: f64,
    pub step: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { beta_min: 0.0, beta_max: 10.0, step: 0.01 }
    }
}

impl SweepConfig {
    fn validate(&self) -> Result<()> {
        if !(self.step > 0.0) || self.beta_min > self.beta_max || self.beta_min < 0.0 {
            return Err(Error::Config(format!(
                "sweep grid needs 0 <= beta_min <= beta_max and step > 0, got [{}, {}] step {}",
                self.beta_min, self.beta_max, self.step
            )));
        }
        Ok(())
    }

    /// The grid points, inclusive of both ends.
    pub fn grid(&self) -> Vec<f64> {
        let count = ((self.beta_max - self.beta_min) / self.step).round() as usize;
        (0..=count).map(|i| self.beta_min + i as f64 * self.step).collect()
    }
}

/// Bisection configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct BsConfig {
    pub beta_max: f64,
    /// Exit once the bracket width drops below this.
    pub t_range: f64,
}

impl Default for BsConfig {
    fn default() -> Self {
        Self { beta_max: 10.0, t_range: 0.01 }
    }
}

/// One point of the trade-off curve, copied verbatim from the solve report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeoffPoint {
    pub beta: f64,
    pub solution: Path,
    pub reward: f64,
    pub information_to_go: f64,
    pub feasible: bool,
}

impl TradeoffPoint {
    fn from_report(report: &SolveReport) -> Self {
        Self {
            beta: report.beta,
            solution: report.solution.clone(),
            reward: report.reward,
            information_to_go: report.information_to_go,
            feasible: report.feasible,
        }
    }
}

/// A maximal run of consecutive grid points sharing one solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepInterval {
    pub beta_lo: f64,
    pub beta_hi: f64,
    pub solution: Path,
    pub reward: f64,
    pub feasible: bool,
}

/// Everything a sweep produces.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub points: Vec<TradeoffPoint>,
    pub intervals: Vec<SweepInterval>,
    /// Feasible point of maximum reward, smallest β on ties. `None` when no
    /// grid point was feasible.
    pub chosen: Option<TradeoffPoint>,
}

/// Runs one solve per grid β and aggregates the curve.
pub fn sweep<P: Problem + ?Sized>(
    problem: &P,
    prior: &ConditionalModel,
    options: &SolveOptions,
    config: &SweepConfig,
) -> Result<SweepOutcome> {
    config.validate()?;
    let mut points = Vec::new();
    for beta in config.grid() {
        let report = viterbi_solve(problem, prior, beta, options)?;
        points.push(TradeoffPoint::from_report(&report));
    }
    let intervals = group_intervals(&points);
    let chosen = choose_best(&points);
    Ok(SweepOutcome { points, intervals, chosen })
}

fn group_intervals(points: &[TradeoffPoint]) -> Vec<SweepInterval> {
    let mut intervals: Vec<SweepInterval> = Vec::new();
    for p in points {
        match intervals.last_mut() {
            Some(last) if last.solution == p.solution => last.beta_hi = p.beta,
            _ => intervals.push(SweepInterval {
                beta_lo: p.beta,
                beta_hi: p.beta,
                solution: p.solution.clone(),
                reward: p.reward,
                feasible: p.feasible,
            }),
        }
    }
    intervals
}

fn choose_best(points: &[TradeoffPoint]) -> Option<TradeoffPoint> {
    let mut best: Option<&TradeoffPoint> = None;
    for p in points.iter().filter(|p| p.feasible) {
        // Strict improvement keeps the smallest β on reward ties.
        if best.map_or(true, |b| p.reward > b.reward) {
            best = Some(p);
        }
    }
    best.cloned()
}

/// Why the bisection stopped where it did.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BracketStatus {
    /// A feasible-to-infeasible transition was bracketed to within the exit
    /// threshold.
    Bracketed,
    /// Both endpoints were feasible; there is no transition to find.
    NoTransition,
}

/// Result of the bisection driver.
#[derive(Debug, Clone, PartialEq)]
pub struct BsOutcome {
    /// Best feasible solution among the visited β.
    pub chosen: TradeoffPoint,
    pub visited: Vec<TradeoffPoint>,
    /// Final bracket `[β_L, β_U]` when a transition was found.
    pub bracket: Option<(f64, f64)>,
    pub status: BracketStatus,
}

/// Bisects on feasibility of the solve result over `[0, beta_max]`.
///
/// The lower end must be feasible (else [`Error::NoFeasibleAnchor`]); when
/// the upper end is feasible too the driver reports
/// [`BracketStatus::NoTransition`] and returns immediately. The solve count
/// never exceeds `⌈log2(beta_max / t_range)⌉ + 2`.
pub fn binary_search_beta<P: Problem + ?Sized>(
    problem: &P,
    prior: &ConditionalModel,
    options: &SolveOptions,
    config: &BsConfig,
) -> Result<BsOutcome> {
    if !(config.t_range > 0.0) || config.t_range >= config.beta_max {
        return Err(Error::Config(format!(
            "bisection needs 0 < t_range < beta_max, got t_range={} beta_max={}",
            config.t_range, config.beta_max
        )));
    }
    let mut visited = Vec::new();
    let solve = |beta: f64, visited: &mut Vec<TradeoffPoint>| -> Result<TradeoffPoint> {
        let report = viterbi_solve(problem, prior, beta, options)?;
        let point = TradeoffPoint::from_report(&report);
        visited.push(point.clone());
        Ok(point)
    };

    let low = solve(0.0, &mut visited)?;
    if !low.feasible {
        return Err(Error::NoFeasibleAnchor);
    }
    let high = solve(config.beta_max, &mut visited)?;
    if high.feasible {
        // Feasible everywhere we can see: the bracket degenerates at the
        // upper end, and the best feasible visited point is returned.
        let chosen = best_feasible(&visited).expect("low end is feasible");
        return Ok(BsOutcome { chosen, visited, bracket: None, status: BracketStatus::NoTransition });
    }

    let (mut lo, mut hi) = (0.0_f64, config.beta_max);
    while hi - lo >= config.t_range {
        let mid = 0.5 * (lo + hi);
        let point = solve(mid, &mut visited)?;
        if point.feasible {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let chosen = best_feasible(&visited).expect("low end is feasible");
    Ok(BsOutcome { chosen, visited, bracket: Some((lo, hi)), status: BracketStatus::Bracketed })
}

fn best_feasible(points: &[TradeoffPoint]) -> Option<TradeoffPoint> {
    choose_best(points)
}

/// Serializes a path for the CSV column: symbols joined by spaces.
pub fn format_solution(path: &Path) -> String {
    path.states().iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" ")
}

fn parse_solution(text: &str) -> Result<Path> {
    let states = text
        .split_whitespace()
        .map(|tok| tok.parse::<i32>().map_err(|e| Error::Parse(format!("bad symbol {tok}: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(Path::new(states))
}

/// Fixed CSV header of the trade-off curve.
pub const TRADEOFF_CSV_HEADER: &str = "beta,reward,ig_bits,feasible,solution";

/// Writes the curve in the stable five-column layout
/// `beta,reward,ig_bits,feasible,solution`.
pub fn write_tradeoff_csv<W: Write>(points: &[TradeoffPoint], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{TRADEOFF_CSV_HEADER}")?;
    for p in points {
        writeln!(
            out,
            "{},{},{},{},{}",
            p.beta,
            p.reward,
            p.information_to_go,
            p.feasible,
            format_solution(&p.solution)
        )?;
    }
    Ok(())
}

/// Parses a curve written by [`write_tradeoff_csv`].
pub fn read_tradeoff_csv<R: BufRead>(reader: R) -> Result<Vec<TradeoffPoint>> {
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty trade-off CSV".into()))
        .and_then(|l| l.map_err(|e| Error::Parse(e.to_string())))?;
    if header.trim() != TRADEOFF_CSV_HEADER {
        return Err(Error::Parse(format!("unexpected header: {header}")));
    }
    let mut points = Vec::new();
    for line in lines {
        let line = line.map_err(|e| Error::Parse(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.splitn(5, ',').collect();
        if fields.len() != 5 {
            return Err(Error::Parse(format!("expected 5 fields, got {}", fields.len())));
        }
        let parse_f64 = |s: &str| {
            s.parse::<f64>().map_err(|e| Error::Parse(format!("bad number {s}: {e}")))
        };
        points.push(TradeoffPoint {
            beta: parse_f64(fields[0])?,
            reward: parse_f64(fields[1])?,
            information_to_go: parse_f64(fields[2])?,
            feasible: fields[3]
                .parse::<bool>()
                .map_err(|e| Error::Parse(format!("bad flag {}: {e}", fields[3])))?,
            solution: parse_solution(fields[4])?,
        });
    }
    Ok(points)
}
