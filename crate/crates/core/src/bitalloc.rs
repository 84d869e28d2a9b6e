//! ADC bit allocation: the built-in budgeted-allocation instance family.
//!
//! Each of `N` RF paths gets an ADC resolution from `{1,2,3,4}` bits. Path
//! `i` contributes a channel-quality term driven by three positive
//! coefficients — `a[i]` (channel singular value), `b[i]` (noise), `d[i]`
//! (quantization-noise coefficient) — and the chosen bit count `x`:
//!
//! * [`RewardPreset::Increasing`]: `a²/(b² + d·2^(-x))`. More bits shrink the
//!   quantization-noise term, so the reward grows with the allocation. This
//!   is the default; it makes the power budget the binding tension.
//! * [`RewardPreset::Decreasing`]: `a²/(b² + d·2^x)`, the same ratio with the
//!   quantization term growing in `x` instead. Kept for experiments where
//!   extra resolution is purely a cost.
//!
//! A complete allocation is feasible iff its total converter power
//! `Σ 2^(x_i)` stays within the budget `p_b` and the bit widths are
//! non-increasing across paths (`x_1 ≥ x_2 ≥ … ≥ x_N`).

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::{Alphabet, Path, Problem, Symbol};

/// Direction of the per-stage reward term as a function of allocated bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum RewardPreset {
    /// `a²/(b² + d·2^(-x))` — reward grows with the bit count.
    #[default]
    Increasing,
    /// `a²/(b² + d·2^x)` — reward shrinks with the bit count.
    Decreasing,
}

impl RewardPreset {
    fn quantization_term(self, x: Symbol) -> f64 {
        match self {
            RewardPreset::Increasing => (-(x as f64)).exp2(),
            RewardPreset::Decreasing => (x as f64).exp2(),
        }
    }
}

/// A concrete bit-allocation instance with explicit coefficient vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BitAllocInstance {
    /// Number of RF paths (stages).
    pub n: usize,
    /// Allowed ADC resolutions, strictly increasing.
    pub alphabet: Alphabet,
    /// Channel singular values, strictly positive, length `n`.
    pub a: Vec<f64>,
    /// Noise terms, strictly positive, length `n`.
    pub b: Vec<f64>,
    /// Quantization-noise coefficients, non-negative, length `n`.
    pub d: Vec<f64>,
    /// Total converter power budget, positive.
    pub p_b: f64,
    /// Reward direction.
    #[serde(default)]
    pub reward_preset: RewardPreset,
    /// Seed the instance was generated from, when it came from the generator.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl BitAllocInstance {
    /// Validates and finalizes an instance. Checks coefficient signs,
    /// lengths, the budget, and — numerically — that every stage's reward is
    /// strictly monotone in the preset's direction wherever `d[i] > 0`.
    pub fn new(
        n: usize,
        alphabet: Alphabet,
        a: Vec<f64>,
        b: Vec<f64>,
        d: Vec<f64>,
        p_b: f64,
        reward_preset: RewardPreset,
    ) -> Result<Self> {
        let inst = Self { n, alphabet, a, b, d, p_b, reward_preset, seed: None };
        inst.validate()?;
        Ok(inst)
    }

    /// Re-checks every construction invariant; used after deserializing.
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Config("instance needs at least one stage".into()));
        }
        for (name, v) in [("a", &self.a), ("b", &self.b), ("d", &self.d)] {
            if v.len() != self.n {
                return Err(Error::Config(format!(
                    "coefficient vector {name} has length {}, expected {}",
                    v.len(),
                    self.n
                )));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::Config(format!("coefficient vector {name} must be finite")));
            }
        }
        if self.a.iter().any(|&x| x <= 0.0) || self.b.iter().any(|&x| x <= 0.0) {
            return Err(Error::Config("a and b coefficients must be strictly positive".into()));
        }
        if self.d.iter().any(|&x| x < 0.0) {
            return Err(Error::Config("d coefficients must be non-negative".into()));
        }
        if !(self.p_b > 0.0) {
            return Err(Error::Config(format!("power budget must be positive, got {}", self.p_b)));
        }
        // Monotonicity in the preset's direction, checked numerically.
        for i in 1..=self.n {
            if self.d[i - 1] == 0.0 {
                continue;
            }
            for w in self.alphabet.values().windows(2) {
                let lo = self.term(i, w[0]);
                let hi = self.term(i, w[1]);
                let ok = match self.reward_preset {
                    RewardPreset::Increasing => hi > lo,
                    RewardPreset::Decreasing => hi < lo,
                };
                if !ok {
                    return Err(Error::Config(format!(
                        "stage {i} reward is not strictly {} in the bit count",
                        match self.reward_preset {
                            RewardPreset::Increasing => "increasing",
                            RewardPreset::Decreasing => "decreasing",
                        }
                    )));
                }
            }
        }
        Ok(())
    }

    /// Reward term of 1-based stage `i` at bit count `x`.
    fn term(&self, i: usize, x: Symbol) -> f64 {
        let a = self.a[i - 1];
        let b = self.b[i - 1];
        let d = self.d[i - 1];
        a * a / (b * b + d * self.reward_preset.quantization_term(x))
    }

    /// Total converter power `Σ 2^(x_i)` of a (possibly partial) allocation.
    pub fn power(&self, path: &Path) -> f64 {
        path.states().iter().map(|&x| (x as f64).exp2()).sum()
    }

    /// Parses an instance from its JSON document. Unknown fields are
    /// rejected, and all construction invariants re-checked.
    pub fn from_json(text: &str) -> Result<Self> {
        let inst: Self = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        inst.validate()?;
        Ok(inst)
    }

    /// Serializes to the canonical pretty JSON document.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }
}

impl Problem for BitAllocInstance {
    fn horizon(&self) -> usize {
        self.n
    }

    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn reward_term(&self, stage: usize, sym_idx: usize) -> f64 {
        self.term(stage, self.alphabet.symbol(sym_idx))
    }

    fn csf(&self, path: &Path) -> Result<bool> {
        if path.len() != self.n {
            return Err(Error::Contract(format!(
                "csf needs a complete path of length {}, got {}",
                self.n,
                path.len()
            )));
        }
        path.validate(&self.alphabet)?;
        let ordered = path.states().windows(2).all(|w| w[0] >= w[1]);
        Ok(ordered && self.power(path) <= self.p_b)
    }

    /// Exact prefix check: the ordering must hold within the prefix and the
    /// cheapest ordered completion — every remaining stage at the smallest
    /// alphabet symbol — must still fit the budget.
    fn csf_partial(&self, prefix: &Path) -> Result<bool> {
        if prefix.is_empty() || prefix.len() >= self.n {
            return Err(Error::Contract(format!(
                "csf_partial needs a strict prefix (1..{}), got length {}",
                self.n,
                prefix.len()
            )));
        }
        prefix.validate(&self.alphabet)?;
        if !prefix.states().windows(2).all(|w| w[0] >= w[1]) {
            return Ok(false);
        }
        let remaining = (self.n - prefix.len()) as f64;
        let cheapest = (self.alphabet.min_symbol() as f64).exp2();
        Ok(self.power(prefix) + remaining * cheapest <= self.p_b)
    }

    fn edge_allowed(&self, from: Symbol, to: Symbol) -> bool {
        to <= from
    }

    fn specific_conditional(
        &self,
        prefix: &Path,
        config: &crate::builders::SigmoidConditionalConfig,
    ) -> Option<crate::error::Result<crate::builders::ConditionalRow>> {
        Some(crate::builders::sigmoid_conditional(self, prefix, config))
    }
}

/// Coefficient ranges for the seeded instance generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffRanges {
    pub a: (f64, f64),
    pub b: (f64, f64),
    pub d: (f64, f64),
}

impl Default for CoeffRanges {
    fn default() -> Self {
        // Spans a factor of a few in each coefficient: enough spread that
        // instances differ meaningfully, not so much that one stage dwarfs
        // the rest.
        Self { a: (0.8, 3.0), b: (0.7, 1.4), d: (0.5, 4.0) }
    }
}

impl CoeffRanges {
    fn validate(&self) -> Result<()> {
        for (name, (lo, hi)) in [("a", self.a), ("b", self.b), ("d", self.d)] {
            if !(lo > 0.0 && hi > lo && hi.is_finite()) {
                return Err(Error::Config(format!(
                    "range for {name} must satisfy 0 < lo < hi, got ({lo}, {hi})"
                )));
            }
        }
        Ok(())
    }
}

/// Default budget for `n` stages: every path at 2 bits.
pub fn default_budget(n: usize) -> f64 {
    4.0 * n as f64
}

/// Draws a random instance, uniform per coefficient within `ranges`.
/// Deterministic: the same seed yields a bit-identical instance.
pub fn generate_instance(seed: u64, n: usize, ranges: &CoeffRanges) -> Result<BitAllocInstance> {
    generate_instance_with(seed, n, ranges, default_budget(n), RewardPreset::Increasing)
}

pub fn generate_instance_with(
    seed: u64,
    n: usize,
    ranges: &CoeffRanges,
    p_b: f64,
    preset: RewardPreset,
) -> Result<BitAllocInstance> {
    if n == 0 {
        return Err(Error::Config("instance needs at least one stage".into()));
    }
    ranges.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |range: (f64, f64)| -> Vec<f64> {
        (0..n).map(|_| rng.gen_range(range.0..range.1)).collect()
    };
    let a = draw(ranges.a);
    let b = draw(ranges.b);
    let d = draw(ranges.d);
    let mut inst =
        BitAllocInstance::new(n, Alphabet::bits_1_to_4(), a, b, d, p_b, preset)?;
    inst.seed = Some(seed);
    Ok(inst)
}

/// The frozen eight-path instance used throughout the tests, the guide and
/// the benchmark tables. Coefficients are explicit so results reproduce
/// without the generator.
pub fn canonical_instance() -> BitAllocInstance {
    BitAllocInstance {
        n: 8,
        alphabet: Alphabet::bits_1_to_4(),
        a: vec![3.1, 2.2, 1.3, 1.15, 1.0, 0.95, 0.9, 0.85],
        b: vec![1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0],
        d: vec![2.0, 2.4, 2.0, 1.8, 1.6, 1.5, 1.4, 1.3],
        p_b: 32.0,
        reward_preset: RewardPreset::Increasing,
        seed: None,
    }
}
