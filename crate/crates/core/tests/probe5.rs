// Temporary diagnostics; deleted before the suite is finalized.
use iadp::baselines::exhaustive_search;
use iadp::bitalloc::{BitAllocInstance, CoeffRanges, RewardPreset};
use iadp::dist::{estimate_prior, PriorConfig};
use iadp::driver::{sweep, SweepConfig};
use iadp::prelude::*;
use iadp::problem::Alphabet;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn gen(seed: u64, n: usize, steep: bool) -> BitAllocInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a: Vec<f64> = if steep {
        let amax: f64 = rng.gen_range(2.4..3.6);
        let rho: f64 = rng.gen_range(0.45..0.75);
        (0..n).map(|i| (amax * rho.powi(i as i32) * rng.gen_range(0.9..1.1)).max(0.05)).collect()
    } else {
        let r = CoeffRanges::default();
        (0..n).map(|_| rng.gen_range(r.a.0..r.a.1)).collect()
    };
    let b: Vec<f64> = (0..n).map(|_| rng.gen_range(0.7..1.3)).collect();
    let d: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..4.0)).collect();
    BitAllocInstance::new(n, Alphabet::bits_1_to_4(), a, b, d, 32.0, RewardPreset::Increasing)
        .unwrap()
}

#[test]
#[ignore]
fn scan_flat_prior() {
    let seeds = 60u64;
    for steep in [false, true] {
        for (ename, eps) in [
            ("eps-default", None),
            ("eps 0.02", Some(0.02)),
            ("eps 0.05", Some(0.05)),
            ("eps 0.10", Some(0.10)),
            ("eps 0.25", Some(0.25)),
        ] {
            let mut va = 0usize;
            let mut structure = 0usize;
            for seed in 0..seeds {
                let inst = gen(300 + seed, 8, steep);
                let es = exhaustive_search(&inst).unwrap().best.unwrap();
                let prior = estimate_prior(
                    &inst,
                    &PriorConfig {
                        k: 150,
                        n1: 150,
                        seed: 4000 + seed,
                        smoothing: eps,
                        ..Default::default()
                    },
                )
                .unwrap();
                let out = sweep(&inst, &prior, &SolveOptions::specific(), &SweepConfig::default())
                    .unwrap();
                if out.chosen.as_ref().map(|c| c.solution == es.0).unwrap_or(false) {
                    va += 1;
                }
                // Table-style structure: >=3 intervals, first feasible with
                // slack, some middle feasible, last infeasible over budget.
                let ivs = &out.intervals;
                if ivs.len() >= 3 {
                    let first = &ivs[0];
                    let last = &ivs[ivs.len() - 1];
                    let mid_ok = ivs[1..ivs.len() - 1]
                        .iter()
                        .any(|iv| iv.feasible && inst.power(&iv.solution) <= 32.0);
                    if inst.power(&first.solution) < 32.0
                        && mid_ok
                        && inst.power(&last.solution) > 32.0
                        && !last.feasible
                    {
                        structure += 1;
                    }
                }
            }
            println!(
                "steep={steep} {ename}: va-match {:.2} structure {:.2}",
                va as f64 / seeds as f64,
                structure as f64 / seeds as f64
            );
        }
    }
}
