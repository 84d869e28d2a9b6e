// Temporary diagnostics; deleted before the suite is finalized.
use iadp::baselines::exhaustive_search;
use iadp::bitalloc::{BitAllocInstance, RewardPreset};
use iadp::dist::{estimate_prior, PriorConfig};
use iadp::driver::{sweep, SweepConfig};
use iadp::prelude::*;
use iadp::problem::Alphabet;
use iadp::trellis::MetricVariant;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn gen(seed: u64, n: usize, decay: bool) -> BitAllocInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a: Vec<f64> = (0..n).map(|_| rng.gen_range(0.8_f64..3.0)).collect();
    if decay {
        a.sort_by(|x, y| y.partial_cmp(x).unwrap());
    }
    let b: Vec<f64> = (0..n).map(|_| rng.gen_range(0.7..1.3)).collect();
    let d: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..4.0)).collect();
    BitAllocInstance::new(n, Alphabet::bits_1_to_4(), a, b, d, 32.0, RewardPreset::Increasing)
        .unwrap()
}

#[test]
#[ignore]
fn grid_scan() {
    let seeds = 60u64;
    for decay in [true, false] {
        for metric in [MetricVariant::RowKl, MetricVariant::EdgeLogRatio] {
            for n1 in [1usize, 5, 15, 40, 150] {
                for eps in [None, Some(0.02), Some(0.1)] {
                    let mut va = 0usize;
                    for seed in 0..seeds {
                        let inst = gen(300 + seed, 8, decay);
                        let es = exhaustive_search(&inst).unwrap().best.unwrap();
                        let prior = estimate_prior(
                            &inst,
                            &PriorConfig {
                                k: 150,
                                n1,
                                seed: 4000 + seed,
                                smoothing: eps,
                                ..Default::default()
                            },
                        )
                        .unwrap();
                        let mut opts = SolveOptions::specific();
                        opts.metric = metric;
                        let out =
                            sweep(&inst, &prior, &opts, &SweepConfig::default()).unwrap();
                        if out.chosen.as_ref().map(|c| c.solution == es.0).unwrap_or(false) {
                            va += 1;
                        }
                    }
                    println!(
                        "decay={decay} metric={metric:?} n1={n1:<3} eps={eps:?}: va {:.3}",
                        va as f64 / seeds as f64
                    );
                }
            }
        }
    }
}
