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

fn gen_sorted(seed: u64, n: usize, ranges: &CoeffRanges, sort_a: bool) -> BitAllocInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |r: (f64, f64)| -> Vec<f64> { (0..n).map(|_| rng.gen_range(r.0..r.1)).collect() };
    let mut a = draw(ranges.a);
    let b = draw(ranges.b);
    let d = draw(ranges.d);
    if sort_a {
        a.sort_by(|x, y| y.partial_cmp(x).unwrap());
    }
    BitAllocInstance::new(n, Alphabet::bits_1_to_4(), a, b, d, 32.0, RewardPreset::Increasing)
        .unwrap()
}

fn match_rate(ranges: &CoeffRanges, sort_a: bool, k: usize, n1: usize, seeds: u64) -> (f64, f64) {
    let mut matches = 0usize;
    let mut feas = 0usize;
    let mut rel_gap = 0.0;
    for seed in 0..seeds {
        let inst = gen_sorted(1000 + seed, 8, ranges, sort_a);
        let es = exhaustive_search(&inst).unwrap().best.unwrap();
        let prior = estimate_prior(
            &inst,
            &PriorConfig { k, n1, seed: 77 + seed, ..Default::default() },
        )
        .unwrap();
        let out = sweep(&inst, &prior, &SolveOptions::specific(), &SweepConfig::default()).unwrap();
        if let Some(c) = &out.chosen {
            feas += 1;
            if c.solution == es.0 {
                matches += 1;
            }
            rel_gap += (es.1 - c.reward) / es.1;
        }
    }
    (matches as f64 / seeds as f64, rel_gap / feas.max(1) as f64)
}

#[test]
#[ignore]
fn scan_configs() {
    let base = CoeffRanges::default();
    let wide_a = CoeffRanges { a: (0.6, 3.4), ..base.clone() };
    for (name, ranges, sort_a, k, n1) in [
        ("default unsorted k150 n15", base.clone(), false, 150, 15),
        ("default sorted   k150 n15", base.clone(), true, 150, 15),
        ("default sorted   k150 n5 ", base.clone(), true, 150, 5),
        ("default sorted   k150 n30", base.clone(), true, 150, 30),
        ("wide-a  sorted   k150 n15", wide_a.clone(), true, 150, 15),
        ("default unsorted k150 n30", base.clone(), false, 150, 30),
        ("default unsorted k150 n5 ", base.clone(), false, 150, 5),
    ] {
        let (rate, gap) = match_rate(&ranges, sort_a, k, n1, 50);
        println!("{name}: match {rate:.2} mean-rel-gap {gap:.4}");
    }
}
