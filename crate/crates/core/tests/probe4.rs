// Temporary diagnostics; deleted before the suite is finalized.
use iadp::baselines::exhaustive_search;
use iadp::bitalloc::{BitAllocInstance, RewardPreset};
use iadp::builders::{sigmoid_conditional, SigmoidConditionalConfig};
use iadp::dist::{estimate_prior, kl_divergence, ConditionalModel, PriorConfig};
use iadp::driver::{sweep, SweepConfig};
use iadp::prelude::*;
use iadp::problem::Alphabet;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn gen_steep(seed: u64, n: usize) -> BitAllocInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amax: f64 = rng.gen_range(2.4..3.6);
    let rho: f64 = rng.gen_range(0.5..0.8);
    let a: Vec<f64> = (0..n)
        .map(|i| (amax * rho.powi(i as i32) * rng.gen_range(0.9..1.1)).max(0.05))
        .collect();
    let b: Vec<f64> = (0..n).map(|_| rng.gen_range(0.7..1.3)).collect();
    let d: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..4.0)).collect();
    BitAllocInstance::new(n, Alphabet::bits_1_to_4(), a, b, d, 32.0, RewardPreset::Increasing)
        .unwrap()
}

fn ordered_paths(n: usize, maxsym: i32) -> Vec<Path> {
    let mut out = Vec::new();
    fn rec(out: &mut Vec<Path>, cur: &mut Vec<i32>, n: usize, cap: i32) {
        if cur.len() == n {
            out.push(Path::from(cur.clone()));
            return;
        }
        for s in 1..=cap {
            cur.push(s);
            rec(out, cur, n, s);
            cur.pop();
        }
    }
    rec(&mut out, &mut Vec::new(), n, maxsym);
    out
}

fn path_cost(inst: &BitAllocInstance, prior: &ConditionalModel, path: &Path) -> (f64, f64) {
    let sigma0 = SigmoidConditionalConfig { sigma: 0.0, noise_seed: 0 };
    let idx: Vec<usize> =
        path.states().iter().map(|&s| inst.alphabet().index_of(s).unwrap()).collect();
    let mut cost = -prior.initial()[idx[0]].log2();
    for t in 0..path.len() - 1 {
        let row = sigmoid_conditional(inst, &path.prefix(t + 1), &sigma0).unwrap();
        cost += kl_divergence(&row.probs, prior.row(t, idx[t])).unwrap();
    }
    (cost, inst.reward(path).unwrap())
}

#[test]
#[ignore]
fn steep_scan() {
    let seeds = 60u64;
    for (name, n1) in [("n1=5", 5usize), ("n1=15", 15), ("n1=30", 30)] {
        let mut va_match = 0usize;
        let mut hull_match = 0usize;
        let mut opt_kinds = std::collections::HashMap::<String, usize>::new();
        for seed in 0..seeds {
            let inst = gen_steep(500 + seed, 8);
            let es = exhaustive_search(&inst).unwrap().best.unwrap();
            *opt_kinds.entry(es.0.to_string()).or_default() += 1;
            let prior = estimate_prior(
                &inst,
                &PriorConfig { k: 150, n1, seed: 9000 + seed, ..Default::default() },
            )
            .unwrap();
            // VA sweep.
            let out =
                sweep(&inst, &prior, &SolveOptions::specific(), &SweepConfig::default()).unwrap();
            if out.chosen.as_ref().map(|c| c.solution == es.0).unwrap_or(false) {
                va_match += 1;
            }
            // Exact hull over ordered paths: does any β pick the optimum?
            let all = ordered_paths(8, 4);
            let costs: Vec<(f64, f64, &Path)> =
                all.iter().map(|p| { let (c, r) = path_cost(&inst, &prior, p); (c, r, p) }).collect();
            let mut found = false;
            for i in 0..=1000 {
                let beta = i as f64 * 0.01;
                let best = costs
                    .iter()
                    .min_by(|x, y| (x.0 - beta * x.1).partial_cmp(&(y.0 - beta * y.1)).unwrap())
                    .unwrap();
                if *best.2 == es.0 {
                    found = true;
                    break;
                }
            }
            if found {
                hull_match += 1;
            }
        }
        println!(
            "{name}: va-match {:.2} hull-match {:.2}",
            va_match as f64 / seeds as f64,
            hull_match as f64 / seeds as f64
        );
        let mut kinds: Vec<_> = opt_kinds.into_iter().collect();
        kinds.sort_by_key(|(_, c)| std::cmp::Reverse(*c));
        for (k, c) in kinds.iter().take(6) {
            println!("   opt {k}: {c}");
        }
    }
}
