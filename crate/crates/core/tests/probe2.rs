// Temporary diagnostics; deleted before the suite is finalized.
use iadp::baselines::exhaustive_search;
use iadp::bitalloc::canonical_instance;
use iadp::builders::{sigmoid_conditional, SigmoidConditionalConfig};
use iadp::dist::{estimate_prior, kl_divergence, ConditionalModel, PriorConfig};
use iadp::prelude::*;

/// Metric pieces of one complete ordered path under the specific builder.
fn path_cost(
    inst: &BitAllocInstance,
    prior: &ConditionalModel,
    path: &Path,
    sigma0: &SigmoidConditionalConfig,
) -> (f64, f64, f64) {
    let m = inst.alphabet().len();
    let idx: Vec<usize> =
        path.states().iter().map(|&s| inst.alphabet().index_of(s).unwrap()).collect();
    let anchor = -prior.initial()[idx[0]].log2();
    let mut kl_total = 0.0;
    for t in 0..path.len() - 1 {
        let prefix = path.prefix(t + 1);
        let row = sigmoid_conditional(inst, &prefix, sigma0).unwrap();
        let q = prior.row(t, idx[t]);
        kl_total += kl_divergence(&row.probs, q).unwrap();
        let _ = m;
    }
    let reward = inst.reward(path).unwrap();
    (anchor, kl_total, reward)
}

fn ordered_paths(n: usize, maxsym: i32) -> Vec<Path> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
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
    rec(&mut out, &mut cur, n, maxsym);
    out
}

#[test]
#[ignore]
fn dump_path_economics() {
    let inst = canonical_instance();
    let prior = estimate_prior(&inst, &PriorConfig::with_seed(8)).unwrap();
    let sigma0 = SigmoidConditionalConfig { sigma: 0.0, noise_seed: 0 };
    let es = exhaustive_search(&inst).unwrap().best.unwrap();
    println!("ES opt {} reward {:.4}", es.0, es.1);

    // Cost decomposition of informative paths.
    for states in [
        vec![3, 1, 1, 1, 1, 1, 1, 1],
        vec![3, 3, 2, 2, 1, 1, 1, 1],
        vec![4, 2, 1, 1, 1, 1, 1, 1],
        vec![4, 4, 1, 1, 1, 1, 1, 1],
        vec![4, 4, 4, 4, 4, 4, 1, 1],
        vec![4, 4, 4, 4, 4, 4, 4, 4],
        vec![2, 2, 2, 2, 2, 2, 2, 2],
    ] {
        let p = Path::from(states);
        let (anchor, kl, reward) = path_cost(&inst, &prior, &p, &sigma0);
        println!(
            "{p}: anchor {anchor:6.3} kl {kl:7.3} total {:7.3} reward {reward:7.4} power {:5.0} feasible {}",
            anchor + kl,
            inst.power(&p),
            inst.csf(&p).unwrap()
        );
    }

    // Which ordered paths lie on the lower hull of (cost, reward)?
    // For β from 0..10, find the exact minimizer of cost − β·reward.
    let all = ordered_paths(8, 4);
    println!("ordered paths: {}", all.len());
    let costs: Vec<(f64, f64, &Path)> = all
        .iter()
        .map(|p| {
            let (a, k, r) = path_cost(&inst, &prior, p, &sigma0);
            (a + k, r, p)
        })
        .collect();
    let mut last: Option<String> = None;
    for i in 0..=1000 {
        let beta = i as f64 * 0.01;
        let best = costs
            .iter()
            .min_by(|x, y| {
                let mx = x.0 - beta * x.1;
                let my = y.0 - beta * y.1;
                mx.partial_cmp(&my).unwrap()
            })
            .unwrap();
        let tag = format!(
            "{} reward {:.4} power {:.0} feasible {}",
            best.2,
            best.1,
            inst.power(best.2),
            inst.csf(best.2).unwrap()
        );
        if last.as_deref() != Some(&tag) {
            println!("beta {beta:5.2}: {tag}");
            last = Some(tag);
        }
    }
}
