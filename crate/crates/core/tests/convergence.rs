//! Statistical convergence checks for the two samplers. These compare MSE at
//! small and large sample counts across a battery of seeds; individual seeds
//! may fluctuate, the battery-level counts are what is asserted.

use std::collections::BTreeMap;

use wcutset_core::exact::{all_marginals, Distribution};
use wcutset_core::graph::loop_cutset;
use wcutset_core::metrics::mse;
use wcutset_core::model::{BayesNet, Evidence, VarId};
use wcutset_core::sampling::{cutset_estimate, gibbs_estimate, Cutset, SamplerConfig};
use wcutset_testkit as tk;

fn restrict(
    m: &BTreeMap<VarId, Distribution>,
    keys: &BTreeMap<VarId, Distribution>,
) -> BTreeMap<VarId, Distribution> {
    m.iter()
        .filter(|(v, _)| keys.contains_key(v))
        .map(|(v, d)| (*v, d.clone()))
        .collect()
}

fn gibbs_mse(net: &BayesNet, e: &Evidence, t: usize, seed: u64) -> f64 {
    let exact = all_marginals(net, e).unwrap();
    let config = SamplerConfig::new(1, t, seed);
    let est = gibbs_estimate(net, e, &config).unwrap();
    mse(&exact, &restrict(&est.pooled, &exact)).unwrap()
}

fn cutset_mse(net: &BayesNet, e: &Evidence, cutset: &Cutset, t: usize, seed: u64) -> f64 {
    let exact = all_marginals(net, e).unwrap();
    let config = SamplerConfig::new(1, t, seed);
    let est = cutset_estimate(net, cutset, e, &config).unwrap();
    mse(&exact, &restrict(&est.pooled, &exact)).unwrap()
}

fn loop_cutset_of(net: &BayesNet, e: &Evidence) -> Cutset {
    let members: Vec<VarId> = loop_cutset(net)
        .into_iter()
        .filter(|v| !e.contains(*v))
        .collect();
    Cutset {
        members,
        w_bound: 1,
        measured_width: 0,
    }
}

#[test]
fn more_samples_reduce_gibbs_error() {
    // 30 seeded trials on 10-node ergodic nets; T=50_000 must beat T=500 in
    // at least 28.
    let mut wins = 0;
    for seed in 0..30u64 {
        let net = tk::random_net(10, 2, seed + 100);
        let e = tk::random_evidence(&net, 2, seed + 200);
        let small = gibbs_mse(&net, &e, 500, seed);
        let large = gibbs_mse(&net, &e, 50_000, seed);
        if large < small {
            wins += 1;
        }
    }
    assert!(wins >= 28, "gibbs improved in only {wins}/30 trials");
}

#[test]
fn more_samples_reduce_cutset_error() {
    let mut wins = 0;
    for seed in 0..30u64 {
        let net = tk::random_net(10, 2, seed + 100);
        let e = tk::random_evidence(&net, 2, seed + 200);
        let cutset = loop_cutset_of(&net, &e);
        if cutset.members.is_empty() {
            // Exact in one step; counts as converged.
            wins += 1;
            continue;
        }
        let small = cutset_mse(&net, &e, &cutset, 500, seed);
        let large = cutset_mse(&net, &e, &cutset, 50_000, seed);
        if large < small {
            wins += 1;
        }
    }
    assert!(wins >= 28, "cutset sampling improved in only {wins}/30 trials");
}

#[test]
fn cutset_sampling_beats_gibbs_on_average() {
    // Variance-reduction trend: mean MSE of loop-cutset sampling over 30
    // seeds at equal T is no worse than Gibbs on a 15-node ergodic net.
    let mut gibbs_total = 0.0;
    let mut cutset_total = 0.0;
    for seed in 0..30u64 {
        let net = tk::random_net(15, 2, 4242);
        let e = tk::random_evidence(&net, 2, 17);
        let cutset = loop_cutset_of(&net, &e);
        gibbs_total += gibbs_mse(&net, &e, 2_000, seed);
        cutset_total += cutset_mse(&net, &e, &cutset, 2_000, seed);
    }
    assert!(
        cutset_total <= gibbs_total,
        "mean MSE: cutset {} vs gibbs {}",
        cutset_total / 30.0,
        gibbs_total / 30.0
    );
}

#[test]
fn determinism_across_identical_runs() {
    let net = tk::random_net(10, 2, 7);
    let e = tk::random_evidence(&net, 2, 8);
    let cutset = loop_cutset_of(&net, &e);
    let config = SamplerConfig::new(3, 50, 123);
    let a = cutset_estimate(&net, &cutset, &e, &config).unwrap();
    let b = cutset_estimate(&net, &cutset, &e, &config).unwrap();
    for (ca, cb) in a.per_chain.iter().zip(&b.per_chain) {
        for (v, d) in ca {
            assert_eq!(d.probs, cb[v].probs);
        }
    }
    let g1 = gibbs_estimate(&net, &e, &config).unwrap();
    let g2 = gibbs_estimate(&net, &e, &config).unwrap();
    for (v, d) in &g1.pooled {
        assert_eq!(d.probs, g2.pooled[v].probs);
    }
}
