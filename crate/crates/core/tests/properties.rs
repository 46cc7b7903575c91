//! Property tests over randomly generated networks and graphs.

use std::collections::BTreeSet;

use proptest::prelude::*;
use wcutset_core::exact::all_marginals;
use wcutset_core::format::{parse_network, serialize_network};
use wcutset_core::graph::{induced_width, min_fill_ordering, Ordering, UGraph};
use wcutset_core::metrics::sample_variance;
use wcutset_core::model::{Assignment, VarId};
use wcutset_core::sampling::{cutset_estimate, Cutset, SamplerConfig};
use wcutset_core::wcutset::{select, Method};
use wcutset_testkit as tk;

fn permute_graph(g: &UGraph, perm: &[usize]) -> UGraph {
    let mut out = UGraph::new(g.num_nodes());
    for (u, v) in g.edges() {
        out.add_edge(perm[u], perm[v]);
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn induced_width_invariant_under_relabeling(
        seed in 0u64..10_000,
        perm_seed in 0u64..10_000,
    ) {
        let net = tk::random_net(7, 3, seed);
        let g = wcutset_core::graph::moralize(&net, &BTreeSet::new());
        let o = min_fill_ordering(&g);

        // Derive a permutation from perm_seed by sorting keyed hashes.
        let n = g.num_nodes();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.sort_by_key(|&i| (i as u64).wrapping_mul(2654435761).wrapping_add(perm_seed).wrapping_mul(40503) % 1009);
        let h = permute_graph(&g, &perm);
        let o2 = Ordering {
            sequence: o.sequence.iter().map(|&v| perm[v]).collect(),
            width: 0,
        };
        prop_assert_eq!(induced_width(&g, &o), induced_width(&h, &o2));
    }

    #[test]
    fn joint_invariant_to_cpt_iteration_order(seed in 0u64..10_000) {
        // The joint is a product over families, so evaluating via the
        // reversed variable iteration must give the same number.
        let net = tk::random_net(8, 3, seed);
        let mut values = vec![0usize; 8];
        let mut s = seed;
        for v in values.iter_mut() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1);
            *v = (s >> 33) as usize % 2;
        }
        let a = Assignment::full(values.clone());
        let forward = net.joint_probability(&a).unwrap();
        let mut backward = 1.0;
        for v in net.vars().collect::<Vec<_>>().into_iter().rev() {
            let cpt = net.cpt(v);
            let row = cpt.row(net.cards(), |u| values[u.0]);
            backward *= row[values[v.0]];
        }
        prop_assert!((forward - backward).abs() < 1e-12);
    }

    #[test]
    fn exact_distributions_normalized(seed in 0u64..10_000) {
        let net = tk::random_net(9, 3, seed);
        let e = tk::random_evidence(&net, 2, seed ^ 0x9e3779b9);
        for d in all_marginals(&net, &e).unwrap().values() {
            prop_assert!(d.is_normalized());
        }
    }

    #[test]
    fn format_round_trip_structural_equality(seed in 0u64..10_000) {
        let net = tk::random_net(10, 3, seed);
        let text = serialize_network(&net);
        let again = parse_network(&text).unwrap();
        prop_assert_eq!(again.num_vars(), net.num_vars());
        for v in net.vars() {
            prop_assert_eq!(again.name(v), net.name(v));
            prop_assert_eq!(again.card(v), net.card(v));
            prop_assert_eq!(&again.cpt(v).parents, &net.cpt(v).parents);
            prop_assert_eq!(&again.cpt(v).rows, &net.cpt(v).rows);
        }
        // Serialization is a fixed point.
        prop_assert_eq!(serialize_network(&again), text);
    }

    #[test]
    fn running_sum_variance_matches_two_pass(
        xs in prop::collection::vec(0.0f64..1.0, 2..20),
    ) {
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let two_pass = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>()
            / (xs.len() as f64 - 1.0);
        let got = sample_variance(&xs).unwrap();
        prop_assert!((got - two_pass).abs() < 1e-12);
    }

    #[test]
    fn selector_cutsets_respect_bound(seed in 0u64..2_000, w in 1usize..4) {
        let net = tk::random_net(12, 3, seed);
        let e = tk::random_evidence(&net, 2, seed ^ 0x5bd1e995);
        for method in [Method::Ga, Method::Mg, Method::Hg] {
            let r = select(&net, &e, method, w).unwrap();
            prop_assert!(
                r.cutset.measured_width <= w,
                "{} produced width {} > {}", method, r.cutset.measured_width, w
            );
            for m in &r.cutset.members {
                prop_assert!(!e.contains(*m));
            }
        }
    }

    #[test]
    fn sampler_estimates_normalized(seed in 0u64..2_000) {
        let net = tk::random_net(8, 2, seed);
        let e = tk::random_evidence(&net, 1, seed ^ 0xabcdef);
        let members: Vec<VarId> = net
            .vars()
            .filter(|v| !e.contains(*v))
            .take(2)
            .collect();
        let cutset = Cutset { members, w_bound: 0, measured_width: 0 };
        let config = SamplerConfig::new(2, 5, seed);
        let est = cutset_estimate(&net, &cutset, &e, &config).unwrap();
        for chain in est.per_chain.iter().chain(std::iter::once(&est.pooled)) {
            for d in chain.values() {
                prop_assert!(d.is_normalized());
            }
        }
        // Every unobserved variable is estimated.
        prop_assert_eq!(est.pooled.len(), net.num_vars() - e.len());
    }
}

#[test]
fn evidence_round_trip_through_files() {
    let net = tk::random_net(10, 3, 99);
    let e = tk::random_evidence(&net, 4, 5);
    let text = wcutset_core::format::serialize_evidence(&e, &net);
    let again = wcutset_core::format::parse_evidence(&text, &net).unwrap();
    assert_eq!(
        e.iter().collect::<Vec<_>>(),
        again.iter().collect::<Vec<_>>()
    );
}
