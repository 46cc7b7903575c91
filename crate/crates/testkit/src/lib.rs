//! Test-only oracles and fixtures shared across the workspace's test targets.
//!
//! Everything here is deliberately brute-force: posterior marginals by full
//! joint enumeration, treewidth by trying every elimination ordering. The
//! main crates must agree with these on small instances.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wcutset_core::graph::{induced_width, Ordering, UGraph};
use wcutset_core::model::{Assignment, BayesNet, Cpt, Evidence, VarId};
use wcutset_core::Distribution;

/// Iterate all full assignments of `net` (last variable fastest) and hand
/// each one with its joint probability to `f`.
pub fn for_each_assignment(net: &BayesNet, mut f: impl FnMut(&[usize], f64)) {
    let n = net.num_vars();
    let cards: Vec<usize> = net.cards().to_vec();
    let total: usize = cards.iter().product();
    let mut values = vec![0usize; n];
    for _ in 0..total {
        let a = Assignment::full(values.clone());
        let p = net.joint_probability(&a).unwrap();
        f(&values, p);
        for j in (0..n).rev() {
            values[j] += 1;
            if values[j] < cards[j] {
                break;
            }
            values[j] = 0;
        }
    }
}

fn consistent(values: &[usize], e: &Evidence) -> bool {
    e.iter().all(|(v, val)| values[v.0] == val)
}

/// P(e) by summing the joint over every consistent full assignment.
pub fn enum_evidence_prob(net: &BayesNet, e: &Evidence) -> f64 {
    let mut total = 0.0;
    for_each_assignment(net, |values, p| {
        if consistent(values, e) {
            total += p;
        }
    });
    total
}

/// Posterior marginals P(x | e) for every unobserved variable, by
/// enumeration. Panics if P(e) = 0.
pub fn enum_marginals(net: &BayesNet, e: &Evidence) -> BTreeMap<VarId, Distribution> {
    let mut weights: BTreeMap<VarId, Vec<f64>> = net
        .vars()
        .filter(|v| !e.contains(*v))
        .map(|v| (v, vec![0.0; net.card(v)]))
        .collect();
    let mut z = 0.0;
    for_each_assignment(net, |values, p| {
        if consistent(values, e) {
            z += p;
            for (v, w) in weights.iter_mut() {
                w[values[v.0]] += p;
            }
        }
    });
    assert!(z > 0.0, "evidence has zero probability");
    weights
        .into_iter()
        .map(|(v, w)| {
            (
                v,
                Distribution::from_weights(v, w).expect("nonzero weights"),
            )
        })
        .collect()
}

/// True treewidth by exhausting every elimination ordering. Factorial cost;
/// keep graphs at 8 nodes or fewer.
pub fn exact_treewidth(g: &UGraph) -> usize {
    let n = g.num_nodes();
    assert!(n <= 8, "exhaustive treewidth is factorial; {n} nodes is too many");
    if n == 0 {
        return 0;
    }
    let mut best = usize::MAX;
    let mut perm: Vec<usize> = (0..n).collect();
    permute(&mut perm, 0, &mut |seq| {
        let o = Ordering {
            sequence: seq.to_vec(),
            width: 0,
        };
        let w = induced_width(g, &o);
        if w < best {
            best = w;
        }
    });
    best
}

fn permute(xs: &mut [usize], k: usize, f: &mut impl FnMut(&[usize])) {
    if k == xs.len() {
        f(xs);
        return;
    }
    for i in k..xs.len() {
        xs.swap(k, i);
        permute(xs, k + 1, f);
        xs.swap(k, i);
    }
}

/// The three-variable chain used throughout the test suites:
/// X1 -> X2 -> X3, all binary, with P(X1=1)=0.6, P(X2=1|X1)=0.2/0.7,
/// P(X3=1|X2)=0.1/0.9.
pub fn chain3() -> BayesNet {
    BayesNet::new(
        vec!["X1".into(), "X2".into(), "X3".into()],
        vec![2, 2, 2],
        vec![
            Cpt {
                child: VarId(0),
                parents: vec![],
                rows: vec![vec![0.4, 0.6]],
            },
            Cpt {
                child: VarId(1),
                parents: vec![VarId(0)],
                rows: vec![vec![0.8, 0.2], vec![0.3, 0.7]],
            },
            Cpt {
                child: VarId(2),
                parents: vec![VarId(1)],
                rows: vec![vec![0.9, 0.1], vec![0.1, 0.9]],
            },
        ],
    )
    .unwrap()
}

fn random_row(rng: &mut ChaCha8Rng, card: usize) -> Vec<f64> {
    // Keep entries away from zero so every evidence choice has P(e) > 0.
    let mut row: Vec<f64> = (0..card).map(|_| 0.05 + rng.random::<f64>()).collect();
    let s: f64 = row.iter().sum();
    for x in row.iter_mut() {
        *x /= s;
    }
    row
}

/// Diamond A -> {B, C} -> D with seeded random strictly-positive CPTs.
pub fn diamond(seed: u64) -> BayesNet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let structure: [(usize, Vec<usize>); 4] =
        [(0, vec![]), (1, vec![0]), (2, vec![0]), (3, vec![1, 2])];
    let cpts = structure
        .into_iter()
        .map(|(child, parents)| {
            let rows = 1usize << parents.len();
            Cpt {
                child: VarId(child),
                parents: parents.into_iter().map(VarId).collect(),
                rows: (0..rows).map(|_| random_row(&mut rng, 2)).collect(),
            }
        })
        .collect();
    BayesNet::new(
        vec!["A".into(), "B".into(), "C".into(), "D".into()],
        vec![2; 4],
        cpts,
    )
    .unwrap()
}

/// Random binary DAG on `n` variables: each variable draws up to
/// `max_parents` parents from its predecessors, CPT rows strictly positive.
pub fn random_net(n: usize, max_parents: usize, seed: u64) -> BayesNet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cpts = Vec::with_capacity(n);
    for i in 0..n {
        let limit = max_parents.min(i);
        let k = if limit == 0 {
            0
        } else {
            rng.random_range(0..=limit)
        };
        let parents: Vec<VarId> = rand::seq::index::sample(&mut rng, i, k)
            .into_iter()
            .map(VarId)
            .collect();
        let mut parents = parents;
        parents.sort();
        let rows = 1usize << parents.len();
        cpts.push(Cpt {
            child: VarId(i),
            parents,
            rows: (0..rows).map(|_| random_row(&mut rng, 2)).collect(),
        });
    }
    BayesNet::new(
        (0..n).map(|i| format!("V{i}")).collect(),
        vec![2; n],
        cpts,
    )
    .unwrap()
}

/// Random evidence on up to `count` distinct variables. CPTs from this
/// module are strictly positive, so any value combination has P(e) > 0.
pub fn random_evidence(net: &BayesNet, count: usize, seed: u64) -> Evidence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = count.min(net.num_vars());
    let mut e = Evidence::new();
    for idx in rand::seq::index::sample(&mut rng, net.num_vars(), count) {
        let v = VarId(idx);
        e.set(v, rng.random_range(0..net.card(v)));
    }
    e
}
