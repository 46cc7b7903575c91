//! Structural machinery: moral graphs, elimination orderings, induced-width
//! estimation and loop-cutset search.
//!
//! "Width" throughout the crate means the min-fill estimate of the induced
//! width, not exact treewidth; a single estimator keeps every width-bound
//! check internally consistent.

use std::collections::BTreeSet;

use crate::model::{BayesNet, VarId};

/// Undirected graph over a fixed node set. Removed nodes are kept as
/// isolated vertices so indices stay stable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UGraph {
    adj: Vec<BTreeSet<usize>>,
}

impl UGraph {
    pub fn new(n: usize) -> Self {
        UGraph {
            adj: vec![BTreeSet::new(); n],
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.adj.len()
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        if u != v {
            self.adj[u].insert(v);
            self.adj[v].insert(u);
        }
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(&v)
    }

    pub fn neighbors(&self, u: usize) -> &BTreeSet<usize> {
        &self.adj[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].len()
    }

    pub fn remove_node(&mut self, u: usize) {
        let nbrs: Vec<usize> = self.adj[u].iter().copied().collect();
        for v in nbrs {
            self.adj[v].remove(&u);
        }
        self.adj[u].clear();
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.adj.len() {
            for &v in &self.adj[u] {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(|s| s.len()).sum::<usize>() / 2
    }
}

/// A node ordering together with its induced width.
#[derive(Clone, Debug)]
pub struct Ordering {
    /// Permutation of node indices; induced width is measured processing the
    /// sequence last-to-first.
    pub sequence: Vec<usize>,
    pub width: usize,
}

/// Moral graph of `net` with the nodes in `removed` deleted.
///
/// Moral edges are created from the full network first (every family is
/// married), then removed nodes lose all incident edges. The removed nodes
/// remain as isolated vertices.
pub fn moralize(net: &BayesNet, removed: &BTreeSet<VarId>) -> UGraph {
    let mut g = UGraph::new(net.num_vars());
    for v in net.vars() {
        let ps = net.parents(v);
        for &p in ps {
            g.add_edge(v.0, p.0);
        }
        for i in 0..ps.len() {
            for j in i + 1..ps.len() {
                g.add_edge(ps[i].0, ps[j].0);
            }
        }
    }
    for &v in removed {
        g.remove_node(v.0);
    }
    g
}

/// Induced width of `g` under ordering `o`: process nodes last to first,
/// connect each node's earlier neighbors, return the maximum count seen.
pub fn induced_width(g: &UGraph, o: &Ordering) -> usize {
    let n = g.num_nodes();
    assert_eq!(o.sequence.len(), n, "ordering must permute all nodes");
    let mut pos = vec![0usize; n];
    for (k, &v) in o.sequence.iter().enumerate() {
        pos[v] = k;
    }
    let mut work = g.clone();
    let mut width = 0;
    for k in (0..n).rev() {
        let v = o.sequence[k];
        let earlier: Vec<usize> = work
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&u| pos[u] < k)
            .collect();
        width = width.max(earlier.len());
        for i in 0..earlier.len() {
            for j in i + 1..earlier.len() {
                work.add_edge(earlier[i], earlier[j]);
            }
        }
        work.remove_node(v);
    }
    width
}

/// Min-fill elimination ordering.
///
/// Repeatedly eliminates the node adding the fewest fill edges; ties broken
/// by smaller current degree, then lower index. The returned sequence is
/// oriented so that [`induced_width`] reproduces the recorded width (the
/// first-eliminated node sits last in the sequence).
pub fn min_fill_ordering(g: &UGraph) -> Ordering {
    let n = g.num_nodes();
    let mut work = g.clone();
    let mut remaining: BTreeSet<usize> = (0..n).collect();
    let mut elim = Vec::with_capacity(n);
    let mut width = 0;

    while !remaining.is_empty() {
        let mut best: Option<(usize, usize, usize)> = None; // (fill, degree, node)
        for &v in &remaining {
            let nbrs: Vec<usize> = work.neighbors(v).iter().copied().collect();
            let mut fill = 0;
            for i in 0..nbrs.len() {
                for j in i + 1..nbrs.len() {
                    if !work.has_edge(nbrs[i], nbrs[j]) {
                        fill += 1;
                    }
                }
            }
            let key = (fill, nbrs.len(), v);
            if best.map_or(true, |b| key < b) {
                best = Some(key);
            }
        }
        let (_, _, v) = best.unwrap();
        let nbrs: Vec<usize> = work.neighbors(v).iter().copied().collect();
        width = width.max(nbrs.len());
        for i in 0..nbrs.len() {
            for j in i + 1..nbrs.len() {
                work.add_edge(nbrs[i], nbrs[j]);
            }
        }
        work.remove_node(v);
        remaining.remove(&v);
        elim.push(v);
    }

    elim.reverse();
    Ordering {
        sequence: elim,
        width,
    }
}

/// Min-fill estimate of the adjusted induced width of `net` relative to
/// `cutset` and `evidence_vars`: the width of the moral graph with both sets
/// removed.
pub fn adjusted_width(
    net: &BayesNet,
    cutset: &BTreeSet<VarId>,
    evidence_vars: &BTreeSet<VarId>,
) -> usize {
    debug_assert!(cutset.is_disjoint(evidence_vars));
    let removed: BTreeSet<VarId> = cutset.union(evidence_vars).copied().collect();
    min_fill_ordering(&moralize(net, &removed)).width
}

/// Undirected skeleton of the DAG (parent-child edges only, no moral edges).
pub fn skeleton(net: &BayesNet) -> UGraph {
    let mut g = UGraph::new(net.num_vars());
    for v in net.vars() {
        for &p in net.parents(v) {
            g.add_edge(v.0, p.0);
        }
    }
    g
}

/// Whether the graph is acyclic as an undirected graph (a forest).
pub fn is_forest(g: &UGraph) -> bool {
    let n = g.num_nodes();
    let mut seen = vec![false; n];
    for start in 0..n {
        if seen[start] {
            continue;
        }
        // BFS counting nodes and edges per component.
        let mut stack = vec![start];
        seen[start] = true;
        let mut nodes = 0usize;
        let mut edge_ends = 0usize;
        while let Some(u) = stack.pop() {
            nodes += 1;
            edge_ends += g.degree(u);
            for &v in g.neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        if edge_ends / 2 >= nodes {
            return false;
        }
    }
    true
}

/// Loop cutset: a set of variables whose removal makes the DAG's undirected
/// skeleton acyclic (the remainder is a polytree).
///
/// Deterministic greedy heuristic: while a cycle exists, remove the node
/// with maximum skeleton degree among nodes lying on some cycle (the 2-core),
/// ties broken by lower index.
pub fn loop_cutset(net: &BayesNet) -> BTreeSet<VarId> {
    let mut g = skeleton(net);
    let mut cutset = BTreeSet::new();
    loop {
        let core = two_core(&g);
        if core.is_empty() {
            break;
        }
        let v = core
            .iter()
            .copied()
            .max_by_key(|&v| (g.degree(v), std::cmp::Reverse(v)))
            .unwrap();
        g.remove_node(v);
        cutset.insert(VarId(v));
    }
    debug_assert!(is_forest(&g));
    cutset
}

/// Nodes of the 2-core: iteratively strip nodes of degree <= 1.
fn two_core(g: &UGraph) -> BTreeSet<usize> {
    let n = g.num_nodes();
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut alive: Vec<bool> = deg.iter().map(|&d| d > 0).collect();
    let mut queue: Vec<usize> = (0..n).filter(|&v| alive[v] && deg[v] <= 1).collect();
    while let Some(v) = queue.pop() {
        if !alive[v] {
            continue;
        }
        alive[v] = false;
        for &u in g.neighbors(v) {
            if alive[u] {
                deg[u] -= 1;
                if deg[u] <= 1 {
                    queue.push(u);
                }
            }
        }
    }
    (0..n).filter(|&v| alive[v]).collect()
}
