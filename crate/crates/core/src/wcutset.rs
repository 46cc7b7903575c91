//! Greedy w-cutset selection.
//!
//! All three schemes start from the full sampling set C = X \ E and remove
//! nodes one at a time, keeping a removal only if the min-fill width estimate
//! of the remaining problem stays within the bound. They differ in the order
//! candidates are attempted:
//!
//! * GA — topological order, single pass at the target bound.
//! * MG — repeated GA-style passes with the bound raised 1, 2, ..., w, so
//!   each (w+1)-cutset is a subset of the w-cutset.
//! * HG — candidates ordered by ascending Markov-blanket size, keeping
//!   high-impact nodes in the cutset.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use crate::graph::adjusted_width;
use crate::model::{BayesNet, Evidence, ModelError, VarId};
use crate::sampling::Cutset;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Ga,
    Mg,
    Hg,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Ga => "ga",
            Method::Mg => "mg",
            Method::Hg => "hg",
        })
    }
}

/// Outcome of a selection run.
#[derive(Clone, Debug)]
pub struct SelectionReport {
    pub method: Method,
    pub w_bound: usize,
    pub cutset: Cutset,
    /// Width estimate after each accepted removal.
    pub width_trace: Vec<usize>,
    pub elapsed: Duration,
}

fn evidence_set(e: &Evidence) -> BTreeSet<VarId> {
    e.vars().collect()
}

/// Single accept/reject pass over `candidates`: a node is removed from the
/// sampling set iff the width estimate without it stays within `w`.
/// The width is re-evaluated after every accepted removal.
fn greedy_pass(
    net: &BayesNet,
    e_vars: &BTreeSet<VarId>,
    members: &mut Vec<VarId>,
    candidates: &[VarId],
    w: usize,
    trace: &mut Vec<usize>,
) {
    for &c in candidates {
        let Some(idx) = members.iter().position(|&m| m == c) else {
            continue;
        };
        let tentative: BTreeSet<VarId> = members
            .iter()
            .copied()
            .filter(|&m| m != c)
            .collect();
        let width = adjusted_width(net, &tentative, e_vars);
        if width <= w {
            members.remove(idx);
            trace.push(width);
        }
    }
}

fn finish(
    net: &BayesNet,
    e_vars: &BTreeSet<VarId>,
    method: Method,
    w: usize,
    members: Vec<VarId>,
    trace: Vec<usize>,
    start: Instant,
) -> SelectionReport {
    let member_set: BTreeSet<VarId> = members.iter().copied().collect();
    let measured = adjusted_width(net, &member_set, e_vars);
    SelectionReport {
        method,
        w_bound: w,
        cutset: Cutset {
            members,
            w_bound: w,
            measured_width: measured,
        },
        width_trace: trace,
        elapsed: start.elapsed(),
    }
}

/// Greedy Algorithm: one pass in topological order.
pub fn select_ga(net: &BayesNet, e: &Evidence, w: usize) -> Result<SelectionReport, ModelError> {
    let start = Instant::now();
    let e_vars = evidence_set(e);
    let topo: Vec<VarId> = net
        .topological_order()?
        .into_iter()
        .filter(|v| !e_vars.contains(v))
        .collect();
    let mut members = topo.clone();
    let mut trace = Vec::new();
    greedy_pass(net, &e_vars, &mut members, &topo, w, &mut trace);
    Ok(finish(net, &e_vars, Method::Ga, w, members, trace, start))
}

/// Monotonous Greedy: derive the k-cutset from the (k-1)-cutset for
/// k = 1..w, guaranteeing the subset chain across bounds.
pub fn select_mg(net: &BayesNet, e: &Evidence, w: usize) -> Result<SelectionReport, ModelError> {
    assert!(w >= 1, "MG is defined for w >= 1");
    let start = Instant::now();
    let e_vars = evidence_set(e);
    let topo: Vec<VarId> = net
        .topological_order()?
        .into_iter()
        .filter(|v| !e_vars.contains(v))
        .collect();
    let mut members = topo.clone();
    let mut trace = Vec::new();
    for k in 1..=w {
        let candidates = members.clone();
        greedy_pass(net, &e_vars, &mut members, &candidates, k, &mut trace);
    }
    Ok(finish(net, &e_vars, Method::Mg, w, members, trace, start))
}

/// Heuristic Greedy: one pass with candidates in ascending Markov-blanket
/// size (ties by index), so low-impact nodes are attempted first and nodes
/// whose instantiation would shrink many tables stay in the cutset.
pub fn select_hg(net: &BayesNet, e: &Evidence, w: usize) -> Result<SelectionReport, ModelError> {
    let start = Instant::now();
    let e_vars = evidence_set(e);
    let mut candidates: Vec<VarId> = net
        .vars()
        .filter(|v| !e_vars.contains(v))
        .collect();
    candidates.sort_by_key(|&v| (net.markov_blanket(v).len(), v.0));
    let topo: Vec<VarId> = net
        .topological_order()?
        .into_iter()
        .filter(|v| !e_vars.contains(v))
        .collect();
    let mut members = topo;
    let mut trace = Vec::new();
    greedy_pass(net, &e_vars, &mut members, &candidates, w, &mut trace);
    Ok(finish(net, &e_vars, Method::Hg, w, members, trace, start))
}

pub fn select(
    net: &BayesNet,
    e: &Evidence,
    method: Method,
    w: usize,
) -> Result<SelectionReport, ModelError> {
    match method {
        Method::Ga => select_ga(net, e, w),
        Method::Mg => select_mg(net, e, w),
        Method::Hg => select_hg(net, e, w),
    }
}
