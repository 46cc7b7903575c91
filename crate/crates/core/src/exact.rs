//! Factor algebra and bucket elimination: the exact-inference primitive used
//! both as a standalone oracle and inside cutset sampling.
//!
//! Evidence is handled by slicing: observed variables are removed from factor
//! scopes before elimination, so the cost of a query is governed by the
//! adjusted induced width of the remaining graph.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use thiserror::Error;

use crate::graph::{min_fill_ordering, moralize};
use crate::model::{BayesNet, Evidence, VarId, NORM_TOL};

/// Refuse elimination when the estimated induced width exceeds this bound.
pub const DEFAULT_WIDTH_CAP: usize = 25;

#[derive(Debug, Error)]
pub enum ExactError {
    #[error("evidence has probability zero")]
    ZeroEvidence,
    #[error("estimated induced width {width} exceeds cap {cap}")]
    WidthGuard { width: usize, cap: usize },
    #[error("variable {0} is not in the factor's scope")]
    NotInScope(usize),
    #[error("query variable {0} is observed")]
    QueryObserved(usize),
    #[error("invalid evidence: {0}")]
    BadEvidence(#[from] crate::model::ModelError),
}

/// Nonnegative real-valued table over an ordered variable scope.
///
/// Entries are indexed with the last scope variable varying fastest, matching
/// the CPT row layout.
#[derive(Clone, Debug, PartialEq)]
pub struct Factor {
    pub scope: Vec<VarId>,
    pub cards: Vec<usize>,
    pub table: Vec<f64>,
}

impl Factor {
    pub fn new(scope: Vec<VarId>, cards: Vec<usize>, table: Vec<f64>) -> Self {
        debug_assert_eq!(scope.len(), cards.len());
        debug_assert_eq!(table.len(), cards.iter().product::<usize>());
        Factor {
            scope,
            cards,
            table,
        }
    }

    pub fn scalar(value: f64) -> Self {
        Factor {
            scope: vec![],
            cards: vec![],
            table: vec![value],
        }
    }

    /// CPT of `v` as a factor with scope `parents ++ [child]`; the flattened
    /// row layout is already in factor order.
    pub fn from_cpt(net: &BayesNet, v: VarId) -> Self {
        let cpt = net.cpt(v);
        let mut scope: Vec<VarId> = cpt.parents.clone();
        scope.push(v);
        let cards: Vec<usize> = scope.iter().map(|&u| net.card(u)).collect();
        let table: Vec<f64> = cpt.rows.iter().flatten().copied().collect();
        Factor::new(scope, cards, table)
    }

    pub fn is_scalar(&self) -> bool {
        self.scope.is_empty()
    }

    fn position(&self, v: VarId) -> Option<usize> {
        self.scope.iter().position(|&u| u == v)
    }

    /// Pointwise product over the union of scopes.
    pub fn product(&self, other: &Factor) -> Factor {
        let mut scope = self.scope.clone();
        let mut cards = self.cards.clone();
        for (i, &v) in other.scope.iter().enumerate() {
            if !scope.contains(&v) {
                scope.push(v);
                cards.push(other.cards[i]);
            }
        }
        let size: usize = cards.iter().product();
        // Strides of each result position into self and other.
        let self_strides = strides_into(&scope, &cards, &self.scope, &self.cards);
        let other_strides = strides_into(&scope, &cards, &other.scope, &other.cards);
        let mut table = vec![0.0; size];
        let mut idx = vec![0usize; scope.len()];
        let mut si = 0usize;
        let mut oi = 0usize;
        for slot in table.iter_mut() {
            *slot = self.table[si] * other.table[oi];
            // Odometer increment, last position fastest.
            for k in (0..scope.len()).rev() {
                idx[k] += 1;
                si += self_strides[k];
                oi += other_strides[k];
                if idx[k] < cards[k] {
                    break;
                }
                si -= self_strides[k] * cards[k];
                oi -= other_strides[k] * cards[k];
                idx[k] = 0;
            }
        }
        Factor::new(scope, cards, table)
    }

    /// Sum `v` out of the factor.
    pub fn sum_out(&self, v: VarId) -> Result<Factor, ExactError> {
        let pos = self.position(v).ok_or(ExactError::NotInScope(v.0))?;
        let card = self.cards[pos];
        let inner: usize = self.cards[pos + 1..].iter().product();
        let outer: usize = self.cards[..pos].iter().product();
        let mut scope = self.scope.clone();
        let mut cards = self.cards.clone();
        scope.remove(pos);
        cards.remove(pos);
        let mut table = vec![0.0; outer * inner];
        for o in 0..outer {
            for val in 0..card {
                let base = (o * card + val) * inner;
                let out_base = o * inner;
                for i in 0..inner {
                    table[out_base + i] += self.table[base + i];
                }
            }
        }
        Ok(Factor::new(scope, cards, table))
    }

    /// Fix `v = value`, removing it from the scope.
    pub fn reduce(&self, v: VarId, value: usize) -> Factor {
        let Some(pos) = self.position(v) else {
            return self.clone();
        };
        let card = self.cards[pos];
        let inner: usize = self.cards[pos + 1..].iter().product();
        let outer: usize = self.cards[..pos].iter().product();
        let mut scope = self.scope.clone();
        let mut cards = self.cards.clone();
        scope.remove(pos);
        cards.remove(pos);
        let mut table = Vec::with_capacity(outer * inner);
        for o in 0..outer {
            let base = (o * card + value) * inner;
            table.extend_from_slice(&self.table[base..base + inner]);
        }
        Factor::new(scope, cards, table)
    }

    /// Reduce by every observed variable in the factor's scope.
    pub fn reduce_evidence(&self, e: &Evidence) -> Factor {
        let mut f = self.clone();
        for (v, x) in e.iter() {
            f = f.reduce(v, x);
        }
        f
    }
}

/// Strides mapping a position of the result scope to an index step in a
/// source factor (0 for variables outside the source scope).
fn strides_into(
    scope: &[VarId],
    _cards: &[usize],
    src_scope: &[VarId],
    src_cards: &[usize],
) -> Vec<usize> {
    let mut src_stride = vec![0usize; src_scope.len()];
    let mut s = 1usize;
    for i in (0..src_scope.len()).rev() {
        src_stride[i] = s;
        s *= src_cards[i];
    }
    scope
        .iter()
        .map(|v| {
            src_scope
                .iter()
                .position(|u| u == v)
                .map_or(0, |i| src_stride[i])
        })
        .collect()
}

/// Normalized distribution over a single variable's values.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    pub var: VarId,
    pub probs: Vec<f64>,
}

impl Distribution {
    /// Normalize an unnormalized weight vector; `None` if the sum is zero.
    pub fn from_weights(var: VarId, weights: Vec<f64>) -> Option<Self> {
        let s: f64 = weights.iter().sum();
        if s <= 0.0 || !s.is_finite() {
            return None;
        }
        Some(Distribution {
            var,
            probs: weights.into_iter().map(|w| w / s).collect(),
        })
    }

    pub fn is_normalized(&self) -> bool {
        (self.probs.iter().sum::<f64>() - 1.0).abs() <= NORM_TOL
            && self.probs.iter().all(|&p| p >= 0.0)
    }
}

/// An elimination sequence over a subset of variables, with its min-fill
/// width estimate. Reusable across queries that share the same observed set.
#[derive(Clone, Debug)]
pub struct EliminationOrder {
    /// Variables in the order they are eliminated (first entry first).
    pub elim: Vec<VarId>,
    pub width: usize,
}

/// Min-fill elimination order for all variables of `net` except `kept`,
/// with `observed` removed from the moral graph.
pub fn elimination_order(
    net: &BayesNet,
    observed: &BTreeSet<VarId>,
    kept: &BTreeSet<VarId>,
) -> EliminationOrder {
    let g = moralize(net, observed);
    let o = min_fill_ordering(&g);
    // min_fill sequences are oriented for last-to-first processing; the
    // elimination sequence is the reverse.
    let elim: Vec<VarId> = o
        .sequence
        .iter()
        .rev()
        .map(|&i| VarId(i))
        .filter(|v| !observed.contains(v) && !kept.contains(v))
        .collect();
    EliminationOrder {
        elim,
        width: o.width,
    }
}

fn check_width(order: &EliminationOrder, cap: usize) -> Result<(), ExactError> {
    if order.width > cap {
        Err(ExactError::WidthGuard {
            width: order.width,
            cap,
        })
    } else {
        Ok(())
    }
}

fn reduced_factors(net: &BayesNet, e: &Evidence) -> Vec<Factor> {
    net.vars()
        .map(|v| Factor::from_cpt(net, v).reduce_evidence(e))
        .collect()
}

/// Bucket-eliminate `order` from `factors`; returns the factors left over
/// (scalars and factors over kept variables).
fn eliminate(mut factors: Vec<Factor>, order: &[VarId]) -> Vec<Factor> {
    for &v in order {
        let (mut bucket, rest): (Vec<Factor>, Vec<Factor>) =
            factors.into_iter().partition(|f| f.scope.contains(&v));
        factors = rest;
        if bucket.is_empty() {
            continue;
        }
        let mut prod = bucket.pop().unwrap();
        for f in bucket {
            prod = prod.product(&f);
        }
        factors.push(prod.sum_out(v).expect("v is in the product scope"));
    }
    factors
}

/// P(e) by bucket elimination of every unobserved variable.
pub fn be_evidence_prob(net: &BayesNet, e: &Evidence) -> Result<f64, ExactError> {
    e.check(net)?;
    let observed: BTreeSet<VarId> = e.vars().collect();
    let order = elimination_order(net, &observed, &BTreeSet::new());
    check_width(&order, DEFAULT_WIDTH_CAP)?;
    let rest = eliminate(reduced_factors(net, e), &order.elim);
    Ok(rest
        .iter()
        .map(|f| {
            debug_assert!(f.is_scalar());
            f.table[0]
        })
        .product())
}

/// Posterior marginal P(q | e) by eliminating every other unobserved
/// variable along the min-fill order.
pub fn be_marginal(net: &BayesNet, e: &Evidence, q: VarId) -> Result<Distribution, ExactError> {
    e.check(net)?;
    let observed: BTreeSet<VarId> = e.vars().collect();
    let kept: BTreeSet<VarId> = [q].into_iter().collect();
    let order = elimination_order(net, &observed, &kept);
    check_width(&order, DEFAULT_WIDTH_CAP)?;
    be_marginal_with_order(net, e, q, &order)
}

/// As [`be_marginal`] with a caller-supplied elimination order (which must
/// exclude `q` and all observed variables). The width guard is not applied.
pub fn be_marginal_with_order(
    net: &BayesNet,
    e: &Evidence,
    q: VarId,
    order: &EliminationOrder,
) -> Result<Distribution, ExactError> {
    if e.contains(q) {
        return Err(ExactError::QueryObserved(q.0));
    }
    let rest = eliminate(reduced_factors(net, e), &order.elim);
    let mut weights = vec![1.0; net.card(q)];
    for f in rest {
        if f.is_scalar() {
            for w in weights.iter_mut() {
                *w *= f.table[0];
            }
        } else {
            debug_assert_eq!(f.scope, vec![q]);
            for (w, &x) in weights.iter_mut().zip(&f.table) {
                *w *= x;
            }
        }
    }
    Distribution::from_weights(q, weights).ok_or(ExactError::ZeroEvidence)
}

/// All posterior marginals P(v | e) for unobserved v, via a two-pass
/// message propagation over the bucket tree. Total cost is a single
/// elimination up and down rather than one elimination per variable.
pub fn all_marginals(
    net: &BayesNet,
    e: &Evidence,
) -> Result<BTreeMap<VarId, Distribution>, ExactError> {
    e.check(net)?;
    let observed: BTreeSet<VarId> = e.vars().collect();
    let order = elimination_order(net, &observed, &BTreeSet::new());
    check_width(&order, DEFAULT_WIDTH_CAP)?;
    all_marginals_with_order(net, e, &order)
}

/// As [`all_marginals`] with a caller-supplied elimination order covering
/// every unobserved variable. The width guard is not applied.
pub fn all_marginals_with_order(
    net: &BayesNet,
    e: &Evidence,
    order: &EliminationOrder,
) -> Result<BTreeMap<VarId, Distribution>, ExactError> {
    let elim = &order.elim;
    let k = elim.len();
    let mut pos: BTreeMap<VarId, usize> = BTreeMap::new();
    for (i, &v) in elim.iter().enumerate() {
        pos.insert(v, i);
    }

    // Assign each evidence-reduced factor to the bucket of its
    // first-eliminated scope variable.
    let mut assigned: Vec<Vec<Factor>> = vec![Vec::new(); k];
    let mut scalar = 1.0f64;
    for f in reduced_factors(net, e) {
        if f.is_scalar() {
            scalar *= f.table[0];
            continue;
        }
        let bucket = f.scope.iter().map(|v| pos[v]).min().unwrap();
        assigned[bucket].push(f);
    }

    // Upward pass: eliminate each bucket's variable and send the message to
    // the bucket of its first-eliminated remaining scope variable.
    let mut up_msg: Vec<Option<Factor>> = (0..k).map(|_| None).collect();
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); k];
    for i in 0..k {
        let mut prod: Option<Factor> = None;
        for f in assigned[i]
            .iter()
            .chain(children[i].iter().map(|&j| up_msg[j].as_ref().unwrap()))
        {
            prod = Some(match prod {
                None => f.clone(),
                Some(p) => p.product(f),
            });
        }
        let prod = prod.expect("every bucket holds at least its own CPT factor");
        let msg = prod.sum_out(elim[i]).expect("bucket variable in scope");
        if msg.is_scalar() {
            scalar *= msg.table[0];
        } else {
            let p = msg.scope.iter().map(|v| pos[v]).min().unwrap();
            children[p].push(i);
            up_msg[i] = Some(msg);
        }
    }

    if scalar <= 0.0 || !scalar.is_finite() {
        return Err(ExactError::ZeroEvidence);
    }

    // Downward pass, in reverse elimination order. The message to child j is
    // the bucket's own factors, its downward message, and the upward
    // messages of its other children, marginalized onto j's separator.
    let mut down_msg: Vec<Option<Factor>> = (0..k).map(|_| None).collect();
    for i in (0..k).rev() {
        if children[i].is_empty() {
            continue;
        }
        let mut base: Option<Factor> = down_msg[i].clone();
        for f in &assigned[i] {
            base = Some(match base {
                None => f.clone(),
                Some(p) => p.product(f),
            });
        }
        for &j in &children[i] {
            let mut m = base.clone();
            for &j2 in &children[i] {
                if j2 != j {
                    let f = up_msg[j2].as_ref().unwrap();
                    m = Some(match m {
                        None => f.clone(),
                        Some(p) => p.product(f),
                    });
                }
            }
            let sep: BTreeSet<VarId> =
                up_msg[j].as_ref().unwrap().scope.iter().copied().collect();
            // No factors besides j's own upward message: the downward
            // message is the identity, i.e. no message at all.
            let Some(mut m) = m else {
                continue;
            };
            let to_sum: Vec<VarId> = m
                .scope
                .iter()
                .copied()
                .filter(|v| !sep.contains(v))
                .collect();
            for v in to_sum {
                m = m.sum_out(v).unwrap();
            }
            down_msg[j] = Some(m);
        }
    }

    // Marginal of bucket i's variable: combine everything in the bucket with
    // its downward message and sum down to the single variable.
    let mut out = BTreeMap::new();
    for i in 0..k {
        let v = elim[i];
        let mut prod: Option<Factor> = down_msg[i].clone();
        for f in assigned[i]
            .iter()
            .chain(children[i].iter().map(|&j| up_msg[j].as_ref().unwrap()))
        {
            prod = Some(match prod {
                None => f.clone(),
                Some(p) => p.product(f),
            });
        }
        let mut prod = prod.unwrap();
        let to_sum: Vec<VarId> = prod.scope.iter().copied().filter(|&u| u != v).collect();
        for u in to_sum {
            prod = prod.sum_out(u).unwrap();
        }
        debug_assert_eq!(prod.scope, vec![v]);
        let d = Distribution::from_weights(v, prod.table).ok_or(ExactError::ZeroEvidence)?;
        out.insert(v, d);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Cpt;

    fn chain3() -> BayesNet {
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

    #[test]
    fn product_with_identity_factor() {
        let f = Factor::new(vec![VarId(0)], vec![2], vec![0.5, 0.5]);
        let g = Factor::new(vec![VarId(0)], vec![2], vec![1.0, 1.0]);
        assert_eq!(f.product(&g), f);
    }

    #[test]
    fn product_disjoint_scopes_is_outer_product() {
        let f = Factor::new(vec![VarId(0)], vec![2], vec![0.3, 0.7]);
        let g = Factor::new(vec![VarId(1)], vec![2], vec![0.4, 0.6]);
        let fg = f.product(&g);
        assert_eq!(fg.scope, vec![VarId(0), VarId(1)]);
        let expect = [0.3 * 0.4, 0.3 * 0.6, 0.7 * 0.4, 0.7 * 0.6];
        for (a, b) in fg.table.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn product_matches_nested_loop_reference() {
        // chain3 CPT factors for X2 and X3, checked entry-wise against a
        // nested-loop computation over (x1, x2, x3).
        let net = chain3();
        let f2 = Factor::from_cpt(&net, VarId(1));
        let f3 = Factor::from_cpt(&net, VarId(2));
        let prod = f2.product(&f3);
        assert_eq!(prod.scope, vec![VarId(0), VarId(1), VarId(2)]);
        for x1 in 0..2 {
            for x2 in 0..2 {
                for x3 in 0..2 {
                    let want = net.cpt(VarId(1)).rows[x1][x2] * net.cpt(VarId(2)).rows[x2][x3];
                    let got = prod.table[(x1 * 2 + x2) * 2 + x3];
                    assert!((want - got).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn sum_out_uniform_factor() {
        let f = Factor::new(vec![VarId(0), VarId(1)], vec![2, 2], vec![0.25; 4]);
        let g = f.sum_out(VarId(1)).unwrap();
        assert_eq!(g.scope, vec![VarId(0)]);
        assert_eq!(g.table, vec![0.5, 0.5]);
    }

    #[test]
    fn sum_out_last_variable_gives_scalar() {
        let f = Factor::new(vec![VarId(0)], vec![3], vec![0.2, 0.3, 0.5]);
        let g = f.sum_out(VarId(0)).unwrap();
        assert!(g.is_scalar());
        assert!((g.table[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sum_out_missing_variable_errors() {
        let f = Factor::new(vec![VarId(0)], vec![2], vec![0.5, 0.5]);
        assert!(matches!(
            f.sum_out(VarId(3)),
            Err(ExactError::NotInScope(3))
        ));
    }

    #[test]
    fn sum_out_matches_nested_loop_oracle() {
        let f = Factor::new(
            vec![VarId(0), VarId(1), VarId(2)],
            vec![2, 3, 2],
            (0..12).map(|i| (i as f64) * 0.1 + 0.05).collect(),
        );
        let g = f.sum_out(VarId(1)).unwrap();
        for a in 0..2 {
            for c in 0..2 {
                let mut want = 0.0;
                for b in 0..3 {
                    want += f.table[(a * 3 + b) * 2 + c];
                }
                assert!((g.table[a * 2 + c] - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn evidence_prob_empty_is_one() {
        let net = chain3();
        let p = be_evidence_prob(&net, &Evidence::new()).unwrap();
        assert!((p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn evidence_prob_chain3() {
        let net = chain3();
        let e = Evidence::from_pairs([(VarId(2), 1)]);
        let p = be_evidence_prob(&net, &e).unwrap();
        assert!((p - 0.5).abs() < 1e-12, "got {p}");
    }

    #[test]
    fn evidence_prob_contradiction_is_zero() {
        // B deterministically copies A; evidence B=1 with A clamped to 0.
        let net = BayesNet::new(
            vec!["A".into(), "B".into()],
            vec![2, 2],
            vec![
                Cpt {
                    child: VarId(0),
                    parents: vec![],
                    rows: vec![vec![1.0, 0.0]],
                },
                Cpt {
                    child: VarId(1),
                    parents: vec![VarId(0)],
                    rows: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
                },
            ],
        )
        .unwrap();
        let e = Evidence::from_pairs([(VarId(1), 1)]);
        assert_eq!(be_evidence_prob(&net, &e).unwrap(), 0.0);
    }

    #[test]
    fn marginal_chain3_no_evidence() {
        let net = chain3();
        let d = be_marginal(&net, &Evidence::new(), VarId(1)).unwrap();
        assert!((d.probs[0] - 0.5).abs() < 1e-12);
        assert!((d.probs[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn marginal_chain3_with_evidence() {
        let net = chain3();
        let e = Evidence::from_pairs([(VarId(2), 1)]);
        let d = be_marginal(&net, &e, VarId(0)).unwrap();
        assert!((d.probs[1] - 0.792).abs() < 1e-9, "got {:?}", d.probs);
    }

    #[test]
    fn marginal_disconnected_variable_is_prior() {
        let net = BayesNet::new(
            vec!["A".into(), "B".into()],
            vec![2, 2],
            vec![
                Cpt {
                    child: VarId(0),
                    parents: vec![],
                    rows: vec![vec![0.3, 0.7]],
                },
                Cpt {
                    child: VarId(1),
                    parents: vec![],
                    rows: vec![vec![0.9, 0.1]],
                },
            ],
        )
        .unwrap();
        let e = Evidence::from_pairs([(VarId(1), 0)]);
        let d = be_marginal(&net, &e, VarId(0)).unwrap();
        assert!((d.probs[0] - 0.3).abs() < 1e-12);
    }

    #[test]
    fn zero_evidence_is_an_error_for_marginals() {
        let net = BayesNet::new(
            vec!["A".into(), "B".into()],
            vec![2, 2],
            vec![
                Cpt {
                    child: VarId(0),
                    parents: vec![],
                    rows: vec![vec![1.0, 0.0]],
                },
                Cpt {
                    child: VarId(1),
                    parents: vec![VarId(0)],
                    rows: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
                },
            ],
        )
        .unwrap();
        let e = Evidence::from_pairs([(VarId(1), 1)]);
        assert!(matches!(
            be_marginal(&net, &e, VarId(0)),
            Err(ExactError::ZeroEvidence)
        ));
        assert!(matches!(
            all_marginals(&net, &e),
            Err(ExactError::ZeroEvidence)
        ));
    }

    #[test]
    fn all_marginals_chain3_no_evidence() {
        let net = chain3();
        let m = all_marginals(&net, &Evidence::new()).unwrap();
        let x1 = &m[&VarId(0)];
        assert!((x1.probs[0] - 0.4).abs() < 1e-12);
        assert!((x1.probs[1] - 0.6).abs() < 1e-12);
        for v in [VarId(1), VarId(2)] {
            assert!((m[&v].probs[0] - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn all_marginals_agrees_with_be_marginal() {
        let net = chain3();
        let e = Evidence::from_pairs([(VarId(2), 1)]);
        let m = all_marginals(&net, &e).unwrap();
        for v in [VarId(0), VarId(1)] {
            let d = be_marginal(&net, &e, v).unwrap();
            for (a, b) in m[&v].probs.iter().zip(&d.probs) {
                assert!((a - b).abs() < 1e-12);
            }
        }
        assert!(!m.contains_key(&VarId(2)));
    }

    #[test]
    fn width_guard_refuses_large_widths() {
        let order = EliminationOrder {
            elim: vec![],
            width: 30,
        };
        assert!(matches!(
            check_width(&order, DEFAULT_WIDTH_CAP),
            Err(ExactError::WidthGuard { width: 30, cap: 25 })
        ));
    }
}
