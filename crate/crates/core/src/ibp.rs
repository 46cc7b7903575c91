//! Iterative belief propagation on the factor-graph view of a network, run
//! for a fixed number of synchronous (flooding) rounds with uniform message
//! initialization and no damping. Exact on polytrees; approximate elsewhere.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::exact::{Distribution, Factor};
use crate::model::{BayesNet, Evidence, VarId};

#[derive(Debug, Error)]
pub enum IbpError {
    #[error("all-zero belief for variable {0}")]
    ZeroBelief(usize),
    #[error("invalid evidence: {0}")]
    BadEvidence(#[from] crate::model::ModelError),
}

struct FactorNode {
    factor: Factor,
    /// Positions into the variable list, one per scope entry.
    vars: Vec<usize>,
}

/// Directed messages between variables and their CPT-factor neighbors, all
/// kept normalized; advanced one synchronous round at a time.
pub struct MessageSet {
    variables: Vec<VarId>,
    cards: Vec<usize>,
    factors: Vec<FactorNode>,
    /// var_to_factor[f][k]: message from the k-th scope variable into f.
    var_to_factor: Vec<Vec<Vec<f64>>>,
    /// factor_to_var[f][k]: message from f to its k-th scope variable.
    factor_to_var: Vec<Vec<Vec<f64>>>,
    /// For each variable, the (factor, slot) pairs it participates in.
    var_edges: Vec<Vec<(usize, usize)>>,
    pub iteration: usize,
}

impl MessageSet {
    pub fn new(net: &BayesNet, e: &Evidence) -> Result<Self, IbpError> {
        e.check(net)?;
        let variables: Vec<VarId> = net.vars().filter(|v| !e.contains(*v)).collect();
        let index: BTreeMap<VarId, usize> = variables
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i))
            .collect();
        let cards: Vec<usize> = variables.iter().map(|&v| net.card(v)).collect();

        let mut factors = Vec::new();
        for v in net.vars() {
            let f = Factor::from_cpt(net, v).reduce_evidence(e);
            if f.is_scalar() {
                continue;
            }
            let vars: Vec<usize> = f.scope.iter().map(|u| index[u]).collect();
            factors.push(FactorNode { factor: f, vars });
        }

        let uniform = |card: usize| vec![1.0 / card as f64; card];
        let var_to_factor: Vec<Vec<Vec<f64>>> = factors
            .iter()
            .map(|f| f.vars.iter().map(|&vi| uniform(cards[vi])).collect())
            .collect();
        let factor_to_var = var_to_factor.clone();

        let mut var_edges = vec![Vec::new(); variables.len()];
        for (fi, f) in factors.iter().enumerate() {
            for (k, &vi) in f.vars.iter().enumerate() {
                var_edges[vi].push((fi, k));
            }
        }

        Ok(MessageSet {
            variables,
            cards,
            factors,
            var_to_factor,
            factor_to_var,
            var_edges,
            iteration: 0,
        })
    }

    /// One synchronous round: all factor-to-variable messages from the
    /// current variable messages, then all variable-to-factor messages from
    /// the fresh factor messages.
    pub fn iterate(&mut self) {
        let mut new_f2v = self.factor_to_var.clone();
        for (fi, f) in self.factors.iter().enumerate() {
            for k in 0..f.vars.len() {
                new_f2v[fi][k] = self.factor_message(fi, k);
            }
        }
        self.factor_to_var = new_f2v;

        for (fi, f) in self.factors.iter().enumerate() {
            for (k, &vi) in f.vars.iter().enumerate() {
                let mut msg = vec![1.0; self.cards[vi]];
                for &(fj, slot) in &self.var_edges[vi] {
                    if fj == fi && slot == k {
                        continue;
                    }
                    for (m, &x) in msg.iter_mut().zip(&self.factor_to_var[fj][slot]) {
                        *m *= x;
                    }
                }
                normalize_or_uniform(&mut msg);
                self.var_to_factor[fi][k] = msg;
            }
        }
        self.iteration += 1;
    }

    /// Message from factor `fi` to its `k`-th scope variable: sum the factor
    /// times all other incoming variable messages over the rest of the scope.
    fn factor_message(&self, fi: usize, k: usize) -> Vec<f64> {
        let node = &self.factors[fi];
        let f = &node.factor;
        let scope_len = f.scope.len();
        let mut out = vec![0.0; f.cards[k]];
        let mut idx = vec![0usize; scope_len];
        for &val in f.table.iter() {
            let mut w = val;
            if w != 0.0 {
                for (j, &v) in idx.iter().enumerate() {
                    if j != k {
                        w *= self.var_to_factor[fi][j][v];
                    }
                }
                out[idx[k]] += w;
            }
            // Odometer over the scope, last position fastest.
            for j in (0..scope_len).rev() {
                idx[j] += 1;
                if idx[j] < f.cards[j] {
                    break;
                }
                idx[j] = 0;
            }
        }
        normalize_or_uniform(&mut out);
        out
    }

    /// Normalized beliefs: per variable, the product of its incoming factor
    /// messages.
    pub fn beliefs(&self) -> Result<BTreeMap<VarId, Distribution>, IbpError> {
        let mut out = BTreeMap::new();
        for (vi, &v) in self.variables.iter().enumerate() {
            let mut b = vec![1.0; self.cards[vi]];
            for &(fi, slot) in &self.var_edges[vi] {
                for (x, &m) in b.iter_mut().zip(&self.factor_to_var[fi][slot]) {
                    *x *= m;
                }
            }
            let d = Distribution::from_weights(v, b).ok_or(IbpError::ZeroBelief(v.0))?;
            out.insert(v, d);
        }
        Ok(out)
    }
}

fn normalize_or_uniform(v: &mut [f64]) {
    let s: f64 = v.iter().sum();
    if s > 0.0 && s.is_finite() {
        for x in v.iter_mut() {
            *x /= s;
        }
    } else {
        let u = 1.0 / v.len() as f64;
        for x in v.iter_mut() {
            *x = u;
        }
    }
}

/// Run `iterations` synchronous rounds and return the beliefs.
pub fn ibp_run(
    net: &BayesNet,
    e: &Evidence,
    iterations: usize,
) -> Result<BTreeMap<VarId, Distribution>, IbpError> {
    assert!(iterations >= 1);
    let mut msgs = MessageSet::new(net, e)?;
    for _ in 0..iterations {
        msgs.iterate();
    }
    msgs.beliefs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::all_marginals;
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
    fn chain3_posterior_after_25_iterations() {
        let net = chain3();
        let e = Evidence::from_pairs([(VarId(2), 1)]);
        let beliefs = ibp_run(&net, &e, 25).unwrap();
        let x1 = &beliefs[&VarId(0)];
        assert!((x1.probs[0] - 0.208).abs() < 1e-9, "got {:?}", x1.probs);
        assert!((x1.probs[1] - 0.792).abs() < 1e-9);
    }

    #[test]
    fn polytree_matches_exact() {
        let net = chain3();
        let e = Evidence::from_pairs([(VarId(2), 0)]);
        let beliefs = ibp_run(&net, &e, 25).unwrap();
        let exact = all_marginals(&net, &e).unwrap();
        for (v, d) in &exact {
            for (a, b) in beliefs[v].probs.iter().zip(&d.probs) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn single_variable_prior_after_one_iteration() {
        let net = BayesNet::new(
            vec!["A".into()],
            vec![3],
            vec![Cpt {
                child: VarId(0),
                parents: vec![],
                rows: vec![vec![0.2, 0.3, 0.5]],
            }],
        )
        .unwrap();
        let beliefs = ibp_run(&net, &Evidence::new(), 1).unwrap();
        let d = &beliefs[&VarId(0)];
        assert!((d.probs[0] - 0.2).abs() < 1e-12);
        assert!((d.probs[2] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn beliefs_normalized_every_iteration_on_loopy_net() {
        // Diamond (a loop after moralization and in the factor graph).
        let net = BayesNet::new(
            (0..4).map(|i| format!("V{i}")).collect(),
            vec![2; 4],
            vec![
                Cpt {
                    child: VarId(0),
                    parents: vec![],
                    rows: vec![vec![0.3, 0.7]],
                },
                Cpt {
                    child: VarId(1),
                    parents: vec![VarId(0)],
                    rows: vec![vec![0.9, 0.1], vec![0.2, 0.8]],
                },
                Cpt {
                    child: VarId(2),
                    parents: vec![VarId(0)],
                    rows: vec![vec![0.6, 0.4], vec![0.25, 0.75]],
                },
                Cpt {
                    child: VarId(3),
                    parents: vec![VarId(1), VarId(2)],
                    rows: vec![
                        vec![0.5, 0.5],
                        vec![0.1, 0.9],
                        vec![0.8, 0.2],
                        vec![0.35, 0.65],
                    ],
                },
            ],
        )
        .unwrap();
        let e = Evidence::from_pairs([(VarId(3), 1)]);
        let mut msgs = MessageSet::new(&net, &e).unwrap();
        for _ in 0..10 {
            msgs.iterate();
            for d in msgs.beliefs().unwrap().values() {
                assert!(d.is_normalized());
            }
        }
    }
}
