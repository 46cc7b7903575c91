//! Seeded generators for the synthetic benchmark families: random DAGs,
//! 2-layer networks, directed grids, and Gallager-style coding networks,
//! plus forward-sampled evidence selection.
//!
//! Every generator is a pure function of its parameters and seed; generating
//! twice yields byte-identical networks.

use rand::seq::index::sample;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{BayesNet, Cpt, Evidence, VarId};

#[derive(Debug, Error)]
pub enum GenError {
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error(transparent)]
    Model(#[from] crate::model::ModelError),
}

fn uniform_row(rng: &mut ChaCha8Rng, card: usize) -> Vec<f64> {
    let mut row: Vec<f64> = (0..card).map(|_| rng.random::<f64>()).collect();
    let s: f64 = row.iter().sum();
    for x in row.iter_mut() {
        *x /= s;
    }
    row
}

fn random_rows(rng: &mut ChaCha8Rng, n_rows: usize, card: usize) -> Vec<Vec<f64>> {
    (0..n_rows).map(|_| uniform_row(rng, card)).collect()
}

/// Random binary DAG: `r` roots with uniform priors; each non-root draws
/// `p` parents uniformly from lower-indexed variables; uniform-random
/// normalized CPT rows.
pub fn gen_random(n: usize, r: usize, p: usize, seed: u64) -> Result<BayesNet, GenError> {
    if r > n || r == 0 {
        return Err(GenError::Parameter(format!("need 0 < roots <= n ({r} vs {n})")));
    }
    if n > r && p == 0 {
        return Err(GenError::Parameter("non-roots need p >= 1 parents".into()));
    }
    if n > r && r < p {
        return Err(GenError::Parameter(format!(
            "node {r} has only {r} lower-indexed candidates for {p} parents"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cpts = Vec::with_capacity(n);
    for i in 0..n {
        if i < r {
            cpts.push(Cpt {
                child: VarId(i),
                parents: vec![],
                rows: vec![vec![0.5, 0.5]],
            });
        } else {
            let mut parents: Vec<VarId> =
                sample(&mut rng, i, p).into_iter().map(VarId).collect();
            parents.sort();
            let rows = random_rows(&mut rng, 1 << p, 2);
            cpts.push(Cpt {
                child: VarId(i),
                parents,
                rows,
            });
        }
    }
    let names = (0..n).map(|i| format!("x{i}")).collect();
    Ok(BayesNet::new(names, vec![2; n], cpts)?)
}

/// Bipartite 2-layer network: `r` roots with uniform priors and `n - r`
/// leaves, each with `p` parents drawn from the roots only.
pub fn gen_twolayer(r: usize, n: usize, p: usize, seed: u64) -> Result<BayesNet, GenError> {
    if r >= n || r == 0 {
        return Err(GenError::Parameter(format!("need 0 < roots < n ({r} vs {n})")));
    }
    if p > r {
        return Err(GenError::Parameter(format!(
            "p = {p} parents but only {r} roots"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cpts = Vec::with_capacity(n);
    for i in 0..r {
        cpts.push(Cpt {
            child: VarId(i),
            parents: vec![],
            rows: vec![vec![0.5, 0.5]],
        });
    }
    for i in r..n {
        let mut parents: Vec<VarId> = sample(&mut rng, r, p).into_iter().map(VarId).collect();
        parents.sort();
        let rows = random_rows(&mut rng, 1 << p, 2);
        cpts.push(Cpt {
            child: VarId(i),
            parents,
            rows,
        });
    }
    let names = (0..n).map(|i| format!("x{i}")).collect();
    Ok(BayesNet::new(names, vec![2; n], cpts)?)
}

/// Directed grid: node (i, j) has parents (i-1, j) and (i, j-1) where they
/// exist. With `diagonal` set, (i-1, j-1) is added as a third parent.
pub fn gen_grid(rows: usize, cols: usize, diagonal: bool, seed: u64) -> Result<BayesNet, GenError> {
    if rows == 0 || cols == 0 {
        return Err(GenError::Parameter("grid dimensions must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rows * cols;
    let mut cpts = Vec::with_capacity(n);
    let mut names = Vec::with_capacity(n);
    for i in 0..rows {
        for j in 0..cols {
            let id = i * cols + j;
            names.push(format!("g{i}_{j}"));
            let mut parents = Vec::new();
            if i > 0 {
                parents.push(VarId((i - 1) * cols + j));
            }
            if j > 0 {
                parents.push(VarId(i * cols + j - 1));
            }
            if diagonal && i > 0 && j > 0 {
                parents.push(VarId((i - 1) * cols + j - 1));
            }
            let rows_n = 1usize << parents.len();
            cpts.push(Cpt {
                child: VarId(id),
                parents,
                rows: random_rows(&mut rng, rows_n, 2),
            });
        }
    }
    Ok(BayesNet::new(names, vec![2; n], cpts)?)
}

/// Gallager-style coding network: `k` code bits (uniform priors), `k` parity
/// bits that are deterministic XORs of 3 distinct random code bits, and `2k`
/// channel observations flipping their parent with probability `flip`.
/// Variables are laid out code bits, parity bits, then channel bits; channel
/// names carry the `y` prefix.
pub fn gen_coding(k: usize, flip: f64, seed: u64) -> Result<BayesNet, GenError> {
    if k < 3 {
        return Err(GenError::Parameter("coding networks need k >= 3".into()));
    }
    if !(0.0..=1.0).contains(&flip) {
        return Err(GenError::Parameter("flip must be a probability".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let checks: Vec<[usize; 3]> = (0..k)
        .map(|_| {
            let mut pick: Vec<usize> = sample(&mut rng, k, 3).into_iter().collect();
            pick.sort();
            [pick[0], pick[1], pick[2]]
        })
        .collect();
    gen_coding_from_checks(k, &checks, flip)
}

/// Build a coding network from an explicit parity-check assignment (one
/// triple of code-bit indices per parity bit).
pub fn gen_coding_from_checks(
    k: usize,
    checks: &[[usize; 3]],
    flip: f64,
) -> Result<BayesNet, GenError> {
    for row in checks {
        if row.iter().any(|&c| c >= k) {
            return Err(GenError::Parameter(format!(
                "parity row references code bit out of range (k = {k})"
            )));
        }
        if row[0] == row[1] || row[1] == row[2] || row[0] == row[2] {
            return Err(GenError::Parameter("parity row repeats a code bit".into()));
        }
    }
    let kp = checks.len();
    let n = k + kp + k + kp;
    let mut names = Vec::with_capacity(n);
    let mut cpts = Vec::with_capacity(n);
    for i in 0..k {
        names.push(format!("u{i}"));
        cpts.push(Cpt {
            child: VarId(i),
            parents: vec![],
            rows: vec![vec![0.5, 0.5]],
        });
    }
    for (i, row) in checks.iter().enumerate() {
        names.push(format!("p{i}"));
        let parents: Vec<VarId> = row.iter().map(|&c| VarId(c)).collect();
        // Deterministic XOR indicator rows, parent configs with the last
        // parent varying fastest.
        let mut rows = Vec::with_capacity(8);
        for cfg in 0..8usize {
            let bits = [(cfg >> 2) & 1, (cfg >> 1) & 1, cfg & 1];
            let parity = bits[0] ^ bits[1] ^ bits[2];
            let mut r = vec![0.0, 0.0];
            r[parity] = 1.0;
            rows.push(r);
        }
        cpts.push(Cpt {
            child: VarId(k + i),
            parents,
            rows,
        });
    }
    let channel_rows = vec![vec![1.0 - flip, flip], vec![flip, 1.0 - flip]];
    for i in 0..k {
        names.push(format!("yu{i}"));
        cpts.push(Cpt {
            child: VarId(k + kp + i),
            parents: vec![VarId(i)],
            rows: channel_rows.clone(),
        });
    }
    for i in 0..kp {
        names.push(format!("yp{i}"));
        cpts.push(Cpt {
            child: VarId(k + kp + k + i),
            parents: vec![VarId(k + i)],
            rows: channel_rows.clone(),
        });
    }
    Ok(BayesNet::new(names, vec![2; n], cpts)?)
}

/// Parse a plain-text parity matrix: one parity row per line, whitespace
/// separated column indices of the 3 participating code bits. `#` starts a
/// comment; blank lines are skipped.
pub fn parse_parity_matrix(text: &str) -> Result<Vec<[usize; 3]>, GenError> {
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let cols: Vec<usize> = line
            .split_whitespace()
            .map(|t| {
                t.parse::<usize>().map_err(|_| {
                    GenError::Parameter(format!("line {}: bad index {t:?}", lineno + 1))
                })
            })
            .collect::<Result<_, _>>()?;
        if cols.len() != 3 {
            return Err(GenError::Parameter(format!(
                "line {}: expected 3 indices, found {}",
                lineno + 1,
                cols.len()
            )));
        }
        rows.push([cols[0], cols[1], cols[2]]);
    }
    Ok(rows)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvidencePolicy {
    /// Nodes without children.
    Leaves,
    /// Channel observations of a coding network (name prefix `y`).
    Channel,
    /// Any variable.
    Any,
}

/// Choose `count` variables per policy, then fix their values by forward
/// sampling the network once, which guarantees the evidence has positive
/// probability even in deterministic networks.
pub fn gen_evidence(
    net: &BayesNet,
    count: usize,
    policy: EvidencePolicy,
    seed: u64,
) -> Result<Evidence, GenError> {
    let eligible: Vec<VarId> = net
        .vars()
        .filter(|&v| match policy {
            EvidencePolicy::Leaves => net.is_leaf(v),
            EvidencePolicy::Channel => net.name(v).starts_with('y'),
            EvidencePolicy::Any => true,
        })
        .collect();
    if eligible.is_empty() {
        return Err(GenError::Parameter(
            "evidence policy selects no eligible nodes".into(),
        ));
    }
    if count > eligible.len() {
        return Err(GenError::Parameter(format!(
            "requested {count} evidence nodes, only {} eligible",
            eligible.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen: Vec<VarId> = sample(&mut rng, eligible.len(), count)
        .into_iter()
        .map(|i| eligible[i])
        .collect();
    chosen.sort();

    // One forward pass through the whole network.
    let topo = net.topological_order()?;
    let mut values = vec![0usize; net.num_vars()];
    for &v in &topo {
        let row = net.cpt(v).row(net.cards(), |u| values[u.0]);
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut picked = row.len() - 1;
        for (i, &p) in row.iter().enumerate() {
            acc += p;
            if u < acc {
                picked = i;
                break;
            }
        }
        values[v.0] = picked;
    }
    Ok(Evidence::from_pairs(
        chosen.into_iter().map(|v| (v, values[v.0])),
    ))
}
