//! Discrete Bayesian network representation: variables, CPTs, evidence and
//! assignments, plus elementary queries (joint probability, Markov blankets)
//! and structural validation.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use thiserror::Error;

/// Tolerance used everywhere a probability vector is asserted to sum to 1.
pub const NORM_TOL: f64 = 1e-9;

/// Dense variable identifier. Indices are contiguous `0..n`; names live in
/// the owning [`BayesNet`] and only matter at the file-format boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

impl std::fmt::Display for VarId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("variable names are not unique: {0}")]
    DuplicateName(String),
    #[error("variable {0} referenced out of range (n = {1})")]
    VarOutOfRange(usize, usize),
    #[error("cpt for variable {child}: expected {expected} rows, found {found}")]
    RowCountMismatch {
        child: usize,
        expected: usize,
        found: usize,
    },
    #[error("cpt for variable {child}: row {row} has length {found}, expected {expected}")]
    RowLengthMismatch {
        child: usize,
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("assignment is missing variable {0}")]
    IncompleteAssignment(usize),
    #[error("value {value} out of range for variable {var} (cardinality {card})")]
    InvalidValue { var: usize, value: usize, card: usize },
    #[error("variable {0} assigned more than once")]
    DuplicateAssignment(usize),
    #[error("parent relation contains a cycle")]
    Cyclic,
    #[error("network mismatch: expected {expected} variables, got {found}")]
    SizeMismatch { expected: usize, found: usize },
}

/// Conditional probability table `P(child | parents)`.
///
/// Rows are indexed by parent configuration with the **last parent varying
/// fastest**; each row lists probabilities by child value index.
#[derive(Clone, Debug, PartialEq)]
pub struct Cpt {
    pub child: VarId,
    pub parents: Vec<VarId>,
    pub rows: Vec<Vec<f64>>,
}

impl Cpt {
    /// Row index of the parent configuration read from `value_of`.
    pub fn row_index(&self, cards: &[usize], value_of: impl Fn(VarId) -> usize) -> usize {
        let mut idx = 0;
        for &p in &self.parents {
            idx = idx * cards[p.0] + value_of(p);
        }
        idx
    }

    pub fn row(&self, cards: &[usize], value_of: impl Fn(VarId) -> usize) -> &[f64] {
        &self.rows[self.row_index(cards, value_of)]
    }
}

/// Discrete Bayesian network: a DAG over variables with one CPT per variable.
///
/// Immutable after construction, so a single network can be shared freely
/// across threads. Construction checks table shapes and reference validity;
/// semantic problems (cycles, unnormalized rows) are reported by
/// [`BayesNet::validate`] without preventing construction.
#[derive(Clone, Debug)]
pub struct BayesNet {
    names: Vec<String>,
    cards: Vec<usize>,
    cpts: Vec<Cpt>,
    children: Vec<Vec<VarId>>,
}

impl BayesNet {
    pub fn new(
        names: Vec<String>,
        cards: Vec<usize>,
        cpts: Vec<Cpt>,
    ) -> Result<Self, ModelError> {
        let n = names.len();
        if cards.len() != n || cpts.len() != n {
            return Err(ModelError::SizeMismatch {
                expected: n,
                found: cards.len().min(cpts.len()),
            });
        }
        let mut seen = BTreeSet::new();
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(ModelError::DuplicateName(name.clone()));
            }
        }
        for (i, cpt) in cpts.iter().enumerate() {
            if cpt.child.0 != i {
                return Err(ModelError::VarOutOfRange(cpt.child.0, n));
            }
            let mut expected = 1usize;
            for &p in &cpt.parents {
                if p.0 >= n {
                    return Err(ModelError::VarOutOfRange(p.0, n));
                }
                expected *= cards[p.0];
            }
            if cpt.rows.len() != expected {
                return Err(ModelError::RowCountMismatch {
                    child: i,
                    expected,
                    found: cpt.rows.len(),
                });
            }
            for (r, row) in cpt.rows.iter().enumerate() {
                if row.len() != cards[i] {
                    return Err(ModelError::RowLengthMismatch {
                        child: i,
                        row: r,
                        expected: cards[i],
                        found: row.len(),
                    });
                }
            }
        }
        let mut children = vec![Vec::new(); n];
        for cpt in &cpts {
            for &p in &cpt.parents {
                children[p.0].push(cpt.child);
            }
        }
        Ok(BayesNet {
            names,
            cards,
            cpts,
            children,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> {
        (0..self.num_vars()).map(VarId)
    }

    pub fn name(&self, v: VarId) -> &str {
        &self.names[v.0]
    }

    pub fn var_by_name(&self, name: &str) -> Option<VarId> {
        self.names.iter().position(|n| n == name).map(VarId)
    }

    pub fn card(&self, v: VarId) -> usize {
        self.cards[v.0]
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    pub fn parents(&self, v: VarId) -> &[VarId] {
        &self.cpts[v.0].parents
    }

    pub fn children(&self, v: VarId) -> &[VarId] {
        &self.children[v.0]
    }

    pub fn cpt(&self, v: VarId) -> &Cpt {
        &self.cpts[v.0]
    }

    pub fn is_leaf(&self, v: VarId) -> bool {
        self.children[v.0].is_empty()
    }

    /// Canonical topological order (Kahn's algorithm, lowest index first
    /// among ready nodes). Errors if the parent relation has a cycle.
    pub fn topological_order(&self) -> Result<Vec<VarId>, ModelError> {
        let n = self.num_vars();
        let mut indeg: Vec<usize> = (0..n).map(|i| self.cpts[i].parents.len()).collect();
        let mut ready: BTreeSet<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(&i) = ready.iter().next() {
            ready.remove(&i);
            order.push(VarId(i));
            for &c in &self.children[i] {
                indeg[c.0] -= 1;
                if indeg[c.0] == 0 {
                    ready.insert(c.0);
                }
            }
        }
        if order.len() == n {
            Ok(order)
        } else {
            Err(ModelError::Cyclic)
        }
    }

    /// Joint probability of a full assignment: the product of one CPT entry
    /// per variable.
    pub fn joint_probability(&self, a: &Assignment) -> Result<f64, ModelError> {
        let n = self.num_vars();
        if a.len() != n {
            return Err(ModelError::SizeMismatch {
                expected: n,
                found: a.len(),
            });
        }
        for i in 0..n {
            let v = a
                .get(VarId(i))
                .ok_or(ModelError::IncompleteAssignment(i))?;
            if v >= self.cards[i] {
                return Err(ModelError::InvalidValue {
                    var: i,
                    value: v,
                    card: self.cards[i],
                });
            }
        }
        let mut p = 1.0;
        for i in 0..n {
            let cpt = &self.cpts[i];
            let row = cpt.row(&self.cards, |u| a.get(u).unwrap());
            p *= row[a.get(VarId(i)).unwrap()];
        }
        Ok(p)
    }

    /// Markov blanket of `v`: parents, children, and parents of children.
    pub fn markov_blanket(&self, v: VarId) -> BTreeSet<VarId> {
        let mut blanket: BTreeSet<VarId> = self.parents(v).iter().copied().collect();
        for &c in self.children(v) {
            blanket.insert(c);
            for &cp in self.parents(c) {
                blanket.insert(cp);
            }
        }
        blanket.remove(&v);
        blanket
    }

    /// Structural and numeric diagnostics. Collects every problem found;
    /// never aborts on the first.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut diags = Vec::new();
        if self.topological_order().is_err() {
            diags.push(Diagnostic {
                kind: DiagnosticKind::Cycle,
                message: "parent relation contains a cycle".into(),
            });
        }
        for (i, cpt) in self.cpts.iter().enumerate() {
            for (r, row) in cpt.rows.iter().enumerate() {
                if row.iter().any(|&x| x < 0.0 || !x.is_finite()) {
                    diags.push(Diagnostic {
                        kind: DiagnosticKind::NegativeEntry,
                        message: format!(
                            "cpt of {}: row {} contains a negative or non-finite entry",
                            self.names[i], r
                        ),
                    });
                    continue;
                }
                let s: f64 = row.iter().sum();
                if (s - 1.0).abs() > NORM_TOL {
                    diags.push(Diagnostic {
                        kind: DiagnosticKind::NotNormalized,
                        message: format!(
                            "cpt of {}: row {} sums to {} (expected 1 within {})",
                            self.names[i], r, s, NORM_TOL
                        ),
                    });
                }
            }
        }
        diags
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DiagnosticKind {
    Cycle,
    NotNormalized,
    NegativeEntry,
}

#[derive(Clone, Debug)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub message: String,
}

/// Evidence: variables clamped to observed values.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Evidence {
    map: BTreeMap<VarId, usize>,
}

impl Evidence {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (VarId, usize)>) -> Self {
        Evidence {
            map: pairs.into_iter().collect(),
        }
    }

    pub fn set(&mut self, v: VarId, value: usize) {
        self.map.insert(v, value);
    }

    pub fn get(&self, v: VarId) -> Option<usize> {
        self.map.get(&v).copied()
    }

    pub fn contains(&self, v: VarId) -> bool {
        self.map.contains_key(&v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, usize)> + '_ {
        self.map.iter().map(|(&v, &x)| (v, x))
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.map.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Check values against domain cardinalities.
    pub fn check(&self, net: &BayesNet) -> Result<(), ModelError> {
        for (v, x) in self.iter() {
            if v.0 >= net.num_vars() {
                return Err(ModelError::VarOutOfRange(v.0, net.num_vars()));
            }
            if x >= net.card(v) {
                return Err(ModelError::InvalidValue {
                    var: v.0,
                    value: x,
                    card: net.card(v),
                });
            }
        }
        Ok(())
    }
}

/// Partial or full assignment of value indices to variables, over a fixed
/// variable count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    values: Vec<Option<usize>>,
}

impl Assignment {
    pub fn empty(n: usize) -> Self {
        Assignment {
            values: vec![None; n],
        }
    }

    pub fn full(values: Vec<usize>) -> Self {
        Assignment {
            values: values.into_iter().map(Some).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.values.iter().all(|v| v.is_some())
    }

    pub fn set(&mut self, v: VarId, value: usize) {
        self.values[v.0] = Some(value);
    }

    pub fn get(&self, v: VarId) -> Option<usize> {
        self.values.get(v.0).copied().flatten()
    }
}
