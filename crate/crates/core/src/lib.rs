//! Inference engine for discrete Bayesian networks built around cutset
//! sampling: Gibbs sampling over a subset of variables combined with exact
//! bucket elimination over the rest.
//!
//! The crate is organized as:
//!
//! * [`model`] — network representation, evidence, assignments, validation
//! * [`graph`] — moralization, elimination orderings, induced width, loop cutsets
//! * [`exact`] — factor algebra, bucket elimination, bucket-tree marginals
//! * [`sampling`] — Gibbs and cutset samplers with Rao-Blackwellised estimators
//! * [`wcutset`] — greedy w-cutset selection (GA, MG, HG)
//! * [`ibp`] — iterative belief propagation baseline
//! * [`gen`] — seeded benchmark-network generators
//! * [`metrics`] — MSE, absolute error, multi-chain confidence intervals
//! * [`format`] — line-oriented text formats for networks, evidence, cutsets

pub mod exact;
pub mod format;
pub mod gen;
pub mod graph;
pub mod ibp;
pub mod metrics;
pub mod model;
pub mod sampling;
pub mod wcutset;

pub use exact::{Distribution, Factor};
pub use model::{Assignment, BayesNet, Cpt, Evidence, VarId};
pub use sampling::{Cutset, MultiChainEstimate, SamplerConfig};
