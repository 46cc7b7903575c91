//! Gibbs sampling and cutset sampling with Rao-Blackwellised mixture
//! estimators and multi-chain orchestration.
//!
//! A "sample" is one full sweep over the sampled set. Estimates accumulate
//! conditional distributions (never value histograms): the plain Gibbs
//! sampler averages the Markov-blanket conditionals, and the cutset sampler
//! averages exact conditionals computed by bucket elimination, for both the
//! sampled variables and the exactly-integrated remainder.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::exact::{
    all_marginals, all_marginals_with_order, be_marginal_with_order, elimination_order,
    Distribution, EliminationOrder, ExactError,
};
use crate::model::{BayesNet, Evidence, VarId};

const MAX_INIT_RETRIES: usize = 1000;
const MAX_CHAIN_RESTARTS: usize = 1000;
const TIME_CHECK_BLOCK: usize = 32;

#[derive(Debug, Error)]
pub enum SamplingError {
    #[error("trapped state: all-zero conditional for variable {var} (chain {chain}, step {step})")]
    TrappedState {
        var: usize,
        chain: usize,
        step: usize,
    },
    #[error("failed to find a positive-probability initial state after {0} attempts")]
    InitFailed(usize),
    #[error("chain restarted {0} times without completing; evidence region may be unreachable")]
    TooManyRestarts(usize),
    #[error("cutset members must be disjoint from evidence")]
    CutsetOverlapsEvidence,
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Model(#[from] crate::model::ModelError),
}

/// An ordered sampling set with its target width bound and the measured
/// (min-fill estimated) adjusted induced width of the remainder.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cutset {
    pub members: Vec<VarId>,
    pub w_bound: usize,
    pub measured_width: usize,
}

impl Cutset {
    pub fn empty() -> Self {
        Cutset {
            members: vec![],
            w_bound: 0,
            measured_width: 0,
        }
    }
}

/// Multi-chain sampler configuration. `seed` fully determines every sample;
/// chain `m` draws from an independent stream derived from `seed ^ m`.
#[derive(Clone, Debug)]
pub struct SamplerConfig {
    pub chains: usize,
    pub samples_per_chain: usize,
    pub seed: u64,
    /// When set, replaces the fixed sample count: each chain samples in
    /// blocks of 32 sweeps until its share of the budget elapses.
    pub time_bound: Option<Duration>,
    pub burn_in: usize,
}

impl SamplerConfig {
    pub fn new(chains: usize, samples_per_chain: usize, seed: u64) -> Self {
        assert!(chains >= 1 && samples_per_chain >= 1);
        SamplerConfig {
            chains,
            samples_per_chain,
            seed,
            time_bound: None,
            burn_in: 0,
        }
    }
}

/// Current state of one Markov chain: the sample counter, a full-length
/// value vector (evidence entries clamped), and the chain's RNG.
#[derive(Clone, Debug)]
pub struct ChainState {
    pub t: usize,
    pub values: Vec<usize>,
    rng: ChaCha8Rng,
}

impl ChainState {
    pub fn new(values: Vec<usize>, rng: ChaCha8Rng) -> Self {
        ChainState { t: 0, values, rng }
    }
}

/// Running sums of accumulated conditional distributions (one slot per
/// variable value), finalized into normalized estimates.
#[derive(Clone, Debug, Default)]
pub struct RunningEstimator {
    sums: BTreeMap<VarId, Vec<f64>>,
    counts: BTreeMap<VarId, usize>,
}

impl RunningEstimator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, d: &Distribution) {
        let slot = self
            .sums
            .entry(d.var)
            .or_insert_with(|| vec![0.0; d.probs.len()]);
        for (s, &p) in slot.iter_mut().zip(&d.probs) {
            *s += p;
        }
        *self.counts.entry(d.var).or_insert(0) += 1;
    }

    pub fn finalize(&self) -> BTreeMap<VarId, Distribution> {
        self.sums
            .iter()
            .map(|(&v, sums)| {
                let n = self.counts[&v] as f64;
                (
                    v,
                    Distribution {
                        var: v,
                        probs: sums.iter().map(|s| s / n).collect(),
                    },
                )
            })
            .collect()
    }
}

/// Per-chain and pooled marginal estimates of a multi-chain run.
#[derive(Clone, Debug)]
pub struct MultiChainEstimate {
    pub per_chain: Vec<BTreeMap<VarId, Distribution>>,
    pub pooled: BTreeMap<VarId, Distribution>,
    /// Chain re-initializations forced by zero-probability cutset states.
    pub restarts: usize,
    /// Samples actually accumulated per chain (varies in time-bound mode).
    pub samples_per_chain: Vec<usize>,
}

impl MultiChainEstimate {
    fn from_chains(per_chain: Vec<BTreeMap<VarId, Distribution>>) -> Self {
        let pooled = pool_chains(&per_chain);
        let samples = vec![0; per_chain.len()];
        MultiChainEstimate {
            per_chain,
            pooled,
            restarts: 0,
            samples_per_chain: samples,
        }
    }
}

/// Pooled estimate: the arithmetic mean of the chain estimates.
pub fn pool_chains(
    per_chain: &[BTreeMap<VarId, Distribution>],
) -> BTreeMap<VarId, Distribution> {
    let m = per_chain.len() as f64;
    let mut pooled: BTreeMap<VarId, Vec<f64>> = BTreeMap::new();
    for chain in per_chain {
        for (&v, d) in chain {
            let slot = pooled.entry(v).or_insert_with(|| vec![0.0; d.probs.len()]);
            for (s, &p) in slot.iter_mut().zip(&d.probs) {
                *s += p;
            }
        }
    }
    pooled
        .into_iter()
        .map(|(v, sums)| {
            (
                v,
                Distribution {
                    var: v,
                    probs: sums.into_iter().map(|s| s / m).collect(),
                },
            )
        })
        .collect()
}

fn draw(rng: &mut ChaCha8Rng, probs: &[f64]) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}

/// Forward-sample a full state consistent with the evidence: unobserved
/// variables are drawn from their CPT rows in topological order, evidence
/// variables are clamped, and states giving the evidence zero likelihood are
/// rejected (up to 1000 retries).
pub fn forward_init(
    net: &BayesNet,
    e: &Evidence,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<usize>, SamplingError> {
    let topo = net.topological_order()?;
    'retry: for _ in 0..MAX_INIT_RETRIES {
        let mut values = vec![0usize; net.num_vars()];
        for &v in &topo {
            let row = net.cpt(v).row(net.cards(), |u| values[u.0]).to_vec();
            match e.get(v) {
                Some(x) => {
                    if row[x] <= 0.0 {
                        continue 'retry;
                    }
                    values[v.0] = x;
                }
                None => values[v.0] = draw(rng, &row),
            }
        }
        return Ok(values);
    }
    Err(SamplingError::InitFailed(MAX_INIT_RETRIES))
}

/// Gibbs transition distribution P(v | everything else) evaluated at the
/// current state: the product of v's CPT row and the CPT rows of v's
/// children, normalized. Touches only the Markov blanket.
pub fn gibbs_conditional(
    net: &BayesNet,
    v: VarId,
    values: &[usize],
) -> Option<Distribution> {
    let card = net.card(v);
    let own_row = net.cpt(v).row(net.cards(), |u| values[u.0]);
    let mut weights: Vec<f64> = own_row.to_vec();
    for &c in net.children(v) {
        let cpt = net.cpt(c);
        for (val, w) in weights.iter_mut().enumerate().take(card) {
            let row = cpt.row(net.cards(), |u| if u == v { val } else { values[u.0] });
            *w *= row[values[c.0]];
        }
    }
    Distribution::from_weights(v, weights)
}

/// One Gibbs sweep: resample each variable of `sampled` in order, using the
/// freshest values of all other variables.
pub fn gibbs_sweep(
    net: &BayesNet,
    state: &mut ChainState,
    sampled: &[VarId],
) -> Result<(), SamplingError> {
    for &v in sampled {
        let d = gibbs_conditional(net, v, &state.values).ok_or(
            SamplingError::TrappedState {
                var: v.0,
                chain: 0,
                step: state.t,
            },
        )?;
        state.values[v.0] = draw(&mut state.rng, &d.probs);
    }
    state.t += 1;
    Ok(())
}

/// Multi-chain Gibbs sampling with the Rao-Blackwellised mixture estimator:
/// each sweep accumulates the full conditional of every sampled variable.
pub fn gibbs_estimate(
    net: &BayesNet,
    e: &Evidence,
    config: &SamplerConfig,
) -> Result<MultiChainEstimate, SamplingError> {
    e.check(net)?;
    let sampled: Vec<VarId> = net.vars().filter(|v| !e.contains(*v)).collect();
    let mut per_chain = Vec::with_capacity(config.chains);
    let mut samples = Vec::with_capacity(config.chains);
    for m in 0..config.chains {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ m as u64);
        let values = forward_init(net, e, &mut rng)?;
        let mut state = ChainState::new(values, rng);
        for _ in 0..config.burn_in {
            gibbs_sweep(net, &mut state, &sampled).map_err(|err| tag_chain(err, m))?;
        }
        let mut est = RunningEstimator::new();
        let mut taken = 0usize;
        let start = Instant::now();
        let budget = config.time_bound.map(|d| d / config.chains as u32);
        loop {
            let block = match budget {
                Some(_) => TIME_CHECK_BLOCK,
                None => (config.samples_per_chain - taken).min(TIME_CHECK_BLOCK),
            };
            for _ in 0..block {
                gibbs_sweep(net, &mut state, &sampled).map_err(|err| tag_chain(err, m))?;
                for &v in &sampled {
                    let d = gibbs_conditional(net, v, &state.values).ok_or(
                        SamplingError::TrappedState {
                            var: v.0,
                            chain: m,
                            step: state.t,
                        },
                    )?;
                    est.add(&d);
                }
                taken += 1;
            }
            match budget {
                Some(b) => {
                    if start.elapsed() >= b {
                        break;
                    }
                }
                None => {
                    if taken >= config.samples_per_chain {
                        break;
                    }
                }
            }
        }
        per_chain.push(est.finalize());
        samples.push(taken);
    }
    let pooled = pool_chains(&per_chain);
    Ok(MultiChainEstimate {
        per_chain,
        pooled,
        restarts: 0,
        samples_per_chain: samples,
    })
}

fn tag_chain(err: SamplingError, chain: usize) -> SamplingError {
    match err {
        SamplingError::TrappedState { var, step, .. } => {
            SamplingError::TrappedState { var, chain, step }
        }
        other => other,
    }
}

/// Cutset sampler with precomputed per-member elimination orders.
///
/// The evidence-variable *sets* seen by the exact subroutines are fixed for
/// the lifetime of a run (only the values change between sweeps), so each
/// member's min-fill order and the order for the non-sampled remainder are
/// computed once.
pub struct CutsetSampler<'a> {
    net: &'a BayesNet,
    pub cutset: Cutset,
    evidence: Evidence,
    member_orders: Vec<EliminationOrder>,
    rest_order: EliminationOrder,
    /// Unobserved variables outside the cutset (integrated exactly).
    pub rest: Vec<VarId>,
}

impl<'a> CutsetSampler<'a> {
    pub fn new(
        net: &'a BayesNet,
        cutset: Cutset,
        evidence: Evidence,
    ) -> Result<Self, SamplingError> {
        evidence.check(net)?;
        if cutset.members.iter().any(|v| evidence.contains(*v)) {
            return Err(SamplingError::CutsetOverlapsEvidence);
        }
        let e_vars: BTreeSet<VarId> = evidence.vars().collect();
        let member_set: BTreeSet<VarId> = cutset.members.iter().copied().collect();
        let mut member_orders = Vec::with_capacity(cutset.members.len());
        for &c in &cutset.members {
            let mut observed: BTreeSet<VarId> = e_vars.clone();
            observed.extend(member_set.iter().copied().filter(|&u| u != c));
            let kept = [c].into_iter().collect();
            member_orders.push(elimination_order(net, &observed, &kept));
        }
        let observed_all: BTreeSet<VarId> = e_vars.union(&member_set).copied().collect();
        let rest_order = elimination_order(net, &observed_all, &BTreeSet::new());
        let rest = net
            .vars()
            .filter(|v| !observed_all.contains(v))
            .collect();
        Ok(CutsetSampler {
            net,
            cutset,
            evidence,
            member_orders,
            rest_order,
            rest,
        })
    }

    fn member_evidence(&self, skip: Option<usize>, values: &[usize]) -> Evidence {
        let mut e = self.evidence.clone();
        for (j, &c) in self.cutset.members.iter().enumerate() {
            if Some(j) != skip {
                e.set(c, values[c.0]);
            }
        }
        e
    }

    /// P(C_i | all other members at their current values, e), by exact
    /// inference over the non-sampled remainder.
    pub fn conditional(
        &self,
        i: usize,
        values: &[usize],
    ) -> Result<Distribution, ExactError> {
        let e = self.member_evidence(Some(i), values);
        be_marginal_with_order(self.net, &e, self.cutset.members[i], &self.member_orders[i])
    }

    /// One sweep over the cutset in stored member order. Returns the
    /// conditionals used for each draw (the Rao-Blackwellised estimator
    /// terms), or `ZeroEvidence` when a member's posterior is identically
    /// zero and the chain must restart.
    pub fn sweep(&self, state: &mut ChainState) -> Result<Vec<Distribution>, ExactError> {
        let mut conds = Vec::with_capacity(self.cutset.members.len());
        for i in 0..self.cutset.members.len() {
            let d = self.conditional(i, &state.values)?;
            state.values[self.cutset.members[i].0] = draw(&mut state.rng, &d.probs);
            conds.push(d);
        }
        state.t += 1;
        Ok(conds)
    }

    /// Exact posterior marginals of the non-sampled variables given the
    /// current cutset instantiation.
    pub fn rest_marginals(
        &self,
        values: &[usize],
    ) -> Result<BTreeMap<VarId, Distribution>, ExactError> {
        let e = self.member_evidence(None, values);
        all_marginals_with_order(self.net, &e, &self.rest_order)
    }

    /// Multi-chain cutset sampling. Sampled variables are estimated by
    /// averaging their transition conditionals; the remainder by averaging
    /// exact marginals given each sample. With an empty cutset the result is
    /// the exact posterior after a single iteration.
    pub fn estimate(&self, config: &SamplerConfig) -> Result<MultiChainEstimate, SamplingError> {
        if self.cutset.members.is_empty() {
            let pooled = all_marginals(self.net, &self.evidence)?;
            let per_chain = vec![pooled.clone(); config.chains];
            let mut out = MultiChainEstimate::from_chains(per_chain);
            out.samples_per_chain = vec![1; config.chains];
            return Ok(out);
        }
        let mut per_chain = Vec::with_capacity(config.chains);
        let mut samples = Vec::with_capacity(config.chains);
        let mut restarts = 0usize;
        for m in 0..config.chains {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ m as u64);
            let values = forward_init(self.net, &self.evidence, &mut rng)?;
            let mut state = ChainState::new(values, rng);
            let mut est = RunningEstimator::new();
            let mut taken = 0usize;
            let mut chain_restarts = 0usize;
            let start = Instant::now();
            let budget = config.time_bound.map(|d| d / config.chains as u32);
            let mut burned = 0usize;
            loop {
                let outcome = self.sweep(&mut state);
                match outcome {
                    Ok(conds) => {
                        if burned < config.burn_in {
                            burned += 1;
                        } else {
                            for d in &conds {
                                est.add(d);
                            }
                            let rest = self.rest_marginals(&state.values)?;
                            for d in rest.values() {
                                est.add(d);
                            }
                            taken += 1;
                        }
                    }
                    Err(ExactError::ZeroEvidence) => {
                        chain_restarts += 1;
                        if chain_restarts > MAX_CHAIN_RESTARTS {
                            return Err(SamplingError::TooManyRestarts(chain_restarts));
                        }
                        let values = forward_init(self.net, &self.evidence, &mut state.rng)?;
                        state.values = values;
                        continue;
                    }
                    Err(err) => return Err(err.into()),
                }
                match budget {
                    Some(b) => {
                        if taken > 0
                            && (taken % TIME_CHECK_BLOCK == 0)
                            && start.elapsed() >= b
                        {
                            break;
                        }
                    }
                    None => {
                        if taken >= config.samples_per_chain {
                            break;
                        }
                    }
                }
            }
            restarts += chain_restarts;
            per_chain.push(est.finalize());
            samples.push(taken);
        }
        let pooled = pool_chains(&per_chain);
        Ok(MultiChainEstimate {
            per_chain,
            pooled,
            restarts,
            samples_per_chain: samples,
        })
    }
}

/// Convenience wrapper: P(C_i | other members, e) without a prebuilt sampler.
pub fn cutset_conditional(
    net: &BayesNet,
    cutset: &Cutset,
    i: usize,
    values: &[usize],
    e: &Evidence,
) -> Result<Distribution, SamplingError> {
    let sampler = CutsetSampler::new(net, cutset.clone(), e.clone())?;
    Ok(sampler.conditional(i, values)?)
}

/// Convenience wrapper over [`CutsetSampler::estimate`].
pub fn cutset_estimate(
    net: &BayesNet,
    cutset: &Cutset,
    e: &Evidence,
    config: &SamplerConfig,
) -> Result<MultiChainEstimate, SamplingError> {
    CutsetSampler::new(net, cutset.clone(), e.clone())?.estimate(config)
}
