//! Accuracy and uncertainty measures for multi-chain runs: mean squared
//! marginal error, average absolute error, running-sum sample variance and
//! Student-t confidence intervals.
//!
//! The absolute-error and interval averages carry a 1/(N * sum |D(X_i)|)
//! normalizer while the MSE uses 1/(sum |D(X_i)|); the two conventions are
//! kept distinct and locked by golden tests.

use std::collections::BTreeMap;

use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;

use crate::exact::Distribution;
use crate::model::VarId;

pub type Marginals = BTreeMap<VarId, Distribution>;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("marginal maps disagree on keys (first offender: variable {0})")]
    KeyMismatch(usize),
    #[error("need at least 2 chains, got {0}")]
    InsufficientChains(usize),
    #[error("invalid parameter: {0}")]
    Parameter(String),
}

fn check_keys(exact: &Marginals, approx: &Marginals) -> Result<(), MetricsError> {
    for (v, d) in exact {
        match approx.get(v) {
            Some(a) if a.probs.len() == d.probs.len() => {}
            _ => return Err(MetricsError::KeyMismatch(v.0)),
        }
    }
    if let Some(v) = approx.keys().find(|v| !exact.contains_key(v)) {
        return Err(MetricsError::KeyMismatch(v.0));
    }
    Ok(())
}

/// Mean squared error over all variable-values, normalized by the total
/// number of variable-values.
pub fn mse(exact: &Marginals, approx: &Marginals) -> Result<f64, MetricsError> {
    check_keys(exact, approx)?;
    let mut num = 0.0;
    let mut den = 0usize;
    for (v, d) in exact {
        let a = &approx[v];
        for (p, q) in d.probs.iter().zip(&a.probs) {
            num += (p - q) * (p - q);
        }
        den += d.probs.len();
    }
    Ok(num / den as f64)
}

/// Average absolute error Delta, with the 1/(N * sum |D(X_i)|) normalizer.
pub fn avg_abs_error(exact: &Marginals, approx: &Marginals) -> Result<f64, MetricsError> {
    check_keys(exact, approx)?;
    let n_vars = exact.len();
    let mut num = 0.0;
    let mut values = 0usize;
    for (v, d) in exact {
        let a = &approx[v];
        for (p, q) in d.probs.iter().zip(&a.probs) {
            num += (p - q).abs();
        }
        values += d.probs.len();
    }
    Ok(num / (n_vars as f64 * values as f64))
}

/// Sample variance of per-chain estimates from running sums:
/// (sum P_m^2 - M * pooled^2) / (M - 1), clamped at zero against roundoff.
pub fn sample_variance(chain_estimates: &[f64]) -> Result<f64, MetricsError> {
    let m = chain_estimates.len();
    if m < 2 {
        return Err(MetricsError::InsufficientChains(m));
    }
    let sum: f64 = chain_estimates.iter().sum();
    let sum_sq: f64 = chain_estimates.iter().map(|x| x * x).sum();
    let pooled = sum / m as f64;
    let s2 = (sum_sq - m as f64 * pooled * pooled) / (m as f64 - 1.0);
    Ok(s2.max(0.0))
}

/// Upper-tail critical value t_{alpha/2, df} of the Student-t distribution.
pub fn t_quantile(alpha: f64, df: usize) -> Result<f64, MetricsError> {
    if !(0.0 < alpha && alpha <= 1.0) {
        return Err(MetricsError::Parameter(format!("alpha = {alpha}")));
    }
    if df < 1 {
        return Err(MetricsError::Parameter("df must be >= 1".into()));
    }
    let t = StudentsT::new(0.0, 1.0, df as f64)
        .map_err(|e| MetricsError::Parameter(e.to_string()))?;
    Ok(t.inverse_cdf(1.0 - alpha / 2.0))
}

/// Pooled estimate and t-interval half-width for one variable-value across
/// chains: half-width = t_{alpha/2, M-1} * S / sqrt(M).
pub fn confidence_interval(
    chain_estimates: &[f64],
    alpha: f64,
) -> Result<(f64, f64), MetricsError> {
    let m = chain_estimates.len();
    let s2 = sample_variance(chain_estimates)?;
    let pooled = chain_estimates.iter().sum::<f64>() / m as f64;
    let t = t_quantile(alpha, m - 1)?;
    Ok((pooled, t * s2.sqrt() / (m as f64).sqrt()))
}

/// Per variable-value interval data for a multi-chain run.
#[derive(Clone, Debug)]
pub struct IntervalEntry {
    pub var: VarId,
    pub value: usize,
    pub chain_estimates: Vec<f64>,
    pub pooled: f64,
    pub variance: f64,
    pub half_width: f64,
}

#[derive(Clone, Debug)]
pub struct MultiChainReport {
    pub alpha: f64,
    pub entries: Vec<IntervalEntry>,
}

/// Scalar accuracy summary plus per-variable mean absolute errors.
#[derive(Clone, Debug)]
pub struct AccuracyReport {
    pub mse: f64,
    pub delta: f64,
    pub delta90: f64,
    pub per_var: Vec<(VarId, f64)>,
}

/// Assemble MSE, Delta, Delta-interval and per-value intervals in one pass
/// over the chains.
pub fn build_report(
    exact: &Marginals,
    per_chain: &[Marginals],
    alpha: f64,
) -> Result<(AccuracyReport, MultiChainReport), MetricsError> {
    let m = per_chain.len();
    if m < 2 {
        return Err(MetricsError::InsufficientChains(m));
    }
    for chain in per_chain {
        check_keys(exact, chain)?;
    }
    let t = t_quantile(alpha, m - 1)?;

    let mut entries = Vec::new();
    let mut pooled_map: Marginals = BTreeMap::new();
    let mut half_width_sum = 0.0;
    let mut total_values = 0usize;
    for (&v, d) in exact {
        let card = d.probs.len();
        let mut pooled_probs = Vec::with_capacity(card);
        for value in 0..card {
            let chain_estimates: Vec<f64> =
                per_chain.iter().map(|c| c[&v].probs[value]).collect();
            let sum: f64 = chain_estimates.iter().sum();
            let pooled = sum / m as f64;
            let variance = sample_variance(&chain_estimates)?;
            let half_width = t * variance.sqrt() / (m as f64).sqrt();
            half_width_sum += half_width;
            entries.push(IntervalEntry {
                var: v,
                value,
                chain_estimates,
                pooled,
                variance,
                half_width,
            });
            pooled_probs.push(pooled);
        }
        total_values += card;
        pooled_map.insert(
            v,
            Distribution {
                var: v,
                probs: pooled_probs,
            },
        );
    }

    let n_vars = exact.len();
    let delta90 = half_width_sum / (n_vars as f64 * total_values as f64);
    let mse_val = mse(exact, &pooled_map)?;
    let delta = avg_abs_error(exact, &pooled_map)?;
    let per_var = exact
        .iter()
        .map(|(&v, d)| {
            let a = &pooled_map[&v];
            let err: f64 = d
                .probs
                .iter()
                .zip(&a.probs)
                .map(|(p, q)| (p - q).abs())
                .sum::<f64>()
                / d.probs.len() as f64;
            (v, err)
        })
        .collect();

    Ok((
        AccuracyReport {
            mse: mse_val,
            delta,
            delta90,
            per_var,
        },
        MultiChainReport { alpha, entries },
    ))
}
