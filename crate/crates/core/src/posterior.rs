//! Bayes posterior over the true availability given a noisy declaration.

use crate::error::{ensure_finite, Error, Result};
use crate::laplace::{log_kernel, PrivacyParams};
use crate::logspace::{log_sum_exp, sum_ascending, LogProb};
use crate::priors::AvailabilityPrior;

/// Normalized posterior `P[k = i | declaration = x]` for `i` in `0..=n`, in log space.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorPmf {
    n: u64,
    x: f64,
    log_weights: Vec<LogProb>,
}

/// Posterior for `prior` after observing the declaration `x`.
pub fn posterior(prior: &AvailabilityPrior, privacy: &PrivacyParams, x: f64) -> Result<PosteriorPmf> {
    posterior_from_log_prior(&prior.log_pmf_table(), privacy, x)
}

/// Same as [`posterior`] with a precomputed `ln P[k = i]` table (index = count).
pub fn posterior_from_log_prior(
    log_prior: &[LogProb],
    privacy: &PrivacyParams,
    x: f64,
) -> Result<PosteriorPmf> {
    ensure_finite("x", x)?;
    if log_prior.is_empty() {
        return Err(Error::Internal("empty prior support".into()));
    }
    let joint: Vec<LogProb> = log_prior
        .iter()
        .enumerate()
        .map(|(i, lp)| lp.shift(log_kernel(privacy, i as f64, x)))
        .collect();
    let peak = joint
        .iter()
        .filter_map(|lw| lw.ln())
        .fold(f64::NEG_INFINITY, f64::max);
    if !peak.is_finite() {
        return Err(Error::Internal(format!("posterior evidence vanished at x={x}")));
    }
    // subtract the peak first so the normalizer is O(ln n) even when |x| is huge
    let shifted: Vec<LogProb> = joint.into_iter().map(|lw| lw.shift(-peak)).collect();
    let log_z = log_sum_exp(shifted.iter().copied()).ln().unwrap_or(0.0);
    let log_weights = shifted.into_iter().map(|lw| lw.shift(-log_z)).collect();
    Ok(PosteriorPmf {
        n: log_prior.len() as u64 - 1,
        x,
        log_weights,
    })
}

impl PosteriorPmf {
    pub fn n(&self) -> u64 {
        self.n
    }

    /// The conditioning declaration.
    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn log_weights(&self) -> &[LogProb] {
        &self.log_weights
    }

    pub fn prob(&self, i: u64) -> f64 {
        self.log_weights.get(i as usize).map_or(0.0, |w| w.exp())
    }

    pub fn probs(&self) -> Vec<f64> {
        self.log_weights.iter().map(|w| w.exp()).collect()
    }

    /// `ln` of the total mass; 0 up to rounding.
    pub fn log_total(&self) -> f64 {
        log_sum_exp(self.log_weights.iter().copied())
            .ln()
            .unwrap_or(f64::NEG_INFINITY)
    }

    pub fn mean(&self) -> f64 {
        sum_ascending(
            self.log_weights
                .iter()
                .enumerate()
                .map(|(i, w)| i as f64 * w.exp())
                .collect(),
        )
    }

    /// `P[k <= i]`.
    pub fn cdf(&self, i: u64) -> f64 {
        let end = (i as usize + 1).min(self.log_weights.len());
        sum_ascending(self.log_weights[..end].iter().map(|w| w.exp()).collect()).min(1.0)
    }

    /// `P[k > threshold]`.
    pub fn tail_prob(&self, threshold: u64) -> f64 {
        let start = (threshold as usize).saturating_add(1).min(self.log_weights.len());
        sum_ascending(self.log_weights[start..].iter().map(|w| w.exp()).collect()).min(1.0)
    }

    /// `E[(k - threshold)^+]`, summed from the smallest term to the largest.
    pub fn expected_excess(&self, threshold: u64) -> f64 {
        let start = (threshold as usize).saturating_add(1).min(self.log_weights.len());
        let terms = self.log_weights[start..]
            .iter()
            .enumerate()
            .map(|(j, w)| (j + 1) as f64 * w.exp())
            .collect();
        sum_ascending(terms)
    }
}
