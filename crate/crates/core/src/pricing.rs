//! Option premium `c_opt = E[c_s (k - k*)^+ | declaration = x]`.
//!
//! Every prior-based quote goes through one code path: the posterior from
//! [`crate::posterior`] weighted by the excess-items payoff. The model-specific
//! entry points only check the prior kind. Closed-form ratios for each model
//! live in [`closed_form`] and are used to cross-check the generic path.

use std::fmt;

use crate::error::{ensure_finite, invalid, Error, Result};
use crate::laplace::{laplace_cdf, PrivacyParams};
use crate::posterior::{posterior, PosteriorPmf};
use crate::priors::{AvailabilityPrior, PriorKind};

/// Per-item and per-query costs faced by the broker.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketCosts {
    /// Supplier unit price.
    pub c_s: f64,
    /// Unit cost of producing an item in-house.
    pub c_p: f64,
    /// Fixed fee for querying the statistical database.
    pub c_q: f64,
}

impl MarketCosts {
    pub fn new(c_s: f64, c_p: f64, c_q: f64) -> Result<Self> {
        ensure_finite("c_s", c_s)?;
        ensure_finite("c_p", c_p)?;
        ensure_finite("c_q", c_q)?;
        if c_s <= 0.0 {
            return Err(invalid("c_s", format!("must be > 0, got {c_s}")));
        }
        if c_q < 0.0 {
            return Err(invalid("c_q", format!("must be >= 0, got {c_q}")));
        }
        if c_p <= c_s {
            return Err(invalid(
                "c_p",
                format!("must exceed the supplier price c_s={c_s}, got {c_p}"),
            ));
        }
        Ok(Self { c_s, c_p, c_q })
    }

    /// Costs for quoting only: the premium depends on `c_s` alone, so production
    /// is left unbounded (`c_p = inf`) and the query is free.
    pub fn pricing_only(c_s: f64) -> Result<Self> {
        ensure_finite("c_s", c_s)?;
        if c_s <= 0.0 {
            return Err(invalid("c_s", format!("must be > 0, got {c_s}")));
        }
        Ok(Self {
            c_s,
            c_p: f64::INFINITY,
            c_q: 0.0,
        })
    }
}

/// Number of items the end customers want.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Demand(pub u64);

impl Demand {
    pub fn k_star(self) -> u64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PricingModel {
    /// Declaration taken at face value, no prior on availability.
    PriorFree,
    Prior(AvailabilityPrior),
}

impl fmt::Display for PricingModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PricingModel::PriorFree => f.write_str("prior-free"),
            PricingModel::Prior(p) => write!(f, "{p}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptionQuote {
    pub premium: f64,
    /// `premium / (c_s n)`; `None` when no supplier count is known (prior-free).
    pub normalized: Option<f64>,
    pub model: PricingModel,
    pub x: f64,
    /// Mean of the availability distribution the quote was computed under.
    pub posterior_mean: f64,
    /// `P[k > k*]` under the same distribution.
    pub tail_prob: f64,
}

fn normalize(premium: f64, c_s: f64, n: u64) -> f64 {
    if n == 0 {
        0.0
    } else {
        premium / (c_s * n as f64)
    }
}

/// Face-value pricing with Laplace noise:
/// `c_s [ (x - k*)^+ + exp(-lambda |x - k*|) / (2 lambda) ]`.
///
/// This equals `E[c_s (x + L - k*)^+]` for Laplace noise `L`, which is also
/// the model used for the diagnostics.
pub fn price_prior_free(
    costs: &MarketCosts,
    privacy: &PrivacyParams,
    demand: Demand,
    x: f64,
) -> Result<OptionQuote> {
    ensure_finite("x", x)?;
    let lambda = privacy.lambda();
    let gap = x - demand.0 as f64;
    let premium = costs.c_s * (gap.max(0.0) + (-lambda * gap.abs()).exp() / (2.0 * lambda));
    Ok(OptionQuote {
        premium,
        normalized: None,
        model: PricingModel::PriorFree,
        x,
        posterior_mean: x,
        tail_prob: 1.0 - laplace_cdf(privacy, x, demand.0 as f64),
    })
}

fn quote_from_posterior(
    costs: &MarketCosts,
    prior: &AvailabilityPrior,
    post: &PosteriorPmf,
    demand: Demand,
) -> OptionQuote {
    let premium = costs.c_s * post.expected_excess(demand.0);
    OptionQuote {
        premium,
        normalized: Some(normalize(premium, costs.c_s, prior.n())),
        model: PricingModel::Prior(*prior),
        x: post.x(),
        posterior_mean: post.mean(),
        tail_prob: post.tail_prob(demand.0),
    }
}

/// Generic premium for any prior: `sum_i P[k=i | x] c_s (i - k*)^+`.
pub fn price(
    costs: &MarketCosts,
    privacy: &PrivacyParams,
    prior: &AvailabilityPrior,
    demand: Demand,
    x: f64,
) -> Result<OptionQuote> {
    let post = posterior(prior, privacy, x)?;
    Ok(quote_from_posterior(costs, prior, &post, demand))
}

/// Quote under `model`, dispatching prior-free quotes to [`price_prior_free`].
pub fn price_model(
    costs: &MarketCosts,
    privacy: &PrivacyParams,
    model: &PricingModel,
    demand: Demand,
    x: f64,
) -> Result<OptionQuote> {
    match model {
        PricingModel::PriorFree => price_prior_free(costs, privacy, demand, x),
        PricingModel::Prior(prior) => price(costs, privacy, prior, demand, x),
    }
}

fn expect_kind(prior: &AvailabilityPrior, expected: PriorKind) -> Result<()> {
    if prior.kind() == expected {
        Ok(())
    } else {
        Err(Error::ModelMismatch {
            expected: expected.name(),
            actual: prior.kind().name(),
        })
    }
}

/// Two-point prior. Equals `c_s (n - k*)^+ P[k = n | x]`.
pub fn price_unit_correlation(
    costs: &MarketCosts,
    privacy: &PrivacyParams,
    prior: &AvailabilityPrior,
    demand: Demand,
    x: f64,
) -> Result<OptionQuote> {
    expect_kind(prior, PriorKind::UnitCorrelation)?;
    price(costs, privacy, prior, demand, x)
}

/// Independent suppliers.
pub fn price_binomial(
    costs: &MarketCosts,
    privacy: &PrivacyParams,
    prior: &AvailabilityPrior,
    demand: Demand,
    x: f64,
) -> Result<OptionQuote> {
    expect_kind(prior, PriorKind::Binomial)?;
    price(costs, privacy, prior, demand, x)
}

/// Non-informative prior; the posterior is the normalized likelihood.
pub fn price_uniform(
    costs: &MarketCosts,
    privacy: &PrivacyParams,
    prior: &AvailabilityPrior,
    demand: Demand,
    x: f64,
) -> Result<OptionQuote> {
    expect_kind(prior, PriorKind::Uniform)?;
    price(costs, privacy, prior, demand, x)
}

/// Low and high binomial premiums: the limits with kernels `exp(-lambda i)`
/// (declaration at 0) and `exp(+lambda i)` (declaration at n).
pub fn price_binomial_endpoints(
    costs: &MarketCosts,
    privacy: &PrivacyParams,
    prior: &AvailabilityPrior,
    demand: Demand,
) -> Result<(f64, f64)> {
    expect_kind(prior, PriorKind::Binomial)?;
    let lambda = privacy.lambda();
    let low = closed_form::excess_ratio(prior, demand, |i| -lambda * i as f64);
    let high = closed_form::excess_ratio(prior, demand, |i| lambda * i as f64);
    Ok((costs.c_s * low, costs.c_s * high))
}

/// Piecewise-linear approximation of the uniform-prior premium, `c_s (x - k*)^+`.
/// `n` only fixes the normalization `premium / (c_s n)` and does not enter the value.
pub fn uniform_knee_approximation(costs: &MarketCosts, _n: u64, demand: Demand, x: f64) -> f64 {
    costs.c_s * (x - demand.0 as f64).max(0.0)
}

/// Closed-form premium ratios evaluated directly in log space, independent of
/// the posterior module. Used as cross-checks of [`price`].
pub mod closed_form {
    use super::{Demand, MarketCosts};
    use crate::laplace::PrivacyParams;
    use crate::logspace::{log_sum_exp, LogProb};
    use crate::priors::AvailabilityPrior;

    /// `sum_{i>k*} (i-k*) P[k=i] e^{g(i)} / sum_j P[k=j] e^{g(j)}` for a log-kernel `g`.
    pub(crate) fn excess_ratio<G: Fn(u64) -> f64>(
        prior: &AvailabilityPrior,
        demand: Demand,
        log_kernel: G,
    ) -> f64 {
        let k_star = demand.0;
        let n = prior.n();
        if k_star >= n {
            return 0.0;
        }
        let table = prior.log_pmf_table();
        let den = log_sum_exp(
            table
                .iter()
                .enumerate()
                .map(|(j, lp)| lp.shift(log_kernel(j as u64))),
        );
        let num = log_sum_exp(
            table
                .iter()
                .enumerate()
                .skip(k_star as usize + 1)
                .map(|(i, lp)| lp.shift(((i as u64 - k_star) as f64).ln() + log_kernel(i as u64))),
        );
        match (num, den) {
            (LogProb::Ln(a), LogProb::Ln(b)) => (a - b).exp(),
            _ => 0.0,
        }
    }

    /// `c_s (n - k*)^+ / (1 + ((1-p)/p) e^{-lambda(|x| - |n-x|)})`, in the form
    /// `p L_n / (p L_n + (1-p) L_0)` so that `p` in {0, 1} is well defined.
    pub fn unit_correlation_premium(
        costs: &MarketCosts,
        privacy: &PrivacyParams,
        n: u64,
        p: f64,
        demand: Demand,
        x: f64,
    ) -> f64 {
        let payoff = n.saturating_sub(demand.0) as f64;
        if payoff == 0.0 || p == 0.0 {
            return 0.0;
        }
        if p == 1.0 {
            return costs.c_s * payoff;
        }
        let lambda = privacy.lambda();
        // log-odds of k = n against k = 0
        let logit = p.ln() - (-p).ln_1p() + lambda * (x.abs() - (n as f64 - x).abs());
        let prob_full = if logit >= 0.0 {
            1.0 / (1.0 + (-logit).exp())
        } else {
            let e = logit.exp();
            e / (1.0 + e)
        };
        costs.c_s * payoff * prob_full
    }

    /// Independent-suppliers ratio with kernels `e^{-lambda |x - i|}`.
    pub fn binomial_premium(
        costs: &MarketCosts,
        privacy: &PrivacyParams,
        prior: &AvailabilityPrior,
        demand: Demand,
        x: f64,
    ) -> f64 {
        let lambda = privacy.lambda();
        costs.c_s * excess_ratio(prior, demand, |i| -lambda * (x - i as f64).abs())
    }

    /// Uniform ratio `sum_{i>k*} (i-k*) e^{-lambda|x-i|} / sum_j e^{-lambda|x-j|}`;
    /// the prior weight cancels and is never evaluated.
    pub fn uniform_premium(costs: &MarketCosts, privacy: &PrivacyParams, n: u64, demand: Demand, x: f64) -> f64 {
        let k_star = demand.0;
        if k_star >= n {
            return 0.0;
        }
        let lambda = privacy.lambda();
        let kernel = |i: u64| -lambda * (x - i as f64).abs();
        let den = log_sum_exp((0..=n).map(|j| LogProb::Ln(kernel(j))));
        let num = log_sum_exp(
            (k_star + 1..=n).map(|i| LogProb::Ln(((i - k_star) as f64).ln() + kernel(i))),
        );
        match (num, den) {
            (LogProb::Ln(a), LogProb::Ln(b)) => costs.c_s * (a - b).exp(),
            _ => 0.0,
        }
    }
}
