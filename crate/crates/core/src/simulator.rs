//! Monte Carlo replication of one broker round.
//!
//! Each episode: the true availability `k` is drawn from `prior_true`, the
//! curator releases `x = k + L`, the broker quotes the premium under
//! `prior_pricing`, then buys all `k` supplier items at `c_s` and produces
//! any shortfall `(k* - k)^+` at `c_p`.
//!
//! Episode `i` draws from `ChaCha8Rng::seed_from_u64(seed)` on stream `i`, so
//! episodes can run in any order (or in parallel) with identical results.
//! Aggregation uses a fixed pairwise summation tree, which keeps reports
//! bit-identical regardless of thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::laplace::{sample_declaration, PrivacyParams};
use crate::logspace::LogProb;
use crate::posterior::posterior_from_log_prior;
use crate::pricing::{Demand, MarketCosts};
use crate::priors::AvailabilityPrior;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub prior_true: AvailabilityPrior,
    pub prior_pricing: AvailabilityPrior,
    pub privacy: PrivacyParams,
    pub costs: MarketCosts,
    pub demand: Demand,
    pub replications: u64,
    pub seed: u64,
}

impl Scenario {
    pub fn new(
        prior_true: AvailabilityPrior,
        prior_pricing: AvailabilityPrior,
        privacy: PrivacyParams,
        costs: MarketCosts,
        demand: Demand,
        replications: u64,
        seed: u64,
    ) -> Result<Self> {
        if prior_true.n() != prior_pricing.n() {
            return Err(invalid(
                "prior_pricing",
                format!(
                    "must share n with prior_true ({} vs {})",
                    prior_pricing.n(),
                    prior_true.n()
                ),
            ));
        }
        if replications == 0 {
            return Err(invalid("replications", "must be >= 1"));
        }
        if !costs.c_p.is_finite() {
            return Err(invalid("c_p", "must be finite for simulation"));
        }
        Ok(Self {
            prior_true,
            prior_pricing,
            privacy,
            costs,
            demand,
            replications,
            seed,
        })
    }

    /// Matched priors: the broker prices with the generating distribution.
    pub fn matched(
        prior: AvailabilityPrior,
        privacy: PrivacyParams,
        costs: MarketCosts,
        demand: Demand,
        replications: u64,
        seed: u64,
    ) -> Result<Self> {
        Self::new(prior, prior, privacy, costs, demand, replications, seed)
    }
}

/// Outcome of one simulated market round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeLedger {
    pub true_k: u64,
    pub declared_x: f64,
    pub premium: f64,
    /// `c_s k`: every available item is bought.
    pub procurement_cost: f64,
    /// `c_p (k* - k)^+`.
    pub production_cost: f64,
    pub query_cost: f64,
    /// `c_s (k - k*)^+`: items bought beyond the demand.
    pub excess_cost: f64,
    /// `premium - excess_cost`.
    pub transfer_gap: f64,
}

impl EpisodeLedger {
    pub fn total_cost(&self) -> f64 {
        self.query_cost + self.procurement_cost + self.production_cost
    }
}

/// RNG for episode `index` of a run seeded with `seed`.
pub fn episode_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn run_episode<R: Rng + ?Sized>(scenario: &Scenario, rng: &mut R) -> Result<EpisodeLedger> {
    let table = scenario.prior_pricing.log_pmf_table();
    episode(scenario, &table, rng)
}

fn episode<R: Rng + ?Sized>(
    scenario: &Scenario,
    pricing_table: &[LogProb],
    rng: &mut R,
) -> Result<EpisodeLedger> {
    let costs = &scenario.costs;
    let k_star = scenario.demand.0;
    let true_k = scenario.prior_true.sample(rng);
    let x = sample_declaration(&scenario.privacy, true_k, rng).value();
    let post = posterior_from_log_prior(pricing_table, &scenario.privacy, x)?;
    let premium = costs.c_s * post.expected_excess(k_star);
    let excess_cost = costs.c_s * true_k.saturating_sub(k_star) as f64;
    Ok(EpisodeLedger {
        true_k,
        declared_x: x,
        premium,
        procurement_cost: costs.c_s * true_k as f64,
        production_cost: costs.c_p * k_star.saturating_sub(true_k) as f64,
        query_cost: costs.c_q,
        excess_cost,
        transfer_gap: premium - excess_cost,
    })
}

/// All episode ledgers of a scenario, in index order.
pub fn run_ledgers(scenario: &Scenario) -> Result<Vec<EpisodeLedger>> {
    let table = scenario.prior_pricing.log_pmf_table();
    (0..scenario.replications)
        .into_par_iter()
        .map(|i| episode(scenario, &table, &mut episode_rng(scenario.seed, i)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantiles {
    pub q05: f64,
    pub q25: f64,
    pub q50: f64,
    pub q75: f64,
    pub q95: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSummary {
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator); 0 for a single replication.
    pub std_dev: f64,
    /// `std_dev / sqrt(count)`; 0 for a single replication.
    pub std_error: f64,
    pub count: u64,
    pub quantiles: Quantiles,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationReport {
    pub replications: u64,
    pub premium: MetricSummary,
    pub excess_cost: MetricSummary,
    pub transfer_gap: MetricSummary,
    pub total_cost: MetricSummary,
}

impl SimulationReport {
    pub fn from_ledgers(ledgers: &[EpisodeLedger]) -> Self {
        let column = |f: fn(&EpisodeLedger) -> f64| -> MetricSummary {
            summarize(&ledgers.iter().map(f).collect::<Vec<_>>())
        };
        Self {
            replications: ledgers.len() as u64,
            premium: column(|l| l.premium),
            excess_cost: column(|l| l.excess_cost),
            transfer_gap: column(|l| l.transfer_gap),
            total_cost: column(EpisodeLedger::total_cost),
        }
    }

    /// `(name, summary)` pairs in reporting order.
    pub fn metrics(&self) -> [(&'static str, &MetricSummary); 4] {
        [
            ("premium", &self.premium),
            ("excess_cost", &self.excess_cost),
            ("transfer_gap", &self.transfer_gap),
            ("total_cost", &self.total_cost),
        ]
    }
}

pub fn run(scenario: &Scenario) -> Result<SimulationReport> {
    Ok(SimulationReport::from_ledgers(&run_ledgers(scenario)?))
}

/// Sum over a fixed binary tree; the result depends only on the slice contents.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Linear-interpolation quantile (type 7) of sorted data.
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

pub fn summarize(values: &[f64]) -> MetricSummary {
    assert!(!values.is_empty(), "summarize needs at least one value");
    let count = values.len();
    let mean = pairwise_sum(values) / count as f64;
    let std_dev = if count > 1 {
        let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
        (pairwise_sum(&sq) / (count - 1) as f64).sqrt()
    } else {
        0.0
    };
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    MetricSummary {
        mean,
        std_dev,
        std_error: std_dev / (count as f64).sqrt(),
        count: count as u64,
        quantiles: Quantiles {
            q05: quantile_sorted(&sorted, 0.05),
            q25: quantile_sorted(&sorted, 0.25),
            q50: quantile_sorted(&sorted, 0.50),
            q75: quantile_sorted(&sorted, 0.75),
            q95: quantile_sorted(&sorted, 0.95),
        },
    }
}
