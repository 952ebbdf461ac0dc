//! Option pricing for a market where suppliers' stock counts are released
//! only through Laplace-noised counting queries.
//!
//! A broker commits to deliver `k*` items, buys every one of the `k` items the
//! suppliers hold at `c_s`, and produces any shortfall at `c_p > c_s`. The
//! broker sees only the noisy declaration `x = k + L`. A call option sold to
//! end customers at `E[c_s (k - k*)^+ | x]` moves the excess-purchase risk to
//! them. The expectation is taken under one of three availability priors:
//! unit correlation, independent suppliers (binomial) or uniform.

pub mod error;
pub mod laplace;
pub mod logspace;
pub mod posterior;
pub mod pricing;
pub mod priors;
pub mod simulator;
mod special;
pub mod verify;

pub use error::{Error, Result};
pub use laplace::{
    laplace_log_density, sample_declaration, Declaration, PrivacyParams,
};
pub use logspace::LogProb;
pub use posterior::{posterior, PosteriorPmf};
pub use pricing::{
    price, price_binomial, price_binomial_endpoints, price_model, price_prior_free,
    price_uniform, price_unit_correlation, uniform_knee_approximation, Demand, MarketCosts,
    OptionQuote, PricingModel,
};
pub use priors::{AvailabilityPrior, PriorKind};
pub use simulator::{EpisodeLedger, MetricSummary, Scenario, SimulationReport};
