//! Self-checks comparing independent evaluation routes on random instances.

use std::fmt;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use crate::error::Result;
use crate::laplace::PrivacyParams;
use crate::posterior::posterior;
use crate::pricing::{closed_form, price, price_binomial_endpoints, Demand, MarketCosts};
use crate::priors::{AvailabilityPrior, PriorKind};

/// Relative tolerance shared by every equivalence check.
pub const REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Check {
    PosteriorNormalization,
    UnitClosedForm,
    BinomialClosedForm,
    UniformClosedForm,
    BinomialEndpoints,
    PremiumBounds,
}

impl Check {
    pub const ALL: [Check; 6] = [
        Check::PosteriorNormalization,
        Check::UnitClosedForm,
        Check::BinomialClosedForm,
        Check::UniformClosedForm,
        Check::BinomialEndpoints,
        Check::PremiumBounds,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::PosteriorNormalization => "posterior-normalization",
            Check::UnitClosedForm => "unit-closed-form",
            Check::BinomialClosedForm => "binomial-closed-form",
            Check::UniformClosedForm => "uniform-closed-form",
            Check::BinomialEndpoints => "binomial-endpoints",
            Check::PremiumBounds => "premium-bounds",
        }
    }

    pub fn from_name(name: &str) -> Option<Check> {
        Check::ALL.into_iter().find(|c| c.name() == name)
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub instances: usize,
    pub seed: u64,
    /// Negates the reference value of one check; used to test the harness itself.
    pub fault: Option<Check>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            instances: 200,
            seed: 0,
            fault: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub check: Check,
    pub instances: usize,
    pub max_rel_error: f64,
    /// Parameters of the first failing instance.
    pub failure: Option<String>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    (a - b).abs() / a.abs().max(b.abs())
}

#[derive(Debug, Clone, Copy)]
struct Instance {
    prior: AvailabilityPrior,
    lambda: f64,
    k_star: u64,
    x: f64,
    c_s: f64,
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "prior={} lambda={} k_star={} x={} c_s={}",
            self.prior, self.lambda, self.k_star, self.x, self.c_s
        )
    }
}

fn random_instance(rng: &mut ChaCha8Rng, kind: PriorKind) -> Instance {
    let n: u64 = rng.gen_range(1..=200);
    // endpoints of p are exercised explicitly now and then
    let p = match rng.gen_range(0..10) {
        0 => 0.0,
        1 => 1.0,
        _ => rng.gen_range(0.01..0.99),
    };
    let prior = match kind {
        PriorKind::UnitCorrelation => AvailabilityPrior::unit_correlation(n, p),
        PriorKind::Binomial => AvailabilityPrior::binomial(n, p),
        PriorKind::Uniform => AvailabilityPrior::uniform(n),
    }
    .expect("generated prior is valid");
    Instance {
        prior,
        lambda: rng.gen_range(0.05..3.0),
        k_star: rng.gen_range(0..=n + 2),
        x: rng.gen_range(-10.0..n as f64 + 10.0),
        c_s: rng.gen_range(0.1..10.0),
    }
}

fn check_kind(check: Check) -> PriorKind {
    match check {
        Check::UnitClosedForm => PriorKind::UnitCorrelation,
        Check::UniformClosedForm => PriorKind::Uniform,
        _ => PriorKind::Binomial,
    }
}

/// Returns the worst relative error for one instance, or a failure description.
fn evaluate(check: Check, inst: &Instance, flip: f64) -> Result<std::result::Result<f64, String>> {
    let privacy = PrivacyParams::new(inst.lambda)?;
    let costs = MarketCosts::pricing_only(inst.c_s)?;
    let demand = Demand(inst.k_star);
    let generic = || price(&costs, &privacy, &inst.prior, demand, inst.x).map(|q| q.premium);
    let compare = |a: f64, b: f64, what: &str| {
        let e = rel_diff(a, b);
        if e <= REL_TOL {
            Ok(e)
        } else {
            Err(format!("{what}: {a} vs {b} (rel {e:.3e})"))
        }
    };
    Ok(match check {
        Check::PosteriorNormalization => {
            let post = posterior(&inst.prior, &privacy, inst.x)?;
            let mass = flip * post.log_total().exp();
            let positive = post.log_weights().iter().all(|w| w.ln().is_none_or(|v| v <= 1e-15));
            if !positive {
                Err("log-weight above zero".to_string())
            } else {
                compare(mass, 1.0, "total mass")
            }
        }
        Check::UnitClosedForm => {
            let p = inst.prior.p().unwrap_or(0.0);
            let closed = flip
                * closed_form::unit_correlation_premium(&costs, &privacy, inst.prior.n(), p, demand, inst.x);
            compare(generic()?, closed, "generic vs closed form")
        }
        Check::BinomialClosedForm => {
            let closed = flip * closed_form::binomial_premium(&costs, &privacy, &inst.prior, demand, inst.x);
            compare(generic()?, closed, "generic vs closed form")
        }
        Check::UniformClosedForm => {
            let closed =
                flip * closed_form::uniform_premium(&costs, &privacy, inst.prior.n(), demand, inst.x);
            compare(generic()?, closed, "generic vs closed form")
        }
        Check::BinomialEndpoints => {
            let (low, high) = price_binomial_endpoints(&costs, &privacy, &inst.prior, demand)?;
            let at0 = price(&costs, &privacy, &inst.prior, demand, 0.0)?.premium;
            let atn = price(&costs, &privacy, &inst.prior, demand, inst.prior.n() as f64)?.premium;
            compare(at0, flip * low, "low endpoint vs price at x=0")
                .and_then(|a| compare(atn, flip * high, "high endpoint vs price at x=n").map(|b| a.max(b)))
        }
        Check::PremiumBounds => {
            let premium = flip * generic()?;
            let cap = inst.c_s * inst.prior.n().saturating_sub(inst.k_star) as f64;
            if premium >= 0.0 && premium <= cap * (1.0 + 1e-12) {
                Ok(0.0)
            } else {
                Err(format!("premium {premium} outside [0, {cap}]"))
            }
        }
    })
}

pub fn run_check(check: Check, opts: &VerifyOptions) -> Result<CheckOutcome> {
    // every check draws from its own stream so adding checks never shifts others
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream(Check::ALL.iter().position(|c| *c == check).unwrap_or(0) as u64);
    let flip = if opts.fault == Some(check) { -1.0 } else { 1.0 };
    let mut max_rel_error: f64 = 0.0;
    for idx in 0..opts.instances {
        let kind = match check {
            Check::PosteriorNormalization | Check::PremiumBounds => match idx % 3 {
                0 => PriorKind::UnitCorrelation,
                1 => PriorKind::Binomial,
                _ => PriorKind::Uniform,
            },
            _ => check_kind(check),
        };
        let inst = random_instance(&mut rng, kind);
        match evaluate(check, &inst, flip)? {
            Ok(e) => max_rel_error = max_rel_error.max(e),
            Err(msg) => {
                return Ok(CheckOutcome {
                    check,
                    instances: idx + 1,
                    max_rel_error,
                    failure: Some(format!("instance {idx}: {inst}: {msg}")),
                })
            }
        }
    }
    Ok(CheckOutcome {
        check,
        instances: opts.instances,
        max_rel_error,
        failure: None,
    })
}

pub fn run_all(opts: &VerifyOptions) -> Result<Vec<CheckOutcome>> {
    Check::ALL.iter().map(|c| run_check(*c, opts)).collect()
}
