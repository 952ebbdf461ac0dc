//! A-priori models for the number of items `k` available across `n` suppliers.

use std::fmt;

use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::logspace::LogProb;
use crate::special::ln_binomial_pmf;

/// Largest `n` accepted by configuration-level validation.
pub const MAX_SUPPLIERS: u64 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PriorKind {
    /// All suppliers have the item (probability `p`) or none do.
    UnitCorrelation,
    /// Independent suppliers, each holding the item with probability `p`.
    Binomial,
    /// Every count in `0..=n` equally likely.
    Uniform,
}

impl PriorKind {
    pub fn name(self) -> &'static str {
        match self {
            PriorKind::UnitCorrelation => "unit-correlation",
            PriorKind::Binomial => "binomial",
            PriorKind::Uniform => "uniform",
        }
    }
}

impl fmt::Display for PriorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AvailabilityPrior {
    kind: PriorKind,
    n: u64,
    p: Option<f64>,
}

fn check_p(p: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(invalid("p", format!("must lie in [0, 1], got {p}")))
    }
}

fn check_n(n: u64) -> Result<u64> {
    if n > MAX_SUPPLIERS {
        Err(invalid("n", format!("must be at most {MAX_SUPPLIERS}, got {n}")))
    } else {
        Ok(n)
    }
}

impl AvailabilityPrior {
    /// Two-point prior: `P[k=0] = 1-p`, `P[k=n] = p`. Requires `n >= 1`.
    pub fn unit_correlation(n: u64, p: f64) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n", "unit-correlation prior needs n >= 1"));
        }
        Ok(Self {
            kind: PriorKind::UnitCorrelation,
            n: check_n(n)?,
            p: Some(check_p(p)?),
        })
    }

    pub fn binomial(n: u64, p: f64) -> Result<Self> {
        Ok(Self {
            kind: PriorKind::Binomial,
            n: check_n(n)?,
            p: Some(check_p(p)?),
        })
    }

    pub fn uniform(n: u64) -> Result<Self> {
        Ok(Self {
            kind: PriorKind::Uniform,
            n: check_n(n)?,
            p: None,
        })
    }

    pub fn kind(&self) -> PriorKind {
        self.kind
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn p(&self) -> Option<f64> {
        self.p
    }

    /// `ln P[k = i]`.
    pub fn log_pmf(&self, i: u64) -> Result<LogProb> {
        if i > self.n {
            return Err(Error::OutOfSupport { index: i, n: self.n });
        }
        Ok(self.log_pmf_in_support(i))
    }

    /// `ln P[k = i]` for every `i` in `0..=n`.
    pub fn log_pmf_table(&self) -> Vec<LogProb> {
        (0..=self.n).map(|i| self.log_pmf_in_support(i)).collect()
    }

    fn log_pmf_in_support(&self, i: u64) -> LogProb {
        let n = self.n;
        match self.kind {
            PriorKind::Uniform => LogProb::Ln(-((n + 1) as f64).ln()),
            PriorKind::UnitCorrelation => {
                let p = self.p.unwrap_or(0.0);
                if i == n {
                    LogProb::from_prob(p)
                } else if i == 0 {
                    LogProb::from_ln((-p).ln_1p())
                } else {
                    LogProb::Zero
                }
            }
            PriorKind::Binomial => {
                let p = self.p.unwrap_or(0.0);
                // p in {0, 1} collapses the support to one point
                if p == 0.0 {
                    return if i == 0 { LogProb::ONE } else { LogProb::Zero };
                }
                if p == 1.0 {
                    return if i == n { LogProb::ONE } else { LogProb::Zero };
                }
                LogProb::Ln(ln_binomial_pmf(n, i, p))
            }
        }
    }

    pub fn mean(&self) -> f64 {
        let n = self.n as f64;
        match self.kind {
            PriorKind::Uniform => n / 2.0,
            PriorKind::UnitCorrelation | PriorKind::Binomial => n * self.p.unwrap_or(0.0),
        }
    }

    pub fn variance(&self) -> f64 {
        let n = self.n as f64;
        match self.kind {
            PriorKind::Uniform => n * (n + 2.0) / 12.0,
            PriorKind::UnitCorrelation => {
                let p = self.p.unwrap_or(0.0);
                n * n * p * (1.0 - p)
            }
            PriorKind::Binomial => {
                let p = self.p.unwrap_or(0.0);
                n * p * (1.0 - p)
            }
        }
    }

    /// Draws a true availability `k`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        match self.kind {
            PriorKind::UnitCorrelation => {
                if rng.gen_bool(self.p.unwrap_or(0.0)) {
                    self.n
                } else {
                    0
                }
            }
            PriorKind::Binomial => {
                let p = self.p.unwrap_or(0.0);
                (0..self.n).filter(|_| rng.gen_bool(p)).count() as u64
            }
            PriorKind::Uniform => rng.gen_range(0..=self.n),
        }
    }
}

impl fmt::Display for AvailabilityPrior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.p {
            Some(p) => write!(f, "{}(n={}, p={})", self.kind, self.n, p),
            None => write!(f, "{}(n={})", self.kind, self.n),
        }
    }
}
