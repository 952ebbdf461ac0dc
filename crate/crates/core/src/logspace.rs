//! Log-domain probabilities with an explicit representation of zero.
//!
//! Probabilities that are exactly zero (for example the interior points of the
//! two-point unit-correlation prior) are carried as [`LogProb::Zero`] instead
//! of `f64::NEG_INFINITY`, so a reduction can never produce `-inf - -inf = NaN`.

use std::cmp::Ordering;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LogProb {
    /// Probability exactly zero.
    Zero,
    /// Natural log of a strictly positive probability (or weight).
    Ln(f64),
}

impl LogProb {
    pub const ONE: LogProb = LogProb::Ln(0.0);

    /// Wraps a log value; `-inf` maps to [`LogProb::Zero`].
    pub fn from_ln(value: f64) -> Self {
        if value == f64::NEG_INFINITY {
            LogProb::Zero
        } else {
            LogProb::Ln(value)
        }
    }

    /// `ln(p)` for a linear-space probability `p >= 0`.
    pub fn from_prob(p: f64) -> Self {
        if p <= 0.0 {
            LogProb::Zero
        } else {
            LogProb::Ln(p.ln())
        }
    }

    pub fn ln(self) -> Option<f64> {
        match self {
            LogProb::Zero => None,
            LogProb::Ln(v) => Some(v),
        }
    }

    pub fn is_zero(self) -> bool {
        matches!(self, LogProb::Zero)
    }

    pub fn exp(self) -> f64 {
        match self {
            LogProb::Zero => 0.0,
            LogProb::Ln(v) => v.exp(),
        }
    }

    /// Product of two probabilities (sum of logs).
    pub fn mul(self, other: LogProb) -> LogProb {
        match (self, other) {
            (LogProb::Ln(a), LogProb::Ln(b)) => LogProb::Ln(a + b),
            _ => LogProb::Zero,
        }
    }

    /// Multiplies by `exp(delta)`.
    pub fn shift(self, delta: f64) -> LogProb {
        match self {
            LogProb::Zero => LogProb::Zero,
            LogProb::Ln(v) => LogProb::Ln(v + delta),
        }
    }

    /// Total order with `Zero` below every finite value.
    pub fn total_cmp(&self, other: &LogProb) -> Ordering {
        match (self, other) {
            (LogProb::Zero, LogProb::Zero) => Ordering::Equal,
            (LogProb::Zero, _) => Ordering::Less,
            (_, LogProb::Zero) => Ordering::Greater,
            (LogProb::Ln(a), LogProb::Ln(b)) => a.total_cmp(b),
        }
    }
}

/// `ln(sum(exp(v)))` with max-shift; zero terms are skipped.
pub fn log_sum_exp<I>(values: I) -> LogProb
where
    I: IntoIterator<Item = LogProb>,
    I::IntoIter: Clone,
{
    let iter = values.into_iter();
    let max = iter
        .clone()
        .filter_map(LogProb::ln)
        .fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return LogProb::Zero;
    }
    let mut terms: Vec<f64> = iter.filter_map(LogProb::ln).map(|v| (v - max).exp()).collect();
    // every term is in (0, 1]; adding small ones first bounds the rounding error
    terms.sort_by(f64::total_cmp);
    let sum: f64 = terms.iter().sum();
    LogProb::Ln(max + sum.ln())
}

/// Sum of nonnegative terms accumulated from smallest to largest.
pub fn sum_ascending(mut terms: Vec<f64>) -> f64 {
    terms.sort_by(f64::total_cmp);
    terms.iter().sum()
}
