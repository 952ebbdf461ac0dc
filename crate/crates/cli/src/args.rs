use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use crate::config::ModelKind;

#[derive(Debug, Parser)]
#[command(name = "stockopt", version, about = "Option pricing for privacy-preserving supplier markets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Price a single option.
    Quote(QuoteArgs),
    /// Normalized premium over a sweep of declarations, as CSV.
    Curve(CurveArgs),
    /// Monte Carlo replication of a scenario file.
    Simulate(SimulateArgs),
    /// Cross-check the pricing paths on random instances.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ModelArg {
    PriorFree,
    Unit,
    Binomial,
    Uniform,
}

impl From<ModelArg> for ModelKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::PriorFree => ModelKind::PriorFree,
            ModelArg::Unit => ModelKind::Unit,
            ModelArg::Binomial => ModelKind::Binomial,
            ModelArg::Uniform => ModelKind::Uniform,
        }
    }
}

#[derive(Debug, Args)]
pub struct QuoteArgs {
    #[arg(long, value_enum)]
    pub model: ModelArg,
    /// Number of suppliers (required except for prior-free).
    #[arg(long)]
    pub n: Option<u64>,
    /// Availability probability (unit and binomial only).
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub lambda: f64,
    #[arg(long = "k-star")]
    pub k_star: u64,
    /// Declared availability.
    #[arg(long, allow_negative_numbers = true)]
    pub x: f64,
    #[arg(long = "c-s", default_value_t = 1.0)]
    pub c_s: f64,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    /// Scenario file supplying defaults; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub model: Option<ModelArg>,
    #[arg(long)]
    pub n: Option<u64>,
    /// One or more probabilities, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub p: Vec<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    /// One or more demands, comma separated.
    #[arg(long = "k-star", value_delimiter = ',')]
    pub k_star: Vec<u64>,
    /// Declarations as `min:max:step`, both ends inclusive.
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<XRange>,
    #[arg(long = "c-s")]
    pub c_s: Option<f64>,
    /// Write the CSV here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    pub config: PathBuf,
    #[arg(long, env = "STOCKOPT_SEED")]
    pub seed: Option<u64>,
    #[arg(long)]
    pub replications: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 200)]
    pub instances: usize,
    #[arg(long, env = "STOCKOPT_SEED")]
    pub seed: Option<u64>,
    /// Negate the reference value of one check (harness self-test).
    #[arg(long = "inject-fault", hide = true)]
    pub inject_fault: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XRange {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl FromStr for XRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [min, max, step] = parts[..] else {
            return Err(format!("expected min:max:step, got `{s}`"));
        };
        let num = |v: &str| {
            v.trim()
                .parse::<f64>()
                .ok()
                .filter(|f| f.is_finite())
                .ok_or_else(|| format!("`{v}` is not a finite number"))
        };
        Ok(XRange {
            min: num(min)?,
            max: num(max)?,
            step: num(step)?,
        })
    }
}

impl XRange {
    /// Sweep points `min + i * step` up to `max` inclusive, or an error when empty.
    pub fn points(&self) -> Result<Vec<f64>, String> {
        if self.step <= 0.0 {
            return Err(format!("x step must be > 0, got {}", self.step));
        }
        if self.max < self.min {
            return Err(format!("empty sweep: x max {} is below x min {}", self.max, self.min));
        }
        // tolerate rounding in (max - min) / step so the max end is kept
        let count = ((self.max - self.min) / self.step * (1.0 + 1e-12)).floor() as u64 + 1;
        if count > 10_000_000 {
            return Err(format!("sweep has {count} points; at most 10000000 allowed"));
        }
        Ok((0..count).map(|i| self.min + i as f64 * self.step).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_inclusive_ranges() {
        let r: XRange = "0:100:1".parse().unwrap();
        let pts = r.points().unwrap();
        assert_eq!(pts.len(), 101);
        assert_eq!(pts[100], 100.0);
        let r: XRange = "0:1:0.1".parse().unwrap();
        assert_eq!(r.points().unwrap().len(), 11);
        let r: XRange = "-5:-5:1".parse().unwrap();
        assert_eq!(r.points().unwrap(), vec![-5.0]);
    }

    #[test]
    fn rejects_bad_ranges() {
        assert!("0:10".parse::<XRange>().is_err());
        assert!("a:1:1".parse::<XRange>().is_err());
        assert!("5:0:1".parse::<XRange>().unwrap().points().is_err());
        assert!("0:5:0".parse::<XRange>().unwrap().points().is_err());
    }
}
