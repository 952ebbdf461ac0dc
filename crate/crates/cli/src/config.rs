//! JSON scenario files. Unknown keys are rejected at every level.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use stockopt_core::{AvailabilityPrior, MarketCosts, PricingModel};

use crate::error::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub n: u64,
    pub lambda: f64,
    pub k_star: u64,
    #[serde(default)]
    pub costs: Option<CostsConfig>,
    pub prior_true: PriorConfig,
    #[serde(default)]
    pub prior_pricing: Option<PriorConfig>,
    #[serde(default)]
    pub replications: Option<u64>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostsConfig {
    pub c_s: f64,
    pub c_p: f64,
    #[serde(default)]
    pub c_q: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    PriorFree,
    Unit,
    Binomial,
    Uniform,
}

impl ModelKind {
    pub fn takes_p(self) -> bool {
        matches!(self, ModelKind::Unit | ModelKind::Binomial)
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::PriorFree => "prior-free",
            ModelKind::Unit => "unit",
            ModelKind::Binomial => "binomial",
            ModelKind::Uniform => "uniform",
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorConfig {
    pub kind: ModelKind,
    #[serde(default)]
    pub p: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub x_step: f64,
    #[serde(default)]
    pub k_star: Option<Vec<u64>>,
    #[serde(default)]
    pub p: Option<Vec<f64>>,
}

pub fn load(path: &Path) -> Result<ScenarioConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse(&text).map_err(|message| CliError::Config {
        path: path.to_path_buf(),
        message,
    })
}

/// Parses and validates; errors name the offending key path.
pub fn parse(text: &str) -> Result<ScenarioConfig, String> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: ScenarioConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        if path == "." {
            e.inner().to_string()
        } else {
            format!("{path}: {}", e.inner())
        }
    })?;
    cfg.validate()?;
    Ok(cfg)
}

impl ScenarioConfig {
    fn validate(&self) -> Result<(), String> {
        let check_prior = |key: &str, prior: &PriorConfig| -> Result<(), String> {
            match (prior.kind.takes_p(), prior.p) {
                (true, None) => Err(format!("{key}.p: required for kind `{}`", prior.kind.name())),
                (false, Some(_)) => Err(format!("{key}.p: not accepted for kind `{}`", prior.kind.name())),
                _ => Ok(()),
            }
        };
        check_prior("prior_true", &self.prior_true)?;
        if let Some(p) = &self.prior_pricing {
            check_prior("prior_pricing", p)?;
        }
        if let Some(s) = &self.sweep {
            if s.k_star.as_ref().is_some_and(|v| v.is_empty()) {
                return Err("sweep.k_star: list is empty".into());
            }
            if s.p.as_ref().is_some_and(|v| v.is_empty()) {
                return Err("sweep.p: list is empty".into());
            }
        }
        Ok(())
    }

    /// The prior the broker prices with.
    pub fn pricing(&self) -> PriorConfig {
        self.prior_pricing.unwrap_or(self.prior_true)
    }
}

/// Builds the core model; `key` prefixes error messages.
pub fn build_model(kind: ModelKind, n: u64, p: Option<f64>, key: &str) -> Result<PricingModel, CliError> {
    let prior = match kind {
        ModelKind::PriorFree => return Ok(PricingModel::PriorFree),
        ModelKind::Unit => AvailabilityPrior::unit_correlation(n, p.unwrap_or(f64::NAN)),
        ModelKind::Binomial => AvailabilityPrior::binomial(n, p.unwrap_or(f64::NAN)),
        ModelKind::Uniform => AvailabilityPrior::uniform(n),
    };
    prior
        .map(PricingModel::Prior)
        .map_err(|e| CliError::Usage(format!("{key}: {e}")))
}

pub fn build_prior(path: &Path, cfg: &PriorConfig, n: u64, key: &str) -> Result<AvailabilityPrior, CliError> {
    match build_model(cfg.kind, n, cfg.p, key)? {
        PricingModel::Prior(p) => Ok(p),
        PricingModel::PriorFree => Err(CliError::Config {
            path: PathBuf::from(path),
            message: format!("{key}.kind: `prior-free` cannot be simulated"),
        }),
    }
}

pub fn build_costs(path: &Path, costs: Option<CostsConfig>) -> Result<MarketCosts, CliError> {
    let c = costs.ok_or_else(|| CliError::Config {
        path: path.to_path_buf(),
        message: "costs: required for simulation".into(),
    })?;
    MarketCosts::new(c.c_s, c.c_p, c.c_q).map_err(|e| CliError::Config {
        path: path.to_path_buf(),
        message: format!("costs: {e}"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"{"n": 100, "lambda": 1.5, "k_star": 50,
        "prior_true": {"kind": "binomial", "p": 0.5}}"#;

    #[test]
    fn minimal_config_parses() {
        let cfg = parse(BASE).unwrap();
        assert_eq!(cfg.n, 100);
        assert_eq!(cfg.pricing().kind, ModelKind::Binomial);
    }

    #[test]
    fn unknown_keys_are_named() {
        let err = parse(r#"{"n": 1, "lambda": 1, "k_star": 0, "prior_true": {"kind": "uniform", "q": 1}}"#)
            .unwrap_err();
        assert!(err.contains("prior_true") && err.contains("`q`"), "{err}");
        let err = parse(&BASE.replace("\"n\"", "\"nn\"")).unwrap_err();
        assert!(err.contains("`nn`"), "{err}");
    }

    #[test]
    fn type_errors_carry_the_path() {
        let text = BASE.replace("}}", r#"}, "costs": {"c_s": "one", "c_p": 2}}"#);
        let err = parse(&text).unwrap_err();
        assert!(err.starts_with("costs.c_s"), "{err}");
    }

    #[test]
    fn p_must_match_kind() {
        let err = parse(&BASE.replace(r#""binomial", "p": 0.5"#, r#""uniform", "p": 0.5"#)).unwrap_err();
        assert!(err.contains("prior_true.p"), "{err}");
        let err = parse(&BASE.replace(r#", "p": 0.5"#, "")).unwrap_err();
        assert!(err.contains("required"), "{err}");
    }
}
