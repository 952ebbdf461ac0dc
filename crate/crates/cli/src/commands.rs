use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use stockopt_core::simulator;
use stockopt_core::verify::{self, Check, VerifyOptions};
use stockopt_core::{price_model, Demand, MarketCosts, PricingModel, PrivacyParams, Scenario};

use crate::args::{CurveArgs, QuoteArgs, SimulateArgs, VerifyArgs, XRange};
use crate::config::{self, ModelKind};
use crate::error::{usage, CliError};
use crate::format::{round_trip, significant};

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

fn check_p_flag(kind: ModelKind, has_p: bool) -> Result<(), CliError> {
    if kind.takes_p() && !has_p {
        return Err(usage(format!("--p is required with --model {}", kind.name())));
    }
    if !kind.takes_p() && has_p {
        return Err(usage(format!("--p is not accepted with --model {}", kind.name())));
    }
    Ok(())
}

pub fn quote(args: &QuoteArgs) -> Result<(), CliError> {
    let kind = ModelKind::from(args.model);
    check_p_flag(kind, args.p.is_some())?;
    let n = match (kind, args.n) {
        (ModelKind::PriorFree, n) => n,
        (_, Some(n)) => Some(n),
        (_, None) => return Err(usage(format!("--n is required with --model {}", kind.name()))),
    };
    let model = config::build_model(kind, n.unwrap_or(0), args.p, "model")?;
    let privacy = PrivacyParams::new(args.lambda)?;
    let costs = MarketCosts::pricing_only(args.c_s)?;
    let q = price_model(&costs, &privacy, &model, Demand(args.k_star), args.x)?;
    let normalized = q.normalized.or_else(|| n.filter(|n| *n > 0).map(|n| q.premium / (args.c_s * n as f64)));
    let normalized = normalized.map_or_else(|| "NA".to_string(), |v| significant(v, 12));
    emit(&format!("premium={} normalized={}\n", significant(q.premium, 12), normalized), None)
}

struct Column {
    label: String,
    model: PricingModel,
    k_star: u64,
}

pub fn curve(args: &CurveArgs) -> Result<(), CliError> {
    let cfg = args.config.as_deref().map(config::load).transpose()?;
    let sweep = cfg.as_ref().and_then(|c| c.sweep.as_ref());
    let kind = match (args.model, &cfg) {
        (Some(m), _) => ModelKind::from(m),
        (None, Some(c)) => c.pricing().kind,
        (None, None) => return Err(usage("--model is required without --config")),
    };
    if !kind.takes_p() && !args.p.is_empty() {
        return Err(usage(format!("--p is not accepted with --model {}", kind.name())));
    }
    let n = args
        .n
        .or(cfg.as_ref().map(|c| c.n))
        .ok_or_else(|| usage("--n is required (prior-free curves need it for normalization)"))?;
    if n == 0 {
        return Err(usage("--n must be >= 1 for normalized curves"));
    }
    let lambda = args
        .lambda
        .or(cfg.as_ref().map(|c| c.lambda))
        .ok_or_else(|| usage("--lambda is required"))?;
    let privacy = PrivacyParams::new(lambda)?;
    let ps: Vec<Option<f64>> = if !kind.takes_p() {
        vec![None]
    } else if !args.p.is_empty() {
        args.p.iter().copied().map(Some).collect()
    } else if let Some(list) = sweep.and_then(|s| s.p.clone()) {
        list.into_iter().map(Some).collect()
    } else if let Some(p) = cfg.as_ref().and_then(|c| c.pricing().p) {
        vec![Some(p)]
    } else {
        return Err(usage(format!("--p is required with --model {}", kind.name())));
    };
    let ks: Vec<u64> = if !args.k_star.is_empty() {
        args.k_star.clone()
    } else if let Some(list) = sweep.and_then(|s| s.k_star.clone()) {
        list
    } else if let Some(c) = &cfg {
        vec![c.k_star]
    } else {
        return Err(usage("--k-star is required"));
    };
    let range = args
        .x
        .or(sweep.map(|s| XRange {
            min: s.x_min,
            max: s.x_max,
            step: s.x_step,
        }))
        .ok_or_else(|| usage("--x min:max:step is required"))?;
    let xs = range.points().map_err(CliError::Usage)?;
    let c_s = args
        .c_s
        .or(cfg.as_ref().and_then(|c| c.costs.map(|k| k.c_s)))
        .unwrap_or(1.0);
    let costs = MarketCosts::pricing_only(c_s)?;

    let mut columns = Vec::new();
    for &k in &ks {
        for &p in &ps {
            let label = match p {
                Some(p) => format!("k_star={k} p={}", round_trip(p)),
                None => format!("k_star={k}"),
            };
            columns.push(Column {
                label,
                model: config::build_model(kind, n, p, "model")?,
                k_star: k,
            });
        }
    }

    let mut csv = String::from("x");
    for c in &columns {
        csv.push(',');
        csv.push_str(&c.label);
    }
    csv.push('\n');
    let scale = c_s * n as f64;
    for &x in &xs {
        csv.push_str(&round_trip(x));
        for c in &columns {
            let q = price_model(&costs, &privacy, &c.model, Demand(c.k_star), x)?;
            let v = q.normalized.unwrap_or(q.premium / scale);
            let _ = write!(csv, ",{}", round_trip(v));
        }
        csv.push('\n');
    }
    emit(&csv, args.out.as_deref())
}

pub fn simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let path = args.config.as_path();
    let cfg = config::load(path)?;
    let bad = |message: String| CliError::Config {
        path: path.to_path_buf(),
        message,
    };
    let seed = args.seed.or(cfg.seed).unwrap_or(0);
    let replications = args
        .replications
        .or(cfg.replications)
        .ok_or_else(|| bad("replications: required (in the file or via --replications)".into()))?;
    let privacy = PrivacyParams::new(cfg.lambda).map_err(|e| bad(format!("lambda: {e}")))?;
    let truth = config::build_prior(path, &cfg.prior_true, cfg.n, "prior_true")?;
    let pricing = config::build_prior(path, &cfg.pricing(), cfg.n, "prior_pricing")?;
    let costs = config::build_costs(path, cfg.costs)?;
    let scenario = Scenario::new(truth, pricing, privacy, costs, Demand(cfg.k_star), replications, seed)
        .map_err(|e| bad(e.to_string()))?;
    let report = simulator::run(&scenario)?;

    let mut csv = String::from("metric,mean,std_error,count,q05,q25,q50,q75,q95\n");
    for (name, m) in report.metrics() {
        let q = &m.quantiles;
        let _ = writeln!(
            csv,
            "{name},{},{},{},{},{},{},{},{}",
            round_trip(m.mean),
            round_trip(m.std_error),
            m.count,
            round_trip(q.q05),
            round_trip(q.q25),
            round_trip(q.q50),
            round_trip(q.q75),
            round_trip(q.q95)
        );
    }
    emit(&csv, args.out.as_deref())?;

    let gap = &report.transfer_gap;
    let z = if gap.std_error > 0.0 { gap.mean / gap.std_error } else { 0.0 };
    eprintln!(
        "{} episodes, seed {}, truth {}, pricing {}",
        report.replications, seed, truth, pricing
    );
    eprintln!(
        "mean premium {}  mean excess cost {}  transfer gap {} +/- {} (z = {})",
        significant(report.premium.mean, 6),
        significant(report.excess_cost.mean, 6),
        significant(gap.mean, 6),
        significant(gap.std_error, 3),
        significant(z, 3)
    );
    Ok(())
}

pub fn verify(args: &VerifyArgs) -> Result<(), CliError> {
    let fault = args
        .inject_fault
        .as_deref()
        .map(|name| {
            Check::from_name(name).ok_or_else(|| {
                let names: Vec<&str> = Check::ALL.iter().map(|c| c.name()).collect();
                usage(format!("unknown check `{name}`; expected one of {}", names.join(", ")))
            })
        })
        .transpose()?;
    if args.instances == 0 {
        return Err(usage("--instances must be >= 1"));
    }
    let opts = VerifyOptions {
        instances: args.instances,
        seed: args.seed.unwrap_or(0),
        fault,
    };
    let outcomes = verify::run_all(&opts)?;
    let mut table = format!("{:<26}{:>10}{:>16}  result\n", "check", "instances", "max_rel_error");
    for o in &outcomes {
        let _ = writeln!(
            table,
            "{:<26}{:>10}{:>16}  {}",
            o.check.name(),
            o.instances,
            format!("{:.3e}", o.max_rel_error),
            if o.passed() { "pass" } else { "FAIL" }
        );
    }
    for o in outcomes.iter().filter(|o| !o.passed()) {
        let _ = writeln!(table, "FAIL {}: {}", o.check.name(), o.failure.as_deref().unwrap_or(""));
    }
    let _ = writeln!(table, "seed {} tolerance {:e}", opts.seed, verify::REL_TOL);
    emit(&table, None)?;
    if outcomes.iter().all(|o| o.passed()) {
        Ok(())
    } else {
        Err(CliError::VerificationFailed)
    }
}
