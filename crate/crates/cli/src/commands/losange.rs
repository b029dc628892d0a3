use std::path::PathBuf;

use antpath_core::losange::{
    contraction_epsilon, drift, inequality_suite, sample_polytope, scenario_probabilities, Check, Contraction,
    InequalityReport, LosangeError, LosangeWeights,
};
use antpath_core::rng::replica_rng;
use clap::Args;
use serde::Serialize;
use serde_json::{json, Value};

use super::parse_list;
use crate::config::SCHEMA_VERSION;
use crate::output::{create_dir, csv_writer, write_json};
use crate::{CliError, Outcome};

#[derive(Debug, Args, Serialize)]
#[command(group = clap::ArgGroup::new("mode").required(true).multiple(false))]
pub struct LosangeArgs {
    /// Five comma-separated edge weights.
    #[arg(long, group = "mode")]
    pub point: Option<String>,
    /// Number of uniform samples from the invariant polytope.
    #[arg(long, group = "mode")]
    pub sweep: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Contraction rate used by the contraction bound.
    #[arg(long, default_value_t = 0.125)]
    pub rho: f64,
    /// Threshold on the middle weight for the contraction bound; estimated
    /// from the polytope when absent.
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long, default_value = "out")]
    pub out_dir: PathBuf,
    /// Exit 4 if any inequality fails.
    #[arg(long)]
    pub check: bool,
}

pub fn run(args: LosangeArgs) -> Result<Outcome, CliError> {
    if !(args.rho > 0.0 && args.rho < 1.0) {
        return Err(CliError::Usage("--rho must lie in (0, 1)".into()));
    }
    let echo = serde_json::to_value(&args).map_err(|e| CliError::Output(e.to_string()))?;
    let fail = |e: LosangeError| CliError::Usage(e.to_string());
    let mut rng = replica_rng(args.seed, 0);
    let epsilon = match args.epsilon {
        Some(e) => e,
        None => contraction_epsilon(args.rho, 2000, 1e-3, &mut rng).map_err(fail)?,
    };
    let contraction = Contraction { rho: args.rho, epsilon };

    if let Some(text) = &args.point {
        let values = parse_list(text).map_err(|e| CliError::Usage(format!("--point: {e}")))?;
        let weights: [f64; 5] = values
            .try_into()
            .map_err(|v: Vec<f64>| CliError::Usage(format!("--point: expected 5 values, got {}", v.len())))?;
        if weights.iter().any(|&w| !(w >= 0.0 && w.is_finite())) {
            return Err(CliError::Usage("--point: weights must be finite and nonnegative".into()));
        }
        let w = LosangeWeights(weights);
        let p = scenario_probabilities(&w).map_err(fail)?;
        let report = inequality_suite(&w, Some(contraction)).map_err(fail)?;
        let summary = json!({
            "schema_version": SCHEMA_VERSION,
            "command": "losange-analytics",
            "config": echo,
            "weights": weights,
            "in_polytope": w.in_polytope(1e-12),
            "probabilities": {
                "left": p.left,
                "right": p.right,
                "left_across": p.left_across,
                "right_across": p.right_across,
            },
            "expected_increment": p.expected_increment(),
            "drift": drift(&w).map_err(fail)?,
            "contraction": { "rho": contraction.rho, "epsilon": contraction.epsilon },
            "inequalities": report_json(&report),
        });
        return Ok(Outcome { check_failed: args.check && report.any_violated(), summary });
    }

    let samples = args.sweep.expect("clap enforces one mode");
    create_dir(&args.out_dir)?;
    let path = args.out_dir.join("losange_sweep.csv");
    let mut w = csv_writer(&path, &echo)?;
    let names = InequalityReport::NAMES;
    let mut header = vec!["w1", "w2", "w3", "w4", "w5"];
    header.extend(names);
    w.write_record(&header).map_err(CliError::csv)?;
    let mut violations = [0u64; 4];
    let mut evaluated = [0u64; 4];
    let mut min_slack = [f64::INFINITY; 4];
    for _ in 0..samples {
        let point = sample_polytope(&mut rng);
        let report = inequality_suite(&point, Some(contraction)).map_err(fail)?;
        let mut rec: Vec<String> = point.0.iter().map(f64::to_string).collect();
        for (k, (_, check)) in report.checks().into_iter().enumerate() {
            if let Some(s) = check.slack() {
                evaluated[k] += 1;
                min_slack[k] = min_slack[k].min(s);
            }
            violations[k] += u64::from(check.is_violated());
            rec.push(check.slack().map(|s| s.to_string()).unwrap_or_default());
        }
        w.write_record(&rec).map_err(CliError::csv)?;
    }
    w.flush().map_err(|e| CliError::io(&path, e))?;
    let per_check: Value = names
        .iter()
        .enumerate()
        .map(|(k, name)| {
            let min = (evaluated[k] > 0).then_some(min_slack[k]);
            (name.to_string(), json!({ "evaluated": evaluated[k], "violations": violations[k], "min_slack": min }))
        })
        .collect::<serde_json::Map<_, _>>()
        .into();
    let total: u64 = violations.iter().sum();
    let summary = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "losange-analytics",
        "config": echo,
        "samples": samples,
        "contraction": { "rho": contraction.rho, "epsilon": contraction.epsilon },
        "checks": per_check,
        "violations": total,
    });
    write_json(&args.out_dir.join("summary.json"), &summary)?;
    Ok(Outcome { check_failed: args.check && total > 0, summary })
}

fn report_json(report: &InequalityReport) -> Value {
    report
        .checks()
        .into_iter()
        .map(|(name, check)| {
            let status = match check {
                Check::Holds { .. } => "holds",
                Check::Violated { .. } => "violated",
                Check::Skipped => "skipped",
            };
            (name.to_string(), json!({ "status": status, "slack": check.slack() }))
        })
        .collect::<serde_json::Map<_, _>>()
        .into()
}
