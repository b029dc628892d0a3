use std::path::PathBuf;

use antpath_core::graph::sublinear_demo;
use antpath_core::walk::{ReinforcementRule, Variant, DEFAULT_STEP_CAP};
use clap::Args;
use serde::Serialize;
use serde_json::json;

use crate::config::{Experiment, SCHEMA_VERSION};
use crate::harness::run_experiment;
use crate::output::{create_dir, csv_writer, write_json};
use crate::schedule::Schedule;
use crate::{CliError, Outcome};

const DIRECT: usize = 0;

#[derive(Debug, Args, Serialize)]
pub struct SublinearArgs {
    /// Walk exponent applied to edge weights.
    #[arg(long, default_value_t = 1.0)]
    pub exponent: f64,
    #[arg(long, visible_alias = "n", default_value_t = 100_000)]
    pub steps: u64,
    #[arg(long, default_value_t = 100)]
    pub replicas: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Normalized weight below which an edge counts as dead.
    #[arg(long, default_value_t = 0.05)]
    pub threshold: f64,
    #[arg(long, default_value = "loop-erased")]
    pub rule: String,
    #[arg(long, default_value = "out")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SurvivorClass {
    /// The direct nest-food edge carries almost everything.
    Direct,
    /// The two-edge detour carries almost everything.
    Detour,
    AllSurvive,
}

impl SurvivorClass {
    fn name(self) -> &'static str {
        match self {
            SurvivorClass::Direct => "direct",
            SurvivorClass::Detour => "detour",
            SurvivorClass::AllSurvive => "all-survive",
        }
    }
}

/// Classifies normalized triangle weights `[direct, nest-middle, middle-food]`.
pub fn classify(normalized: &[f64], threshold: f64) -> SurvivorClass {
    if normalized[DIRECT] < threshold {
        SurvivorClass::Detour
    } else if normalized[1..].iter().all(|&w| w < threshold) {
        SurvivorClass::Direct
    } else {
        SurvivorClass::AllSurvive
    }
}

pub fn run(args: SublinearArgs) -> Result<Outcome, CliError> {
    let variant: Variant = args.rule.parse().map_err(|e| CliError::Usage(format!("--rule: {e}")))?;
    let rule = ReinforcementRule::new(variant, args.exponent).map_err(|e| CliError::Usage(format!("--exponent: {e}")))?;
    if args.replicas == 0 {
        return Err(CliError::Usage("--replicas must be positive".into()));
    }
    let echo = serde_json::to_value(&args).map_err(|e| CliError::Output(e.to_string()))?;
    let exp = Experiment {
        graph: sublinear_demo(),
        sp: None,
        is_losange: false,
        rule,
        step_cap: DEFAULT_STEP_CAP,
        steps: args.steps,
        replicas: args.replicas,
        master_seed: args.seed,
        schedule: Schedule::Geometric { ratio: 10.0 },
        tail: 0,
        fit_edges: Vec::new(),
        fit_window: [1.0, args.steps.max(2) as f64],
    };
    let result = run_experiment(&exp, false);

    create_dir(&args.out_dir)?;
    let path = args.out_dir.join("sublinear.csv");
    let mut w = csv_writer(&path, &echo)?;
    w.write_record(["replica", "n", "w0", "w1", "w2", "class"]).map_err(CliError::csv)?;
    let mut counts = [0usize; 3];
    let mut classes = Vec::new();
    for run in result.completed() {
        let class = classify(&run.terminal.normalized, args.threshold);
        counts[class as usize] += 1;
        classes.push(json!({ "replica": run.replica, "class": class, "normalized": run.terminal.normalized }));
        let t = &run.terminal;
        w.write_record([
            run.replica.to_string(),
            t.n.to_string(),
            t.weights[0].to_string(),
            t.weights[1].to_string(),
            t.weights[2].to_string(),
            class.name().to_string(),
        ])
        .map_err(CliError::csv)?;
    }
    w.flush().map_err(|e| CliError::io(&path, e))?;
    let completed = counts.iter().sum::<usize>();
    let failures: Vec<_> = result.failures().collect();
    let freq = |c: usize| if completed == 0 { 0.0 } else { c as f64 / completed as f64 };
    let summary = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "sublinear-superlinear",
        "config": echo,
        "replicas": { "requested": args.replicas, "completed": completed, "failed": failures.len() },
        "failures": failures,
        "counts": { "direct": counts[0], "detour": counts[1], "all-survive": counts[2] },
        "frequencies": { "direct": freq(counts[0]), "detour": freq(counts[1]), "all-survive": freq(counts[2]) },
        "replica_classes": classes,
    });
    write_json(&args.out_dir.join("summary.json"), &summary)?;
    if completed == 0 {
        return Err(CliError::AllFailed(args.replicas));
    }
    Ok(Outcome { summary, check_failed: false })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classes() {
        assert_eq!(classify(&[0.9, 0.01, 0.02], 0.05), SurvivorClass::Direct);
        assert_eq!(classify(&[0.01, 0.9, 0.9], 0.05), SurvivorClass::Detour);
        assert_eq!(classify(&[0.5, 0.5, 0.5], 0.05), SurvivorClass::AllSurvive);
    }
}
