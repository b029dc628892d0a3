use std::path::PathBuf;

use clap::Args;
use serde_json::{json, Value};

use crate::config::{Experiment, ExperimentConfig, SCHEMA_VERSION};
use crate::harness::{run_experiment, RunResult};
use crate::output::{create_dir, write_json, write_series, Spread};
use crate::{CliError, Outcome};

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// TOML experiment config.
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides `run.master_seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides `run.replicas`.
    #[arg(long)]
    pub replicas: Option<u64>,
    /// Overrides `run.steps`.
    #[arg(long, visible_alias = "n")]
    pub steps: Option<u64>,
    /// Overrides `output.dir`.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Verify the deterministic invariants at every step; exit 4 on failure.
    #[arg(long)]
    pub check: bool,
}

pub fn run(args: SimulateArgs) -> Result<Outcome, CliError> {
    let mut config = ExperimentConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        config.run.master_seed = seed;
    }
    if let Some(r) = args.replicas {
        config.run.replicas = r;
    }
    if let Some(n) = args.steps {
        config.run.steps = n;
    }
    if let Some(dir) = args.out_dir {
        config.output.dir = dir;
    }
    let exp = config.resolve()?;
    let result = run_experiment(&exp, args.check);
    let echo = serde_json::to_value(&config).map_err(|e| CliError::Output(e.to_string()))?;
    let dir = &config.output.dir;
    create_dir(dir)?;
    write_series(&dir.join("series.csv"), &echo, exp.graph.edge_count(), &result)?;
    let summary = summarize("simulate", echo, &exp, &result, args.check);
    write_json(&dir.join("summary.json"), &summary)?;
    if result.completed().next().is_none() {
        return Err(CliError::AllFailed(exp.replicas));
    }
    Ok(Outcome { check_failed: args.check && result.violation_count() > 0, summary })
}

/// The JSON summary of a walk-process run.
pub fn summarize(command: &str, config: Value, exp: &Experiment, result: &RunResult, checked: bool) -> Value {
    let runs: Vec<_> = result.completed().collect();
    let failures: Vec<_> = result.failures().collect();
    let edge_count = exp.graph.edge_count();
    let normalized: Vec<Option<Spread>> = (0..edge_count)
        .map(|e| Spread::of(&runs.iter().map(|r| r.terminal.normalized[e]).collect::<Vec<_>>()))
        .collect();
    let fits: Vec<Value> = exp
        .fit_edges
        .iter()
        .enumerate()
        .map(|(k, &edge)| {
            let slopes: Vec<f64> = runs.iter().filter_map(|r| r.terminal.fits[k].slope).collect();
            json!({ "edge": edge, "window": exp.fit_window, "slope": Spread::of(&slopes) })
        })
        .collect();
    let censoring_note = (!failures.is_empty()).then(|| {
        format!(
            "{} of {} replicas hit the step cap and are excluded; aggregates are conditional on completion",
            failures.len(),
            exp.replicas
        )
    });
    let violations: Vec<_> = runs.iter().flat_map(|r| r.violations.iter()).take(50).collect();
    json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": config,
        "graph": {
            "vertices": exp.graph.vertex_count(),
            "edges": edge_count,
            "h_min": exp.graph.h_min(),
            "h_max": exp.sp.as_ref().map(|e| e.h_max()),
        },
        "rule": { "variant": exp.rule.variant.name(), "exponent": exp.rule.exponent },
        "replicas": {
            "requested": exp.replicas,
            "completed": runs.len(),
            "failed": failures.len(),
        },
        "failures": failures,
        "censoring_note": censoring_note,
        "terminals": runs.iter().map(|r| &r.terminal).collect::<Vec<_>>(),
        "aggregates": {
            "normalized": normalized,
            "conductance_per_step": Spread::of(&runs.iter().map(|r| r.terminal.conductance_per_step).collect::<Vec<_>>()),
            "geodesic_tail": Spread::of(&runs.iter().map(|r| r.terminal.geodesic_tail).collect::<Vec<_>>()),
            "fits": fits,
        },
        "checks": {
            "enabled": checked,
            "violations": result.violation_count(),
            "examples": violations,
        },
    })
}
