use std::path::PathBuf;

use antpath_core::counterexample::{drift, left_probability, run_reduced, HubSampler};
use antpath_core::graph::counterexample as counterexample_graph;
use antpath_core::rng::replica_rng;
use antpath_core::walk::{ReinforcementRule, Variant, DEFAULT_STEP_CAP};
use clap::{Args, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::config::{Experiment, SCHEMA_VERSION};
use crate::harness::run_experiment;
use crate::output::{create_dir, csv_writer, write_json, Spread};
use crate::schedule::Schedule;
use crate::{CliError, Outcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    /// Reduced chain on the two hub vertices; exact in law and fast.
    Hub,
    /// Full walks on the graph.
    Walk,
}

#[derive(Debug, Args, Serialize)]
pub struct CounterexampleArgs {
    /// Length of each side path.
    #[arg(long, default_value_t = 100)]
    pub length: usize,
    /// Walk exponent applied to edge weights.
    #[arg(long, default_value_t = 1.0)]
    pub exponent: f64,
    #[arg(long, visible_alias = "n", default_value_t = 100_000)]
    pub steps: u64,
    #[arg(long, default_value_t = 200)]
    pub replicas: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Engine::Hub)]
    pub engine: Engine,
    /// Replicas whose terminal left fraction falls below this count as collapsed.
    #[arg(long, default_value_t = 0.05)]
    pub threshold: f64,
    /// Points per decade of the log-spaced drift grid.
    #[arg(long, default_value_t = 2)]
    pub per_decade: u32,
    /// Smallest grid point, as a power of ten.
    #[arg(long, default_value_t = -4.0, allow_negative_numbers = true)]
    pub min_log10: f64,
    /// Largest grid point, as a power of ten.
    #[arg(long, default_value_t = -2.0, allow_negative_numbers = true)]
    pub max_log10: f64,
    #[arg(long, default_value = "out")]
    pub out_dir: PathBuf,
    /// Exit 4 unless the drift is negative on the whole grid.
    #[arg(long)]
    pub check: bool,
}

/// Terminal left-side reinforcement count of one replica.
#[derive(Debug, Clone, Serialize)]
struct Terminal {
    replica: u64,
    left: u64,
    fraction: f64,
}

pub fn run(args: CounterexampleArgs) -> Result<Outcome, CliError> {
    if args.length == 0 {
        return Err(CliError::Usage("--length must be positive".into()));
    }
    if !(args.exponent > 0.0 && args.exponent.is_finite()) {
        return Err(CliError::Usage("--exponent must be positive".into()));
    }
    if args.replicas == 0 || args.steps == 0 {
        return Err(CliError::Usage("--replicas and --steps must be positive".into()));
    }
    if !(args.per_decade > 0 && args.min_log10 <= args.max_log10 && args.max_log10 < 0.0) {
        return Err(CliError::Usage("need 0 < per-decade and min-log10 <= max-log10 < 0".into()));
    }
    let echo = serde_json::to_value(&args).map_err(|e| CliError::Output(e.to_string()))?;
    let bad = |e: antpath_core::counterexample::CounterexampleError| CliError::Usage(e.to_string());

    let grid = log_grid(args.min_log10, args.max_log10, args.per_decade);
    let mut table = Vec::with_capacity(grid.len());
    for &x in &grid {
        let p = left_probability(args.length, x, args.exponent).map_err(bad)?;
        let mirror = left_probability(args.length, 1.0 - x, args.exponent).map_err(bad)?;
        table.push((x, p, drift(args.length, x, args.exponent).map_err(bad)?, mirror));
    }

    let terminals = match args.engine {
        Engine::Hub => {
            let sampler = HubSampler::new(args.length, args.exponent).map_err(bad)?;
            (0..args.replicas)
                .into_par_iter()
                .map(|replica| {
                    let mut rng = replica_rng(args.seed, replica);
                    let end = run_reduced(&sampler, args.steps, &mut rng, |_| {});
                    Ok(terminal(replica, end.left - 1, args.steps))
                })
                .collect::<Vec<Result<Terminal, String>>>()
        }
        Engine::Walk => {
            let graph = counterexample_graph(args.length).map_err(|e| CliError::Usage(e.to_string()))?;
            let rule = ReinforcementRule::new(Variant::LoopErased, args.exponent)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let exp = Experiment {
                graph,
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
                fit_window: [1.0, args.steps as f64],
            };
            run_experiment(&exp, false)
                .replicas
                .into_iter()
                .map(|r| match r {
                    Ok(run) => Ok(terminal(run.replica, run.terminal.weights[0] - 1, args.steps)),
                    Err(f) => Err(format!("replica {}: {}", f.replica, f.error)),
                })
                .collect()
        }
    };
    let failures: Vec<&String> = terminals.iter().filter_map(|t| t.as_ref().err()).collect();
    let done: Vec<&Terminal> = terminals.iter().filter_map(|t| t.as_ref().ok()).collect();

    create_dir(&args.out_dir)?;
    let path = args.out_dir.join("counterexample.csv");
    let mut w = csv_writer(&path, &echo)?;
    w.write_record(["replica", "n", "left", "fraction"]).map_err(CliError::csv)?;
    for t in &done {
        w.write_record([t.replica.to_string(), args.steps.to_string(), t.left.to_string(), t.fraction.to_string()])
            .map_err(CliError::csv)?;
    }
    w.flush().map_err(|e| CliError::io(&path, e))?;
    let path = args.out_dir.join("drift.csv");
    let mut w = csv_writer(&path, &echo)?;
    w.write_record(["x", "p", "drift", "p_mirror"]).map_err(CliError::csv)?;
    for (x, p, d, m) in &table {
        w.write_record([x.to_string(), p.to_string(), d.to_string(), m.to_string()]).map_err(CliError::csv)?;
    }
    w.flush().map_err(|e| CliError::io(&path, e))?;

    let fractions: Vec<f64> = done.iter().map(|t| t.fraction).collect();
    let collapsed = fractions.iter().filter(|&&f| f < args.threshold).count();
    let negative = table.iter().all(|&(_, _, d, _)| d < 0.0);
    let symmetry = table.iter().map(|&(_, p, _, m)| (p + m - 1.0).abs()).fold(0.0, f64::max);
    let summary = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "counterexample",
        "config": echo,
        "replicas": { "requested": args.replicas, "completed": done.len(), "failed": failures.len() },
        "failures": failures,
        "fraction": Spread::of(&fractions),
        "below_threshold": collapsed,
        "terminals": done,
        "drift": table.iter().map(|&(x, p, d, m)| json!({ "x": x, "p": p, "drift": d, "p_mirror": m })).collect::<Vec<_>>(),
        "drift_negative_on_grid": negative,
        "symmetry_error": symmetry,
    });
    write_json(&args.out_dir.join("summary.json"), &summary)?;
    if done.is_empty() {
        return Err(CliError::AllFailed(args.replicas));
    }
    Ok(Outcome { check_failed: args.check && !negative, summary })
}

fn terminal(replica: u64, left: u64, steps: u64) -> Terminal {
    Terminal { replica, left, fraction: left as f64 / steps as f64 }
}

/// `10^k` for `k` from `lo` to `hi` in steps of `1/per_decade`.
fn log_grid(lo: f64, hi: f64, per_decade: u32) -> Vec<f64> {
    let count = ((hi - lo) * per_decade as f64).round() as u32;
    (0..=count).map(|k| 10f64.powf(lo + k as f64 / per_decade as f64)).collect()
}
