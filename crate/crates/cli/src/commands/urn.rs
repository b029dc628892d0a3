use std::path::PathBuf;

use antpath_core::rng::replica_rng;
use antpath_core::stats::{decay_exponent_fit, ks_critical_001, ks_uniform_statistic};
use antpath_core::urn::{GeneralizedParams, UrnKind};
use clap::{Args, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::config::SCHEMA_VERSION;
use crate::output::{create_dir, csv_writer, write_json, Spread};
use crate::schedule::Schedule;
use crate::{CliError, Outcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Polya,
    Friedman,
    Generalized,
    Janson,
}

#[derive(Debug, Args, Serialize)]
pub struct UrnArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    #[arg(long, visible_alias = "n", default_value_t = 100_000)]
    pub steps: u64,
    #[arg(long, default_value_t = 100)]
    pub replicas: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Generalized urn: subtracted multiple of the sublinear term.
    #[arg(long, default_value_t = 1.0)]
    pub slack: f64,
    /// Generalized urn: length of the favourable branch.
    #[arg(long, default_value_t = 2.0)]
    pub length: f64,
    /// Janson urn: steps of the host process before the urn starts.
    #[arg(long, default_value_t = 0)]
    pub delay: u64,
    /// Terminal fractions below this are counted in the summary.
    #[arg(long, default_value_t = 0.02)]
    pub threshold: f64,
    /// Lower end of the power-law fit window; the upper end is `steps`.
    #[arg(long, default_value_t = 1000.0)]
    pub fit_from: f64,
    /// Ratio of the geometric recording schedule.
    #[arg(long, default_value_t = 1.1)]
    pub ratio: f64,
    #[arg(long, default_value = "out")]
    pub out_dir: PathBuf,
}

impl UrnArgs {
    fn urn(&self) -> UrnKind {
        match self.kind {
            Kind::Polya => UrnKind::Polya,
            Kind::Friedman => UrnKind::FriedmanLike,
            Kind::Generalized => UrnKind::Generalized(GeneralizedParams::for_length(self.length, self.slack)),
            Kind::Janson => UrnKind::JansonFifth { delay: self.delay },
        }
    }

    /// The quantity whose growth exponent is fitted, if any.
    fn fitted(&self, r: u64, n: u64) -> Option<f64> {
        match self.kind {
            Kind::Polya | Kind::Friedman => None,
            Kind::Generalized => Some((n - r) as f64),
            Kind::Janson => Some(r as f64),
        }
    }
}

/// Slope of the fitted quantity averaged over replicas at each recorded step.
fn mean_trajectory_fit(args: &UrnArgs, done: &[(u64, &Replica)]) -> Option<f64> {
    let first = done.first()?.1;
    let points: Vec<(f64, f64)> = (0..first.states.len())
        .filter_map(|k| {
            let n = first.states[k].0;
            let values: Option<Vec<f64>> = done.iter().map(|(_, r)| args.fitted(r.states[k].1, n)).collect();
            values.map(|v| (n as f64, v.iter().sum::<f64>() / v.len() as f64))
        })
        .collect();
    decay_exponent_fit(&points, args.fit_from, args.steps as f64).ok().map(|f| f.slope)
}

struct Replica {
    states: Vec<(u64, u64)>,
    fraction: f64,
    slope: Option<f64>,
}

pub fn run(args: UrnArgs) -> Result<Outcome, CliError> {
    let urn = args.urn();
    urn.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    if args.replicas == 0 || args.steps == 0 {
        return Err(CliError::Usage("--replicas and --steps must be positive".into()));
    }
    if !(args.ratio > 1.0 && args.ratio.is_finite()) {
        return Err(CliError::Usage("--ratio must be a finite number above 1".into()));
    }
    let echo = serde_json::to_value(&args).map_err(|e| CliError::Output(e.to_string()))?;
    let points = Schedule::Geometric { ratio: args.ratio }.points(args.steps);
    let results: Vec<Result<Replica, String>> = (0..args.replicas)
        .into_par_iter()
        .map(|replica| {
            let mut rng = replica_rng(args.seed, replica);
            let mut states = vec![(0, urn.initial())];
            let mut next = 1;
            let last = urn
                .run(args.steps, &mut rng, |n, r| {
                    if next < points.len() && points[next] == n {
                        states.push((n, r));
                        next += 1;
                    }
                })
                .map_err(|e| format!("replica {replica}: {e}"))?;
            let fit_points: Vec<(f64, f64)> = states
                .iter()
                .filter_map(|&(n, r)| args.fitted(r, n).map(|v| (n as f64, v)))
                .collect();
            let slope = (!fit_points.is_empty())
                .then(|| decay_exponent_fit(&fit_points, args.fit_from, args.steps as f64).ok().map(|f| f.slope))
                .flatten();
            Ok(Replica { states, fraction: last as f64 / (args.steps + 2) as f64, slope })
        })
        .collect();
    let failures: Vec<&String> = results.iter().filter_map(|r| r.as_ref().err()).collect();
    let done: Vec<(u64, &Replica)> = results
        .iter()
        .enumerate()
        .filter_map(|(k, r)| r.as_ref().ok().map(|r| (k as u64, r)))
        .collect();

    create_dir(&args.out_dir)?;
    let path = args.out_dir.join("urn.csv");
    let mut w = csv_writer(&path, &echo)?;
    w.write_record(["replica", "n", "r"]).map_err(CliError::csv)?;
    for (replica, rep) in &done {
        for &(n, r) in &rep.states {
            w.write_record([replica.to_string(), n.to_string(), r.to_string()]).map_err(CliError::csv)?;
        }
    }
    w.flush().map_err(|e| CliError::io(&path, e))?;

    let fractions: Vec<f64> = done.iter().map(|(_, r)| r.fraction).collect();
    let slopes: Vec<f64> = done.iter().filter_map(|(_, r)| r.slope).collect();
    let ks = (args.kind == Kind::Polya)
        .then(|| ks_uniform_statistic(&fractions).ok())
        .flatten()
        .map(|d| json!({ "statistic": d, "critical_0_01": ks_critical_001(fractions.len()), "passes": d < ks_critical_001(fractions.len()) }));
    let mean_fit = mean_trajectory_fit(&args, &done);
    let below = fractions.iter().filter(|&&f| f < args.threshold).count();
    let summary = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "urn",
        "config": echo,
        "replicas": { "requested": args.replicas, "completed": done.len(), "failed": failures.len() },
        "failures": failures,
        "fraction": Spread::of(&fractions),
        "below_threshold": below,
        "below_threshold_share": if done.is_empty() { 0.0 } else { below as f64 / done.len() as f64 },
        "fit": { "window": [args.fit_from, args.steps as f64], "slope": Spread::of(&slopes), "failed": done.len() - slopes.len(), "mean_trajectory_slope": mean_fit },
        "ks_uniform": ks,
        "terminal_fractions": fractions,
    });
    write_json(&args.out_dir.join("summary.json"), &summary)?;
    if done.is_empty() {
        return Err(CliError::AllFailed(args.replicas));
    }
    Ok(Outcome { summary, check_failed: false })
}
