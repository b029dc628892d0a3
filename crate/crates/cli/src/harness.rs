//! Runs the replicas of an experiment and collects what gets written out.

use antpath_core::conductance::{laplacian_conductance, sp_conductance};
use antpath_core::losange::counts_in_polytope;
use antpath_core::rng::replica_rng;
use antpath_core::stats::decay_exponent_fit;
use antpath_core::walk::{Process, WalkError};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::Experiment;

/// Numerical slack for the deterministic conductance bounds.
pub const BOUND_SLACK: f64 = 1e-9;
/// Violations kept verbatim per replica; the rest are only counted.
const KEPT_VIOLATIONS: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub n: u64,
    pub weights: Vec<u64>,
    pub conductance: f64,
    /// Whether the walker of step `n` reinforced a shortest path; `None` at
    /// `n = 0`.
    pub geodesic: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeFit {
    pub edge: usize,
    pub slope: Option<f64>,
    pub std_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Terminal {
    pub replica: u64,
    pub n: u64,
    pub weights: Vec<u64>,
    /// Weights divided by `n + 2`.
    pub normalized: Vec<f64>,
    pub conductance: f64,
    pub conductance_per_step: f64,
    /// Share of geodesic reinforcements over the last `tail` steps.
    pub geodesic_tail: f64,
    pub tail: u64,
    pub fits: Vec<EdgeFit>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub replica: u64,
    pub n: u64,
    pub what: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicaRun {
    pub replica: u64,
    pub rows: Vec<Row>,
    pub terminal: Terminal,
    pub violations: Vec<Violation>,
    pub violation_count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicaFailure {
    pub replica: u64,
    pub completed_steps: u64,
    pub error: String,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    /// In replica order.
    pub replicas: Vec<Result<ReplicaRun, ReplicaFailure>>,
}

impl RunResult {
    pub fn completed(&self) -> impl Iterator<Item = &ReplicaRun> {
        self.replicas.iter().filter_map(|r| r.as_ref().ok())
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReplicaFailure> {
        self.replicas.iter().filter_map(|r| r.as_ref().err())
    }

    pub fn violation_count(&self) -> u64 {
        self.completed().map(|r| r.violation_count).sum()
    }
}

/// Runs all replicas on the rayon pool. Replica `i` uses stream `i` of the
/// master seed, so the result does not depend on the thread count.
pub fn run_experiment(exp: &Experiment, check: bool) -> RunResult {
    let replicas = (0..exp.replicas)
        .into_par_iter()
        .map(|i| run_replica(exp, i, check))
        .collect();
    RunResult { replicas }
}

fn conductance_of(exp: &Experiment, weights: &[u64]) -> f64 {
    let w: Vec<f64> = weights.iter().map(|&x| x as f64).collect();
    let value = match &exp.sp {
        Some(expr) => sp_conductance(expr, &w),
        None => laplacian_conductance(&exp.graph, &w).map(|r| r.value),
    };
    value.unwrap_or(f64::NAN)
}

pub fn run_replica(exp: &Experiment, replica: u64, check: bool) -> Result<ReplicaRun, ReplicaFailure> {
    let mut rng = replica_rng(exp.master_seed, replica);
    let mut process = Process::new(&exp.graph, exp.rule).step_cap(exp.step_cap);
    let points = exp.schedule.points(exp.steps);
    let h_min = exp.graph.h_min();
    let h_max = exp.sp.as_ref().map(|e| e.h_max());
    let tail = exp.tail.min(exp.steps);
    let tail_start = exp.steps - tail;

    let c0 = conductance_of(exp, &process.state().weights);
    let mut rows = vec![Row { n: 0, weights: process.state().weights.clone(), conductance: c0, geodesic: None }];
    let mut next_point = 1;
    let mut tail_hits = 0u64;
    let mut violations = Vec::new();
    let mut violation_count = 0u64;
    let mut previous = c0;
    let mut flag = |n: u64, what: String| {
        violation_count += 1;
        if violations.len() < KEPT_VIOLATIONS {
            violations.push(Violation { replica, n, what });
        }
    };

    for n in 1..=exp.steps {
        if let Err(e) = process.step(&mut rng) {
            let error = match e {
                WalkError::CapExceeded { steps } => format!("walker {n} exceeded the step cap of {steps}"),
                other => other.to_string(),
            };
            return Err(ReplicaFailure { replica, completed_steps: n - 1, error });
        }
        let geodesic = process.path().len() == h_min;
        if n > tail_start && geodesic {
            tail_hits += 1;
        }
        let recording = points.get(next_point) == Some(&n);
        let weights = &process.state().weights;
        let mut current = None;
        if check {
            if exp.is_losange && !counts_in_polytope(weights, n) {
                flag(n, format!("weights {weights:?} leave the polytope"));
            }
            if let Some(h_max) = h_max {
                let c = conductance_of(exp, weights);
                if c - c0 < n as f64 / h_max as f64 - BOUND_SLACK {
                    flag(n, format!("conductance gain {} below n/h_max = {}", c - c0, n as f64 / h_max as f64));
                }
                if exp.rule.variant.yields_path() {
                    let delta = c - previous;
                    let len = process.path().len() as f64;
                    if delta < 1.0 / len - BOUND_SLACK || delta > 1.0 + BOUND_SLACK {
                        flag(n, format!("conductance increment {delta} outside [1/{len}, 1]"));
                    }
                }
                previous = c;
                current = Some(c);
            }
        }
        if recording {
            let conductance = current.unwrap_or_else(|| conductance_of(exp, weights));
            rows.push(Row { n, weights: weights.clone(), conductance, geodesic: Some(geodesic) });
            next_point += 1;
        }
    }

    let last = rows.last().expect("row at n = 0");
    let fits = exp
        .fit_edges
        .iter()
        .map(|&edge| {
            let [lo, hi] = exp.fit_window;
            let points: Vec<(f64, f64)> =
                rows.iter().filter(|r| r.n > 0).map(|r| (r.n as f64, r.weights[edge] as f64)).collect();
            match decay_exponent_fit(&points, lo, hi) {
                Ok(f) => EdgeFit { edge, slope: Some(f.slope), std_error: Some(f.std_error), error: None },
                Err(e) => EdgeFit { edge, slope: None, std_error: None, error: Some(e.to_string()) },
            }
        })
        .collect();
    let state = process.state();
    let terminal = Terminal {
        replica,
        n: state.n,
        weights: state.weights.clone(),
        normalized: state.normalized(),
        conductance: last.conductance,
        conductance_per_step: last.conductance / state.n as f64,
        geodesic_tail: if tail == 0 { f64::NAN } else { tail_hits as f64 / tail as f64 },
        tail,
        fits,
    };
    Ok(ReplicaRun { replica, rows, terminal, violations, violation_count })
}
