//! Experiment configuration files.
//!
//! A config is a TOML document with the sections `graph`, `process`, `run`,
//! `record` and `output`. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use antpath_core::graph::{parse_graph_file, parse_sp, Graph, SpExpr, StandardGraph};
use antpath_core::walk::{ReinforcementRule, Variant, DEFAULT_STEP_CAP};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::schedule::Schedule;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("{field}: {message}")]
    Invalid { field: &'static str, message: String },
}

fn invalid(field: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { field, message: message.into() }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub graph: GraphConfig,
    #[serde(default)]
    pub process: ProcessConfig,
    pub run: RunConfig,
    #[serde(default)]
    pub record: RecordConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

/// Exactly one of the three sources must be given.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sp: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub named: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessConfig {
    #[serde(default = "default_rule")]
    pub rule: String,
    #[serde(default = "default_exponent")]
    pub exponent: f64,
    #[serde(default = "default_step_cap")]
    pub step_cap: u64,
}

fn default_rule() -> String {
    Variant::LoopErased.name().to_string()
}

fn default_exponent() -> f64 {
    1.0
}

fn default_step_cap() -> u64 {
    DEFAULT_STEP_CAP
}

impl Default for ProcessConfig {
    fn default() -> Self {
        ProcessConfig { rule: default_rule(), exponent: 1.0, step_cap: DEFAULT_STEP_CAP }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub steps: u64,
    #[serde(default = "default_replicas")]
    pub replicas: u64,
    pub master_seed: u64,
}

fn default_replicas() -> u64 {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleKind {
    Geometric,
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecordConfig {
    #[serde(default = "default_schedule")]
    pub schedule: ScheduleKind,
    #[serde(default = "default_ratio")]
    pub ratio: f64,
    #[serde(default = "default_every")]
    pub every: u64,
    /// Number of final steps over which the geodesic fraction is taken.
    #[serde(default = "default_tail")]
    pub tail: u64,
    /// Edges whose weight gets a log-log slope fit.
    #[serde(default)]
    pub fit_edges: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit_window: Option<[f64; 2]>,
}

fn default_schedule() -> ScheduleKind {
    ScheduleKind::Geometric
}

fn default_ratio() -> f64 {
    1.1
}

fn default_every() -> u64 {
    1000
}

fn default_tail() -> u64 {
    10_000
}

impl Default for RecordConfig {
    fn default() -> Self {
        RecordConfig {
            schedule: ScheduleKind::Geometric,
            ratio: default_ratio(),
            every: default_every(),
            tail: default_tail(),
            fit_edges: Vec::new(),
            fit_window: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
}

fn default_dir() -> PathBuf {
    PathBuf::from("out")
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: default_dir() }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let de = toml::Deserializer::parse(text)
            .map_err(|e| ConfigError::Parse { path: ".".into(), message: e.to_string() })?;
        let config: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| ConfigError::Parse {
            path: e.path().to_string(),
            message: e.inner().message().to_string(),
        })?;
        if config.schema_version != SCHEMA_VERSION {
            return Err(invalid(
                "schema_version",
                format!("unsupported version {}, expected {SCHEMA_VERSION}", config.schema_version),
            ));
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
        let mut config = Self::from_toml(&text)?;
        // Graph files are looked up next to the config.
        if let (Some(file), Some(dir)) = (&config.graph.file, path.parent()) {
            if file.is_relative() {
                config.graph.file = Some(dir.join(file));
            }
        }
        Ok(config)
    }

    /// Checks every field and builds the objects the harness needs.
    pub fn resolve(&self) -> Result<Experiment, ConfigError> {
        let (graph, sp, name) = self.graph.build()?;
        let variant: Variant = self.process.rule.parse().map_err(|e| invalid("process.rule", format!("{e}")))?;
        let rule = ReinforcementRule::new(variant, self.process.exponent)
            .map_err(|e| invalid("process.exponent", format!("{e}")))?;
        if self.process.step_cap == 0 {
            return Err(invalid("process.step_cap", "must be positive"));
        }
        if self.run.replicas == 0 {
            return Err(invalid("run.replicas", "must be positive"));
        }
        let schedule = match self.record.schedule {
            ScheduleKind::Geometric if !(self.record.ratio > 1.0 && self.record.ratio.is_finite()) => {
                return Err(invalid("record.ratio", "must be a finite number above 1"));
            }
            ScheduleKind::Geometric => Schedule::Geometric { ratio: self.record.ratio },
            ScheduleKind::Linear if self.record.every == 0 => {
                return Err(invalid("record.every", "must be positive"));
            }
            ScheduleKind::Linear => Schedule::Linear { every: self.record.every },
        };
        if let Some(&e) = self.record.fit_edges.iter().find(|&&e| e >= graph.edge_count()) {
            return Err(invalid("record.fit_edges", format!("edge {e} does not exist")));
        }
        let fit_window = match self.record.fit_window {
            Some([lo, hi]) if !(lo > 0.0 && hi > lo) => {
                return Err(invalid("record.fit_window", "need 0 < lo < hi"));
            }
            Some(w) => w,
            None => [1.0, self.run.steps as f64],
        };
        Ok(Experiment {
            graph,
            sp,
            is_losange: name == Some(StandardGraph::Losange),
            rule,
            step_cap: self.process.step_cap,
            steps: self.run.steps,
            replicas: self.run.replicas,
            master_seed: self.run.master_seed,
            schedule,
            tail: self.record.tail,
            fit_edges: self.record.fit_edges.clone(),
            fit_window,
        })
    }
}

impl GraphConfig {
    fn build(&self) -> Result<(Graph, Option<SpExpr>, Option<StandardGraph>), ConfigError> {
        match (&self.sp, &self.named, &self.file) {
            (Some(text), None, None) => {
                let expr = parse_sp(text).map_err(|e| invalid("graph.sp", e.to_string()))?;
                Ok((expr.to_graph(), Some(expr), None))
            }
            (None, Some(name), None) => {
                let which: StandardGraph = name.parse().map_err(|e| invalid("graph.named", format!("{e}")))?;
                let graph = which.build().map_err(|e| invalid("graph.named", e.to_string()))?;
                Ok((graph, None, Some(which)))
            }
            (None, None, Some(path)) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| invalid("graph.file", format!("{}: {e}", path.display())))?;
                let graph = parse_graph_file(&text).map_err(|e| invalid("graph.file", e.to_string()))?;
                Ok((graph, None, None))
            }
            _ => Err(invalid("graph", "give exactly one of sp, named, file")),
        }
    }
}

/// A validated experiment.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub graph: Graph,
    /// Present when the graph came from a series-parallel term; conductances
    /// then use the exact reduction.
    pub sp: Option<SpExpr>,
    pub is_losange: bool,
    pub rule: ReinforcementRule,
    pub step_cap: u64,
    pub steps: u64,
    pub replicas: u64,
    pub master_seed: u64,
    pub schedule: Schedule,
    pub tail: u64,
    pub fit_edges: Vec<usize>,
    pub fit_window: [f64; 2],
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
schema_version = 1
[graph]
sp = "P(S(e,e),S(e,S(e,e)))"
[run]
steps = 100
master_seed = 7
"#;

    #[test]
    fn minimal_config_uses_defaults() {
        let c = ExperimentConfig::from_toml(MINIMAL).unwrap();
        assert_eq!(c.process.rule, "loop-erased");
        assert_eq!(c.run.replicas, 1);
        assert_eq!(c.record.schedule, ScheduleKind::Geometric);
        let e = c.resolve().unwrap();
        assert_eq!(e.graph.edge_count(), 5);
        assert!(e.sp.is_some());
    }

    #[test]
    fn unknown_keys_are_reported_with_their_path() {
        let text = MINIMAL.replace("steps = 100", "steps = 100\nstpes = 3");
        match ExperimentConfig::from_toml(&text) {
            Err(ConfigError::Parse { path, message }) => {
                assert_eq!(path, "run.stpes");
                assert!(message.contains("stpes"), "{message}");
            }
            other => panic!("{other:?}"),
        }
        let text = MINIMAL.replace("steps = 100", "steps = -4");
        match ExperimentConfig::from_toml(&text) {
            Err(ConfigError::Parse { path, .. }) => assert_eq!(path, "run.steps"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn semantic_errors_name_the_field() {
        let bad = |from: &str, to: &str, field: &str| {
            let c = ExperimentConfig::from_toml(&MINIMAL.replace(from, to)).unwrap();
            match c.resolve() {
                Err(ConfigError::Invalid { field: f, .. }) => assert_eq!(f, field),
                other => panic!("{other:?}"),
            }
        };
        bad("sp = ", "named = \"losange\"\nsp = ", "graph");
        bad("P(S(e,e),S(e,S(e,e)))", "P(S(e,e)", "graph.sp");
        bad("master_seed = 7", "master_seed = 7\nreplicas = 0", "run.replicas");
        bad("[run]", "[process]\nrule = \"greedy\"\n[run]", "process.rule");
        bad("[run]", "[record]\nratio = 1.0\n[run]", "record.ratio");
        bad("[run]", "[record]\nfit_edges = [9]\n[run]", "record.fit_edges");
        assert!(matches!(
            ExperimentConfig::from_toml(&MINIMAL.replace("schema_version = 1", "schema_version = 2")),
            Err(ConfigError::Invalid { field: "schema_version", .. })
        ));
    }
}
