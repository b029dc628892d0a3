//! CSV and JSON artifacts.
//!
//! Every CSV starts with `#` comment lines carrying the schema version and a
//! JSON echo of the configuration, followed by a header row. Every JSON
//! summary carries `schema_version` and `config` fields.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use antpath_core::stats::{mean, quantile, std_dev};
use serde::Serialize;
use serde_json::Value;

use crate::config::SCHEMA_VERSION;
use crate::harness::RunResult;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Spread {
    pub count: usize,
    pub mean: f64,
    pub sd: f64,
    pub min: f64,
    pub q05: f64,
    pub q50: f64,
    pub q95: f64,
    pub max: f64,
}

impl Spread {
    /// `None` for an empty sample. Non-finite values are dropped.
    pub fn of(values: &[f64]) -> Option<Spread> {
        let xs: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
        if xs.is_empty() {
            return None;
        }
        let q = |p| quantile(&xs, p).expect("nonempty");
        Some(Spread {
            count: xs.len(),
            mean: mean(&xs),
            sd: std_dev(&xs),
            min: q(0.0),
            q05: q(0.05),
            q50: q(0.5),
            q95: q(0.95),
            max: q(1.0),
        })
    }
}

/// Opens `path` for writing and emits the comment preamble.
pub fn csv_writer(path: &Path, config: &Value) -> Result<csv::Writer<BufWriter<File>>, CliError> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut out = BufWriter::new(file);
    writeln!(out, "# schema_version: {SCHEMA_VERSION}").map_err(|e| CliError::io(path, e))?;
    writeln!(out, "# config: {config}").map_err(|e| CliError::io(path, e))?;
    Ok(csv::Writer::from_writer(out))
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut out = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| CliError::Output(e.to_string()))?;
    writeln!(out).map_err(|e| CliError::io(path, e))?;
    Ok(())
}

pub fn create_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

/// `series.csv`: one row per replica and recorded step.
pub fn write_series(path: &Path, config: &Value, edge_count: usize, result: &RunResult) -> Result<(), CliError> {
    let mut w = csv_writer(path, config)?;
    let mut header = vec!["replica".to_string(), "n".to_string()];
    header.extend((0..edge_count).map(|e| format!("w{e}")));
    header.push("conductance".into());
    header.push("geodesic".into());
    w.write_record(&header).map_err(CliError::csv)?;
    for run in result.completed() {
        for row in &run.rows {
            let mut rec = vec![run.replica.to_string(), row.n.to_string()];
            rec.extend(row.weights.iter().map(u64::to_string));
            rec.push(row.conductance.to_string());
            rec.push(match row.geodesic {
                Some(g) => u8::from(g).to_string(),
                None => String::new(),
            });
            w.write_record(&rec).map_err(CliError::csv)?;
        }
    }
    w.flush().map_err(|e| CliError::io(path, e))
}
