use std::path::PathBuf;

use antpath_core::conductance::{laplacian_conductance, sp_conductance};
use antpath_core::graph::{parse_graph_file, parse_sp, StandardGraph};
use clap::Args;
use serde::Serialize;
use serde_json::json;

use super::parse_list;
use crate::{CliError, Outcome, SCHEMA_VERSION};

#[derive(Debug, Args, Serialize)]
#[command(group = clap::ArgGroup::new("source").required(true).multiple(false))]
pub struct ConductanceArgs {
    /// Named graph, e.g. `losange` or `counterexample:5`.
    #[arg(long, group = "source")]
    pub graph: Option<String>,
    /// Series-parallel term, e.g. `P(S(e,e),e)`.
    #[arg(long, group = "source")]
    pub sp: Option<String>,
    /// Graph file.
    #[arg(long, group = "source")]
    pub file: Option<PathBuf>,
    /// Comma-separated edge weights in edge-id order; all ones by default.
    #[arg(long)]
    pub weights: Option<String>,
}

pub fn run(args: ConductanceArgs) -> Result<Outcome, CliError> {
    let usage = |m: String| CliError::Usage(m);
    let (graph, expr) = if let Some(name) = &args.graph {
        let which: StandardGraph = name.parse().map_err(|e| usage(format!("--graph: {e}")))?;
        (which.build().map_err(|e| usage(format!("--graph: {e}")))?, None)
    } else if let Some(text) = &args.sp {
        let expr = parse_sp(text).map_err(|e| usage(format!("--sp: {e}")))?;
        (expr.to_graph(), Some(expr))
    } else {
        let path = args.file.as_ref().expect("clap enforces one source");
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        (parse_graph_file(&text).map_err(|e| usage(format!("--file: {e}")))?, None)
    };
    let weights = match &args.weights {
        Some(text) => parse_list(text).map_err(|e| usage(format!("--weights: {e}")))?,
        None => vec![1.0; graph.edge_count()],
    };
    if weights.len() != graph.edge_count() {
        return Err(usage(format!("--weights: expected {} values, got {}", graph.edge_count(), weights.len())));
    }
    let fail = |e: antpath_core::conductance::ConductanceError| usage(format!("--weights: {e}"));
    let (value, method, residual) = match &expr {
        Some(expr) => (sp_conductance(expr, &weights).map_err(fail)?, "sp-reduction", 0.0),
        None => {
            let r = laplacian_conductance(&graph, &weights).map_err(fail)?;
            (r.value, "laplacian", r.residual)
        }
    };
    let summary = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "conductance",
        "config": args,
        "value": value,
        "method": method,
        "residual": residual,
    });
    Ok(Outcome { summary, check_failed: false })
}
