//! Line-oriented graph files.
//!
//! ```text
//! # the losange
//! vertex N
//! vertex l
//! edge 0 N l
//! edge 1 l F
//! nest N
//! food F
//! ```
//!
//! Vertex names are arbitrary tokens. Vertices are created on first mention,
//! either by a `vertex` line or by an `edge` line. Edge ids must cover
//! `0..E` exactly once, in any order.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use super::{Graph, GraphError, VertexId};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphFileError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing `{0}` declaration")]
    Missing(&'static str),
    #[error("edge ids are not dense: id {0} is missing")]
    SparseEdgeIds(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

pub fn parse_graph_file(text: &str) -> Result<Graph, GraphFileError> {
    let mut names: Vec<String> = Vec::new();
    let mut index: HashMap<String, VertexId> = HashMap::new();
    let mut edges: HashMap<usize, [VertexId; 2]> = HashMap::new();
    let mut nest = None;
    let mut food = None;

    let mut intern = |name: &str, names: &mut Vec<String>| -> VertexId {
        *index.entry(name.to_string()).or_insert_with(|| {
            names.push(name.to_string());
            names.len() - 1
        })
    };

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let syntax = |message: &str| GraphFileError::Syntax { line, message: message.to_string() };
        match tokens.as_slice() {
            [] => {}
            ["vertex", v] => {
                intern(v, &mut names);
            }
            ["edge", id, u, v] => {
                let id: usize = id.parse().map_err(|_| syntax("edge id must be a non-negative integer"))?;
                let ends = [intern(u, &mut names), intern(v, &mut names)];
                if edges.insert(id, ends).is_some() {
                    return Err(syntax(&format!("duplicate edge id {id}")));
                }
            }
            ["nest", v] => nest = Some(intern(v, &mut names)),
            ["food", v] => food = Some(intern(v, &mut names)),
            [keyword, ..] => {
                return Err(syntax(&format!("malformed `{keyword}` line")));
            }
        }
    }

    let nest = nest.ok_or(GraphFileError::Missing("nest"))?;
    let food = food.ok_or(GraphFileError::Missing("food"))?;
    let mut ordered = Vec::with_capacity(edges.len());
    for id in 0..edges.len() {
        ordered.push(*edges.get(&id).ok_or(GraphFileError::SparseEdgeIds(id))?);
    }
    Ok(Graph::with_labels(names, ordered, nest, food)?)
}

pub fn render_graph_file(graph: &Graph) -> String {
    let mut out = String::new();
    for v in 0..graph.vertex_count() {
        let _ = writeln!(out, "vertex {}", graph.label(v));
    }
    for (e, &[u, v]) in graph.edges().iter().enumerate() {
        let _ = writeln!(out, "edge {e} {} {}", graph.label(u), graph.label(v));
    }
    let _ = writeln!(out, "nest {}", graph.label(graph.nest()));
    let _ = writeln!(out, "food {}", graph.label(graph.food()));
    out
}
