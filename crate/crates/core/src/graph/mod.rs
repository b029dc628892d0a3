//! Finite undirected multigraphs with a distinguished nest and food vertex.
//!
//! Edges are identified by dense integer ids `0..edge_count()`; parallel edges
//! are distinct edges with distinct ids. Weights are never stored on the graph
//! itself: every process owns its own weight vector indexed by edge id.

mod geodesic;
mod io;
mod sp;
mod standard;

use std::collections::VecDeque;

use thiserror::Error;

pub use geodesic::{GeodesicDag, NoPath};
pub use io::{parse_graph_file, render_graph_file, GraphFileError};
pub use sp::{parse_sp, ParseError, SpExpr};
pub use standard::{
    counterexample, double_sierpinski, losange, losange_vertex, sublinear_demo, StandardGraph,
};

pub type VertexId = usize;
pub type EdgeId = usize;

/// One end of an edge as seen from a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Incidence {
    pub edge: EdgeId,
    pub neighbor: VertexId,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("nest and food must be distinct vertices")]
    NestIsFood,
    #[error("edge {edge} is a self-loop at vertex {vertex}")]
    SelfLoop { edge: EdgeId, vertex: VertexId },
    #[error("edge {edge} references vertex {vertex}, but the graph has {count} vertices")]
    UnknownVertex { edge: EdgeId, vertex: VertexId, count: usize },
    #[error("vertex {0} is out of range")]
    VertexOutOfRange(VertexId),
    #[error("graph is not connected")]
    Disconnected,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    labels: Vec<String>,
    edges: Vec<[VertexId; 2]>,
    incidence: Vec<Vec<Incidence>>,
    nest: VertexId,
    food: VertexId,
}

impl Graph {
    /// Builds a graph with vertices labelled by their index.
    pub fn new(
        vertex_count: usize,
        edges: Vec<[VertexId; 2]>,
        nest: VertexId,
        food: VertexId,
    ) -> Result<Self, GraphError> {
        let labels = (0..vertex_count).map(|v| v.to_string()).collect();
        Self::with_labels(labels, edges, nest, food)
    }

    pub fn with_labels(
        labels: Vec<String>,
        edges: Vec<[VertexId; 2]>,
        nest: VertexId,
        food: VertexId,
    ) -> Result<Self, GraphError> {
        let count = labels.len();
        for v in [nest, food] {
            if v >= count {
                return Err(GraphError::VertexOutOfRange(v));
            }
        }
        if nest == food {
            return Err(GraphError::NestIsFood);
        }
        let mut incidence = vec![Vec::new(); count];
        for (edge, &[u, v]) in edges.iter().enumerate() {
            for vertex in [u, v] {
                if vertex >= count {
                    return Err(GraphError::UnknownVertex { edge, vertex, count });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop { edge, vertex: u });
            }
            incidence[u].push(Incidence { edge, neighbor: v });
            incidence[v].push(Incidence { edge, neighbor: u });
        }
        let graph = Graph { labels, edges, incidence, nest, food };
        if graph.reachable_from(nest, |_| true).iter().any(|seen| !seen) {
            return Err(GraphError::Disconnected);
        }
        Ok(graph)
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nest(&self) -> VertexId {
        self.nest
    }

    pub fn food(&self) -> VertexId {
        self.food
    }

    pub fn label(&self, v: VertexId) -> &str {
        &self.labels[v]
    }

    pub fn endpoints(&self, e: EdgeId) -> [VertexId; 2] {
        self.edges[e]
    }

    pub fn edges(&self) -> &[[VertexId; 2]] {
        &self.edges
    }

    pub fn incident(&self, v: VertexId) -> &[Incidence] {
        &self.incidence[v]
    }

    /// The endpoint of `e` that is not `v`.
    pub fn opposite(&self, e: EdgeId, v: VertexId) -> VertexId {
        let [a, b] = self.edges[e];
        if a == v {
            b
        } else {
            a
        }
    }

    /// Vertices reachable from `start` using only edges accepted by `allow`.
    pub fn reachable_from(&self, start: VertexId, allow: impl Fn(EdgeId) -> bool) -> Vec<bool> {
        let mut seen = vec![false; self.vertex_count()];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(v) = stack.pop() {
            for inc in &self.incidence[v] {
                if allow(inc.edge) && !seen[inc.neighbor] {
                    seen[inc.neighbor] = true;
                    stack.push(inc.neighbor);
                }
            }
        }
        seen
    }

    /// BFS distances from `start` using only edges accepted by `allow`.
    pub fn distances_from(
        &self,
        start: VertexId,
        allow: impl Fn(EdgeId) -> bool,
    ) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.vertex_count()];
        let mut queue = VecDeque::new();
        dist[start] = Some(0);
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap_or(0);
            for inc in &self.incidence[v] {
                if allow(inc.edge) && dist[inc.neighbor].is_none() {
                    dist[inc.neighbor] = Some(d + 1);
                    queue.push_back(inc.neighbor);
                }
            }
        }
        dist
    }

    /// Graph distance between nest and food.
    pub fn h_min(&self) -> usize {
        self.distances_from(self.nest, |_| true)[self.food]
            .expect("graphs are connected by construction")
    }

    /// Length of the longest self-avoiding nest-to-food path.
    ///
    /// Exhaustive depth-first search over simple paths; exponential in the worst
    /// case and intended for desk-scale graphs only.
    pub fn h_max(&self) -> usize {
        let mut on_path = vec![false; self.vertex_count()];
        let mut best = 0;
        self.longest_from(self.nest, 0, &mut on_path, &mut best);
        best
    }

    fn longest_from(&self, v: VertexId, depth: usize, on_path: &mut [bool], best: &mut usize) {
        if v == self.food {
            *best = (*best).max(depth);
            return;
        }
        on_path[v] = true;
        for inc in &self.incidence[v] {
            if !on_path[inc.neighbor] {
                self.longest_from(inc.neighbor, depth + 1, on_path, best);
            }
        }
        on_path[v] = false;
    }

    /// Whether `path` is a self-avoiding nest-to-food path, given as an ordered
    /// list of edge ids starting at the nest.
    pub fn is_self_avoiding_path(&self, path: &[EdgeId]) -> bool {
        let mut visited = vec![false; self.vertex_count()];
        let mut at = self.nest;
        visited[at] = true;
        for &e in path {
            if e >= self.edge_count() {
                return false;
            }
            let [a, b] = self.edges[e];
            let next = if a == at {
                b
            } else if b == at {
                a
            } else {
                return false;
            };
            if visited[next] {
                return false;
            }
            visited[next] = true;
            at = next;
        }
        at == self.food
    }
}
