use std::fmt;
use std::str::FromStr;

use rand::Rng;
use thiserror::Error;

use super::WalkTrace;
use crate::graph::{EdgeId, GeodesicDag, Graph};

/// Which part of a walker's trace gets reinforced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Loop erasure of the time-reversed walk.
    LoopErased,
    /// A shortest nest-to-food path of the trace, uniformly at random.
    UniformGeodesic,
    /// Every distinct crossed edge, once.
    FullTrace,
    /// Every crossed edge, once per crossing.
    FullTraceMultiplicity,
    /// Walk back from the food over the trace's shortest-path edges, taking
    /// at each vertex the edge crossed earliest on the way forward.
    EarliestGeodesic,
}

impl Variant {
    pub const ALL: [Variant; 5] = [
        Variant::LoopErased,
        Variant::UniformGeodesic,
        Variant::FullTrace,
        Variant::FullTraceMultiplicity,
        Variant::EarliestGeodesic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::LoopErased => "loop-erased",
            Variant::UniformGeodesic => "uniform-geodesic",
            Variant::FullTrace => "full-trace",
            Variant::FullTraceMultiplicity => "full-trace-multiplicity",
            Variant::EarliestGeodesic => "earliest-geodesic",
        }
    }

    /// Whether the rule always reinforces a self-avoiding nest-to-food path.
    pub fn yields_path(self) -> bool {
        matches!(self, Variant::LoopErased | Variant::UniformGeodesic | Variant::EarliestGeodesic)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = RuleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| RuleError::UnknownVariant(s.to_string()))
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RuleError {
    #[error("unknown reinforcement variant '{0}'")]
    UnknownVariant(String),
    #[error("walk exponent must be positive and finite, got {0}")]
    BadExponent(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReinforcementRule {
    pub variant: Variant,
    /// Walkers move proportionally to `weight^exponent`.
    pub exponent: f64,
}

impl ReinforcementRule {
    pub fn new(variant: Variant, exponent: f64) -> Result<Self, RuleError> {
        if !(exponent.is_finite() && exponent > 0.0) {
            return Err(RuleError::BadExponent(exponent));
        }
        Ok(ReinforcementRule { variant, exponent })
    }

    pub fn linear(variant: Variant) -> Self {
        ReinforcementRule { variant, exponent: 1.0 }
    }

    /// The set of edges (with increments) that `trace` reinforces.
    pub fn extract<R: Rng + ?Sized>(&self, graph: &Graph, trace: &WalkTrace, rng: &mut R) -> ReinforcedPath {
        match self.variant {
            Variant::LoopErased => ReinforcedPath::unit(loop_erased_backward(trace)),
            Variant::UniformGeodesic => ReinforcedPath::unit(geodesic_in_trace(graph, trace, rng)),
            Variant::EarliestGeodesic => ReinforcedPath::unit(earliest_geodesic(graph, trace)),
            Variant::FullTrace => ReinforcedPath::unit(trace.distinct_edges()),
            Variant::FullTraceMultiplicity => {
                let edges = trace.distinct_edges();
                let counts = trace.crossings(graph.edge_count());
                let increments = edges.iter().map(|&e| counts[e]).collect();
                ReinforcedPath { edges, increments }
            }
        }
    }
}

/// Edges to reinforce and by how much. For path rules `edges` runs from the
/// nest to the food and every increment is 1.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReinforcedPath {
    pub edges: Vec<EdgeId>,
    pub increments: Vec<u64>,
}

impl ReinforcedPath {
    pub fn unit(edges: Vec<EdgeId>) -> Self {
        let increments = vec![1; edges.len()];
        ReinforcedPath { edges, increments }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn total_increment(&self) -> u64 {
        self.increments.iter().sum()
    }

    /// Edge ids in increasing order.
    pub fn sorted_edges(&self) -> Vec<EdgeId> {
        let mut edges = self.edges.clone();
        edges.sort_unstable();
        edges
    }
}

/// Loop erasure of the reversed walk, returned as edges from nest to food.
///
/// Walking back from the food, each vertex is left through the edge by which
/// it was first entered on the way forward.
pub fn loop_erased_backward(trace: &WalkTrace) -> Vec<EdgeId> {
    let size = trace.vertices.iter().max().map_or(0, |&m| m + 1);
    let mut first_visit = vec![usize::MAX; size];
    for (t, &v) in trace.vertices.iter().enumerate() {
        if first_visit[v] == usize::MAX {
            first_visit[v] = t;
        }
    }
    let mut path = Vec::new();
    let mut entry = trace.vertices.len() - 1;
    while entry > 0 {
        path.push(trace.edges[entry - 1]);
        entry = first_visit[trace.vertices[entry - 1]];
    }
    path.reverse();
    path
}

/// A shortest nest-to-food path of the trace subgraph, uniform among all of
/// them.
pub fn geodesic_in_trace<R: Rng + ?Sized>(graph: &Graph, trace: &WalkTrace, rng: &mut R) -> Vec<EdgeId> {
    let mask = trace.edge_mask(graph.edge_count());
    GeodesicDag::with_mask(graph, &mask).expect("a trace reaches the food").sample(rng)
}

fn earliest_geodesic(graph: &Graph, trace: &WalkTrace) -> Vec<EdgeId> {
    let mut first_crossing = vec![usize::MAX; graph.edge_count()];
    for (t, &e) in trace.edges.iter().enumerate() {
        if first_crossing[e] == usize::MAX {
            first_crossing[e] = t;
        }
    }
    let mask: Vec<bool> = first_crossing.iter().map(|&t| t != usize::MAX).collect();
    let dag = GeodesicDag::with_mask(graph, &mask).expect("a trace reaches the food");
    let mut path = Vec::with_capacity(dag.length());
    let mut v = graph.food();
    while v != graph.nest() {
        let want = dag.level(v).expect("on geodesic") - 1;
        let step = graph
            .incident(v)
            .iter()
            .filter(|inc| mask[inc.edge] && dag.level(inc.neighbor) == Some(want))
            .min_by_key(|inc| first_crossing[inc.edge])
            .expect("geodesic predecessor exists");
        path.push(step.edge);
        v = step.neighbor;
    }
    path.reverse();
    path
}
