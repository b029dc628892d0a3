//! Electrical-network quantities and absorbing-chain hitting probabilities.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::graph::{EdgeId, Graph, SpExpr, VertexId};

/// Residual above which a dense solve is rejected.
pub const MAX_RESIDUAL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConductanceError {
    #[error("arguments must be positive, got {0} and {1}")]
    NonPositive(f64, f64),
    #[error("expected {expected} weights, got {got}")]
    WeightCount { expected: usize, got: usize },
    #[error("edge {edge} has non-positive weight {weight}")]
    BadWeight { edge: EdgeId, weight: f64 },
    #[error("linear system is singular")]
    Singular,
    #[error("linear solve residual {0:e} exceeds tolerance")]
    Residual(f64),
    #[error("start vertex cannot reach any absorbing vertex")]
    Unreachable,
    #[error("invalid vertex sets: {0}")]
    InvalidSets(&'static str),
}

/// Series combination of two conductances, `1 / (1/x + 1/y)`.
pub fn phi(x: f64, y: f64) -> Result<f64, ConductanceError> {
    if !(x > 0.0 && y > 0.0) {
        return Err(ConductanceError::NonPositive(x, y));
    }
    Ok(x * y / (x + y))
}

/// Effective conductance of a series-parallel term; `weights[k]` belongs to
/// leaf `k` in left-to-right order.
pub fn sp_conductance(expr: &SpExpr, weights: &[f64]) -> Result<f64, ConductanceError> {
    let expected = expr.leaf_count();
    if weights.len() != expected {
        return Err(ConductanceError::WeightCount { expected, got: weights.len() });
    }
    if let Some((edge, &weight)) = weights.iter().enumerate().find(|(_, &w)| !(w > 0.0)) {
        return Err(ConductanceError::BadWeight { edge, weight });
    }
    let mut leaves = weights.iter();
    Ok(reduce(expr, &mut leaves))
}

fn reduce<'a>(expr: &SpExpr, leaves: &mut impl Iterator<Item = &'a f64>) -> f64 {
    match expr {
        SpExpr::Base => *leaves.next().expect("leaf count checked"),
        SpExpr::Series(a, b) => {
            let (x, y) = (reduce(a, leaves), reduce(b, leaves));
            x * y / (x + y)
        }
        SpExpr::Parallel(a, b) => reduce(a, leaves) + reduce(b, leaves),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    SpReduction,
    Laplacian,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConductanceReport {
    pub value: f64,
    pub method: Method,
    /// Max-norm residual of the linear solve; zero for exact reductions.
    pub residual: f64,
}

/// Effective conductance between nest and food: unit voltage at the nest,
/// zero at the food, current out of the nest.
pub fn laplacian_conductance(graph: &Graph, weights: &[f64]) -> Result<ConductanceReport, ConductanceError> {
    check_weights(graph, weights, false)?;
    let (nest, food) = (graph.nest(), graph.food());
    let interior: Vec<VertexId> = (0..graph.vertex_count()).filter(|&v| v != nest && v != food).collect();
    let mut slot = vec![usize::MAX; graph.vertex_count()];
    for (k, &v) in interior.iter().enumerate() {
        slot[v] = k;
    }
    let m = interior.len();
    let mut a = DMatrix::<f64>::zeros(m, m);
    let mut b = DVector::<f64>::zeros(m);
    for (e, &[u, v]) in graph.edges().iter().enumerate() {
        let w = weights[e];
        for (x, y) in [(u, v), (v, u)] {
            if slot[x] == usize::MAX {
                continue;
            }
            a[(slot[x], slot[x])] += w;
            if slot[y] != usize::MAX {
                a[(slot[x], slot[y])] -= w;
            } else if y == nest {
                b[slot[x]] += w;
            }
        }
    }
    let (voltage, residual) = solve(a, b)?;
    let at = |v: VertexId| {
        if v == nest {
            1.0
        } else if v == food {
            0.0
        } else {
            voltage[slot[v]]
        }
    };
    let value = graph
        .incident(nest)
        .iter()
        .map(|inc| weights[inc.edge] * (1.0 - at(inc.neighbor)))
        .sum();
    Ok(ConductanceReport { value, method: Method::Laplacian, residual })
}

fn check_weights(graph: &Graph, weights: &[f64], allow_zero: bool) -> Result<(), ConductanceError> {
    if weights.len() != graph.edge_count() {
        return Err(ConductanceError::WeightCount { expected: graph.edge_count(), got: weights.len() });
    }
    for (edge, &weight) in weights.iter().enumerate() {
        let ok = if allow_zero { weight >= 0.0 } else { weight > 0.0 };
        if !ok || !weight.is_finite() {
            return Err(ConductanceError::BadWeight { edge, weight });
        }
    }
    Ok(())
}

fn solve(a: DMatrix<f64>, b: DVector<f64>) -> Result<(DVector<f64>, f64), ConductanceError> {
    if b.is_empty() {
        return Ok((b, 0.0));
    }
    let x = a.clone().lu().solve(&b).ok_or(ConductanceError::Singular)?;
    let residual = (&a * &x - &b).amax();
    let scale = b.amax().max(1.0);
    if !(residual <= MAX_RESIDUAL * scale) {
        return Err(ConductanceError::Residual(residual));
    }
    Ok((x, residual))
}

/// Weighted undirected adjacency without the structural requirements of
/// [`Graph`]; used for auxiliary chains with absorbing stub vertices.
#[derive(Debug, Clone, Default)]
pub struct Network {
    adjacency: Vec<Vec<(VertexId, f64)>>,
}

impl Network {
    pub fn with_vertices(count: usize) -> Self {
        Network { adjacency: vec![Vec::new(); count] }
    }

    /// Copies `graph`, skipping edges of zero weight and edges rejected by
    /// `keep`.
    pub fn from_graph(graph: &Graph, weights: &[f64], keep: impl Fn(EdgeId) -> bool) -> Self {
        let mut net = Network::with_vertices(graph.vertex_count());
        for (e, &[u, v]) in graph.edges().iter().enumerate() {
            if keep(e) && weights[e] > 0.0 {
                net.add_edge(u, v, weights[e]);
            }
        }
        net
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn add_vertex(&mut self) -> VertexId {
        self.adjacency.push(Vec::new());
        self.adjacency.len() - 1
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId, weight: f64) {
        self.adjacency[u].push((v, weight));
        if u != v {
            self.adjacency[v].push((u, weight));
        }
    }

    /// Probability that the walk from `start` reaches `target` before `avoid`.
    /// Walks that can never be absorbed are an error.
    pub fn hitting_probability(
        &self,
        start: VertexId,
        target: &[VertexId],
        avoid: &[VertexId],
    ) -> Result<f64, ConductanceError> {
        const TRANSIENT: u8 = 0;
        const TARGET: u8 = 1;
        const AVOID: u8 = 2;
        let mut kind = vec![TRANSIENT; self.vertex_count()];
        for &v in target {
            kind[v] = TARGET;
        }
        for &v in avoid {
            if kind[v] == TARGET {
                return Err(ConductanceError::InvalidSets("target and avoid overlap"));
            }
            kind[v] = AVOID;
        }
        match kind[start] {
            TARGET => return Ok(1.0),
            AVOID => return Ok(0.0),
            _ => {}
        }

        // Transient vertices reachable from start without passing through an
        // absorbing vertex.
        let mut slot = vec![usize::MAX; self.vertex_count()];
        let mut order = vec![start];
        slot[start] = 0;
        let mut absorbable = false;
        let mut k = 0;
        while k < order.len() {
            let v = order[k];
            k += 1;
            for &(u, w) in &self.adjacency[v] {
                if w <= 0.0 {
                    continue;
                }
                if kind[u] != TRANSIENT {
                    absorbable = true;
                } else if slot[u] == usize::MAX {
                    slot[u] = order.len();
                    order.push(u);
                }
            }
        }
        if !absorbable {
            return Err(ConductanceError::Unreachable);
        }

        let m = order.len();
        let mut a = DMatrix::<f64>::zeros(m, m);
        let mut b = DVector::<f64>::zeros(m);
        for (i, &v) in order.iter().enumerate() {
            let total: f64 = self.adjacency[v].iter().filter(|(_, w)| *w > 0.0).map(|(_, w)| w).sum();
            a[(i, i)] += 1.0;
            for &(u, w) in &self.adjacency[v] {
                if w <= 0.0 {
                    continue;
                }
                let p = w / total;
                match kind[u] {
                    TARGET => b[i] += p,
                    AVOID => {}
                    _ => a[(i, slot[u])] -= p,
                }
            }
        }
        let (h, _) = solve(a, b)?;
        Ok(h[0])
    }
}

/// Probability that the weighted walk from `start` reaches a vertex of
/// `target` before one of `avoid`. Zero-weight edges are never crossed.
pub fn hitting_probability(
    graph: &Graph,
    weights: &[f64],
    start: VertexId,
    target: &[VertexId],
    avoid: &[VertexId],
) -> Result<f64, ConductanceError> {
    check_weights(graph, weights, true)?;
    Network::from_graph(graph, weights, |_| true).hitting_probability(start, target, avoid)
}

/// Probability that the weighted walk from `start` crosses an edge of
/// `target_edges` before crossing an edge of `avoid_edges` or hitting a
/// vertex of `avoid_vertices`.
///
/// Each watched edge `{u, v}` is replaced by two absorbing stubs, one hanging
/// off `u` and one off `v`, each carrying the edge's weight; stepping onto a
/// stub is the same event as crossing the edge.
pub fn crossing_probability(
    graph: &Graph,
    weights: &[f64],
    start: VertexId,
    target_edges: &[EdgeId],
    avoid_edges: &[EdgeId],
    avoid_vertices: &[VertexId],
) -> Result<f64, ConductanceError> {
    check_weights(graph, weights, true)?;
    let watched = |e: EdgeId| target_edges.contains(&e) || avoid_edges.contains(&e);
    if target_edges.iter().any(|e| avoid_edges.contains(e)) {
        return Err(ConductanceError::InvalidSets("target and avoid edges overlap"));
    }
    let mut net = Network::from_graph(graph, weights, |e| !watched(e));
    let mut target = Vec::new();
    let mut avoid = avoid_vertices.to_vec();
    for (edges, sink) in [(target_edges, &mut target), (avoid_edges, &mut avoid)] {
        for &e in edges {
            if weights[e] <= 0.0 {
                continue;
            }
            for end in graph.endpoints(e) {
                let stub = net.add_vertex();
                net.add_edge(end, stub, weights[e]);
                sink.push(stub);
            }
        }
    }
    net.hitting_probability(start, &target, &avoid)
}

/// Conductance change when every edge of a self-avoiding nest-to-food path
/// gains one unit of weight, together with the bounds `1/len` and `1` it must
/// respect.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncrementCheck {
    pub delta: f64,
    pub lower: f64,
    pub upper: f64,
}

impl IncrementCheck {
    pub fn holds(&self, slack: f64) -> bool {
        self.delta >= self.lower - slack && self.delta <= self.upper + slack
    }
}

pub fn conductance_increment_bounds(
    expr: &SpExpr,
    weights: &[f64],
    path: &[EdgeId],
) -> Result<IncrementCheck, ConductanceError> {
    let before = sp_conductance(expr, weights)?;
    let mut bumped = weights.to_vec();
    for &e in path {
        bumped[e] += 1.0;
    }
    let after = sp_conductance(expr, &bumped)?;
    Ok(IncrementCheck { delta: after - before, lower: 1.0 / path.len() as f64, upper: 1.0 })
}
