//! Killed weighted random walks from the nest to the food, path extraction
//! rules and the reinforcement process built from them.

mod process;
mod rule;

use rand::Rng;
use thiserror::Error;

use crate::graph::{EdgeId, Graph, VertexId};

pub use process::{run_process, Process, Recorder, StepRecord, WeightState};
pub use rule::{
    geodesic_in_trace, loop_erased_backward, ReinforcedPath, ReinforcementRule, RuleError, Variant,
};

/// Default bound on the number of steps of a single walk.
pub const DEFAULT_STEP_CAP: u64 = 10_000_000;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum WalkError {
    #[error("walk exceeded the step cap after {steps} steps")]
    CapExceeded { steps: u64 },
    #[error("vertex {vertex} has no incident edge with positive weight")]
    Stuck { vertex: VertexId },
}

/// The path of one walker: `vertices[0]` is the nest, the last vertex is the
/// food, and `edges[t]` joins `vertices[t]` and `vertices[t + 1]`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WalkTrace {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
}

impl WalkTrace {
    pub fn steps(&self) -> usize {
        self.edges.len()
    }

    /// Per-edge flag: crossed at least once.
    pub fn edge_mask(&self, edge_count: usize) -> Vec<bool> {
        let mut mask = vec![false; edge_count];
        for &e in &self.edges {
            mask[e] = true;
        }
        mask
    }

    /// Per-edge number of crossings.
    pub fn crossings(&self, edge_count: usize) -> Vec<u64> {
        let mut counts = vec![0; edge_count];
        for &e in &self.edges {
            counts[e] += 1;
        }
        counts
    }

    /// Distinct crossed edges in order of first crossing.
    pub fn distinct_edges(&self) -> Vec<EdgeId> {
        let mut seen = Vec::new();
        for &e in &self.edges {
            if !seen.contains(&e) {
                seen.push(e);
            }
        }
        seen
    }

    /// Checks the structural invariants against `graph`.
    pub fn is_valid(&self, graph: &Graph) -> bool {
        let food_only_last = self.vertices.iter().position(|&v| v == graph.food())
            == Some(self.vertices.len().wrapping_sub(1));
        self.vertices.first() == Some(&graph.nest())
            && self.vertices.len() == self.edges.len() + 1
            && food_only_last
            && self.edges.iter().enumerate().all(|(t, &e)| {
                let [a, b] = graph.endpoints(e);
                let (x, y) = (self.vertices[t], self.vertices[t + 1]);
                (a, b) == (x, y) || (a, b) == (y, x)
            })
    }
}

/// Edge weights as seen by the walker.
#[derive(Debug, Clone, Copy)]
pub enum StepWeights<'a> {
    /// Exact integer weights, sampled without rounding.
    Integer(&'a [u64]),
    /// Arbitrary nonnegative real weights.
    Real(&'a [f64]),
}

/// Samples one walk from the nest, killed at the food.
///
/// Each step crosses an incident edge with probability proportional to
/// `weight^exponent`.
pub fn sample_walk<R: Rng + ?Sized>(
    graph: &Graph,
    weights: &WeightState,
    exponent: f64,
    rng: &mut R,
    step_cap: u64,
) -> Result<WalkTrace, WalkError> {
    let mut trace = WalkTrace::default();
    if exponent == 1.0 {
        sample_walk_into(graph, StepWeights::Integer(&weights.weights), rng, step_cap, &mut trace)?;
    } else {
        let powered: Vec<f64> = weights.weights.iter().map(|&w| (w as f64).powf(exponent)).collect();
        sample_walk_into(graph, StepWeights::Real(&powered), rng, step_cap, &mut trace)?;
    }
    Ok(trace)
}

/// Like [`sample_walk`], reusing the buffers of `trace`.
pub fn sample_walk_into<R: Rng + ?Sized>(
    graph: &Graph,
    weights: StepWeights<'_>,
    rng: &mut R,
    step_cap: u64,
    trace: &mut WalkTrace,
) -> Result<(), WalkError> {
    trace.vertices.clear();
    trace.edges.clear();
    let mut at = graph.nest();
    trace.vertices.push(at);
    let mut steps = 0u64;
    while at != graph.food() {
        if steps >= step_cap {
            return Err(WalkError::CapExceeded { steps });
        }
        let incident = graph.incident(at);
        let pick = match weights {
            StepWeights::Integer(w) => {
                let total: u64 = incident.iter().map(|i| w[i.edge]).sum();
                if total == 0 {
                    return Err(WalkError::Stuck { vertex: at });
                }
                let mut r = rng.random_range(0..total);
                let mut chosen = incident.len() - 1;
                for (k, inc) in incident.iter().enumerate() {
                    let wk = w[inc.edge];
                    if r < wk {
                        chosen = k;
                        break;
                    }
                    r -= wk;
                }
                chosen
            }
            StepWeights::Real(w) => {
                let total: f64 = incident.iter().map(|i| w[i.edge]).sum();
                if total.is_nan() || total <= 0.0 {
                    return Err(WalkError::Stuck { vertex: at });
                }
                let mut r = rng.random::<f64>() * total;
                let mut chosen = None;
                for (k, inc) in incident.iter().enumerate() {
                    let wk = w[inc.edge];
                    if wk > 0.0 {
                        chosen = Some(k);
                        if r < wk {
                            break;
                        }
                        r -= wk;
                    }
                }
                chosen.expect("positive total has a positive edge")
            }
        };
        let inc = incident[pick];
        trace.edges.push(inc.edge);
        trace.vertices.push(inc.neighbor);
        at = inc.neighbor;
        steps += 1;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{losange, SpExpr};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_edge_walk() {
        let g = SpExpr::Base.to_graph();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let w = WeightState::new(1);
        let trace = sample_walk(&g, &w, 1.0, &mut rng, 10).unwrap();
        assert_eq!(trace.edges, vec![0]);
        assert_eq!(trace.vertices, vec![0, 1]);
    }

    #[test]
    fn first_step_law() {
        let g = losange();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut w = WeightState::new(5);
        w.weights[0] = 3;
        let trials = 40_000;
        let hits = (0..trials)
            .filter(|_| sample_walk(&g, &w, 1.0, &mut rng, DEFAULT_STEP_CAP).unwrap().edges[0] == 0)
            .count();
        let freq = hits as f64 / trials as f64;
        let sigma = (0.75f64 * 0.25 / trials as f64).sqrt();
        assert!((freq - 0.75).abs() < 4.0 * sigma, "{freq}");

        let hits = (0..trials)
            .filter(|_| sample_walk(&g, &w, 2.0, &mut rng, DEFAULT_STEP_CAP).unwrap().edges[0] == 0)
            .count();
        let freq = hits as f64 / trials as f64;
        let sigma = (0.9f64 * 0.1 / trials as f64).sqrt();
        assert!((freq - 0.9).abs() < 4.0 * sigma, "{freq}");
    }

    #[test]
    fn traces_are_valid() {
        let g = losange();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let w = WeightState::new(5);
        for _ in 0..1000 {
            let trace = sample_walk(&g, &w, 1.0, &mut rng, DEFAULT_STEP_CAP).unwrap();
            assert!(trace.is_valid(&g));
        }
    }

    #[test]
    fn cap_is_reported() {
        let g = crate::graph::counterexample(30).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let w = WeightState::new(g.edge_count());
        assert_eq!(
            sample_walk(&g, &w, 1.0, &mut rng, 5),
            Err(WalkError::CapExceeded { steps: 5 })
        );
    }

    #[test]
    fn zero_real_weights_are_never_crossed() {
        let g = losange();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let w = [1.0, 1.0, 0.0, 1.0, 1.0];
        let mut trace = WalkTrace::default();
        for _ in 0..500 {
            sample_walk_into(&g, StepWeights::Real(&w), &mut rng, 1000, &mut trace).unwrap();
            assert!(!trace.edges.contains(&2));
        }
    }
}
