use rand::Rng;

use super::{
    sample_walk_into, ReinforcedPath, ReinforcementRule, StepWeights, WalkError, WalkTrace,
    DEFAULT_STEP_CAP,
};
use crate::graph::Graph;

/// Exact integer edge weights after `n` reinforcement steps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightState {
    pub weights: Vec<u64>,
    pub n: u64,
}

impl WeightState {
    /// Every edge at weight 1, no steps taken.
    pub fn new(edge_count: usize) -> Self {
        WeightState { weights: vec![1; edge_count], n: 0 }
    }

    pub fn apply(&mut self, path: &ReinforcedPath) {
        for (&e, &k) in path.edges.iter().zip(&path.increments) {
            self.weights[e] += k;
        }
        self.n += 1;
    }

    pub fn total(&self) -> u64 {
        self.weights.iter().sum()
    }

    /// Weights divided by `n + 2`.
    pub fn normalized(&self) -> Vec<f64> {
        let scale = (self.n + 2) as f64;
        self.weights.iter().map(|&w| w as f64 / scale).collect()
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.weights.iter().map(|&w| w as f64).collect()
    }
}

/// What a recorder sees after each completed step.
pub struct StepRecord<'a> {
    pub state: &'a WeightState,
    pub trace: &'a WalkTrace,
    pub path: &'a ReinforcedPath,
}

pub trait Recorder {
    fn record(&mut self, step: &StepRecord<'_>);
}

impl<F: FnMut(&StepRecord<'_>)> Recorder for F {
    fn record(&mut self, step: &StepRecord<'_>) {
        self(step)
    }
}

/// The ant process on one graph: walk, extract, reinforce.
pub struct Process<'g> {
    graph: &'g Graph,
    rule: ReinforcementRule,
    state: WeightState,
    powered: Option<Vec<f64>>,
    step_cap: u64,
    trace: WalkTrace,
    path: ReinforcedPath,
}

impl<'g> Process<'g> {
    pub fn new(graph: &'g Graph, rule: ReinforcementRule) -> Self {
        Self::with_state(graph, rule, WeightState::new(graph.edge_count()))
    }

    pub fn with_state(graph: &'g Graph, rule: ReinforcementRule, state: WeightState) -> Self {
        assert_eq!(state.weights.len(), graph.edge_count(), "one weight per edge");
        let powered = (rule.exponent != 1.0)
            .then(|| state.weights.iter().map(|&w| (w as f64).powf(rule.exponent)).collect());
        Process {
            graph,
            rule,
            state,
            powered,
            step_cap: DEFAULT_STEP_CAP,
            trace: WalkTrace::default(),
            path: ReinforcedPath::default(),
        }
    }

    pub fn step_cap(mut self, cap: u64) -> Self {
        self.step_cap = cap;
        self
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn rule(&self) -> ReinforcementRule {
        self.rule
    }

    pub fn state(&self) -> &WeightState {
        &self.state
    }

    /// Trace of the most recent walker.
    pub fn trace(&self) -> &WalkTrace {
        &self.trace
    }

    /// Edges reinforced by the most recent walker.
    pub fn path(&self) -> &ReinforcedPath {
        &self.path
    }

    pub fn record(&self) -> StepRecord<'_> {
        StepRecord { state: &self.state, trace: &self.trace, path: &self.path }
    }

    /// Runs one walker and applies its reinforcement.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<(), WalkError> {
        let weights = match &self.powered {
            Some(p) => StepWeights::Real(p),
            None => StepWeights::Integer(&self.state.weights),
        };
        sample_walk_into(self.graph, weights, rng, self.step_cap, &mut self.trace)?;
        self.path = self.rule.extract(self.graph, &self.trace, rng);
        self.state.apply(&self.path);
        if let Some(p) = &mut self.powered {
            for &e in &self.path.edges {
                p[e] = (self.state.weights[e] as f64).powf(self.rule.exponent);
            }
        }
        Ok(())
    }
}

/// Runs `n_steps` walkers from unit weights, calling `recorder` after each.
pub fn run_process<R: Rng + ?Sized, C: Recorder>(
    graph: &Graph,
    rule: ReinforcementRule,
    n_steps: u64,
    rng: &mut R,
    recorder: &mut C,
) -> Result<WeightState, WalkError> {
    let mut process = Process::new(graph, rule);
    for _ in 0..n_steps {
        process.step(rng)?;
        recorder.record(&process.record());
    }
    Ok(process.state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{losange, parse_sp};
    use crate::walk::Variant;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn apply_adds_increments() {
        let mut w = WeightState::new(5);
        w.apply(&ReinforcedPath::unit(vec![0, 1]));
        assert_eq!(w.weights, vec![2, 2, 1, 1, 1]);
        assert_eq!(w.n, 1);
        w.apply(&ReinforcedPath { edges: vec![0], increments: vec![3] });
        assert_eq!(w.weights[0], 5);
    }

    #[test]
    fn losange_first_step_scenarios() {
        let g = losange();
        let allowed = [vec![0, 1], vec![3, 4], vec![0, 2, 4], vec![1, 2, 3]];
        for seed in 0..200 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut p = Process::new(&g, ReinforcementRule::linear(Variant::UniformGeodesic));
            p.step(&mut rng).unwrap();
            assert!(allowed.contains(&p.path().sorted_edges()));
        }
    }

    #[test]
    fn bookkeeping_and_losange_sums() {
        let g = losange();
        for variant in [Variant::LoopErased, Variant::UniformGeodesic] {
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            let mut reinforced = 0u64;
            let mut check = |s: &StepRecord<'_>| {
                reinforced += s.path.total_increment();
                let w = &s.state.weights;
                assert_eq!(w[0] + w[3], s.state.n + 2);
                assert_eq!(w[1] + w[4], s.state.n + 2);
            };
            let state = run_process(&g, ReinforcementRule::linear(variant), 2000, &mut rng, &mut check).unwrap();
            assert_eq!(state.total() - 5, reinforced);
        }
    }

    #[test]
    fn runs_are_deterministic() {
        let g = parse_sp("P(S(e,e),S(e,S(e,e)))").unwrap().to_graph();
        for variant in Variant::ALL {
            let exponent = if variant.yields_path() { 1.5 } else { 1.0 };
            let rule = ReinforcementRule::new(variant, exponent).unwrap();
            let run = |seed| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                run_process(&g, rule, 300, &mut rng, &mut |_: &StepRecord<'_>| {}).unwrap()
            };
            assert_eq!(run(8), run(8));
        }
    }
}
