//! Exact analysis of the uniform-geodesic process on the losange.
//!
//! Index `k` of every five-vector below refers to losange edge id `k`:
//! 0 = N-left, 1 = left-F, 2 = the middle edge, 3 = N-right, 4 = right-F.
//! Normalised weights `w = W / (n + 2)` of the process always lie in the
//! polytope checked by [`LosangeWeights::in_polytope`].

use rand::Rng;
use thiserror::Error;

use crate::conductance::{crossing_probability, ConductanceError};
use crate::graph::{losange, losange_vertex, EdgeId};

pub const NEST_LEFT: EdgeId = 0;
pub const LEFT_FOOD: EdgeId = 1;
pub const MIDDLE: EdgeId = 2;
pub const NEST_RIGHT: EdgeId = 3;
pub const RIGHT_FOOD: EdgeId = 4;

/// Absolute slack granted to floating-point comparisons against exact bounds.
pub const NUMERIC_SLACK: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LosangeError {
    #[error("denominator vanishes at {0:?}")]
    Degenerate([f64; 5]),
    #[error("nest and food are disconnected by zero weights at {0:?}")]
    Disconnected([f64; 5]),
    #[error(transparent)]
    Solve(#[from] ConductanceError),
}

/// Five nonnegative edge weights of the losange.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LosangeWeights(pub [f64; 5]);

impl LosangeWeights {
    /// Normalised weights of an integer state after `n` steps.
    pub fn from_counts(weights: &[u64], n: u64) -> Self {
        let scale = (n + 2) as f64;
        LosangeWeights(std::array::from_fn(|k| weights[k] as f64 / scale))
    }

    /// The image under the left-right mirror, which exchanges edges 0 and 3
    /// and edges 1 and 4.
    pub fn mirrored(&self) -> Self {
        let [a, b, c, d, e] = self.0;
        LosangeWeights([d, e, c, a, b])
    }

    /// Membership in the invariant polytope, up to `tol` on each constraint.
    pub fn in_polytope(&self, tol: f64) -> bool {
        let [w1, w2, w3, w4, w5] = self.0;
        self.0.iter().all(|&x| (-tol..=1.0 + tol).contains(&x))
            && (w1 + w4 - 1.0).abs() <= tol
            && (w2 + w5 - 1.0).abs() <= tol
            && (w1 - w2).abs() <= w3 + tol
            && (w5 - w4).abs() <= w3 + tol
            && w1 + w2 + tol >= w3
            && w4 + w5 + tol >= w3
    }
}

/// Exact membership test for the integer weights of the process after `n`
/// steps (the polytope scaled by `n + 2`).
pub fn counts_in_polytope(weights: &[u64], n: u64) -> bool {
    let [w1, w2, w3, w4, w5] = [0, 1, 2, 3, 4].map(|k| weights[k] as i128);
    let total = n as i128 + 2;
    w1 + w4 == total
        && w2 + w5 == total
        && (w1 - w2).abs() <= w3
        && (w5 - w4).abs() <= w3
        && w1 + w2 >= w3
        && w4 + w5 >= w3
        && [w1, w2, w3, w4, w5].iter().all(|&x| (0..=total).contains(&x))
}

/// Probabilities of the four possible reinforced sets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioProbabilities {
    /// Edges {0, 1}: straight down the left side.
    pub left: f64,
    /// Edges {3, 4}: straight down the right side.
    pub right: f64,
    /// Edges {0, 2, 4}: left, across, down the right.
    pub left_across: f64,
    /// Edges {3, 2, 1}: right, across, down the left.
    pub right_across: f64,
}

impl ScenarioProbabilities {
    pub fn sum(&self) -> f64 {
        self.left + self.right + self.left_across + self.right_across
    }

    pub fn mirrored(&self) -> Self {
        ScenarioProbabilities {
            left: self.right,
            right: self.left,
            left_across: self.right_across,
            right_across: self.left_across,
        }
    }

    /// The expected reinforcement vector.
    pub fn expected_increment(&self) -> [f64; 5] {
        let ScenarioProbabilities { left, right, left_across, right_across } = *self;
        [
            left + left_across,
            left + right_across,
            left_across + right_across,
            right + right_across,
            right + left_across,
        ]
    }
}

/// The reinforced set, classified, from sorted edge ids.
pub fn classify(sorted_edges: &[EdgeId]) -> Option<Scenario> {
    match sorted_edges {
        [0, 1] => Some(Scenario::Left),
        [3, 4] => Some(Scenario::Right),
        [0, 2, 4] => Some(Scenario::LeftAcross),
        [1, 2, 3] => Some(Scenario::RightAcross),
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    Left,
    Right,
    LeftAcross,
    RightAcross,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [Scenario::Left, Scenario::Right, Scenario::LeftAcross, Scenario::RightAcross];

    pub fn probability(self, p: &ScenarioProbabilities) -> f64 {
        match self {
            Scenario::Left => p.left,
            Scenario::Right => p.right,
            Scenario::LeftAcross => p.left_across,
            Scenario::RightAcross => p.right_across,
        }
    }
}

/// Closed form for the probability of reinforcing {0, 2, 4}, valid on the
/// polytope.
///
/// Where the denominator vanishes but the food is still reachable (corners
/// of the polytope), the value of the exact chain is returned instead.
pub fn left_across_closed_form(w: &LosangeWeights) -> Result<f64, LosangeError> {
    let [w1, w2, w3, w4, w5] = w.0;
    let den = (w2 + w3 + w1 * w4) * (w4 + w5) + w2 * w3 + w1 * w3 * w4;
    if den <= 0.0 {
        return degenerate(w).map(|p| p.left_across);
    }
    Ok(w1 * w3 * w5 / den)
}

/// Closed form for the probability that the walker enters the food through
/// edge 1, valid on the polytope. Degenerate points are handled as in
/// [`left_across_closed_form`].
pub fn last_step_left_closed_form(w: &LosangeWeights) -> Result<f64, LosangeError> {
    let [w1, w2, w3, w4, w5] = w.0;
    let den = w3 + w2 * w5 + w1 * w4;
    if den <= 0.0 {
        return degenerate(w).map(|p| p.left + p.right_across);
    }
    Ok((w2 * w3 + w1 * w2 * w5 + w1 * w2 * w4) / den)
}

fn degenerate(w: &LosangeWeights) -> Result<ScenarioProbabilities, LosangeError> {
    scenario_probabilities(w).map_err(|_| LosangeError::Degenerate(w.0))
}

/// Closed form for the edge-1 component of the drift, valid on the polytope.
pub fn drift_left_food_closed_form(w: &LosangeWeights) -> Result<f64, LosangeError> {
    let [w1, w2, w3, w4, w5] = w.0;
    let den = w3 + w2 * w5 + w1 * w4;
    if den <= 0.0 {
        return degenerate(w).map(|p| p.left + p.right_across - w2);
    }
    Ok((w1 - w2) * w2 * w5 / den)
}

/// Scenario probabilities by exact absorbing-chain solves on the weighted
/// losange. Zero-weight edges are removed; the weights need not be
/// normalised.
pub fn scenario_probabilities(w: &LosangeWeights) -> Result<ScenarioProbabilities, LosangeError> {
    let g = losange();
    let weights = &w.0;
    let connected = g.reachable_from(g.nest(), |e| weights[e] > 0.0)[g.food()];
    if !connected {
        return Err(LosangeError::Disconnected(w.0));
    }
    let nest = losange_vertex::NEST;
    let cross = |target: &[EdgeId], avoid: &[EdgeId]| crossing_probability(&g, weights, nest, target, avoid, &[]);
    // Edge 1 and edge 4 are the only ways into the food, so "enter through
    // edge 1" is "cross edge 1 before edge 4".
    let last_left = cross(&[LEFT_FOOD], &[RIGHT_FOOD])?;
    let left_across = cross(&[RIGHT_FOOD], &[LEFT_FOOD, NEST_RIGHT])?;
    let right_across = cross(&[LEFT_FOOD], &[RIGHT_FOOD, NEST_LEFT])?;
    Ok(ScenarioProbabilities {
        left: last_left - right_across,
        right: 1.0 - last_left - left_across,
        left_across,
        right_across,
    })
}

/// Mean one-step change of the normalised weights, up to the `1/(n+3)`
/// factor: expected reinforcement minus current weights.
pub fn drift(w: &LosangeWeights) -> Result<[f64; 5], LosangeError> {
    let mean = scenario_probabilities(w)?.expected_increment();
    Ok(std::array::from_fn(|k| mean[k] - w.0[k]))
}

/// Centred noise of one step: observed increment minus its conditional mean.
pub fn noise_increment(w: &LosangeWeights, increment: &[u64; 5]) -> Result<[f64; 5], LosangeError> {
    let mean = scenario_probabilities(w)?.expected_increment();
    Ok(std::array::from_fn(|k| increment[k] as f64 - mean[k]))
}

/// Outcome of checking one inequality: `slack` is right side minus left
/// side, so it is nonnegative when the bound holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Check {
    Holds { slack: f64 },
    Violated { slack: f64 },
    Skipped,
}

impl Check {
    fn from_slack(slack: f64) -> Self {
        if slack >= -NUMERIC_SLACK {
            Check::Holds { slack }
        } else {
            Check::Violated { slack }
        }
    }

    pub fn is_violated(&self) -> bool {
        matches!(self, Check::Violated { .. })
    }

    pub fn slack(&self) -> Option<f64> {
        match *self {
            Check::Holds { slack } | Check::Violated { slack } => Some(slack),
            Check::Skipped => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InequalityReport {
    /// Middle-edge probability against `w3 (w3^2 + 1/2) / (w3 + 1/2)`.
    pub middle_edge: Check,
    /// `|drift_1| <= w3 / 2`.
    pub left_food_drift: Check,
    /// `drift_3 + drift_4 - drift_2 >= -8 (w3^2 + w5^2)` when `w5 <= 1/2`.
    pub right_side_drift: Check,
    /// Middle-edge probability against `(1 - rho) w3` when `w3 <= epsilon`.
    pub contraction: Check,
}

impl InequalityReport {
    pub const NAMES: [&'static str; 4] = ["middle_edge", "left_food_drift", "right_side_drift", "contraction"];

    pub fn checks(&self) -> [(&'static str, Check); 4] {
        let values = [self.middle_edge, self.left_food_drift, self.right_side_drift, self.contraction];
        std::array::from_fn(|k| (Self::NAMES[k], values[k]))
    }

    pub fn any_violated(&self) -> bool {
        self.checks().iter().any(|(_, c)| c.is_violated())
    }
}

/// Parameters of the contraction bound `p <= (1 - rho) w3` for `w3 <= epsilon`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contraction {
    pub rho: f64,
    pub epsilon: f64,
}

/// Evaluates all bounds at `w` using exact scenario probabilities.
pub fn inequality_suite(w: &LosangeWeights, contraction: Option<Contraction>) -> Result<InequalityReport, LosangeError> {
    let p = scenario_probabilities(w)?;
    let d = drift(w)?;
    let [_, _, w3, _, w5] = w.0;
    let middle = p.left_across + p.right_across;
    let middle_edge = Check::from_slack(w3 * (w3 * w3 + 0.5) / (w3 + 0.5) - middle);
    let left_food_drift = Check::from_slack(w3 / 2.0 - d[LEFT_FOOD].abs());
    let right_side_drift = if w5 <= 0.5 {
        Check::from_slack(d[NEST_RIGHT] + d[RIGHT_FOOD] - d[MIDDLE] + 8.0 * (w3 * w3 + w5 * w5))
    } else {
        Check::Skipped
    };
    let contraction = match contraction {
        Some(c) if w3 <= c.epsilon => Check::from_slack((1.0 - c.rho) * w3 - middle),
        _ => Check::Skipped,
    };
    Ok(InequalityReport { middle_edge, left_food_drift, right_side_drift, contraction })
}

/// Uniform sample from the polytope by rejection from the box of
/// `(w1, w2, w3)`. Coordinates are multiples of `2^-53`, so `w1 + w4` and
/// `w2 + w5` equal 1 exactly.
pub fn sample_polytope<R: Rng + ?Sized>(rng: &mut R) -> LosangeWeights {
    sample_polytope_where(rng, 1.0, 0.0)
}

/// Like [`sample_polytope`], conditioned on `w3 <= max_middle` and on every
/// coordinate being at least `floor`.
pub fn sample_polytope_where<R: Rng + ?Sized>(rng: &mut R, max_middle: f64, floor: f64) -> LosangeWeights {
    loop {
        let w1: f64 = rng.random();
        let w2: f64 = rng.random();
        let w3: f64 = rng.random::<f64>() * max_middle;
        let w = LosangeWeights([w1, w2, w3, 1.0 - w1, 1.0 - w2]);
        if w.in_polytope(0.0) && w.0.iter().all(|&x| x >= floor) {
            return w;
        }
    }
}

/// Largest `epsilon` (to within `tol`) for which the contraction bound holds
/// at every sampled point with `w3 <= epsilon`, found by bisection on
/// `[0, 1]`. Each probe draws `samples` points with `w3` uniform in
/// `[0, epsilon]`.
pub fn contraction_epsilon<R: Rng + ?Sized>(
    rho: f64,
    samples: usize,
    tol: f64,
    rng: &mut R,
) -> Result<f64, LosangeError> {
    let holds_up_to = |eps: f64, rng: &mut R| -> Result<bool, LosangeError> {
        for _ in 0..samples {
            let w = sample_polytope_where(rng, eps, 0.0);
            let p = scenario_probabilities(&w)?;
            if p.left_across + p.right_across > (1.0 - rho) * w.0[MIDDLE] + NUMERIC_SLACK {
                return Ok(false);
            }
        }
        Ok(true)
    };
    if holds_up_to(1.0, rng)? {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if holds_up_to(mid, rng)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const HALF: LosangeWeights = LosangeWeights([0.5; 5]);

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn symmetric_point() {
        let p = scenario_probabilities(&HALF).unwrap();
        assert!(close(p.left_across, 1.0 / 13.0, 1e-14));
        assert!(close(p.right_across, 1.0 / 13.0, 1e-14));
        assert!(close(p.left, 11.0 / 26.0, 1e-14));
        assert!(close(p.right, 11.0 / 26.0, 1e-14));
        assert!(close(left_across_closed_form(&HALF).unwrap(), 1.0 / 13.0, 1e-15));
        assert!(close(last_step_left_closed_form(&HALF).unwrap(), 0.5, 1e-15));
        let d = drift(&HALF).unwrap();
        assert!(close(d[0], d[1], 1e-14) && close(d[3], d[4], 1e-14));
    }

    #[test]
    fn closed_form_edge_cases() {
        let mut w = HALF;
        w.0[MIDDLE] = 0.0;
        assert_eq!(left_across_closed_form(&w).unwrap(), 0.0);
        let w = LosangeWeights([0.0, 0.5, 0.5, 1.0, 0.5]);
        assert_eq!(left_across_closed_form(&w).unwrap(), 0.0);
        let w = LosangeWeights([0.5, 0.0, 0.5, 0.5, 1.0]);
        assert_eq!(last_step_left_closed_form(&w).unwrap(), 0.0);
        let corner = LosangeWeights([1.0, 1.0, 0.0, 0.0, 0.0]);
        assert!(corner.in_polytope(0.0));
        assert_eq!(last_step_left_closed_form(&corner).unwrap(), 1.0);
        let p = scenario_probabilities(&corner).unwrap();
        assert_eq!((p.left, p.right, p.left_across, p.right_across), (1.0, 0.0, 0.0, 0.0));
        assert!(left_across_closed_form(&LosangeWeights([1.0, 0.0, 0.0, 0.0, 0.0])).is_err());
        assert!(scenario_probabilities(&LosangeWeights([1.0, 0.0, 0.0, 0.0, 0.0])).is_err());
    }

    #[test]
    fn integer_membership() {
        assert!(counts_in_polytope(&[1, 1, 1, 1, 1], 0));
        assert!(counts_in_polytope(&[2, 2, 1, 1, 1], 1));
        assert!(!counts_in_polytope(&[2, 1, 1, 1, 1], 1));
        assert!(!counts_in_polytope(&[3, 1, 1, 0, 2], 1));
    }

    #[test]
    fn suite_at_symmetric_point() {
        let report = inequality_suite(&HALF, Some(Contraction { rho: 0.125, epsilon: 0.01 })).unwrap();
        assert!(close(report.middle_edge.slack().unwrap(), 3.0 / 8.0 - 2.0 / 13.0, 1e-14));
        assert!(!report.any_violated());
        assert_eq!(report.contraction, Check::Skipped);
    }

    #[test]
    fn samples_are_members() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..2000 {
            let w = sample_polytope(&mut rng);
            assert!(w.in_polytope(0.0));
            assert_eq!(w.0[0] + w.0[3], 1.0);
            assert_eq!(w.0[1] + w.0[4], 1.0);
        }
        for _ in 0..200 {
            let w = sample_polytope_where(&mut rng, 0.1, 1e-6);
            assert!(w.0[MIDDLE] <= 0.1 && w.0.iter().all(|&x| x >= 1e-6));
        }
    }
}
