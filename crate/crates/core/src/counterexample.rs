//! Two parallel paths of length `L` from the nest to a hub, plus a single
//! hub-food edge, under the uniform-geodesic rule.
//!
//! The left edges always share one weight and so do the right edges, so the
//! process reduces to the pair `(left, right)` with `left + right = n + 2`.
//! A walker only matters through the order in which it covers the two sides,
//! and along a side all weights are equal, so every excursion into a side is
//! a simple symmetric walk on a segment: started one step in, it reaches
//! depth `k` before coming back with probability `1 / k`.

use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CounterexampleError {
    #[error("side length must be at least 1")]
    ZeroLength,
    #[error("left fraction {0} is outside [0, 1]")]
    BadFraction(f64),
    #[error("exponent {0} must be finite and positive")]
    BadExponent(f64),
    #[error("weights ({left}, {right}, {food}) must be non-negative with a positive food edge and a positive side")]
    BadWeights { left: f64, right: f64, food: f64 },
}

/// Hub-level weights: one side, the other side, the food edge. Already raised
/// to the walk exponent.
#[derive(Debug, Clone, Copy)]
struct HubWeights {
    left: f64,
    right: f64,
    food: f64,
}

impl HubWeights {
    fn new(left: f64, right: f64, food: f64) -> Result<Self, CounterexampleError> {
        let ok = [left, right, food].iter().all(|w| w.is_finite() && *w >= 0.0)
            && food > 0.0
            && left + right > 0.0;
        if ok {
            Ok(HubWeights { left, right, food })
        } else {
            Err(CounterexampleError::BadWeights { left, right, food })
        }
    }

    fn from_fraction(x: f64, exponent: f64) -> Result<Self, CounterexampleError> {
        if !(0.0..=1.0).contains(&x) {
            return Err(CounterexampleError::BadFraction(x));
        }
        check_exponent(exponent)?;
        Self::new(x.powf(exponent), (1.0 - x).powf(exponent), 1.0)
    }
}

fn check_exponent(exponent: f64) -> Result<(), CounterexampleError> {
    if exponent.is_finite() && exponent > 0.0 {
        Ok(())
    } else {
        Err(CounterexampleError::BadExponent(exponent))
    }
}

/// Probability that a walker reinforces the left side when the left edges
/// carry weight `x`, the right edges `1 - x` and the food edge `1`, each
/// raised to `exponent`.
pub fn left_probability(length: usize, x: f64, exponent: f64) -> Result<f64, CounterexampleError> {
    if length == 0 {
        return Err(CounterexampleError::ZeroLength);
    }
    Ok(exact_left(length, HubWeights::from_fraction(x, exponent)?))
}

/// `left_probability(x) - x`.
pub fn drift(length: usize, x: f64, exponent: f64) -> Result<f64, CounterexampleError> {
    Ok(left_probability(length, x, exponent)? - x)
}

/// `left_probability` for raw (unnormalized, unpowered) side weights.
pub fn left_probability_for_weights(
    length: usize,
    left: f64,
    right: f64,
    food: f64,
    exponent: f64,
) -> Result<f64, CounterexampleError> {
    if length == 0 {
        return Err(CounterexampleError::ZeroLength);
    }
    check_exponent(exponent)?;
    let w = HubWeights::new(left.powf(exponent), right.powf(exponent), food.powf(exponent))?;
    Ok(exact_left(length, w))
}

fn exact_left(length: usize, w: HubWeights) -> f64 {
    let l = length as f64;
    let share = w.left / (w.left + w.right);
    // Joint law of (side first reaching the hub, depth explored on the other
    // side): P(exit via `own`, depth < k) = own k / (own k + other L).
    let exit_below = |own: f64, other: f64, k: usize| {
        let k = k as f64;
        if own == 0.0 || k == 0.0 {
            0.0
        } else {
            own * k / (own * k + other * l)
        }
    };
    let cover_right = completion_from_hub(length, w.left, w.right, w.food);
    let cover_left = completion_from_hub(length, w.right, w.left, w.food);
    let mut p = 0.0;
    for a in 0..length {
        let left_exit = exit_below(share, 1.0 - share, a + 1) - exit_below(share, 1.0 - share, a);
        let right_exit = exit_below(1.0 - share, share, a + 1) - exit_below(1.0 - share, share, a);
        p += left_exit * (1.0 - cover_right[a] / 2.0) + right_exit * cover_left[a] / 2.0;
    }
    p
}

/// Walker at the hub, the `full` side completely covered, the `open` side
/// covered to depth `a` from the nest and nothing from the hub. Returns, for
/// each `a`, the probability that the open side gets fully covered before the
/// walker steps onto the food edge.
fn completion_from_hub(length: usize, full: f64, open: f64, food: f64) -> Vec<f64> {
    let l = length as f64;
    // Probability that an excursion stops exactly at depth k (1 <= k < L).
    let stop_at = |k: usize| 1.0 / k as f64 - 1.0 / (k + 1) as f64;
    let cross = full / l;
    // Values at the hub (`at_hub[a][b]`) and at the nest, where `a` is the
    // nest-side depth and `b` the hub-side depth, `a + b < L`.
    let mut at_hub = vec![vec![0.0; length]; length];
    let mut at_nest = vec![vec![0.0; length]; length];
    // Running sums over larger nest-side depths for each hub-side depth.
    let mut nest_tail = vec![0.0; length];
    for a in (0..length).rev() {
        let mut hub_tail = 0.0;
        for b in (0..length - a).rev() {
            let hub_rhs = open * (1.0 / (length - a) as f64 + hub_tail);
            let nest_rhs = open * (1.0 / (length - b) as f64 + nest_tail[b]);
            let h11 = food + cross + open / (b + 1) as f64;
            let n22 = cross + open / (a + 1) as f64;
            let det = h11 * n22 - cross * cross;
            let h = (hub_rhs * n22 + cross * nest_rhs) / det;
            let n = (h11 * nest_rhs + cross * hub_rhs) / det;
            at_hub[a][b] = h;
            at_nest[a][b] = n;
            if b > 0 {
                hub_tail += stop_at(b) * h;
            }
        }
        if a > 0 {
            for b in 0..length - a {
                nest_tail[b] += stop_at(a) * at_nest[a][b];
            }
        }
    }
    (0..length).map(|a| at_hub[a][0]).collect()
}

/// Depth reached by an excursion into a side of length `length`; `length`
/// means the walker crossed to the far end.
fn excursion_depth<R: Rng + ?Sized>(length: usize, rng: &mut R) -> usize {
    let u: f64 = rng.random();
    if u * length as f64 <= 1.0 {
        length
    } else {
        (1.0 / u) as usize
    }
}

/// Samples single walkers on the counterexample graph at the hub level.
#[derive(Debug, Clone, Copy)]
pub struct HubSampler {
    length: usize,
    exponent: f64,
}

impl HubSampler {
    pub fn new(length: usize, exponent: f64) -> Result<Self, CounterexampleError> {
        if length == 0 {
            return Err(CounterexampleError::ZeroLength);
        }
        check_exponent(exponent)?;
        Ok(HubSampler { length, exponent })
    }

    pub fn length(&self) -> usize {
        self.length
    }

    /// Whether the walker reinforces the left side, given the current
    /// (unpowered) side and food weights.
    pub fn sample_left<R: Rng + ?Sized>(
        &self,
        left: f64,
        right: f64,
        food: f64,
        rng: &mut R,
    ) -> Result<bool, CounterexampleError> {
        let a = self.exponent;
        let w = HubWeights::new(left.powf(a), right.powf(a), food.powf(a))?;
        Ok(self.sample(w, rng))
    }

    fn sample<R: Rng + ?Sized>(&self, w: HubWeights, rng: &mut R) -> bool {
        let len = self.length;
        let share = w.left / (w.left + w.right);
        let exit_left = rng.random::<f64>() < share;
        let own = if exit_left { share } else { 1.0 - share };
        // Inverse CDF of the other side's depth given the exit side.
        let u: f64 = rng.random();
        let depth = (u * (1.0 - own) * len as f64 / (1.0 - own * u)).floor();
        let nest_depth = if depth.is_finite() { (depth as usize).min(len - 1) } else { len - 1 };
        let (full, open) = if exit_left { (w.left, w.right) } else { (w.right, w.left) };
        let covered = self.finish(full, open, w.food, nest_depth, rng);
        match (exit_left, covered) {
            (_, true) => rng.random::<bool>(),
            (left, false) => left,
        }
    }

    /// Runs the walker from the hub to the food. Returns whether the open
    /// side became fully covered.
    fn finish<R: Rng + ?Sized>(&self, full: f64, open: f64, food: f64, nest_depth: usize, rng: &mut R) -> bool {
        let len = self.length;
        let (mut from_nest, mut from_hub) = (nest_depth, 0usize);
        let mut at_hub = true;
        loop {
            if at_hub {
                let r = rng.random::<f64>() * (food + full + open);
                if r < food {
                    return false;
                } else if r < food + full {
                    at_hub = excursion_depth(len, rng) < len;
                } else {
                    from_hub = from_hub.max(excursion_depth(len, rng));
                }
            } else {
                let r = rng.random::<f64>() * (full + open);
                if r < full {
                    at_hub = excursion_depth(len, rng) == len;
                } else {
                    from_nest = from_nest.max(excursion_depth(len, rng));
                }
            }
            if from_nest + from_hub >= len {
                return true;
            }
        }
    }
}

/// Side weights of the reduced process.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SideWeights {
    pub left: u64,
    pub right: u64,
}

impl SideWeights {
    pub fn steps(&self) -> u64 {
        self.left + self.right - 2
    }
}

impl Default for SideWeights {
    fn default() -> Self {
        SideWeights { left: 1, right: 1 }
    }
}

/// Runs `steps` walkers from unit weights, calling `observe` after each.
pub fn run_reduced<R: Rng + ?Sized>(
    sampler: &HubSampler,
    steps: u64,
    rng: &mut R,
    mut observe: impl FnMut(SideWeights),
) -> SideWeights {
    let mut state = SideWeights::default();
    for _ in 0..steps {
        let food = (state.left + state.right) as f64;
        let left = sampler
            .sample_left(state.left as f64, state.right as f64, food, rng)
            .expect("positive weights");
        if left {
            state.left += 1;
        } else {
            state.right += 1;
        }
        observe(state);
    }
    state
}
