//! Two-colour urns with state-dependent drawing probabilities.
//!
//! Every urn here adds at most one ball per step. The state `r` counts the
//! balls of the tracked colour; at step `n` (starting from 0) it increases by
//! one with a probability depending on `(r, n)`.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

/// Largest horizon accepted by [`exact_distribution`].
pub const MAX_EXACT_STEPS: u64 = 40;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum UrnError {
    #[error("step probability {p} at state {state}, step {n} is outside [0, 1]")]
    BadProbability { p: f64, state: u64, n: u64 },
    #[error("exact law is limited to {MAX_EXACT_STEPS} steps, asked for {0}")]
    HorizonTooLong(u64),
    #[error("invalid urn parameter: {0}")]
    BadParameter(String),
}

/// Parameters of the generalised urn with a lower-bounded favourable rate.
///
/// Favourable rate `max(floor, (i - slack * i^exponent) / length)` after `i`
/// favourable draws; unfavourable rate `exponent * (j + offset) / length`
/// after `j` unfavourable ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneralizedParams {
    pub slack: f64,
    pub floor: f64,
    pub length: f64,
    pub exponent: f64,
    pub offset: f64,
}

impl GeneralizedParams {
    /// Defaults for a favourable branch of shortest length `length`: exponent
    /// `length / (length + 1)`, unit floor and offset.
    pub fn for_length(length: f64, slack: f64) -> Self {
        GeneralizedParams { slack, floor: 1.0, length, exponent: length / (length + 1.0), offset: 1.0 }
    }

    pub fn favourable_rate(&self, i: u64) -> f64 {
        let i = i as f64;
        self.floor.max((i - self.slack * i.powf(self.exponent)) / self.length)
    }

    pub fn unfavourable_rate(&self, j: u64) -> f64 {
        self.exponent * (j as f64 + self.offset) / self.length
    }

    fn validate(&self) -> Result<(), UrnError> {
        let ok = self.slack >= 0.0
            && self.floor > 0.0
            && self.length > 0.0
            && self.exponent > 0.0
            && self.offset > 0.0
            && [self.slack, self.floor, self.length, self.exponent, self.offset].iter().all(|x| x.is_finite());
        if ok {
            Ok(())
        } else {
            Err(UrnError::BadParameter(format!("{self:?}")))
        }
    }
}

pub type Rate = Arc<dyn Fn(u64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum UrnKind {
    /// Classical urn from one ball of each colour: `p = r / (n + 2)`.
    Polya,
    /// `z = r / (n + 2)`, `p = z (z^2 + 1/2) / (z + 1/2)`, from `r = 1`.
    FriedmanLike,
    /// Two competing rates, see [`GeneralizedParams`]; starts at `r = 0`.
    Generalized(GeneralizedParams),
    /// Slow-growth urn started after `delay` steps of a host process:
    /// `p = (u/5) / (k + delay + 2 - u + u/5)` at own step `k`, from `u = 1`.
    JansonFifth { delay: u64 },
    /// Generic two-rate urn from `r = 0`:
    /// `p = a(r) / (a(r) + b(n - r))`.
    Rates { favourable: Rate, unfavourable: Rate },
}

impl fmt::Debug for UrnKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UrnKind::Polya => write!(f, "Polya"),
            UrnKind::FriedmanLike => write!(f, "FriedmanLike"),
            UrnKind::Generalized(p) => write!(f, "Generalized({p:?})"),
            UrnKind::JansonFifth { delay } => write!(f, "JansonFifth {{ delay: {delay} }}"),
            UrnKind::Rates { .. } => write!(f, "Rates"),
        }
    }
}

impl UrnKind {
    pub fn rates(favourable: impl Fn(u64) -> f64 + Send + Sync + 'static, unfavourable: impl Fn(u64) -> f64 + Send + Sync + 'static) -> Self {
        UrnKind::Rates { favourable: Arc::new(favourable), unfavourable: Arc::new(unfavourable) }
    }

    pub fn validate(&self) -> Result<(), UrnError> {
        match self {
            UrnKind::Generalized(p) => p.validate(),
            _ => Ok(()),
        }
    }

    pub fn initial(&self) -> u64 {
        match self {
            UrnKind::Polya | UrnKind::FriedmanLike | UrnKind::JansonFifth { .. } => 1,
            UrnKind::Generalized(_) | UrnKind::Rates { .. } => 0,
        }
    }

    /// Probability of adding a tracked ball at step `n` in state `r`.
    pub fn probability(&self, r: u64, n: u64) -> Result<f64, UrnError> {
        let p = match self {
            UrnKind::Polya => r as f64 / (n + 2) as f64,
            UrnKind::FriedmanLike => {
                let z = r as f64 / (n + 2) as f64;
                z * (z * z + 0.5) / (z + 0.5)
            }
            UrnKind::Generalized(params) => {
                let a = params.favourable_rate(r);
                a / (a + params.unfavourable_rate(n - r))
            }
            UrnKind::JansonFifth { delay } => {
                let u = r as f64;
                (u / 5.0) / ((n + delay + 2) as f64 - u + u / 5.0)
            }
            UrnKind::Rates { favourable, unfavourable } => {
                let a = favourable(r);
                a / (a + unfavourable(n - r))
            }
        };
        if (0.0..=1.0).contains(&p) {
            Ok(p)
        } else {
            Err(UrnError::BadProbability { p, state: r, n })
        }
    }

    /// One step driven by the uniform variate `u`: increment iff `u < p`.
    pub fn step_with(&self, r: u64, n: u64, u: f64) -> Result<u64, UrnError> {
        Ok(r + u64::from(u < self.probability(r, n)?))
    }

    pub fn step<R: Rng + ?Sized>(&self, r: u64, n: u64, rng: &mut R) -> Result<u64, UrnError> {
        self.step_with(r, n, rng.random())
    }

    /// Runs `steps` steps and returns the final state; `observe(n, r)` sees
    /// the state after every step.
    pub fn run<R: Rng + ?Sized>(
        &self,
        steps: u64,
        rng: &mut R,
        mut observe: impl FnMut(u64, u64),
    ) -> Result<u64, UrnError> {
        let mut r = self.initial();
        for n in 0..steps {
            r = self.step(r, n, rng)?;
            observe(n + 1, r);
        }
        Ok(r)
    }

    /// States `r_0, ..., r_steps`.
    pub fn trajectory<R: Rng + ?Sized>(&self, steps: u64, rng: &mut R) -> Result<Vec<u64>, UrnError> {
        let mut states = vec![self.initial()];
        self.run(steps, rng, |_, r| states.push(r))?;
        Ok(states)
    }
}

/// Runs several urns off one stream of uniforms, so that all of them see the
/// same variate at each step. Returns one trajectory per urn.
pub fn run_coupled<R: Rng + ?Sized>(kinds: &[UrnKind], steps: u64, rng: &mut R) -> Result<Vec<Vec<u64>>, UrnError> {
    let mut paths: Vec<Vec<u64>> = kinds.iter().map(|k| vec![k.initial()]).collect();
    for n in 0..steps {
        let u: f64 = rng.random();
        for (kind, path) in kinds.iter().zip(&mut paths) {
            let r = *path.last().expect("nonempty");
            path.push(kind.step_with(r, n, u)?);
        }
    }
    Ok(paths)
}

/// Exact law of the state after `steps` steps, as masses indexed by state.
pub fn exact_distribution(kind: &UrnKind, steps: u64) -> Result<Vec<f64>, UrnError> {
    if steps > MAX_EXACT_STEPS {
        return Err(UrnError::HorizonTooLong(steps));
    }
    let start = kind.initial() as usize;
    let mut mass = vec![0.0; start + steps as usize + 1];
    mass[start] = 1.0;
    for n in 0..steps {
        let mut next = vec![0.0; mass.len()];
        for r in start..=start + n as usize {
            if mass[r] == 0.0 {
                continue;
            }
            let p = kind.probability(r as u64, n)?;
            next[r] += mass[r] * (1.0 - p);
            next[r + 1] += mass[r] * p;
        }
        mass = next;
    }
    Ok(mass)
}

/// Continuous-time embedding of a two-rate urn: two independent clocks tick
/// at rates `favourable(i)` and `unfavourable(j)` after their `i`-th and
/// `j`-th ticks; the urn state after `n` events is the number of favourable
/// ticks among the first `n`. Returns `r_0 = 0, ..., r_steps`.
///
/// Exponential waiting times come from inverse-CDF transforms of the
/// generator's uniforms.
pub fn rubin_trajectory<R: Rng + ?Sized>(
    favourable: impl Fn(u64) -> f64,
    unfavourable: impl Fn(u64) -> f64,
    steps: u64,
    rng: &mut R,
) -> Vec<u64> {
    let exp = |rate: f64, rng: &mut R| -> f64 {
        let u: f64 = rng.random();
        -(1.0 - u).ln() / rate
    };
    let (mut i, mut j) = (0u64, 0u64);
    let mut next_a = exp(favourable(0), rng);
    let mut next_b = exp(unfavourable(0), rng);
    let mut states = Vec::with_capacity(steps as usize + 1);
    states.push(0);
    for _ in 0..steps {
        if next_a < next_b {
            i += 1;
            next_a += exp(favourable(i), rng);
        } else {
            j += 1;
            next_b += exp(unfavourable(j), rng);
        }
        states.push(i);
    }
    states
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-14
    }

    #[test]
    fn step_probabilities() {
        assert!(close(UrnKind::FriedmanLike.probability(1, 0).unwrap(), 3.0 / 8.0));
        assert!(close(UrnKind::Polya.probability(3, 2).unwrap(), 0.75));
        let janson = UrnKind::JansonFifth { delay: 3 };
        assert!(close(janson.probability(1, 0).unwrap(), 0.2 / (5.0 - 1.0 + 0.2)));
        let p = GeneralizedParams::for_length(2.0, 1.0);
        assert!(close(p.exponent, 2.0 / 3.0));
        let cmp = UrnKind::Generalized(p);
        assert!(close(cmp.probability(0, 0).unwrap(), 1.0 / (1.0 + 1.0 / 3.0)));
        assert!(UrnKind::Generalized(GeneralizedParams { floor: 0.0, ..p }).validate().is_err());
        let bad = UrnKind::rates(|_| -1.0, |_| 3.0);
        assert!(matches!(bad.probability(0, 0), Err(UrnError::BadProbability { .. })));
    }

    #[test]
    fn exact_laws() {
        let d = exact_distribution(&UrnKind::Polya, 1).unwrap();
        assert_eq!(d, vec![0.0, 0.5, 0.5]);
        let d = exact_distribution(&UrnKind::Polya, 2).unwrap();
        for r in 1..=3 {
            assert!(close(d[r], 1.0 / 3.0));
        }
        let d = exact_distribution(&UrnKind::FriedmanLike, 1).unwrap();
        assert!(close(d[1], 5.0 / 8.0) && close(d[2], 3.0 / 8.0));
        assert_eq!(exact_distribution(&UrnKind::Polya, 41), Err(UrnError::HorizonTooLong(41)));
        // The classical urn is uniform on 1..=n+1 at every horizon.
        let d = exact_distribution(&UrnKind::Polya, 40).unwrap();
        for r in 1..=41 {
            assert!((d[r] - 1.0 / 41.0).abs() < 1e-13);
        }
    }

    #[test]
    fn coupling_keeps_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..50 {
            let paths = run_coupled(&[UrnKind::FriedmanLike, UrnKind::Polya], 2000, &mut rng).unwrap();
            assert!(paths[0].iter().zip(&paths[1]).all(|(f, p)| f <= p));
        }
    }

    #[test]
    fn trajectories_are_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let kind = UrnKind::Generalized(GeneralizedParams::for_length(2.0, 0.5));
        let t = kind.trajectory(500, &mut rng).unwrap();
        assert!(t.windows(2).all(|w| w[1] == w[0] || w[1] == w[0] + 1));
        let t = rubin_trajectory(|_| 1.0, |_| 1.0, 500, &mut rng);
        assert!(t.windows(2).all(|w| w[1] == w[0] || w[1] == w[0] + 1));
        assert_eq!(t.len(), 501);
    }
}
