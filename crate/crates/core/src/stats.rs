//! Small descriptive statistics and fits used by the experiment checks.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("need at least {need} points, got {got}")]
    TooFewPoints { need: usize, got: usize },
    #[error("value {value} at n = {n} is not positive")]
    NonPositive { n: f64, value: f64 },
    #[error("empty sample")]
    Empty,
}

/// Least-squares slope of `ln value` against `ln n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope.
    pub std_error: f64,
    pub points: usize,
}

/// Fits `value ~ C n^slope` on the points with `n` in `[lo, hi]`.
pub fn decay_exponent_fit(points: &[(f64, f64)], lo: f64, hi: f64) -> Result<PowerFit, StatsError> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &(n, value) in points.iter().filter(|(n, _)| (lo..=hi).contains(n)) {
        if !(value > 0.0 && n > 0.0) {
            return Err(StatsError::NonPositive { n, value });
        }
        xs.push(n.ln());
        ys.push(value.ln());
    }
    let k = xs.len();
    if k < 10 {
        return Err(StatsError::TooFewPoints { need: 10, got: k });
    }
    let mx = mean(&xs);
    let my = mean(&ys);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let std_error = (sse / (k as f64 - 2.0) / sxx).sqrt();
    Ok(PowerFit { slope, intercept, std_error, points: k })
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (denominator `len - 1`).
pub fn std_dev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

/// Linear-interpolation quantile of an unsorted sample, `q` in `[0, 1]`.
pub fn quantile(xs: &[f64], q: f64) -> Result<f64, StatsError> {
    if xs.is_empty() {
        return Err(StatsError::Empty);
    }
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    Ok(sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo]))
}

/// Kolmogorov-Smirnov distance between a sample and the uniform law on
/// `[0, 1]`.
pub fn ks_uniform_statistic(xs: &[f64]) -> Result<f64, StatsError> {
    if xs.is_empty() {
        return Err(StatsError::Empty);
    }
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    Ok(sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let x = x.clamp(0.0, 1.0);
            (x - i as f64 / n).max((i + 1) as f64 / n - x)
        })
        .fold(0.0, f64::max))
}

/// Asymptotic critical value of the one-sample KS statistic at level 0.01.
pub fn ks_critical_001(sample_size: usize) -> f64 {
    1.627_6 / (sample_size as f64).sqrt()
}

/// Total variation distance between two mass vectors (missing entries are
/// zero).
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    let len = p.len().max(q.len());
    let at = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
    0.5 * (0..len).map(|i| (at(p, i) - at(q, i)).abs()).sum::<f64>()
}
