use serde::Serialize;

/// Steps at which a run's state is written out.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum Schedule {
    /// `n = 0` and every distinct `ceil(ratio^k)`.
    Geometric { ratio: f64 },
    /// `n = 0` and every multiple of `every`.
    Linear { every: u64 },
}

impl Schedule {
    /// Sorted recording steps up to `steps`; the last step is always
    /// included.
    pub fn points(&self, steps: u64) -> Vec<u64> {
        let mut out = vec![0];
        match *self {
            Schedule::Geometric { ratio } => {
                let mut x = 1.0f64;
                while x.ceil() <= steps as f64 {
                    let n = x.ceil() as u64;
                    if n > *out.last().unwrap() {
                        out.push(n);
                    }
                    x *= ratio;
                }
            }
            Schedule::Linear { every } => {
                out.extend((1..=steps / every).map(|k| k * every));
            }
        }
        if *out.last().unwrap() != steps {
            out.push(steps);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_points() {
        let p = Schedule::Geometric { ratio: 2.0 }.points(10);
        assert_eq!(p, vec![0, 1, 2, 4, 8, 10]);
        let p = Schedule::Geometric { ratio: 1.1 }.points(1_000_000);
        assert!(p.windows(2).all(|w| w[0] < w[1]));
        assert!(p.len() < 200);
        assert_eq!(*p.last().unwrap(), 1_000_000);
    }

    #[test]
    fn linear_points() {
        assert_eq!(Schedule::Linear { every: 3 }.points(10), vec![0, 3, 6, 9, 10]);
        assert_eq!(Schedule::Linear { every: 5 }.points(10), vec![0, 5, 10]);
        assert_eq!(Schedule::Linear { every: 5 }.points(0), vec![0]);
    }
}
