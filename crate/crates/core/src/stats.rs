//! Monte Carlo aggregates with partition-independent summation.

use crate::real::Real;

/// Neumaier-compensated sum; deterministic for a fixed element order and
/// accurate to a few ulps regardless of cancellation.
pub fn compensated_sum<T: Real>(values: &[T]) -> T {
    let mut sum = T::zero();
    let mut comp = T::zero();
    for &v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp = comp + ((sum - t) + v);
        } else {
            comp = comp + ((v - t) + sum);
        }
        sum = t;
    }
    sum + comp
}

/// Sample mean with standard error of the mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate<T: Real> {
    pub mean: T,
    pub std_error: T,
    pub n_paths: usize,
}

impl<T: Real> McEstimate<T> {
    /// Two-pass mean / standard error over per-path samples. The reduction
    /// order is fixed by the sample order, so aggregates do not depend on how
    /// paths were scheduled across workers.
    pub fn from_samples(samples: &[T]) -> Self {
        let n = samples.len();
        if n == 0 {
            return McEstimate {
                mean: T::zero(),
                std_error: T::zero(),
                n_paths: 0,
            };
        }
        let nf = T::of(n as f64);
        let mean = compensated_sum(samples) / nf;
        if n == 1 {
            return McEstimate {
                mean,
                std_error: T::zero(),
                n_paths: 1,
            };
        }
        let sq: Vec<T> = samples.iter().map(|&x| (x - mean) * (x - mean)).collect();
        let var = compensated_sum(&sq) / T::of((n - 1) as f64);
        McEstimate {
            mean,
            std_error: (var / nf).sqrt(),
            n_paths: n,
        }
    }

    /// Standard error of the difference of two independent estimates.
    pub fn combined_std_error(&self, other: &McEstimate<T>) -> T {
        (self.std_error * self.std_error + other.std_error * other.std_error).sqrt()
    }

    /// Discrepancy from `target` in units of the standard error.
    pub fn z_score(&self, target: T) -> T {
        if self.std_error == T::zero() {
            if self.mean == target {
                T::zero()
            } else {
                T::infinity()
            }
        } else {
            (self.mean - target) / self.std_error
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_cancellation() {
        // 1 + 1e16 - 1e16 left to right loses the 1 in naive f64 summation
        let xs = [1.0f64, 1e16, -1e16];
        assert_eq!(compensated_sum(&xs), 1.0);
    }

    #[test]
    fn estimate_matches_hand_computation() {
        let e = McEstimate::from_samples(&[1.0f64, 2.0, 3.0, 4.0]);
        assert_eq!(e.mean, 2.5);
        assert_eq!(e.n_paths, 4);
        // sample variance 5/3, se = sqrt(5/12)
        assert!((e.std_error - (5.0f64 / 12.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn degenerate_sizes() {
        let e = McEstimate::from_samples(&[7.0f64]);
        assert_eq!((e.mean, e.std_error, e.n_paths), (7.0, 0.0, 1));
        let e = McEstimate::<f64>::from_samples(&[]);
        assert_eq!(e.n_paths, 0);
    }

    #[test]
    fn z_score_and_combination() {
        let a = McEstimate {
            mean: 1.0f64,
            std_error: 0.3,
            n_paths: 10,
        };
        let b = McEstimate {
            mean: 0.0f64,
            std_error: 0.4,
            n_paths: 10,
        };
        assert!((a.combined_std_error(&b) - 0.5).abs() < 1e-15);
        assert!((a.z_score(0.4) - 2.0).abs() < 1e-12);
    }
}
