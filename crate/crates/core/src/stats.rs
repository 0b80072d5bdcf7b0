//! Small statistics helpers with a fixed accumulation order.

use alloc::vec::Vec;
#[allow(unused_imports)] // inherent f64 methods win when std is linked
use num_traits::Float;

/// Running mean and variance (Welford).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Population variance `⟨x²⟩ − ⟨x⟩²`.
    pub fn variance(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.m2 / self.n as f64
        }
    }

    /// Unbiased sample variance.
    pub fn sample_variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    /// Standard error of the mean; zero for fewer than two samples.
    pub fn stderr(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.sample_variance() / self.n as f64).sqrt()
        }
    }
}

impl FromIterator<f64> for Moments {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut m = Moments::new();
        iter.into_iter().for_each(|x| m.push(x));
        m
    }
}

/// Median of a slice (NaNs are not expected).
pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v: Vec<f64> = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Streaming `ln(mean(exp(x_i)))` that never overflows or underflows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogMeanExp {
    n: u64,
    max: f64,
    scaled_sum: f64,
}

impl Default for LogMeanExp {
    fn default() -> Self {
        Self {
            n: 0,
            max: f64::NEG_INFINITY,
            scaled_sum: 0.0,
        }
    }
}

impl LogMeanExp {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        if x > self.max {
            self.scaled_sum = self.scaled_sum * (self.max - x).exp() + 1.0;
            self.max = x;
        } else {
            self.scaled_sum += (x - self.max).exp();
        }
    }

    /// Folds another accumulator in; callers merge in a fixed order.
    pub fn merge(&mut self, other: &LogMeanExp) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        if other.max > self.max {
            self.scaled_sum = self.scaled_sum * (self.max - other.max).exp() + other.scaled_sum;
            self.max = other.max;
        } else {
            self.scaled_sum += other.scaled_sum * (other.max - self.max).exp();
        }
        self.n += other.n;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn value(&self) -> f64 {
        if self.n == 0 {
            f64::NAN
        } else {
            self.max + (self.scaled_sum / self.n as f64).ln()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_match_two_pass() {
        let xs = [1.0, 2.0, 4.0, 8.0, -3.0];
        let m: Moments = xs.iter().copied().collect();
        let mean = xs.iter().sum::<f64>() / 5.0;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 5.0;
        assert!((m.mean() - mean).abs() < 1e-14);
        assert!((m.variance() - var).abs() < 1e-12);
        assert!((m.stderr() - (var * 5.0 / 4.0 / 5.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn log_mean_exp_is_stable() {
        let mut acc = LogMeanExp::default();
        for x in [-1000.0, -1001.0, -999.0] {
            acc.push(x);
        }
        let direct = -1000.0 + ((1.0 + (-1.0f64).exp() + 1.0f64.exp()) / 3.0).ln();
        assert!((acc.value() - direct).abs() < 1e-12);

        let mut a = LogMeanExp::default();
        let mut b = LogMeanExp::default();
        a.push(-1000.0);
        b.push(-1001.0);
        b.push(-999.0);
        a.merge(&b);
        assert!((a.value() - direct).abs() < 1e-12);
    }

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
