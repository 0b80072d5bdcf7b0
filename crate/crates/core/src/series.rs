use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::invalid;
use crate::{Error, Result};

/// A time series of echo values `M(t)` with ensemble statistics.
///
/// Kicked-map series use integer kick counts as times; Ising series use a
/// uniform continuous grid. `metadata` carries the parameters that produced
/// the series and ends up in file headers.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EchoSeries {
    pub times: Vec<f64>,
    pub m: Vec<f64>,
    pub stderr: Vec<f64>,
    pub ensemble_size: usize,
    pub metadata: BTreeMap<String, String>,
}

impl EchoSeries {
    pub fn new(times: Vec<f64>, m: Vec<f64>, stderr: Vec<f64>, ensemble_size: usize) -> Result<Self> {
        if times.len() != m.len() || times.len() != stderr.len() {
            return Err(Error::DimensionMismatch {
                left: times.len(),
                right: m.len(),
            });
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("times", "must be strictly increasing"));
        }
        Ok(Self {
            times,
            m,
            stderr,
            ensemble_size,
            metadata: BTreeMap::new(),
        })
    }

    /// Single-realization series with zero error bars.
    pub fn exact(times: Vec<f64>, m: Vec<f64>) -> Result<Self> {
        let n = m.len();
        Self::new(times, m, alloc::vec![0.0; n], 1)
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.insert(key.into(), value.to_string());
        self
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn ln_m(&self) -> Vec<f64> {
        #[allow(unused_imports)] // inherent f64 methods win when std is linked
        use num_traits::Float;
        self.m.iter().map(|m| m.ln()).collect()
    }

    /// Linear interpolation of `M` at `t`.
    pub fn interpolate(&self, t: f64) -> Result<f64> {
        interpolate(&self.times, &self.m, t)
    }

    /// Checks the echo invariants `M(0) = 1` and `0 ≤ M ≤ 1` (with the
    /// round-off slack used throughout the crate).
    pub fn check_invariants(&self) -> Result<()> {
        if let (Some(&t0), Some(&m0)) = (self.times.first(), self.m.first()) {
            if t0 == 0.0 && (m0 - 1.0).abs() > 1e-12 {
                return Err(invalid("m", "echo must start at 1"));
            }
        }
        if self.m.iter().any(|&m| !(-1e-12..=1.0 + 1e-10).contains(&m)) {
            return Err(invalid("m", "echo values must lie in [0, 1]"));
        }
        Ok(())
    }
}

/// Piecewise-linear interpolation on a strictly increasing abscissa.
pub fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> Result<f64> {
    let n = xs.len();
    if n == 0 || x < xs[0] || x > xs[n - 1] || x.is_nan() {
        return Err(Error::Interpolation(x));
    }
    let hi = xs.partition_point(|&v| v < x);
    if hi < n && xs[hi] == x {
        return Ok(ys[hi]);
    }
    let lo = hi - 1;
    let w = (x - xs[lo]) / (xs[hi] - xs[lo]);
    Ok(ys[lo] + w * (ys[hi] - ys[lo]))
}
