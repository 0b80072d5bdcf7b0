//! Fits, the deviation metric `D`, and transition detection.
//!
//! Windows are always explicit inputs. [`suggest_fgr_window`] only proposes
//! one; nothing here picks a window behind the caller's back.

use alloc::vec::Vec;
#[allow(unused_imports)] // inherent f64 methods win when std is linked
use num_traits::Float;

use crate::error::invalid;
use crate::series::interpolate;
use crate::stats::{median, Moments};
use crate::{EchoSeries, Error, Result};

/// Least-squares fit of `ln M = intercept − rate·t` over a window.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DecayFit {
    pub rate: f64,
    pub intercept: f64,
    pub window: (f64, f64),
    /// Root-mean-square residual in `ln M` units.
    pub rms_residual: f64,
    pub n_points: usize,
}

fn check_window(start: f64, end: f64) -> Result<()> {
    if !(start < end) || start.is_nan() || end.is_nan() {
        return Err(Error::Window {
            start,
            end,
            reason: "start must precede end",
        });
    }
    Ok(())
}

/// Straight-line fit on `(t, y)` pairs; returns `(slope, intercept, rms)`.
pub fn linear_fit(ts: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = ts.len() as f64;
    let tm = ts.iter().sum::<f64>() / n;
    let ym = ys.iter().sum::<f64>() / n;
    let sxx: f64 = ts.iter().map(|t| (t - tm) * (t - tm)).sum();
    let sxy: f64 = ts.iter().zip(ys).map(|(t, y)| (t - tm) * (y - ym)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = ym - slope * tm;
    let ss: f64 = ts
        .iter()
        .zip(ys)
        .map(|(t, y)| (y - intercept - slope * t).powi(2))
        .sum();
    (slope, intercept, (ss / n).sqrt())
}

pub fn fit_exponential(series: &EchoSeries, start: f64, end: f64) -> Result<DecayFit> {
    check_window(start, end)?;
    let (ts, ms): (Vec<f64>, Vec<f64>) = series
        .times
        .iter()
        .zip(&series.m)
        .filter(|(t, _)| **t >= start && **t <= end)
        .map(|(t, m)| (*t, *m))
        .unzip();
    if ts.len() < 4 {
        return Err(Error::Window {
            start,
            end,
            reason: "fit needs at least 4 points",
        });
    }
    if ms.iter().any(|&m| !(m > 0.0)) {
        return Err(Error::Window {
            start,
            end,
            reason: "echo must be positive inside the fit window",
        });
    }
    let ys: Vec<f64> = ms.iter().map(|m| m.ln()).collect();
    let (slope, intercept, rms) = linear_fit(&ts, &ys);
    Ok(DecayFit {
        rate: -slope,
        intercept,
        window: (start, end),
        rms_residual: rms,
        n_points: ts.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Normalization {
    None,
    /// Divide each `x_n` by the spin count.
    PerSpin(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DeviationReport {
    pub d: f64,
    /// Mean of `x_n`, the offset that `D` deliberately ignores.
    pub mean_offset: f64,
    pub window: (f64, f64),
    pub normalization: Normalization,
    pub n_points: usize,
}

/// `D = √(⟨(x_n − x̄)²⟩)` with `x_n = |ln M_e(t_n) − ln M_p(t_n)|` over the
/// exact-series times inside the window. The prediction is given as
/// `ln M` values and linearly interpolated onto those times.
pub fn deviation_d_log(
    exact_times: &[f64],
    exact_ln: &[f64],
    pred_times: &[f64],
    pred_ln: &[f64],
    start: f64,
    end: f64,
    normalization: Normalization,
) -> Result<DeviationReport> {
    check_window(start, end)?;
    let scale = match normalization {
        Normalization::None => 1.0,
        Normalization::PerSpin(n) if n > 0 => 1.0 / n as f64,
        Normalization::PerSpin(_) => return Err(invalid("n_p", "must be positive")),
    };
    let mut m = Moments::new();
    for (&t, &le) in exact_times.iter().zip(exact_ln) {
        if t < start || t > end {
            continue;
        }
        if !le.is_finite() {
            return Err(Error::Window {
                start,
                end,
                reason: "exact echo must be positive inside the window",
            });
        }
        let lp = interpolate(pred_times, pred_ln, t)?;
        m.push((le - lp).abs() * scale);
    }
    if m.count() == 0 {
        return Err(Error::Window {
            start,
            end,
            reason: "no exact points inside the window",
        });
    }
    Ok(DeviationReport {
        d: m.variance().sqrt(),
        mean_offset: m.mean(),
        window: (start, end),
        normalization,
        n_points: m.count() as usize,
    })
}

pub fn deviation_d(
    exact: &EchoSeries,
    pred: &EchoSeries,
    start: f64,
    end: f64,
    normalization: Normalization,
) -> Result<DeviationReport> {
    deviation_d_log(
        &exact.times,
        &exact.ln_m(),
        &pred.times,
        &pred.ln_m(),
        start,
        end,
        normalization,
    )
}

/// Outcome of a detection that may legitimately find nothing.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Detection {
    Detected(f64),
    NoneDetected,
}

impl Detection {
    pub fn value(self) -> Option<f64> {
        match self {
            Detection::Detected(v) => Some(v),
            Detection::NoneDetected => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TdOptions {
    /// Deviation in `ln M` that counts as obvious.
    pub delta_ln: f64,
    /// Consecutive points that must exceed `delta_ln`.
    pub w_sustain: usize,
    /// Points before this time are ignored (the prediction's anchor).
    pub start: f64,
}

impl Default for TdOptions {
    fn default() -> Self {
        Self {
            delta_ln: 0.5,
            w_sustain: 3,
            start: 0.0,
        }
    }
}

/// First exact-series time from which `|ln M_e − ln M_p| > delta_ln` holds
/// for `w_sustain` consecutive points.
pub fn detect_td(exact: &EchoSeries, pred_times: &[f64], pred_m: &[f64], opts: &TdOptions) -> Result<Detection> {
    if opts.w_sustain == 0 {
        return Err(invalid("w_sustain", "must be at least 1"));
    }
    let pred_ln: Vec<f64> = pred_m.iter().map(|m| m.ln()).collect();
    let mut run = 0;
    let mut run_start = 0.0;
    for (&t, &m) in exact.times.iter().zip(&exact.m) {
        if t < opts.start {
            continue;
        }
        let lp = match interpolate(pred_times, &pred_ln, t) {
            Ok(v) => v,
            Err(_) => break,
        };
        if (m.ln() - lp).abs() > opts.delta_ln {
            if run == 0 {
                run_start = t;
            }
            run += 1;
            if run >= opts.w_sustain {
                return Ok(Detection::Detected(run_start));
            }
        } else {
            run = 0;
        }
    }
    Ok(Detection::NoneDetected)
}

/// `t_n = 45 ln N/(σ²π⁴)`: when the sawtooth FGR decay reaches `1/N`.
pub fn t_n_formula(n: usize, sigma: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    if sigma == 0.0 || !sigma.is_finite() {
        return Err(invalid("sigma", "must be nonzero"));
    }
    Ok(45.0 * (n as f64).ln() / (sigma * sigma * crate::PI.powi(4)))
}

/// First time at which the echo has dropped to `level`, but not before
/// `min_start`; this marks the end of the initial plateau.
pub fn decay_onset(series: &EchoSeries, level: f64, min_start: f64) -> Option<f64> {
    series
        .times
        .iter()
        .zip(&series.m)
        .find(|(_, &m)| m <= level)
        .map(|(&t, _)| t.max(min_start))
}

/// Proposed FGR fit window `[start, min(t_d, 0.8·t_n)]`.
pub fn suggest_fgr_window(start: f64, t_d: Detection, t_n: f64) -> Result<(f64, f64)> {
    let mut end = 0.8 * t_n;
    if let Detection::Detected(td) = t_d {
        end = end.min(td);
    }
    check_window(start, end)?;
    Ok((start, end))
}

/// FGR curve through `(t0, M₀)`: `M₀ exp[-rate (t − t0)]`.
pub fn anchored_exponential(rate: f64, anchor: (f64, f64), times: &[f64]) -> Vec<f64> {
    times
        .iter()
        .map(|&t| anchor.1 * (-rate * (t - anchor.0)).exp())
        .collect()
}

/// How the scan threshold is set.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ThresholdRule {
    /// `factor ×` median `D` of the top quartile of control values.
    LargeControlPlateau { factor: f64 },
    /// `fraction ×` median `D` of the bottom quartile of control values.
    SmallControlPlateau { fraction: f64 },
    Absolute(f64),
}

impl Default for ThresholdRule {
    fn default() -> Self {
        ThresholdRule::LargeControlPlateau { factor: 2.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScanResult {
    pub controls: Vec<f64>,
    pub d: Vec<f64>,
    pub threshold: f64,
    pub detected: Detection,
}

impl ThresholdRule {
    pub fn threshold(&self, d_sorted_by_control: &[f64]) -> f64 {
        let n = d_sorted_by_control.len();
        let q = n.div_ceil(4).max(1);
        match *self {
            ThresholdRule::LargeControlPlateau { factor } => factor * median(&d_sorted_by_control[n - q..]),
            ThresholdRule::SmallControlPlateau { fraction } => fraction * median(&d_sorted_by_control[..q]),
            ThresholdRule::Absolute(v) => v,
        }
    }
}

/// Breakdown point of a scan: the smallest control value from which `D`
/// stays at or below the threshold for every larger control, provided some
/// smaller control exceeds it.
pub fn detect_threshold(scan: &[(f64, f64)], rule: ThresholdRule) -> Result<ScanResult> {
    if scan.len() < 3 {
        return Err(invalid("scan", "need at least 3 scan points"));
    }
    if scan.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(invalid("scan", "control values must be strictly increasing"));
    }
    let controls: Vec<f64> = scan.iter().map(|p| p.0).collect();
    let d: Vec<f64> = scan.iter().map(|p| p.1).collect();
    let threshold = rule.threshold(&d);
    let mut first_ok = d.len();
    for i in (0..d.len()).rev() {
        if d[i] <= threshold {
            first_ok = i;
        } else {
            break;
        }
    }
    let detected = if first_ok == 0 || first_ok == d.len() {
        Detection::NoneDetected
    } else {
        Detection::Detected(controls[first_ok])
    };
    Ok(ScanResult {
        controls,
        d,
        threshold,
        detected,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SaturationReport {
    pub mean_m: f64,
    /// `mean_m / (1/N)`.
    pub ratio: f64,
    pub n_points: usize,
}

pub fn saturation_check(series: &EchoSeries, n: usize, start: f64, end: f64) -> Result<SaturationReport> {
    check_window(start, end)?;
    let m: Moments = series
        .times
        .iter()
        .zip(&series.m)
        .filter(|(t, _)| **t >= start && **t <= end)
        .map(|(_, m)| *m)
        .collect();
    if m.count() == 0 {
        return Err(Error::Window {
            start,
            end,
            reason: "no points inside the saturation window",
        });
    }
    Ok(SaturationReport {
        mean_m: m.mean(),
        ratio: m.mean() * n as f64,
        n_points: m.count() as usize,
    })
}

/// Maximum pairwise difference of `ln M/N_p` over the window, on the time
/// grid of the first series.
pub fn scaling_collapse(runs: &[(usize, &EchoSeries)], start: f64, end: f64) -> Result<f64> {
    check_window(start, end)?;
    if runs.len() < 2 {
        return Err(invalid("runs", "need at least two series"));
    }
    for (_, s) in runs {
        let (lo, hi) = (s.times.first().copied(), s.times.last().copied());
        if !matches!((lo, hi), (Some(lo), Some(hi)) if lo <= start && hi >= end) {
            return Err(Error::Window {
                start,
                end,
                reason: "window is not covered by every series",
            });
        }
    }
    let scaled: Vec<(Vec<f64>, Vec<f64>)> = runs
        .iter()
        .map(|(n, s)| (s.times.clone(), s.ln_m().iter().map(|l| l / *n as f64).collect()))
        .collect();
    let grid: Vec<f64> = runs[0]
        .1
        .times
        .iter()
        .copied()
        .filter(|t| *t >= start && *t <= end)
        .collect();
    let mut worst: f64 = 0.0;
    for &t in &grid {
        let vals = scaled
            .iter()
            .map(|(ts, ys)| interpolate(ts, ys, t))
            .collect::<Result<Vec<f64>>>()?;
        let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        worst = worst.max(hi - lo);
    }
    Ok(worst)
}
