//! Classical sawtooth and standard maps on the torus and the ensemble
//! quantities that feed the semiclassical echo predictions.
//!
//! Both maps share the form
//!
//! ```text
//! p' = p + K F(r)   (mod 2π),      r' = r + p'   (mod 2π),
//! ```
//!
//! with `F(r) = r - π` (sawtooth) or `F(r) = sin r` (standard map). Tangent
//! vectors are ordered `(dp, dr)`, so the Jacobian at the pre-step point is
//! `[[1, K F'(r)], [1, 1 + K F'(r)]]`.
//!
//! Every per-trajectory routine draws from stream
//! `CLASSICAL_STREAM_BASE + index` of the seeded generator. Ensemble routines
//! here run sequentially in index order; the companion crate evaluates the
//! same per-trajectory functions on a worker pool and reduces in the same
//! order, which gives bit-identical results.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent f64 methods win when std is linked
use num_traits::Float;
use rand_distr::{Distribution, Normal};

use crate::error::invalid;
use crate::maps::ModelKind;
use crate::rng::{task_rng, uniform_angle, TaskRng, CLASSICAL_STREAM_BASE};
use crate::stats::{LogMeanExp, Moments};
use crate::torus::GaussianPacketSpec;
use crate::{wrap_angle, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PhasePoint {
    pub r: f64,
    pub p: f64,
}

impl PhasePoint {
    /// Coordinates reduced to `[0, 2π)`.
    pub fn new(r: f64, p: f64) -> Self {
        Self {
            r: wrap_angle(r),
            p: wrap_angle(p),
        }
    }

    pub fn uniform(rng: &mut TaskRng) -> Self {
        let r = uniform_angle(rng);
        let p = uniform_angle(rng);
        Self { r, p }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TangentVector {
    pub dp: f64,
    pub dr: f64,
}

impl TangentVector {
    pub fn norm(&self) -> f64 {
        self.dp.hypot(self.dr)
    }

    fn scaled(self, s: f64) -> Self {
        Self {
            dp: self.dp * s,
            dr: self.dr * s,
        }
    }

    fn random_unit(rng: &mut TaskRng) -> Self {
        let a = uniform_angle(rng);
        Self { dp: a.cos(), dr: a.sin() }
    }
}

pub fn step(kind: ModelKind, k: f64, x: PhasePoint) -> PhasePoint {
    let p = wrap_angle(x.p + k * kind.force(x.r));
    PhasePoint {
        r: wrap_angle(x.r + p),
        p,
    }
}

pub fn step_sawtooth(x: PhasePoint, k: f64) -> PhasePoint {
    step(ModelKind::Sawtooth, k, x)
}

pub fn step_standard(x: PhasePoint, k: f64) -> PhasePoint {
    step(ModelKind::Rotator, k, x)
}

/// Jacobian at the pre-step point in `(dp, dr)` ordering.
pub fn jacobian(kind: ModelKind, k: f64, x: PhasePoint) -> [[f64; 2]; 2] {
    let a = k * kind.force_derivative(x.r);
    [[1.0, a], [1.0, 1.0 + a]]
}

pub fn tangent_step(kind: ModelKind, k: f64, x: PhasePoint, v: TangentVector) -> TangentVector {
    let j = jacobian(kind, k, x);
    TangentVector {
        dp: j[0][0] * v.dp + j[0][1] * v.dr,
        dr: j[1][0] * v.dp + j[1][1] * v.dr,
    }
}

/// How the initial displacement `δx(0)` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum TangentInit {
    /// Uniformly random direction at the starting point.
    Random,
    /// Random direction iterated (with its point) for `burn_in` steps before
    /// measurement starts, so `δx(0)` lies along the local unstable
    /// direction. The starting point stays distributed by the invariant
    /// measure.
    Aligned { burn_in: usize },
}

impl Default for TangentInit {
    fn default() -> Self {
        TangentInit::Aligned { burn_in: 32 }
    }
}

fn trajectory_rng(seed: u64, index: usize) -> TaskRng {
    task_rng(seed, CLASSICAL_STREAM_BASE + index as u64)
}

/// Cumulative `ln|δx(t)/δx(0)|` for `t = 1…t_max` along trajectory `index`,
/// accumulated one renormalized step at a time.
pub fn log_stretch_path(
    kind: ModelKind,
    k: f64,
    t_max: usize,
    init: TangentInit,
    seed: u64,
    index: usize,
) -> Vec<f64> {
    let mut rng = trajectory_rng(seed, index);
    let mut x = PhasePoint::uniform(&mut rng);
    let mut v = TangentVector::random_unit(&mut rng);
    if let TangentInit::Aligned { burn_in } = init {
        for _ in 0..burn_in {
            v = tangent_step(kind, k, x, v);
            v = v.scaled(1.0 / v.norm());
            x = step(kind, k, x);
        }
    }
    let mut total = 0.0;
    let mut out = Vec::with_capacity(t_max);
    for _ in 0..t_max {
        v = tangent_step(kind, k, x, v);
        let s = v.norm();
        total += s.ln();
        v = v.scaled(1.0 / s);
        x = step(kind, k, x);
        out.push(total);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LyapunovEstimate {
    pub value: f64,
    pub stderr: f64,
    /// Set when the estimate is not clearly positive (`value < 10·stderr`),
    /// as for the standard map at small `K`.
    pub weak: bool,
}

pub fn lyapunov_from_rates(rates: &[f64]) -> LyapunovEstimate {
    let m: Moments = rates.iter().copied().collect();
    let value = m.mean();
    let stderr = m.stderr();
    let weak = value < 10.0 * stderr || value <= 0.0;
    if weak {
        log::warn!("Lyapunov estimate {value} is not resolved above its error {stderr}");
    }
    LyapunovEstimate { value, stderr, weak }
}

/// `ln|δx(t_max)|/t_max` for one aligned trajectory.
pub fn lyapunov_rate(kind: ModelKind, k: f64, t_max: usize, seed: u64, index: usize) -> f64 {
    let path = log_stretch_path(kind, k, t_max, TangentInit::default(), seed, index);
    path.last().copied().unwrap_or(0.0) / t_max as f64
}

/// Largest Lyapunov exponent from `n_traj` tangent-map trajectories.
pub fn lyapunov_exponent(
    kind: ModelKind,
    k: f64,
    n_traj: usize,
    t_max: usize,
    seed: u64,
) -> Result<LyapunovEstimate> {
    if t_max < 1000 {
        return Err(invalid("t_max", "Lyapunov estimate needs at least 1000 steps"));
    }
    if n_traj < 1 {
        return Err(invalid("n_traj", "need at least one trajectory"));
    }
    let rates: Vec<f64> = (0..n_traj)
        .map(|i| lyapunov_rate(kind, k, t_max, seed, i))
        .collect();
    Ok(lyapunov_from_rates(&rates))
}

/// Streaming accumulator for `⟨|δx(t)/δx(0)|⁻¹⟩` at every `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct Lambda1Accumulator {
    per_t: Vec<LogMeanExp>,
}

impl Lambda1Accumulator {
    pub fn new(t_max: usize) -> Self {
        Self {
            per_t: vec![LogMeanExp::default(); t_max],
        }
    }

    pub fn push_path(&mut self, log_stretch: &[f64]) {
        for (acc, &l) in self.per_t.iter_mut().zip(log_stretch) {
            acc.push(-l);
        }
    }

    pub fn merge(&mut self, other: &Self) {
        for (a, b) in self.per_t.iter_mut().zip(&other.per_t) {
            a.merge(b);
        }
    }

    /// `Λ₁(t) = -(1/t) ln⟨|δx(t)/δx(0)|⁻¹⟩` for `t = 1…t_max`.
    pub fn finish(&self) -> Lambda1Series {
        let values = self
            .per_t
            .iter()
            .enumerate()
            .map(|(i, acc)| -acc.value() / (i + 1) as f64)
            .collect();
        Lambda1Series {
            times: (1..=self.per_t.len()).map(|t| t as f64).collect(),
            values,
        }
    }
}

/// Finite-time rates `Λ₁(t)` at `t = 1…t_max`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Lambda1Series {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl Lambda1Series {
    /// `Λ₁(t)·t`, the exponent that enters the Lyapunov-regime echo.
    pub fn exponent_at(&self, t: f64) -> Result<f64> {
        if t == 0.0 {
            return Ok(0.0);
        }
        let xs: Vec<f64> = core::iter::once(0.0).chain(self.times.iter().copied()).collect();
        let ys: Vec<f64> = core::iter::once(0.0)
            .chain(self.times.iter().zip(&self.values).map(|(t, v)| t * v))
            .collect();
        crate::series::interpolate(&xs, &ys, t)
    }
}

pub fn lambda1_of_t(
    kind: ModelKind,
    k: f64,
    n_traj: usize,
    t_max: usize,
    init: TangentInit,
    seed: u64,
) -> Result<Lambda1Series> {
    if n_traj < 100 {
        return Err(invalid("n_traj", "Λ₁(t) needs at least 100 trajectories"));
    }
    if t_max < 1 {
        return Err(invalid("t_max", "need at least one step"));
    }
    let mut acc = Lambda1Accumulator::new(t_max);
    for i in 0..n_traj {
        acc.push_path(&log_stretch_path(kind, k, t_max, init, seed, i));
    }
    Ok(acc.finish())
}

/// Autocorrelation `C(l)` of the kick potential along chaotic trajectories.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CorrelationSeries {
    pub c: Vec<f64>,
    /// Standard error of each `C(l)` across trajectories.
    pub stderr: Vec<f64>,
    /// Standard error of `C(0)/2 + Σ C(l)` across trajectories.
    pub r_stderr: f64,
    pub n_samples: usize,
    pub kind: ModelKind,
    pub k: f64,
}

/// Length of each trajectory used for time-averaged correlations.
pub const CORRELATION_TRAJECTORY_LENGTH: usize = 100_000;

/// Time-averaged `C(l)`, `l = 0…l_max`, of trajectory `index`, centered by the
/// trajectory mean.
pub fn trajectory_correlation(
    kind: ModelKind,
    k: f64,
    l_max: usize,
    length: usize,
    seed: u64,
    index: usize,
) -> Vec<f64> {
    let mut rng = trajectory_rng(seed, index);
    let mut x = PhasePoint::uniform(&mut rng);
    let mut v = Vec::with_capacity(length);
    for _ in 0..length {
        v.push(kind.potential(x.r));
        x = step(kind, k, x);
    }
    let mean = v.iter().sum::<f64>() / length as f64;
    v.iter_mut().for_each(|a| *a -= mean);
    (0..=l_max)
        .map(|l| {
            if l >= length {
                return 0.0;
            }
            let s: f64 = v[..length - l].iter().zip(&v[l..]).map(|(a, b)| a * b).sum();
            s / (length - l) as f64
        })
        .collect()
}

/// Combines per-trajectory correlations (in trajectory order).
pub fn combine_correlations(kind: ModelKind, k: f64, per_traj: &[Vec<f64>]) -> Result<CorrelationSeries> {
    let l_len = per_traj.first().map_or(0, Vec::len);
    if l_len == 0 {
        return Err(invalid("n_traj", "need at least one trajectory"));
    }
    let mut acc = vec![Moments::new(); l_len];
    let mut r_acc = Moments::new();
    for c in per_traj {
        if c.len() != l_len {
            return Err(Error::DimensionMismatch {
                left: c.len(),
                right: l_len,
            });
        }
        for (a, &x) in acc.iter_mut().zip(c) {
            a.push(x);
        }
        r_acc.push(0.5 * c[0] + c[1..].iter().sum::<f64>());
    }
    Ok(CorrelationSeries {
        c: acc.iter().map(Moments::mean).collect(),
        stderr: acc.iter().map(Moments::stderr).collect(),
        r_stderr: r_acc.stderr(),
        n_samples: per_traj.len(),
        kind,
        k,
    })
}

/// `C(l)` from `n_traj` trajectories of length `length`.
pub fn potential_correlation(
    kind: ModelKind,
    k: f64,
    l_max: usize,
    n_traj: usize,
    length: usize,
    seed: u64,
) -> Result<CorrelationSeries> {
    if length <= l_max {
        return Err(invalid("length", "trajectories must be longer than l_max"));
    }
    let per: Vec<Vec<f64>> = (0..n_traj)
        .map(|i| trajectory_correlation(kind, k, l_max, length, seed, i))
        .collect();
    combine_correlations(kind, k, &per)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ActionDiffusion {
    pub r: f64,
    pub stderr: f64,
    /// Set when the last quarter of `C(l)` is not consistent with zero.
    pub tail_not_decayed: bool,
}

/// `R = C(0)/2 + Σ_{l≥1} C(l)`.
pub fn action_diffusion(corr: &CorrelationSeries) -> ActionDiffusion {
    let r = match corr.c.split_first() {
        Some((c0, rest)) => 0.5 * c0 + rest.iter().sum::<f64>(),
        None => 0.0,
    };
    let n = corr.c.len();
    let tail_start = (3 * n / 4).max(1);
    let tail_not_decayed = (tail_start..n).any(|l| {
        let se = corr.stderr.get(l).copied().unwrap_or(0.0);
        corr.c[l].abs() > 3.0 * se && corr.c[l].abs() > 1e-12
    });
    if tail_not_decayed {
        log::warn!("correlation tail has not decayed within l_max = {}", n.saturating_sub(1));
    }
    ActionDiffusion {
        r,
        stderr: corr.r_stderr,
        tail_not_decayed,
    }
}

/// `(1/t) Σ_{t'<t} v(r(t'))` along the trajectory from `x0`.
pub fn time_average_observable(kind: ModelKind, k: f64, x0: PhasePoint, t: usize) -> Result<f64> {
    if t == 0 {
        return Err(Error::Undefined("time average over zero steps"));
    }
    let mut x = x0;
    let mut s = 0.0;
    for _ in 0..t {
        s += kind.potential(x.r);
        x = step(kind, k, x);
    }
    Ok(s / t as f64)
}

/// First and second central differences with a Richardson-style check.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FiniteDifference {
    pub d1: f64,
    pub d2: f64,
    /// Relative change of each derivative when the step is halved.
    pub d1_change: f64,
    pub d2_change: f64,
}

pub const FINITE_DIFFERENCE_STEP: f64 = 1e-4;

pub fn finite_difference(f: impl Fn(f64) -> f64, x: f64, h: f64) -> FiniteDifference {
    let diffs = |h: f64| {
        let (fp, f0, fm) = (f(x + h), f(x), f(x - h));
        ((fp - fm) / (2.0 * h), (fp - 2.0 * f0 + fm) / (h * h))
    };
    let (a1, a2) = diffs(h);
    let (b1, b2) = diffs(0.5 * h);
    let rel = |a: f64, b: f64| {
        let scale = a.abs().max(b.abs());
        if scale == 0.0 {
            0.0
        } else {
            (a - b).abs() / scale
        }
    };
    FiniteDifference {
        d1: b1,
        d2: b2,
        d1_change: rel(a1, b1),
        d2_change: rel(a2, b2),
    }
}

/// `∂U/∂p₀` and `∂²U/∂p₀²` of the time average `U(p₀)` at fixed `r₀`.
pub fn time_average_derivatives(kind: ModelKind, k: f64, r0: f64, p0: f64, t: usize, h: f64) -> Result<FiniteDifference> {
    if t == 0 {
        return Err(Error::Undefined("time average over zero steps"));
    }
    let u = |p: f64| {
        time_average_observable(kind, k, PhasePoint::new(r0, p), t).expect("t is nonzero")
    };
    Ok(finite_difference(u, p0, h))
}

/// Action difference `ΔS = ε Σ_{t'<t} v(r(t'))` along the unperturbed
/// trajectory from `x0`, for every `t = 0…t_max`.
pub fn action_difference_path(kind: ModelKind, k: f64, epsilon: f64, x0: PhasePoint, t_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(t_max + 1);
    let mut x = x0;
    let mut s = 0.0;
    out.push(0.0);
    for _ in 0..t_max {
        s += kind.potential(x.r);
        x = step(kind, k, x);
        out.push(epsilon * s);
    }
    out
}

/// How initial conditions for `P(ΔS)` are sampled.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ActionSampling {
    /// Position fixed at the packet center, momentum drawn from the packet's
    /// Gaussian weight `exp[-(p₀ - p̃₀)²/(ħ/ξ)²]`.
    Packet(GaussianPacketSpec),
    /// Packet centers uniform on the torus, each with the Gaussian momentum
    /// spread of width `ξ`; the pooled distribution describes the
    /// ensemble-averaged echo.
    Pooled { xi: f64 },
}

/// Initial point of sample `index`.
pub fn action_sample_start(sampling: &ActionSampling, hbar: f64, seed: u64, index: usize) -> PhasePoint {
    let mut rng = trajectory_rng(seed, index);
    let (r0, p0, xi) = match *sampling {
        ActionSampling::Packet(spec) => (spec.r0(), spec.p0(), spec.xi()),
        ActionSampling::Pooled { xi } => {
            let r = uniform_angle(&mut rng);
            let p = uniform_angle(&mut rng);
            (r, p, xi)
        }
    };
    // exp[-(p-p0)²/(ħ/ξ)²] has standard deviation ħ/(√2 ξ)
    let sd = hbar / (core::f64::consts::SQRT_2 * xi);
    let dp = Normal::new(0.0, sd).map_or(0.0, |d| d.sample(&mut rng));
    PhasePoint::new(r0, p0 + dp)
}

/// `ΔS` samples at every `t = 0…t_max`, indexed `[t][sample]`.
pub fn action_difference_samples(
    kind: ModelKind,
    k: f64,
    sigma: f64,
    hbar: f64,
    sampling: &ActionSampling,
    t_max: usize,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    if !(hbar > 0.0 && hbar.is_finite()) {
        return Err(invalid("hbar", "must be positive"));
    }
    let epsilon = sigma * hbar;
    let paths: Vec<Vec<f64>> = (0..n_samples)
        .map(|i| {
            let x0 = action_sample_start(sampling, hbar, seed, i);
            action_difference_path(kind, k, epsilon, x0, t_max)
        })
        .collect();
    Ok(transpose_paths(&paths, t_max + 1))
}

/// `[sample][t]` → `[t][sample]`.
pub fn transpose_paths(paths: &[Vec<f64>], len: usize) -> Vec<Vec<f64>> {
    (0..len)
        .map(|t| paths.iter().map(|p| p[t]).collect())
        .collect()
}

/// Histogram of action differences with per-bin first and second moments.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ActionHistogram {
    pub origin: f64,
    pub bin_width: f64,
    pub counts: Vec<u64>,
    pub sums: Vec<f64>,
    pub sum_squares: Vec<f64>,
    pub n_samples: usize,
    /// Streamed mean and population variance of the raw samples.
    pub mean: f64,
    pub variance: f64,
}

impl ActionHistogram {
    /// Bin width `min(ħ/8, range/512)`.
    pub fn from_samples(samples: &[f64], hbar: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(invalid("samples", "histogram needs at least one sample"));
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(invalid("hbar", "must be positive"));
        }
        let lo = samples.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(invalid("samples", "action differences must be finite"));
        }
        let range = hi - lo;
        let mut width = hbar / 8.0;
        if range > 0.0 {
            width = width.min(range / 512.0);
        }
        Self::with_bin_width(samples, width)
    }

    /// Histogram with an explicit bin width (no aliasing check here).
    pub fn with_bin_width(samples: &[f64], bin_width: f64) -> Result<Self> {
        if !(bin_width > 0.0 && bin_width.is_finite()) {
            return Err(invalid("bin_width", "must be positive"));
        }
        let lo = samples.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let n_bins = (((hi - lo) / bin_width).floor() as usize) + 1;
        let mut counts = vec![0u64; n_bins];
        let mut sums = vec![0.0; n_bins];
        let mut sum_squares = vec![0.0; n_bins];
        let mut m = Moments::new();
        for &x in samples {
            let b = (((x - lo) / bin_width).floor() as usize).min(n_bins - 1);
            counts[b] += 1;
            sums[b] += x;
            sum_squares[b] += x * x;
            m.push(x);
        }
        Ok(Self {
            origin: lo,
            bin_width,
            counts,
            sums,
            sum_squares,
            n_samples: samples.len(),
            mean: m.mean(),
            variance: m.variance(),
        })
    }

    pub fn bin_center(&self, i: usize) -> f64 {
        self.origin + (i as f64 + 0.5) * self.bin_width
    }

    /// Normalized probability mass per bin.
    pub fn probabilities(&self) -> Vec<f64> {
        let n = self.n_samples as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }

    /// Mean and variance recomputed from the per-bin sums.
    pub fn binned_moments(&self) -> (f64, f64) {
        let n = self.n_samples as f64;
        let mean = self.sums.iter().sum::<f64>() / n;
        let second = self.sum_squares.iter().sum::<f64>() / n;
        (mean, second - mean * mean)
    }
}

/// `M_sc = |Σ_bins P(ΔS) e^{iΔS/ħ}|²`, the squared characteristic function
/// of `ΔS` at `1/ħ`. Each bin's phase is taken at the mean action of the
/// samples it holds.
pub fn semiclassical_echo_from_distribution(hist: &ActionHistogram, hbar: f64) -> Result<f64> {
    if hist.bin_width > hbar {
        return Err(Error::Aliasing {
            bin_width: hist.bin_width,
            hbar,
        });
    }
    let n = hist.n_samples as f64;
    let (mut re, mut im) = (0.0, 0.0);
    for (&c, &s) in hist.counts.iter().zip(&hist.sums) {
        if c == 0 {
            continue;
        }
        let phase = wrap_angle((s / c as f64) / hbar);
        let w = c as f64 / n;
        re += w * phase.cos();
        im += w * phase.sin();
    }
    Ok(re * re + im * im)
}

/// Integrated potential `s = Σ_{t'<t} v(r(t'))` of trajectory `index` from a
/// uniform start.
pub fn integrated_potential(kind: ModelKind, k: f64, t: usize, seed: u64, index: usize) -> f64 {
    let mut rng = trajectory_rng(seed, index);
    let mut x = PhasePoint::uniform(&mut rng);
    let mut s = 0.0;
    for _ in 0..t {
        s += kind.potential(x.r);
        x = step(kind, k, x);
    }
    s
}

pub fn integrated_potential_samples(kind: ModelKind, k: f64, t: usize, n_traj: usize, seed: u64) -> Vec<f64> {
    (0..n_traj)
        .map(|i| integrated_potential(kind, k, t, seed, i))
        .collect()
}

/// Phase-space average of `v` over long trajectories started uniformly;
/// returns the mean of per-trajectory time averages and its standard error.
pub fn ergodic_average(kind: ModelKind, k: f64, n_traj: usize, length: usize, seed: u64) -> (f64, f64) {
    let m: Moments = (0..n_traj)
        .map(|i| {
            let mut rng = trajectory_rng(seed, i);
            let x = PhasePoint::uniform(&mut rng);
            time_average_observable(kind, k, x, length.max(1)).expect("length is nonzero")
        })
        .collect();
    (m.mean(), m.stderr())
}

/// `ln` of the larger Jacobian eigenvalue of the sawtooth map,
/// `ln[(K + 2 + √(K² + 4K))/2]`.
pub fn sawtooth_lyapunov(k: f64) -> f64 {
    ((k + 2.0 + (k * k + 4.0 * k).sqrt()) / 2.0).ln()
}
