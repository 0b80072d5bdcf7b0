//! Echo of the periodic transverse-field Ising chain
//! `H(λ) = -Σ_j (σᶻ_j σᶻ_{j+1} + λ σˣ_j)` through its free-fermion solution.
//!
//! The initial state is the ground state of `H(λ₀)`, evolved with `H(λ)`.
//! After the Jordan-Wigner and Bogoliubov transformations each pair of modes
//! `(k, -k)` evolves independently and the echo factorizes:
//!
//! ```text
//! M(t) = Π_{0<k<π} [1 - sin²(2Δθ_k) sin²(e_k(λ) t)],
//! θ_k(λ) = ½ atan2(sin k, λ - cos k),     e_k(λ) = 2√(1 + λ² - 2λ cos k),
//! ```
//!
//! with `Δθ_k = θ_k(λ) - θ_k(λ₀)`. The pair excitation costs `2e_k`, which is
//! why `e_k t` (not `2e_k t`) sits inside the sine.
//!
//! Momentum grid: the ground state lives in the even fermion-parity sector,
//! whose allowed momenta obey `exp(ikN_p) = (-1)^{N_p+1}`. For odd `N_p` this
//! is the grid `k = 2πm/N_p`, `m = -M…M`, `M = (N_p-1)/2`; for even `N_p` it is
//! `k = π(2m+1)/N_p`. Both conventions agree with exact diagonalization of the
//! spin chain to round-off (checked in the companion crate's tests).

use alloc::vec::Vec;
#[allow(unused_imports)] // inherent f64 methods win when std is linked
use num_traits::Float;

use crate::error::invalid;
use crate::{EchoSeries, Error, Result, PI, TAU};

/// Critical field.
pub const LAMBDA_C: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IsingQuench {
    pub n_p: usize,
    pub lambda0: f64,
    pub lambda: f64,
}

/// One positive-momentum mode with its Bogoliubov data.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BogoliubovMode {
    /// Grid label: `k = 2πm/N_p` (odd `N_p`) or `k = π(2m+1)/N_p` (even).
    pub m: i64,
    pub k: f64,
    /// `e_k(λ)`.
    pub energy: f64,
    /// `θ_k(λ)`.
    pub theta: f64,
    /// `θ_k(λ₀)`.
    pub theta0: f64,
}

impl BogoliubovMode {
    /// `sin²(2Δθ_k)`.
    pub fn amplitude(&self) -> f64 {
        (2.0 * (self.theta - self.theta0)).sin().powi(2)
    }

    /// `ln[1 - sin²(2Δθ_k) sin²(e_k t)]`.
    pub fn log_factor(&self, t: f64) -> f64 {
        (-self.amplitude() * (self.energy * t).sin().powi(2)).ln_1p()
    }
}

impl IsingQuench {
    pub fn new(n_p: usize, lambda0: f64, lambda: f64) -> Result<Self> {
        if n_p < 2 {
            return Err(invalid("n_p", "need at least two spins"));
        }
        if !(lambda0.is_finite() && lambda.is_finite()) {
            return Err(invalid("lambda", "fields must be finite"));
        }
        Ok(Self { n_p, lambda0, lambda })
    }

    /// `δλ = λ − λ_c`.
    pub fn delta_lambda(&self) -> f64 {
        self.lambda - LAMBDA_C
    }

    /// Momenta `0 < k < π` of the even-parity sector.
    pub fn positive_momenta(&self) -> Vec<(i64, f64)> {
        let n = self.n_p as i64;
        if n % 2 == 1 {
            (1..=(n - 1) / 2).map(|m| (m, TAU * m as f64 / n as f64)).collect()
        } else {
            (0..n / 2)
                .map(|m| (m, PI * (2 * m + 1) as f64 / n as f64))
                .collect()
        }
    }

    pub fn modes(&self) -> Vec<BogoliubovMode> {
        self.positive_momenta()
            .into_iter()
            .map(|(m, k)| BogoliubovMode {
                m,
                k,
                energy: quasiparticle_energy(self.lambda, k),
                theta: bogoliubov_angle(self.lambda, k),
                theta0: bogoliubov_angle(self.lambda0, k),
            })
            .collect()
    }

    /// Largest `e_k(λ)` on the grid.
    pub fn max_energy(&self) -> f64 {
        self.modes().iter().map(|m| m.energy).fold(0.0, f64::max)
    }

    /// Time step that advances the fastest mode phase `e_k t` by `π/8`.
    pub fn default_time_step(&self) -> f64 {
        PI / (8.0 * self.max_energy().max(f64::MIN_POSITIVE))
    }
}

/// `e_k = 2√(1 + λ² − 2λ cos k)`.
pub fn quasiparticle_energy(lambda: f64, k: f64) -> f64 {
    // (λ - cos k)² + sin²k avoids cancellation near the critical gap
    let a = lambda - k.cos();
    let b = k.sin();
    2.0 * a.hypot(b)
}

/// `θ_k(λ) = ½ atan2(sin k, λ − cos k)`.
pub fn bogoliubov_angle(lambda: f64, k: f64) -> f64 {
    0.5 * k.sin().atan2(lambda - k.cos())
}

/// Small-`k` spectrum `(4π/N_p)|m|√(λ + G²)`, `G = N_p δλ/(2πm)`.
pub fn approx_energy(quench: &IsingQuench, m: i64) -> Result<f64> {
    if m == 0 {
        return Err(Error::Undefined("approximate energy at m = 0"));
    }
    let n = quench.n_p as f64;
    let g = n * quench.delta_lambda() / (TAU * m as f64);
    Ok(4.0 * PI / n * m.unsigned_abs() as f64 * (quench.lambda + g * g).sqrt())
}

/// `ħ_eff = 4π/N_p`, the level spacing of the critical linear spectrum.
pub fn heff_ising(n_p: usize) -> f64 {
    4.0 * PI / n_p as f64
}

/// Empirical breakdown size `N_d = 2/(5δλ)`.
pub fn breakdown_estimate(delta_lambda: f64) -> Result<f64> {
    if !(delta_lambda > 0.0) {
        return Err(invalid("delta_lambda", "must be positive"));
    }
    Ok(2.0 / (5.0 * delta_lambda))
}

/// Ground-state energy `-Σ_{0<k<π} e_k` for even `N_p`.
pub fn ground_state_energy(n_p: usize, lambda: f64) -> Result<f64> {
    if n_p % 2 == 1 {
        return Err(invalid("n_p", "closed form implemented for even chains only"));
    }
    let q = IsingQuench::new(n_p, lambda, lambda)?;
    Ok(-q.modes().iter().map(|m| m.energy).sum::<f64>())
}

/// `ln M(t)` at each time, summed mode by mode in ascending `k`.
pub fn ising_log_echo(quench: &IsingQuench, times: &[f64]) -> Vec<f64> {
    let modes = quench.modes();
    times
        .iter()
        .map(|&t| modes.iter().map(|m| m.log_factor(t)).sum())
        .collect()
}

pub fn ising_echo(quench: &IsingQuench, times: &[f64]) -> Result<EchoSeries> {
    let m = ising_log_echo(quench, times).into_iter().map(f64::exp).collect();
    Ok(EchoSeries::exact(times.to_vec(), m)?
        .with_meta("N_p", quench.n_p)
        .with_meta("lambda0", quench.lambda0)
        .with_meta("lambda", quench.lambda)
        .with_meta("delta_lambda", quench.delta_lambda())
        .with_meta("hbar_eff", heff_ising(quench.n_p)))
}

/// Uniform grid `0, dt, …, n·dt`.
pub fn uniform_times(dt: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| i as f64 * dt).collect()
}

/// Quadrature nodes for [`limit_log_echo_density`].
pub const LIMIT_QUADRATURE_POINTS: usize = 8192;

/// `lim_{N_p→∞} ln M(t)/N_p = (1/2π) ∫_0^π ln[1 − sin²(2Δθ_k) sin²(e_k t)] dk`,
/// by the midpoint rule.
pub fn limit_log_echo_density(lambda0: f64, lambda: f64, t: f64) -> f64 {
    let n = LIMIT_QUADRATURE_POINTS;
    let h = PI / n as f64;
    let s: f64 = (0..n)
        .map(|i| {
            let k = (i as f64 + 0.5) * h;
            let mode = BogoliubovMode {
                m: 0,
                k,
                energy: quasiparticle_energy(lambda, k),
                theta: bogoliubov_angle(lambda, k),
                theta0: bogoliubov_angle(lambda0, k),
            };
            mode.log_factor(t)
        })
        .sum();
    s * h / TAU
}
