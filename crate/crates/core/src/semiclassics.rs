//! Closed-form semiclassical echo predictions.
//!
//! | regime        | prediction                                            |
//! |---------------|-------------------------------------------------------|
//! | FGR           | `exp(-2σ²R t)`                                        |
//! | Lyapunov      | `M₀ exp[-(Λ₁(t)t - Λ₁(t₀)t₀)]`, anchored at `(t₀, M₀)` |
//! | regular 1D    | `c₀ (1+ξ²t²)^{-1/2} exp[-Γt²/(1+ξ²t²)]`               |
//! | many-mode FGR | `exp(-2σ²R t)` with `R` from integrated-potential spread |
//!
//! `ħ` in every formula is the `ħ_eff` of the paired quantum run.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent f64 methods win when std is linked
use num_traits::Float;

use crate::classical::Lambda1Series;
use crate::error::invalid;
use crate::stats::Moments;
use crate::{EchoSeries, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Regime {
    Fgr,
    Lyapunov,
    Regular1D,
    ManyModeFgr,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::Fgr => "fgr",
            Regime::Lyapunov => "lyapunov",
            Regime::Regular1D => "regular-1d",
            Regime::ManyModeFgr => "many-mode-fgr",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PredictionCurve {
    pub times: Vec<f64>,
    pub m: Vec<f64>,
    pub regime: Regime,
    pub parameters: BTreeMap<String, String>,
}

impl PredictionCurve {
    fn new(times: &[f64], m: Vec<f64>, regime: Regime) -> Self {
        Self {
            times: times.to_vec(),
            m,
            regime,
            parameters: BTreeMap::new(),
        }
    }

    fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.parameters.insert(key.into(), value.to_string());
        self
    }

    /// Same data as an error-free [`EchoSeries`], tagged with the regime.
    pub fn to_series(&self) -> Result<EchoSeries> {
        let mut s = EchoSeries::exact(self.times.clone(), self.m.clone())?;
        s.metadata = self.parameters.clone();
        Ok(s.with_meta("regime", self.regime.name()))
    }
}

/// FGR decay rate `2σ²R` per unit time.
pub fn fgr_rate(sigma: f64, r: f64) -> f64 {
    2.0 * sigma * sigma * r
}

pub fn fgr_prediction(sigma: f64, r: f64, times: &[f64]) -> Result<PredictionCurve> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(invalid("R", "action diffusion constant must be positive"));
    }
    let rate = fgr_rate(sigma, r);
    let m = times.iter().map(|t| (-rate * t).exp()).collect();
    Ok(PredictionCurve::new(times, m, Regime::Fgr)
        .param("sigma", sigma)
        .param("R", r)
        .param("rate", rate))
}

/// `M(t) = M₀ exp[-(Λ₁(t)t − Λ₁(t₀)t₀)]`, with `Λ₁(t)t` linearly
/// interpolated between tabulated integer times (and `0` at `t = 0`).
pub fn lyapunov_prediction(
    lambda1: &Lambda1Series,
    times: &[f64],
    anchor: (f64, f64),
) -> Result<PredictionCurve> {
    let (t0, m0) = anchor;
    if !(m0 > 0.0) {
        return Err(invalid("anchor", "anchor echo must be positive"));
    }
    let e0 = lambda1.exponent_at(t0)?;
    let m = times
        .iter()
        .map(|&t| Ok(m0 * (-(lambda1.exponent_at(t)? - e0)).exp()))
        .collect::<Result<Vec<f64>>>()?;
    Ok(PredictionCurve::new(times, m, Regime::Lyapunov)
        .param("anchor_t", t0)
        .param("anchor_m", m0))
}

/// Lyapunov-regime curve `c·exp[-Λ₁(t)t]` with the prefactor `c` chosen by
/// least squares in `ln M` against the exact points inside `window`.
pub fn lyapunov_prediction_fitted(
    lambda1: &Lambda1Series,
    times: &[f64],
    exact: &EchoSeries,
    window: (f64, f64),
) -> Result<PredictionCurve> {
    let (start, end) = window;
    let mut offset = Moments::new();
    for (&t, &m) in exact.times.iter().zip(&exact.m) {
        if t < start || t > end {
            continue;
        }
        if !(m > 0.0) {
            return Err(Error::Window {
                start,
                end,
                reason: "exact echo must be positive inside the window",
            });
        }
        offset.push(m.ln() + lambda1.exponent_at(t)?);
    }
    if offset.count() == 0 {
        return Err(Error::Window {
            start,
            end,
            reason: "no exact points inside the window",
        });
    }
    let ln_c = offset.mean();
    let m = times
        .iter()
        .map(|&t| Ok((ln_c - lambda1.exponent_at(t)?).exp()))
        .collect::<Result<Vec<f64>>>()?;
    Ok(PredictionCurve::new(times, m, Regime::Lyapunov)
        .param("anchor", "least-squares")
        .param("anchor_window", alloc::format!("{start}:{end}"))
        .param("prefactor", ln_c.exp()))
}

pub fn regular_1d_prediction(gamma: f64, xi_rate: f64, c0: f64, times: &[f64]) -> Result<PredictionCurve> {
    if !(gamma >= 0.0 && xi_rate >= 0.0) {
        return Err(invalid("gamma/xi_rate", "must be nonnegative"));
    }
    let m = times
        .iter()
        .map(|&t| {
            let d = 1.0 + xi_rate * xi_rate * t * t;
            c0 / d.sqrt() * (-gamma * t * t / d).exp()
        })
        .collect();
    Ok(PredictionCurve::new(times, m, Regime::Regular1D)
        .param("gamma", gamma)
        .param("xi_rate", xi_rate)
        .param("c0", c0))
}

/// `Γ = ½(ε w_p U'/ħ)²` and `ξ = |ε w_p² U''/(2ħ)|`.
pub fn gamma_xi_from_derivatives(epsilon: f64, w_p: f64, hbar: f64, du_dp: f64, d2u_dp2: f64) -> Result<(f64, f64)> {
    if ![epsilon, w_p, hbar, du_dp, d2u_dp2].iter().all(|x| x.is_finite()) {
        return Err(invalid("derivatives", "inputs must be finite"));
    }
    if hbar <= 0.0 {
        return Err(invalid("hbar", "must be positive"));
    }
    let g = epsilon * w_p * du_dp / hbar;
    let gamma = 0.5 * g * g;
    let xi = (epsilon * w_p * w_p * d2u_dp2 / (2.0 * hbar)).abs();
    Ok((gamma, xi))
}

/// `R = (⟨s²⟩ − ⟨s⟩²)/(2t)` from integrated-perturbation samples over `[0, t)`.
pub fn many_mode_rate(samples: &[f64], t: f64) -> Result<f64> {
    if t == 0.0 {
        return Err(Error::Undefined("many-mode rate at t = 0"));
    }
    if samples.is_empty() {
        return Err(invalid("samples", "need at least one sample"));
    }
    let m: Moments = samples.iter().copied().collect();
    Ok(m.variance() / (2.0 * t))
}
