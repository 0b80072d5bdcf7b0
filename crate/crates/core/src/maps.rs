//! Quantized kicked maps and their Loschmidt echo.
//!
//! One period of either map is a kick followed by free motion,
//!
//! ```text
//! U = exp(-i p̂²/(2ħ)) · exp(-i (K + ε) v(r̂)/ħ),     ε = σ ħ,
//! ```
//!
//! with `v(r) = -(r-π)²/2` for the sawtooth map and `v(r) = cos r` for the
//! kicked rotator (standard map). On the torus grid the kinetic phase at
//! centered momentum index `l` is `exp(-iπ l²/N)`, and the kick phase at site
//! `r_j` splits as `exp(-i K v(r_j)/ħ) · exp(-i σ v(r_j))`, which keeps the
//! `σ`-dependence free of the `1/ħ` amplification.
//!
//! The perturbation enters the kick strength only, so for the sawtooth the
//! perturbing observable is `v` itself with classical variance `π⁴/45`.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)] // inherent f64 methods win when std is linked
use num_traits::Float;

use crate::error::invalid;
use crate::fft::Fft;
use crate::rng::{task_rng, uniform_angle};
use crate::stats::Moments;
use crate::torus::{gaussian_packet, inner, GaussianPacketSpec, Representation, StateVector, TorusGrid};
use crate::{wrap_angle, EchoSeries, Error, Result, PI};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ModelKind {
    Sawtooth,
    Rotator,
}

impl ModelKind {
    /// Kick potential `v(r)` (per unit kick strength).
    #[inline]
    pub fn potential(self, r: f64) -> f64 {
        match self {
            ModelKind::Sawtooth => -0.5 * (r - PI) * (r - PI),
            ModelKind::Rotator => r.cos(),
        }
    }

    /// Momentum kick `-v'(r)` per unit kick strength.
    #[inline]
    pub fn force(self, r: f64) -> f64 {
        match self {
            ModelKind::Sawtooth => r - PI,
            ModelKind::Rotator => r.sin(),
        }
    }

    /// `-v''(r)`, the entry that appears in the Jacobian.
    #[inline]
    pub fn force_derivative(self, r: f64) -> f64 {
        match self {
            ModelKind::Sawtooth => 1.0,
            ModelKind::Rotator => r.cos(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Sawtooth => "sawtooth",
            ModelKind::Rotator => "rotator",
        }
    }
}

impl core::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sawtooth" => Ok(ModelKind::Sawtooth),
            "rotator" | "standard" => Ok(ModelKind::Rotator),
            _ => Err(invalid("model", "expected `sawtooth` or `rotator`")),
        }
    }
}

impl core::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

/// Model family plus dimensionless kick strength `K`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KickedModel {
    pub kind: ModelKind,
    pub k: f64,
}

impl KickedModel {
    pub fn new(kind: ModelKind, k: f64) -> Result<Self> {
        if !k.is_finite() {
            return Err(invalid("K", "kick strength must be finite"));
        }
        if kind == ModelKind::Sawtooth && k <= 0.0 {
            return Err(invalid("K", "sawtooth map needs K > 0"));
        }
        Ok(Self { kind, k })
    }

    pub fn sawtooth(k: f64) -> Result<Self> {
        Self::new(ModelKind::Sawtooth, k)
    }

    pub fn rotator(k: f64) -> Result<Self> {
        Self::new(ModelKind::Rotator, k)
    }
}

/// Perturbation strength in units of `ħ`: `ε = σ ħ`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PerturbationSpec {
    pub sigma: f64,
    pub epsilon: f64,
}

impl PerturbationSpec {
    pub fn new(sigma: f64, grid: &TorusGrid) -> Result<Self> {
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(invalid("sigma", "must be finite and nonnegative"));
        }
        Ok(Self {
            sigma,
            epsilon: sigma * grid.hbar(),
        })
    }
}

/// Diagonal factors of one map period, plus the FFT plan that links them.
#[derive(Debug, Clone)]
pub struct FloquetOperator {
    grid: TorusGrid,
    model: KickedModel,
    sigma: f64,
    /// `exp(-iπ l²/N)` in momentum storage order.
    kinetic: Vec<Complex64>,
    /// `exp(-i (K + ε) v(r_j)/ħ)` on position sites.
    kick: Vec<Complex64>,
    fft: Fft,
}

impl FloquetOperator {
    /// Operator with kick strength `K + σħ`; `sigma_shift = 0` gives the
    /// unperturbed map.
    pub fn new(model: KickedModel, grid: TorusGrid, sigma_shift: f64) -> Result<Self> {
        if !sigma_shift.is_finite() {
            return Err(invalid("sigma", "must be finite"));
        }
        let n = grid.dim();
        let two_n = 2 * n as i128;
        let kinetic = (0..n)
            .map(|i| {
                let l = grid.momentum_index(i) as i128;
                // l² mod 2N keeps the argument exact for any N
                let l2 = (l * l).rem_euclid(two_n) as f64;
                Complex64::from_polar(1.0, -PI * l2 / n as f64)
            })
            .collect();
        let k_over_hbar = model.k / grid.hbar();
        let kick = (0..n)
            .map(|j| {
                let v = model.kind.potential(grid.position(j));
                let phase = -wrap_angle(k_over_hbar * v) - sigma_shift * v;
                Complex64::from_polar(1.0, phase)
            })
            .collect();
        Ok(Self {
            grid,
            model,
            sigma: sigma_shift,
            kinetic,
            kick,
            fft: grid.fft(),
        })
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn model(&self) -> KickedModel {
        self.model
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn kinetic_phases(&self) -> &[Complex64] {
        &self.kinetic
    }

    pub fn kick_phases(&self) -> &[Complex64] {
        &self.kick
    }

    /// One period applied in place to position amplitudes.
    pub fn apply(&self, psi: &mut [Complex64]) {
        assert_eq!(psi.len(), self.grid.dim(), "state length does not match operator");
        for (a, k) in psi.iter_mut().zip(&self.kick) {
            *a *= k;
        }
        self.fft.forward(psi);
        let scale = 1.0 / self.grid.dim() as f64;
        for (a, k) in psi.iter_mut().zip(&self.kinetic) {
            *a *= k * scale;
        }
        self.fft.inverse(psi);
    }

    /// One period; a momentum-representation input is converted first.
    pub fn evolve_step(&self, psi: StateVector) -> Result<StateVector> {
        if psi.grid().dim() != self.grid.dim() {
            return Err(Error::DimensionMismatch {
                left: psi.grid().dim(),
                right: self.grid.dim(),
            });
        }
        let mut psi = match psi.representation() {
            Representation::Position => psi,
            Representation::Momentum => psi.to_position_with(&self.fft)?,
        };
        self.apply(psi.amplitudes_mut());
        Ok(psi)
    }
}

/// `M(t) = |⟨ψ₁(t)|ψ₀(t)⟩|²` for `t = 0…t_max`, starting both copies from
/// `psi` (position representation).
pub fn echo_values(
    u0: &FloquetOperator,
    u1: &FloquetOperator,
    psi: &StateVector,
    t_max: usize,
) -> Result<Vec<f64>> {
    if psi.representation() != Representation::Position {
        return Err(Error::Representation {
            expected: Representation::Position,
            found: psi.representation(),
        });
    }
    let n = u0.grid.dim();
    if u1.grid.dim() != n || psi.grid().dim() != n {
        return Err(Error::DimensionMismatch {
            left: psi.grid().dim(),
            right: n,
        });
    }
    let mut a = psi.amplitudes().to_vec();
    let mut b = a.clone();
    let mut out = Vec::with_capacity(t_max + 1);
    out.push(inner(&b, &a).norm_sqr());
    for _ in 0..t_max {
        u0.apply(&mut a);
        u1.apply(&mut b);
        out.push(inner(&b, &a).norm_sqr());
    }
    Ok(out)
}

fn kick_times(t_max: usize) -> Vec<f64> {
    (0..=t_max).map(|t| t as f64).collect()
}

/// Exact echo of one Gaussian packet.
pub fn loschmidt_echo(
    model: KickedModel,
    sigma: f64,
    grid: TorusGrid,
    packet: &GaussianPacketSpec,
    t_max: usize,
) -> Result<EchoSeries> {
    if t_max < 1 {
        return Err(invalid("t_max", "need at least one kick"));
    }
    let pert = PerturbationSpec::new(sigma, &grid)?;
    let u0 = FloquetOperator::new(model, grid, 0.0)?;
    let u1 = FloquetOperator::new(model, grid, pert.sigma)?;
    let psi = gaussian_packet(packet, &grid);
    let m = echo_values(&u0, &u1, &psi, t_max)?;
    Ok(EchoSeries::exact(kick_times(t_max), m)?
        .with_meta("model", model.kind)
        .with_meta("K", model.k)
        .with_meta("N", grid.dim())
        .with_meta("sigma", sigma)
        .with_meta("epsilon", pert.epsilon)
        .with_meta("r0", packet.r0())
        .with_meta("p0", packet.p0())
        .with_meta("xi", packet.xi()))
}

/// Ensemble of random packet centers.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EnsembleSpec {
    pub n_states: usize,
    pub seed: u64,
    /// Packet width; `None` means the coherent width `√ħ`.
    pub xi: Option<f64>,
}

impl EnsembleSpec {
    pub const DEFAULT_N_STATES: usize = 100;

    pub fn new(n_states: usize, seed: u64) -> Self {
        Self {
            n_states,
            seed,
            xi: None,
        }
    }

    pub fn xi_for(&self, grid: &TorusGrid) -> f64 {
        self.xi.unwrap_or_else(|| grid.hbar().sqrt())
    }

    /// Packet of member `index`: center uniform on the torus, drawn from
    /// stream `index` of the seeded generator.
    pub fn member_packet(&self, grid: &TorusGrid, index: usize) -> Result<GaussianPacketSpec> {
        let mut rng = task_rng(self.seed, index as u64);
        let r0 = uniform_angle(&mut rng);
        let p0 = uniform_angle(&mut rng);
        GaussianPacketSpec::new(r0, p0, self.xi_for(grid))
    }
}

/// The pair of operators shared by all ensemble members.
#[derive(Debug, Clone)]
pub struct EchoPair {
    pub unperturbed: FloquetOperator,
    pub perturbed: FloquetOperator,
}

impl EchoPair {
    pub fn new(model: KickedModel, sigma: f64, grid: TorusGrid) -> Result<Self> {
        let pert = PerturbationSpec::new(sigma, &grid)?;
        Ok(Self {
            unperturbed: FloquetOperator::new(model, grid, 0.0)?,
            perturbed: FloquetOperator::new(model, grid, pert.sigma)?,
        })
    }

    /// Echo series of ensemble member `index`.
    pub fn member_echo(&self, ens: &EnsembleSpec, index: usize, t_max: usize) -> Result<Vec<f64>> {
        let grid = self.unperturbed.grid();
        let packet = ens.member_packet(&grid, index)?;
        let psi = gaussian_packet(&packet, &grid);
        echo_values(&self.unperturbed, &self.perturbed, &psi, t_max)
    }
}

/// Mean and standard error of per-member series, accumulated in member order.
pub fn reduce_members(members: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<f64>)> {
    let len = members.first().map_or(0, Vec::len);
    if let Some(bad) = members.iter().find(|m| m.len() != len) {
        return Err(Error::DimensionMismatch {
            left: bad.len(),
            right: len,
        });
    }
    let mut acc = vec![Moments::new(); len];
    for m in members {
        for (a, &x) in acc.iter_mut().zip(m) {
            a.push(x);
        }
    }
    Ok((
        acc.iter().map(Moments::mean).collect(),
        acc.iter().map(Moments::stderr).collect(),
    ))
}

/// Wraps reduced ensemble data with the standard metadata.
pub fn ensemble_series(
    model: KickedModel,
    sigma: f64,
    grid: TorusGrid,
    ens: &EnsembleSpec,
    members: &[Vec<f64>],
) -> Result<EchoSeries> {
    let (m, se) = reduce_members(members)?;
    let t_max = m.len().saturating_sub(1);
    Ok(EchoSeries::new(kick_times(t_max), m, se, members.len())?
        .with_meta("model", model.kind)
        .with_meta("K", model.k)
        .with_meta("N", grid.dim())
        .with_meta("sigma", sigma)
        .with_meta("epsilon", sigma * grid.hbar())
        .with_meta("xi", ens.xi_for(&grid))
        .with_meta("n_states", ens.n_states)
        .with_meta("seed", ens.seed))
}

/// Ensemble-averaged echo, evaluated sequentially in member order.
pub fn ensemble_echo(
    model: KickedModel,
    sigma: f64,
    grid: TorusGrid,
    ens: &EnsembleSpec,
    t_max: usize,
) -> Result<EchoSeries> {
    if ens.n_states < 1 {
        return Err(invalid("n_states", "need at least one state"));
    }
    if t_max < 1 {
        return Err(invalid("t_max", "need at least one kick"));
    }
    let pair = EchoPair::new(model, sigma, grid)?;
    let members = (0..ens.n_states)
        .map(|i| pair.member_echo(ens, i, t_max))
        .collect::<Result<Vec<_>>>()?;
    ensemble_series(model, sigma, grid, ens, &members)
}
