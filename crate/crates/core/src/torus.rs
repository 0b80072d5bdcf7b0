//! Hilbert space of a quantum map on the unit torus `[0, 2π)²`.
//!
//! A dimension `N` fixes `ħ_eff = 2π/N`, the position sites `r_j = 2πj/N` and
//! the momentum sites `p_l = 2πl/N`. Momentum amplitudes are stored in FFT
//! order: storage slot `i` holds the centered index
//!
//! ```text
//! l(i) = i        for i <  ⌈N/2⌉
//! l(i) = i - N    for i >= ⌈N/2⌉
//! ```
//!
//! so the stored momenta cover `{-⌊N/2⌋, …, ⌈N/2⌉-1}` exactly once. The
//! position→momentum transform is the unitary DFT with kernel
//! `exp(-i r_j p_l / ħ_eff)/√N = exp(-2πi jl/N)/√N`.

use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)] // inherent f64 methods win when std is linked
use num_traits::Float;

use crate::error::invalid;
use crate::fft::Fft;
use crate::{wrap_angle, Error, Result, TAU};

/// Discretization of the torus with `N` sites per direction.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TorusGrid {
    n: usize,
    hbar: f64,
}

impl TorusGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension(n));
        }
        Ok(Self {
            n,
            hbar: TAU / n as f64,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `ħ_eff = 2π/N`.
    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn position(&self, j: usize) -> f64 {
        TAU * j as f64 / self.n as f64
    }

    /// Centered momentum index held in storage slot `i`.
    pub fn momentum_index(&self, i: usize) -> i64 {
        let half_up = self.n.div_ceil(2);
        if i < half_up {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// Storage slot of the centered momentum index `l` (taken mod `N`).
    pub fn momentum_slot(&self, l: i64) -> usize {
        l.rem_euclid(self.n as i64) as usize
    }

    pub fn momentum(&self, i: usize) -> f64 {
        TAU * self.momentum_index(i) as f64 / self.n as f64
    }

    /// Position sites `r_j`, ascending.
    pub fn r_sites(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.position(j)).collect()
    }

    /// Momentum sites in storage (FFT) order.
    pub fn p_sites(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.momentum(i)).collect()
    }

    pub fn fft(&self) -> Fft {
        Fft::new(self.n).expect("grid dimension is at least 2")
    }
}

/// Which basis a [`StateVector`]'s amplitudes refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Representation {
    Position,
    Momentum,
}

/// Complex amplitudes on a torus grid, tagged with their representation.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
    representation: Representation,
    grid: TorusGrid,
}

impl StateVector {
    /// Wraps raw amplitudes and rescales them to unit norm.
    pub fn normalized(
        mut amplitudes: Vec<Complex64>,
        representation: Representation,
        grid: TorusGrid,
    ) -> Result<Self> {
        if amplitudes.len() != grid.dim() {
            return Err(Error::DimensionMismatch {
                left: amplitudes.len(),
                right: grid.dim(),
            });
        }
        let norm = norm_sqr(&amplitudes).sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(invalid("amplitudes", "state must have finite nonzero norm"));
        }
        let inv = 1.0 / norm;
        amplitudes.iter_mut().for_each(|a| *a *= inv);
        Ok(Self {
            amplitudes,
            representation,
            grid,
        })
    }

    /// Basis state `|j⟩` of the given representation (`j` is a storage slot).
    pub fn basis(grid: TorusGrid, representation: Representation, j: usize) -> Result<Self> {
        let mut amps = alloc::vec![Complex64::new(0.0, 0.0); grid.dim()];
        let slot = amps
            .get_mut(j)
            .ok_or(invalid("j", "basis index outside the grid"))?;
        *slot = Complex64::new(1.0, 0.0);
        Ok(Self {
            amplitudes: amps,
            representation,
            grid,
        })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn representation(&self) -> Representation {
        self.representation
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn norm(&self) -> f64 {
        norm_sqr(&self.amplitudes).sqrt()
    }

    /// `|ψ_j|²` in the current representation.
    pub fn density(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn to_momentum(self) -> Result<Self> {
        let plan = self.grid.fft();
        self.to_momentum_with(&plan)
    }

    pub fn to_position(self) -> Result<Self> {
        let plan = self.grid.fft();
        self.to_position_with(&plan)
    }

    /// Position → momentum with a caller-owned plan.
    pub fn to_momentum_with(self, plan: &Fft) -> Result<Self> {
        self.transform(plan, Representation::Position, Representation::Momentum)
    }

    /// Momentum → position with a caller-owned plan.
    pub fn to_position_with(self, plan: &Fft) -> Result<Self> {
        self.transform(plan, Representation::Momentum, Representation::Position)
    }

    fn transform(mut self, plan: &Fft, from: Representation, to: Representation) -> Result<Self> {
        if self.representation != from {
            return Err(Error::Representation {
                expected: from,
                found: self.representation,
            });
        }
        if plan.len() != self.grid.dim() {
            return Err(Error::DimensionMismatch {
                left: plan.len(),
                right: self.grid.dim(),
            });
        }
        match to {
            Representation::Momentum => plan.forward(&mut self.amplitudes),
            Representation::Position => plan.inverse(&mut self.amplitudes),
        }
        let scale = 1.0 / (self.grid.dim() as f64).sqrt();
        self.amplitudes.iter_mut().for_each(|a| *a *= scale);
        self.representation = to;
        Ok(self)
    }
}

pub(crate) fn norm_sqr(amps: &[Complex64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum()
}

/// `⟨ψ|φ⟩ = Σ_j conj(ψ_j) φ_j`.
pub fn overlap(psi: &StateVector, phi: &StateVector) -> Result<Complex64> {
    if psi.grid.dim() != phi.grid.dim() {
        return Err(Error::DimensionMismatch {
            left: psi.grid.dim(),
            right: phi.grid.dim(),
        });
    }
    if psi.representation != phi.representation {
        return Err(Error::Representation {
            expected: psi.representation,
            found: phi.representation,
        });
    }
    Ok(inner(&psi.amplitudes, &phi.amplitudes))
}

pub(crate) fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter()
        .zip(b)
        .fold(Complex64::new(0.0, 0.0), |acc, (x, y)| acc + x.conj() * y)
}

/// Number of periodic images added on each side of the packet.
pub const PERIODIZATION_IMAGES: i64 = 3;

/// Center and width of a Gaussian wave packet on the torus.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GaussianPacketSpec {
    r0: f64,
    p0: f64,
    xi: f64,
}

impl GaussianPacketSpec {
    /// Center coordinates are reduced to `[0, 2π)`.
    pub fn new(r0: f64, p0: f64, xi: f64) -> Result<Self> {
        if !(r0.is_finite() && p0.is_finite()) {
            return Err(invalid("r0/p0", "packet center must be finite"));
        }
        if !(xi.is_finite() && xi > 0.0) {
            return Err(invalid("xi", "packet width must be positive"));
        }
        Ok(Self {
            r0: wrap_angle(r0),
            p0: wrap_angle(p0),
            xi,
        })
    }

    /// Coherent-state width `ξ = √ħ_eff`.
    pub fn coherent(r0: f64, p0: f64, grid: &TorusGrid) -> Result<Self> {
        Self::new(r0, p0, grid.hbar().sqrt())
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn p0(&self) -> f64 {
        self.p0
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    /// Momentum-space width `w_p = ħ/(√2 ξ)`.
    pub fn momentum_width(&self, hbar: f64) -> f64 {
        hbar / (core::f64::consts::SQRT_2 * self.xi)
    }

    /// A packet at least as wide as the torus is not localized.
    pub fn is_ill_conditioned(&self) -> bool {
        self.xi >= TAU
    }
}

/// Periodized Gaussian packet in the position representation, normalized.
///
/// `ψ(r_j) ∝ Σ_n exp[i p0 (r_j + 2πn)/ħ − (r_j + 2πn − r0)²/(2ξ²)]`,
/// summed over `|n| ≤ 3`. Since `r_j/ħ = j` and `2π/ħ = N`, the plane-wave
/// phase is `p0·(j + nN)`, which is what gets evaluated.
pub fn gaussian_packet(spec: &GaussianPacketSpec, grid: &TorusGrid) -> StateVector {
    if spec.is_ill_conditioned() {
        log::warn!(
            "packet width xi = {} is not smaller than the torus period",
            spec.xi
        );
    }
    let n = grid.dim();
    let two_xi2 = 2.0 * spec.xi * spec.xi;
    let amps: Vec<Complex64> = (0..n)
        .map(|j| {
            let r = grid.position(j);
            (-PERIODIZATION_IMAGES..=PERIODIZATION_IMAGES).fold(
                Complex64::new(0.0, 0.0),
                |acc, img| {
                    let x = r + TAU * img as f64;
                    let cycles = j as f64 + (img * n as i64) as f64;
                    let phase = wrap_angle(spec.p0 * cycles);
                    let envelope = (-(x - spec.r0).powi(2) / two_xi2).exp();
                    acc + Complex64::from_polar(envelope, phase)
                },
            )
        })
        .collect();
    StateVector::normalized(amps, Representation::Position, *grid)
        .expect("periodized Gaussian has a nonzero norm")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::PI;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use std::vec;

    fn random_state(grid: TorusGrid, seed: u64) -> StateVector {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let amps = (0..grid.dim())
            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        StateVector::normalized(amps, Representation::Position, grid).unwrap()
    }

    #[test]
    fn grid_constants() {
        let g = TorusGrid::new(64).unwrap();
        assert_relative_eq!(g.hbar(), 0.098_174_770_424_681, epsilon = 1e-12);
        let g = TorusGrid::new(1024).unwrap();
        assert_relative_eq!(g.hbar(), 6.135_923_151_542_565e-3, epsilon = 1e-15);
        assert!((g.hbar() * 1024.0 - TAU).abs() < 1e-14);
        assert!(TorusGrid::new(1).is_err());
        assert_eq!(TorusGrid::new(0), Err(Error::InvalidDimension(0)));
    }

    #[test]
    fn smallest_grid_has_centered_momenta() {
        let g = TorusGrid::new(2).unwrap();
        let mut idx: Vec<i64> = (0..2).map(|i| g.momentum_index(i)).collect();
        idx.sort();
        assert_eq!(idx, vec![-1, 0]);
    }

    #[test]
    fn sites_span_one_period() {
        for n in [2usize, 7, 64] {
            let g = TorusGrid::new(n).unwrap();
            let mut idx: Vec<i64> = (0..n).map(|i| g.momentum_index(i)).collect();
            idx.sort();
            let lo = -((n / 2) as i64);
            let expected: Vec<i64> = (lo..lo + n as i64).collect();
            assert_eq!(idx, expected);
            for i in 0..n {
                assert_eq!(g.momentum_slot(g.momentum_index(i)), i);
            }
            let r = g.r_sites();
            assert_eq!(r[0], 0.0);
            assert!((r[n - 1] + g.hbar() - TAU).abs() < 1e-14);
            let p = g.p_sites();
            let pmin = p.iter().cloned().fold(f64::INFINITY, f64::min);
            let pmax = p.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            assert!((pmax - pmin + g.hbar() - TAU).abs() < 1e-14);
        }
    }

    #[test]
    fn delta_transforms_to_flat_momentum() {
        let g = TorusGrid::new(16).unwrap();
        let psi = StateVector::basis(g, Representation::Position, 0).unwrap();
        let phi = psi.to_momentum().unwrap();
        for a in phi.amplitudes() {
            assert!((a.norm() - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn transform_rejects_wrong_representation() {
        let g = TorusGrid::new(8).unwrap();
        let psi = StateVector::basis(g, Representation::Momentum, 1).unwrap();
        assert!(matches!(
            psi.clone().to_momentum(),
            Err(Error::Representation { .. })
        ));
        assert!(psi.to_position().is_ok());
    }

    #[test]
    fn dft_unitarity_and_round_trip() {
        for n in [8usize, 64, 1024] {
            let g = TorusGrid::new(n).unwrap();
            let plan = g.fft();
            for s in 0..100 {
                let psi = random_state(g, 1000 * n as u64 + s);
                let phi = psi.clone().to_momentum_with(&plan).unwrap();
                assert!((phi.norm() - 1.0).abs() < 1e-12);
                let back = phi.to_position_with(&plan).unwrap();
                for (a, b) in back.amplitudes().iter().zip(psi.amplitudes()) {
                    assert!((a - b).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn overlap_basics() {
        let g = TorusGrid::new(32).unwrap();
        let psi = random_state(g, 3);
        let self_overlap = overlap(&psi, &psi).unwrap();
        assert!((self_overlap - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        let e0 = StateVector::basis(g, Representation::Position, 0).unwrap();
        let e1 = StateVector::basis(g, Representation::Position, 1).unwrap();
        assert_eq!(overlap(&e0, &e1).unwrap(), Complex64::new(0.0, 0.0));

        let phi = random_state(g, 4);
        let before = overlap(&psi, &phi).unwrap();
        let after = overlap(
            &psi.clone().to_momentum().unwrap(),
            &phi.clone().to_momentum().unwrap(),
        )
        .unwrap();
        assert!((before - after).norm() < 1e-12);
        assert!(before.norm() <= 1.0 + 1e-12);

        let other = random_state(TorusGrid::new(16).unwrap(), 5);
        assert!(matches!(
            overlap(&psi, &other),
            Err(Error::DimensionMismatch { .. })
        ));
        let mom = phi.to_momentum().unwrap();
        assert!(matches!(
            overlap(&psi, &mom),
            Err(Error::Representation { .. })
        ));
    }

    #[test]
    fn packet_is_symmetric_about_pi() {
        let g = TorusGrid::new(64).unwrap();
        let spec = GaussianPacketSpec::coherent(PI, 0.0, &g).unwrap();
        let d = gaussian_packet(&spec, &g).density();
        let peak = d.iter().cloned().fold(0.0, f64::max);
        for k in 1..32 {
            let asym = (d[32 + k] - d[32 - k]).abs() / peak;
            assert!(asym < 1e-10, "k={k} asym={asym}");
        }
    }

    #[test]
    fn packet_momentum_peak_matches_direct_momentum_gaussian() {
        // Oracle: the conjugate Gaussian built directly on the momentum grid,
        // |φ(p_l)|² ∝ Σ_n exp[-(p_l + 2πn - p0)² ξ²/ħ²].
        let g = TorusGrid::new(64).unwrap();
        let spec = GaussianPacketSpec::coherent(PI, PI, &g).unwrap();
        let mom = gaussian_packet(&spec, &g).to_momentum().unwrap();
        let d = mom.density();
        let xi = spec.xi();
        let h = g.hbar();
        let direct: Vec<f64> = (0..64)
            .map(|i| {
                let p = g.momentum(i);
                (-3i64..=3)
                    .map(|n| (-(p + TAU * n as f64 - PI).powi(2) * xi * xi / (h * h)).exp())
                    .sum()
            })
            .collect();
        let argmax = |v: &[f64]| {
            v.iter()
                .enumerate()
                .fold((0, f64::MIN), |b, (i, &x)| if x > b.1 { (i, x) } else { b })
                .0
        };
        assert_eq!(argmax(&d), 32);
        assert_eq!(argmax(&direct), 32);
        let total: f64 = direct.iter().sum();
        for (a, b) in d.iter().zip(&direct) {
            assert!((a - b / total).abs() < 1e-6);
        }
    }

    #[test]
    fn packet_width_and_validation() {
        assert!(GaussianPacketSpec::new(0.0, 0.0, 0.0).is_err());
        assert!(GaussianPacketSpec::new(0.0, 0.0, -1.0).is_err());
        assert!(GaussianPacketSpec::new(f64::NAN, 0.0, 1.0).is_err());
        let wide = GaussianPacketSpec::new(1.0, 1.0, 7.0).unwrap();
        assert!(wide.is_ill_conditioned());
        let g = TorusGrid::new(16).unwrap();
        assert!((gaussian_packet(&wide, &g).norm() - 1.0).abs() < 1e-12);
        let s = GaussianPacketSpec::new(-0.5, 7.0, 0.2).unwrap();
        assert!((0.0..TAU).contains(&s.r0()) && (0.0..TAU).contains(&s.p0()));
        assert_relative_eq!(s.momentum_width(0.1), 0.1 / (2f64.sqrt() * 0.2));
    }

    #[test]
    fn packet_circular_mean_sits_at_center() {
        let g = TorusGrid::new(1024).unwrap();
        for &(r0, xi) in &[(1.0, 0.05), (5.9, 0.3), (0.1, PI / 4.0), (3.0, g.hbar().sqrt())] {
            let spec = GaussianPacketSpec::new(r0, 2.0, xi).unwrap();
            let d = gaussian_packet(&spec, &g).density();
            let (s, c) = d.iter().enumerate().fold((0.0, 0.0), |(s, c), (j, &w)| {
                let r = g.position(j);
                (s + w * r.sin(), c + w * r.cos())
            });
            let mean = wrap_angle(s.atan2(c));
            let mut err = (mean - r0).abs();
            err = err.min(TAU - err);
            assert!(err < 0.02 * xi, "r0={r0} xi={xi} mean={mean}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn any_packet_is_normalized(r0 in 0.0..TAU, p0 in 0.0..TAU, xi in 0.01f64..3.0, n in 2usize..300) {
            let g = TorusGrid::new(n).unwrap();
            let spec = GaussianPacketSpec::new(r0, p0, xi).unwrap();
            let psi = gaussian_packet(&spec, &g);
            prop_assert!((psi.norm() - 1.0).abs() < 1e-12);
        }
    }
}
