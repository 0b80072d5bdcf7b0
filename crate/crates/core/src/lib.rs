//! Loschmidt echo laboratory: exact quantum echoes in torus-quantized kicked
//! maps and in the transverse-field Ising chain, together with the classical
//! and free-fermion quantities that feed their semiclassical predictions.
//!
//! The crate is `no_std` and only needs an allocator. Everything here is
//! synchronous and deterministic; parallel drivers, file formats and the
//! command-line runner live in the `echolab` companion crate.
//!
//! Module map:
//!
//! * [`torus`]: Hilbert space on the unit torus, representation transforms and
//!   periodized Gaussian packets.
//! * [`maps`]: Floquet operators of the quantized sawtooth and kicked-rotator
//!   maps and exact echo time series.
//! * [`classical`]: the classical maps, tangent dynamics, finite-time stretching
//!   rates, potential autocorrelations and action-difference statistics.
//! * [`semiclassics`]: closed-form echo predictions for every decay regime.
//! * [`ising`]: free-fermion echo (survival probability) of the Ising chain.
//! * [`analysis`]: decay fits, the deviation metric, transition detection.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod classical;
mod error;
pub mod fft;
pub mod ising;
pub mod maps;
pub mod rng;
pub mod semiclassics;
pub mod series;
pub mod stats;
pub mod torus;

pub use error::{Error, Result};
pub use series::EchoSeries;

/// Library version stamped into every output header.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub(crate) use core::f64::consts::{PI, TAU};

/// Reduces an angle to `[0, 2π)`.
#[inline]
pub fn wrap_angle(x: f64) -> f64 {
    #[allow(unused_imports)] // inherent f64 methods win when std is linked
    use num_traits::Float;
    let y = x - TAU * (x / TAU).floor();
    // floor can leave y == TAU for tiny negative x
    if y >= TAU || y < 0.0 {
        0.0
    } else {
        y
    }
}
