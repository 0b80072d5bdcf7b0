use crate::torus::Representation;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid Hilbert-space dimension {0} (need N >= 2)")]
    InvalidDimension(usize),

    #[error("state is in the {found:?} representation, expected {expected:?}")]
    Representation {
        expected: Representation,
        found: Representation,
    },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },

    #[error("cannot interpolate at t = {0}: outside the tabulated range")]
    Interpolation(f64),

    #[error("invalid window [{start}, {end}]: {reason}")]
    Window {
        start: f64,
        end: f64,
        reason: &'static str,
    },

    #[error("histogram bin width {bin_width} exceeds hbar = {hbar}; the phase e^(i dS/hbar) would alias")]
    Aliasing { bin_width: f64, hbar: f64 },

    #[error("undefined: {0}")]
    Undefined(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: &'static str) -> Error {
    Error::InvalidParameter { name, reason }
}
