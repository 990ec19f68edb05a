use thiserror::Error;

use crate::units::Dimension;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {from:?} cannot be combined with {to:?}")]
    DimensionMismatch { from: Dimension, to: Dimension },

    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("index {index} out of range for {len} mass eigenstates")]
    IndexOutOfRange { index: usize, len: usize },

    #[error(
        "mixing matrix is not unitary: |(U^T U - I)[{row}][{col}]| = {deviation:e} exceeds 1e-12"
    )]
    NotUnitary {
        row: usize,
        col: usize,
        deviation: f64,
    },

    #[error("mixing matrix has non-zero imaginary part at [{row}][{col}]; only real mixing is supported")]
    ComplexMixing { row: usize, col: usize },

    #[error(
        "linear damping requires xi*t <= 1 (perturbative bound), got xi*t = {xi_t:e} for pair ({j}, {k})"
    )]
    PerturbativeBound { j: usize, k: usize, xi_t: f64 },

    #[error("unknown scattering channel `{0}`")]
    UnknownChannel(String),

    #[error(
        "quadrature did not converge: estimate {estimate:e}, error {error:e} after {intervals} subintervals"
    )]
    QuadratureNotConverged {
        estimate: f64,
        error: f64,
        intervals: usize,
    },

    #[error("non-finite phase accumulated on path {path}")]
    NonFinitePath { path: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidArgument {
        name,
        reason: reason.into(),
    }
}

pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(invalid(
            name,
            format!("must be finite and > 0, got {value}"),
        ))
    }
}

pub(crate) fn require_non_negative(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(invalid(
            name,
            format!("must be finite and >= 0, got {value}"),
        ))
    }
}
