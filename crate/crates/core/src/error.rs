//! Error type shared by all modules.

use alloc::string::String;
use core::fmt;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

/// Validation and computation failures.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A qubit or state failed its normalization invariant.
    NotNormalized { norm_sqr: f64 },
    /// Two path arguments that must differ were equal.
    DuplicatePath(String),
    /// Tensor factors occupy a common spatial path.
    OverlappingPaths(String),
    /// A mode matrix is not unitary within tolerance.
    NotUnitary { deviation: f64 },
    /// Matrix entries do not match the declared mode count.
    DimensionMismatch { modes: usize, entries: usize },
    /// A click pattern references a detector that was not supplied.
    UnknownDetector(String),
    /// A detector monitors no modes.
    EmptyDetector(String),
    /// The state has no single-photon component on the requested path.
    NoSinglePhoton(String),
    /// A 2x2 matrix is not a valid density matrix.
    InvalidDensityMatrix(&'static str),
    /// A numeric parameter is outside its allowed range.
    OutOfRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },
    /// Not enough data points (or insufficient span) for a fit.
    InsufficientData(&'static str),
    /// A calibration target cannot be bracketed by the overlap parameter.
    CalibrationOutOfReach { target: f64, lo: f64, hi: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotNormalized { norm_sqr } => {
                write!(f, "state not normalized: |amplitude|^2 sums to {norm_sqr}")
            }
            Error::DuplicatePath(p) => write!(f, "path '{p}' used more than once"),
            Error::OverlappingPaths(p) => {
                write!(f, "tensor factors both occupy path '{p}'")
            }
            Error::NotUnitary { deviation } => {
                write!(f, "mode matrix not unitary: max |M M' - I| = {deviation:e}")
            }
            Error::DimensionMismatch { modes, entries } => {
                write!(f, "{entries} entries do not form a square matrix over {modes} modes")
            }
            Error::UnknownDetector(id) => write!(f, "unknown detector id '{id}'"),
            Error::EmptyDetector(id) => write!(f, "detector '{id}' monitors no modes"),
            Error::NoSinglePhoton(path) => {
                write!(f, "no single-photon component on path '{path}'")
            }
            Error::InvalidDensityMatrix(why) => write!(f, "invalid density matrix: {why}"),
            Error::OutOfRange { name, value, min, max } => {
                write!(f, "{name} = {value} outside [{min}, {max}]")
            }
            Error::InsufficientData(why) => write!(f, "insufficient data: {why}"),
            Error::CalibrationOutOfReach { target, lo, hi } => {
                write!(f, "target {target} not reachable: overlap sweep spans [{lo}, {hi}]")
            }
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn check_range(name: &'static str, value: f64, min: f64, max: f64) -> Result<f64> {
    if value.is_finite() && value >= min && value <= max {
        Ok(value)
    } else {
        Err(Error::OutOfRange { name, value, min, max })
    }
}
