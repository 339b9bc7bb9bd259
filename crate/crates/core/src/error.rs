//! Error type shared by every module in the crate.

use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An input violated a domain constraint (non-positive frequency,
    /// negative loss rate, pole argument, ...).
    Domain(String),
    /// Transmon level index outside the configured ladder.
    LevelIndex { index: usize, levels: usize },
    /// Mode table failed validation.
    ModeSet(String),
    /// Array length or matrix dimension mismatch.
    Shape { expected: usize, got: usize },
    /// Matrix handed to the eigensolver is not symmetric.
    NotSymmetric { max_asymmetry: f64 },
    /// Jacobi sweeps exhausted before the off-diagonal norm converged.
    NoConvergence { sweeps: usize },
    /// A dressed state could not be assigned to a bare label: the best
    /// overlap fell below 1/2 near a degeneracy.
    AmbiguousLabel {
        phonons: usize,
        level: usize,
        overlap: f64,
    },
    /// Least-squares design matrix is rank deficient.
    RankDeficient,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::LevelIndex { index, levels } => {
                write!(f, "level index {index} out of range (levels = {levels})")
            }
            Error::ModeSet(msg) => write!(f, "invalid mode set: {msg}"),
            Error::Shape { expected, got } => {
                write!(f, "shape mismatch: expected {expected}, got {got}")
            }
            Error::NotSymmetric { max_asymmetry } => {
                write!(f, "matrix is not symmetric (max asymmetry {max_asymmetry:e})")
            }
            Error::NoConvergence { sweeps } => {
                write!(f, "eigensolver did not converge in {sweeps} sweeps")
            }
            Error::AmbiguousLabel {
                phonons,
                level,
                overlap,
            } => write!(
                f,
                "ambiguous dressed label ({phonons} phonons, level {level}): overlap {overlap:.3} < 0.5"
            ),
            Error::RankDeficient => write!(f, "rank-deficient least-squares system"),
        }
    }
}

impl core::error::Error for Error {}
