//! Crate-wide error type for the analytic layer.
//!
//! The exact algebra layer is total and does not produce errors; everything
//! here concerns discretization and analytic preconditions.

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("operator is not Hermitian (relative asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },

    #[error("operator spectrum dips below zero (min eigenvalue {min_eig:.3e})")]
    NotPositiveSemidefinite { min_eig: f64 },

    #[error("shift {shift:.4} exceeds half the grid window {half:.4}; enlarge the grid")]
    ShiftOutOfRange { shift: f64, half: f64 },

    #[error("representation parameter lambda must be nonzero")]
    LambdaZero,

    #[error("symbol fails the integrability budget (magnitude estimate {estimate:.3e})")]
    NotIntegrable { estimate: f64 },

    #[error("grids are incompatible: {0}")]
    GridMismatch(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
