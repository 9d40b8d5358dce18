use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// Magnitudes are reported as `f64` regardless of the scalar type in use.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max |m - m^H| = {deviation:e} exceeds {tol:e}")]
    NotHermitian { deviation: f64, tol: f64 },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("negative eigenvalue {value:e} below -{cutoff:e}")]
    NegativeEigenvalue { value: f64, cutoff: f64 },

    #[error("not positive semidefinite: minimum eigenvalue {min_eigenvalue:e} below -{tol:e}")]
    NotPositive { min_eigenvalue: f64, tol: f64 },

    #[error("trace is {trace}, expected 1 within {tol:e}")]
    TraceNotOne { trace: f64, tol: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("index {index} out of range for bound {bound}")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("rank {rank} must lie in 1..={dim}")]
    BadRank { rank: usize, dim: usize },

    #[error("matrix is not unitary: ||U^H U - I||_max = {deviation:e}")]
    NotUnitary { deviation: f64 },

    #[error("not an isometry: ||V^H V - I||_max = {deviation:e}")]
    NotIsometry { deviation: f64 },

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("POVM effect {index} has rank {rank}, expected at most 1")]
    NotRankOne { index: usize, rank: usize },

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("diagonal entry ({0}, {0}) is not part of a conjugate pair")]
    DiagonalForbidden(usize),

    #[error("operation requires subsystem A of dimension {expected}, found {found}")]
    WrongDimension { expected: usize, found: usize },

    #[error("bad configuration: {0}")]
    BadConfig(String),

    #[error("ensemble is not at mutual-information equality: row {index} residual {residual:e} exceeds {tol:e}")]
    NotAtEquality { index: usize, residual: f64, tol: f64 },

    #[error("certificate inconsistent at indices ({a}, {b}): {reason}")]
    CertificateInconsistent { a: usize, b: usize, reason: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn dim_mismatch(expected: impl ToString, found: impl ToString) -> Error {
    Error::DimensionMismatch {
        expected: expected.to_string(),
        found: found.to_string(),
    }
}
