use thiserror::Error;

/// Failures raised by the numerical pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square or empty: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("eigenvalue {index} has imaginary part {imag:e}, above tolerance {tol:e}")]
    NonRealSpectrum { index: usize, imag: f64, tol: f64 },

    #[error("eigenvalue gap {gap:e} is below the simplicity threshold {tol:e}")]
    DegenerateSpectrum { gap: f64, tol: f64 },

    #[error("eigenvector matrix is numerically singular: {0}")]
    NotDiagonalizable(String),

    #[error("eigenvalue iteration did not converge")]
    EigenSolveFailed,

    #[error("Gram matrix is not positive definite")]
    GramNotPositiveDefinite,

    #[error("Gram matrix violates an invariant: {0}")]
    InvalidGram(String),

    #[error("characteristic vector leaves the cone: min alpha = {min_alpha}")]
    OutsideCone { min_alpha: f64 },

    #[error("characteristic vector is not interior: min alpha = {min_alpha}")]
    NotInterior { min_alpha: f64 },

    #[error("Euler-Lagrange system is numerically singular")]
    SingularSystem,

    #[error("oracle stopped after {iterations} iterations with KKT residual {kkt_residual:e}")]
    NotConverged { iterations: usize, kkt_residual: f64 },

    #[error("vectors are not linearly independent (|<phi1, phi2>| = {overlap})")]
    DegenerateVectors { overlap: f64 },

    #[error("random instance rejected {attempts} times for conditioning")]
    ResamplesExhausted { attempts: usize },

    #[error("index {index} exceeds truncation order {truncation}")]
    IndexOutOfTruncation { index: usize, truncation: usize },

    #[error("beta = {0} is outside (0, 1/2)")]
    BetaOutOfRange(f64),

    #[error("beta = {0} is too close to a nonzero integer (Jordan block)")]
    IntegerBeta(f64),

    #[error("beta = {0} is too close to an odd integer (tan pole)")]
    TanPole(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
