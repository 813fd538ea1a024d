use thiserror::Error;

/// Errors produced by the matrix kernels and the algebra-level routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix data length {got} does not match {rows}x{cols}")]
    BadShape { rows: usize, cols: usize, got: usize },

    #[error("matrix entry at ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },

    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is numerically singular (pivot {pivot:.3e} below cutoff {cutoff:.3e})")]
    Singular { pivot: f64, cutoff: f64 },

    #[error("{algorithm} did not converge")]
    NoConvergence { algorithm: &'static str },

    #[error("matrix exponential overflow: 1-norm {norm:.3e} exceeds scaling capacity")]
    ExpOverflow { norm: f64 },

    #[error("element is not positive: {criterion}")]
    NotPositive { criterion: String },

    #[error("invalid tolerance: {0}")]
    BadTolerance(String),

    #[error("invalid norm context: {0}")]
    BadNormContext(String),

    #[error("group inverse does not exist: rank(a^2) = {rank_sq} < rank(a) = {rank}")]
    GroupInverseAbsent { rank: usize, rank_sq: usize },

    #[error("idempotent witness invalid: {0}")]
    BadWitness(String),

    #[error("element is not weighted EP (commutator residual {residual:.3e})")]
    NotWeightedEp { residual: f64 },

    #[error("corner element not invertible in the corner algebra")]
    CornerSingular,

    #[error("hermitian precondition failed in the {algebra} weighted algebra (deviation {deviation:.3e})")]
    NotHermitianWeighted { algebra: &'static str, deviation: f64 },

    #[error("verification failed: {0}")]
    VerificationFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
