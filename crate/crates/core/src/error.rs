use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("not Hermitian (max |m - m^dagger| = {0:e})")]
    NotHermitian(f64),

    #[error("eigensolver did not converge after {0} iterations")]
    NoConvergence(usize),

    #[error("negative eigenvalue {0:e} below clipping threshold")]
    Domain(f64),

    /// A state, POVM, ensemble or channel failed one of its invariants.
    #[error("invariant `{invariant}` violated: {detail}")]
    Invariant {
        invariant: &'static str,
        detail: String,
    },

    #[error("rank {rank} out of range for dimension {dim}")]
    BadRank { rank: usize, dim: usize },

    #[error("POVM total operator is singular (min eigenvalue {0:e})")]
    SingularTotal(f64),

    #[error("bad partition: {0}")]
    BadPartition(String),

    #[error("invalid exponent: {0}")]
    InvalidExponent(String),

    #[error("POVM element {0} is not rank 1")]
    NotRank1(usize),

    #[error("basis vectors are not orthonormal (deviation {0:e})")]
    NotOrthonormal(f64),

    #[error("state is not pure (purity {0})")]
    NotPure(f64),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invariant(invariant: &'static str, detail: impl Into<String>) -> Self {
        Error::Invariant {
            invariant,
            detail: detail.into(),
        }
    }

    pub(crate) fn dims(detail: impl Into<String>) -> Self {
        Error::DimensionMismatch(detail.into())
    }
}
