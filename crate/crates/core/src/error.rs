use thiserror::Error;

/// Errors returned by the state constructors, criteria and checks in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("local dimension must be at least 2 (got {0})")]
    Dimension(usize),

    #[error("matrix is not Hermitian (residual {0:e})")]
    NotHermitian(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("non-finite matrix entry at ({0}, {1})")]
    NonFinite(usize, usize),

    #[error("invalid state: {}", .0.join("; "))]
    InvalidState(Vec<String>),

    #[error("state is not in the symmetric family: entry ({row}, {col}) = {value} (expected {expected})")]
    NotInFamily {
        row: usize,
        col: usize,
        value: String,
        expected: String,
    },

    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;
