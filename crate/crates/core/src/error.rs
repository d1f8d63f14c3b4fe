use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    #[error("direction is not a unit vector: norm = {norm}")]
    NonUnitDirection { norm: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("local dimension must be at least 2, got {0}")]
    LocalDimension(usize),

    #[error("wrong amplitude count: expected {expected} entries for local_dim = {local_dim}, found {found}")]
    AmplitudeCount {
        local_dim: usize,
        expected: usize,
        found: usize,
    },

    #[error("state invariant violated: {0}")]
    Invariant(String),

    #[error("value outside domain: {0}")]
    Domain(String),

    #[error("invalid qudit generator: {0}")]
    Generator(String),

    #[error("imaginary residue {residue:e} in a real expectation value")]
    ImaginaryResidue { residue: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
