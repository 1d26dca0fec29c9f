use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not antisymmetric: {0}")]
    NotAntisymmetric(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("flux is not quantized: {0}")]
    NotQuantized(String),
    #[error("elements belong to different group contexts")]
    ContextMismatch,
    #[error("states carry different representation labels")]
    RepLabelMismatch,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("numerical mismatch: {0}")]
    NumericalMismatch(String),
    #[error("did not converge: {0}")]
    NonConvergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
