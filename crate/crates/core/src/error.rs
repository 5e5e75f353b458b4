use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("matrix is singular (smallest singular value {0:e})")]
    SingularInput(f64),

    #[error("operator is not positive semidefinite (minimum eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("product vectors do not sum to a projector (residual {0:e})")]
    NotAProjector(f64),

    #[error("degenerate parameters: {0}")]
    DegenerateParameters(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("not a witness: {0}")]
    NotAWitness(String),

    #[error("invalid state: {0}")]
    InvalidState(String),
}

pub type Result<T> = std::result::Result<T, Error>;
