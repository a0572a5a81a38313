use thiserror::Error;

/// Coarse failure classes, used by front-ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Parse,
    Domain,
    Truncation,
    Cap,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("elements belong to different fields (d={0} vs d={1})")]
    FieldMismatch(u64, u64),
    #[error("d={0} is not a positive square-free integer")]
    InvalidField(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("matrix is singular")]
    Singular,
    #[error("W is not in the type-I domain: lambda_min(Y) = {lambda_min:e} (tolerance {tol:e})")]
    NotInDomain { lambda_min: f64, tol: f64 },
    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(String),
    #[error("matrix is not Hermitian/symmetric: {0}")]
    NotHermitian(String),
    #[error("not a sublattice: {0}")]
    NotSublattice(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("truncation failed: radius {needed} exceeds max_radius {max_radius} for eps {eps:e}")]
    Truncation { needed: u64, max_radius: u64, eps: f64 },
    #[error("size cap exceeded: {what} = {value} > {cap}")]
    CapExceeded { what: &'static str, value: u128, cap: u128 },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Parse(_) => ErrorKind::Parse,
            Error::Truncation { .. } => ErrorKind::Truncation,
            Error::CapExceeded { .. } => ErrorKind::Cap,
            _ => ErrorKind::Domain,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
