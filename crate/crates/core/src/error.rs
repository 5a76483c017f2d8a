use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("pole of the Gamma function at x = {0}")]
    GammaPole(f64),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("invalid fractional parameters: {0}")]
    InvalidParams(String),

    #[error("invalid quadrature configuration: {0}")]
    InvalidConfig(String),

    #[error("field cannot be evaluated at the requested point: {0}")]
    FieldDomain(String),

    #[error("field spec could not be parsed: {0}")]
    FieldSpec(String),

    #[error("grid geometry mismatch: {0}")]
    GeometryMismatch(String),

    #[error("support violation: {0}")]
    SupportViolation(String),

    #[error("quadrature budget exceeded: {0}")]
    Budget(String),

    #[error("duplicate index {0} in partial fraction set")]
    DuplicateIndex(u64),
}

pub type Result<T> = std::result::Result<T, Error>;
