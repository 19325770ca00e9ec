use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("both polynomials have degree zero in `{0}`")]
    ZeroDegree(String),
    #[error("polynomial vanishes at interval endpoint {0}")]
    EndpointRoot(String),
    #[error("resource cap exceeded: {0}")]
    ResourceExhausted(String),
    #[error("variable lists differ: {0}")]
    VariableMismatch(String),
    #[error("division is not exact")]
    NotExact,
    #[error("parse error: {0}")]
    Parse(String),
}
