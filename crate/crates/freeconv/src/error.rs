use thiserror::Error;

/// Errors surfaced by measure construction, transform evaluation and the
/// semigroup operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
    #[error("parameter out of domain: {0}")]
    ParamDomain(String),
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("moment undefined: {0}")]
    MomentUndefined(String),
    #[error("moments are not available for transform-only representations")]
    MomentUnavailable,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("inversion failed: residual {residual:.3e} after {iterations} iterations")]
    NonConvergence { residual: f64, iterations: usize },
    #[error("fixed-point iteration failed: {0}")]
    FixedPoint(String),
    #[error("unsupported power: {0}")]
    UnsupportedPower(String),
    #[error("measure is not multiplicatively Boolean infinitely divisible: {0}")]
    NotBooleanMultId(String),
    #[error("boundary branch: {0}")]
    BoundaryBranch(String),
    #[error("ambiguous argument: first moment vanishes for a non-Haar measure")]
    AmbiguousArgument,
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("incompatible measure/space pair: {0}")]
    Incompatible(String),
    #[error("measure spec: {0}")]
    Spec(String),
}

pub type Result<T> = std::result::Result<T, Error>;
