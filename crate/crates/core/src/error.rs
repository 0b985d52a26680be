use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("quaternion {0} is real and lies on every slice; pass a slice explicitly")]
    RealInput(String),
    #[error("imaginary units are not orthogonal (inner product {0:e})")]
    NonOrthogonalUnits(f64),
    #[error("operands live on different slices")]
    SliceMismatch,
    #[error("series did not reach tolerance {tol:e} within {terms} terms")]
    NoConvergenceBudget { tol: f64, terms: usize },
    #[error("quadrature rule ({radial} radial x {angular} angular) cannot integrate degree {degree} exactly")]
    InsufficientRule {
        radial: usize,
        angular: usize,
        degree: usize,
    },
    #[error("symbol is not a finite affine map: {0}")]
    NotAffine(String),
    #[error("expected a unimodular scalar, got modulus {0}")]
    NotUnimodular(f64),
    #[error("invalid conjugation parameters: {0}")]
    InvalidParams(String),
    #[error("symbol is constant")]
    ConstantSymbol,
    #[error("unsupported parameters: {0}")]
    UnsupportedParams(String),
    #[error("operator is unbounded: {0}")]
    UnboundedOperator(String),
    #[error("no admissible phase for the second weight constant: {0}")]
    PhaseConditionUnsatisfiable(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
