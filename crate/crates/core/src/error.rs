use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("singular matrix: pivot below {threshold:e} of row scale at step {step}")]
    SingularMatrix { step: usize, threshold: f64 },

    #[error("first row does not induce a unitary matrix (residual {residual:e})")]
    NonUnitaryRow { residual: f64 },

    #[error("matrix is not unitary (residual {residual:e})")]
    NonUnitaryMatrix { residual: f64 },

    #[error("parameter constraint violated: {0}")]
    ConstraintViolation(String),

    #[error("eigenvector index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("operation requires a circulant coupling")]
    NonCirculantCoupling,

    #[error("bound diverges at interval endpoint mu = {mu}")]
    EndpointDivergence { mu: f64 },

    #[error("momentum {k} lies in a spectral gap: empty contour")]
    MomentumInGap { k: f64 },

    #[error("evaluation at the eta pole k = -1")]
    EtaPole,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
