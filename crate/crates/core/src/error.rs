use alloc::string::String;

/// Errors raised by the spectral inference routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A scalar argument fell outside its admissible range.
    #[error("{name} = {value} is outside {expected}")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    /// An integer or structural argument is invalid.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("autoregressive polynomial has a root on or inside the unit circle")]
    NonCausal,

    #[error("moving-average polynomial has a root on or inside the unit circle")]
    NonInvertible,

    #[error("innovation variance must be positive and finite, got {0}")]
    InnovationVariance(f64),

    /// A spectral density evaluated to a non-positive or non-finite value.
    #[error("spectral density {value} at omega = {omega} is not strictly positive and finite")]
    NonPositiveSpectrum { omega: f64, value: f64 },

    /// Cholesky (or Levinson) pivot failure; `pivot` is the offending squared pivot.
    #[error("matrix is not numerically positive definite: pivot {index} = {pivot:e}")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    /// A variance matrix has an eigenvalue too negative to be clipped.
    #[error("variance matrix is not positive semi-definite: eigenvalue {eigenvalue:e} (trace {trace:e})")]
    NotPsd { eigenvalue: f64, trace: f64 },

    /// The forecast variance of one dataset block could not be inverted.
    #[error("variance of dataset {dataset} is singular after ridge regularisation")]
    SingularDataVariance { dataset: usize },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    /// A principal component carries no variance relative to the leading one.
    #[error("component {component} is numerically null (eigenvalue {eigenvalue:e}, leading {leading:e})")]
    NullComponent {
        component: usize,
        eigenvalue: f64,
        leading: f64,
    },

    #[error("functional evaluation failed at quadrature node {node}")]
    FunctionalFailure { node: usize },

    #[error("log-spectrum is not finite at omega = {omega}")]
    NonFiniteLogSpectrum { omega: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
