//! Error type shared by every module of the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument fell outside the domain of the operation.
    #[error("{function}: {message}")]
    Domain {
        function: &'static str,
        message: String,
    },

    /// Parameters make the distribution degenerate (zero or negative
    /// normalizing constant).
    #[error("degenerate parameters: {0}")]
    Degenerate(String),

    /// An iterative routine hit its iteration cap before reaching its
    /// tolerance.
    #[error("{function} did not converge within {max_iter} iterations")]
    NonConvergence {
        function: &'static str,
        max_iter: usize,
    },

    /// The observed information matrix could not be inverted.
    #[error("observed information matrix is singular")]
    SingularInformation,

    /// Inconsistent vector or matrix dimensions.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Responses outside the open unit interval.
    #[error("response values outside (0, 1) at rows {rows:?}")]
    InvalidResponse { rows: Vec<usize> },

    /// The rejection sampler exhausted its proposal budget for one variate.
    #[error("rejection sampler exceeded {cap} proposals for a single draw")]
    SamplerCap { cap: usize },
}

impl Error {
    pub(crate) fn domain(function: &'static str, message: impl Into<String>) -> Self {
        Error::Domain {
            function,
            message: message.into(),
        }
    }
}
