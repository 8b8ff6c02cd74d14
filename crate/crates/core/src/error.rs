use thiserror::Error;

/// Errors raised by the numerics in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A solver or quadrature failed to meet its tolerance.
    #[error("numerical error: {message}")]
    Numerical {
        message: String,
        /// Last error estimate (or last two estimates' difference) when available.
        estimate: Option<f64>,
    },

    /// A solver configuration was rejected before any work was done.
    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>, estimate: Option<f64>) -> Self {
        Error::Numerical {
            message: msg.into(),
            estimate,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
