use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature could not meet its tolerance within the depth limit.
    #[error(
        "quadrature did not converge on [{lower}, {upper}]: error estimate {estimate:e} exceeds tolerance {tolerance:e}"
    )]
    NonConvergence {
        lower: f64,
        upper: f64,
        estimate: f64,
        tolerance: f64,
    },

    /// A root-finding bracket does not enclose a sign change.
    #[error("no sign change on [{lower}, {upper}]: margins {margin_lower:.6e} and {margin_upper:.6e}")]
    Bracket {
        lower: f64,
        upper: f64,
        margin_lower: f64,
        margin_upper: f64,
    },

    /// The request exceeds a configured memory or size budget.
    #[error("resource limit: {0}")]
    Resource(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
