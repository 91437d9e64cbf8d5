use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of a function (e.g. `E_1(x)` for `x <= 0`).
    #[error("domain error: {0}")]
    Domain(String),

    /// A documented precondition of an operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A quadrature or iteration failed to reach its tolerance within the refinement budget.
    #[error("no convergence: {what} (estimated error {estimate:e}, tolerance {tol:e})")]
    NonConvergence { what: String, estimate: f64, tol: f64 },

    /// A profile, control or coefficient vector violates its representation invariants.
    #[error("invalid {kind}: {reason}")]
    Invalid { kind: &'static str, reason: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn invalid(kind: &'static str, reason: impl Into<String>) -> Self {
        Error::Invalid { kind, reason: reason.into() }
    }

    pub(crate) fn precondition(reason: impl Into<String>) -> Self {
        Error::Precondition(reason.into())
    }
}
