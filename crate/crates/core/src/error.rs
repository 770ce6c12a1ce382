use thiserror::Error;

/// Errors raised by the analytic and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error(
        "series did not converge after {terms} terms (partial sum {partial_sum:e}, last term {last_term:e})"
    )]
    NonConvergence {
        partial_sum: f64,
        last_term: f64,
        terms: usize,
    },

    #[error(
        "series lost precision to cancellation (partial sum {partial_sum:e}, estimated rounding error {rounding_error:e})"
    )]
    PrecisionLoss {
        partial_sum: f64,
        rounding_error: f64,
    },

    #[error("capability error: {0}")]
    Capability(String),

    #[error("no positive root: mgf sum at zero is {at_zero} but the target is {target}")]
    NoRoot { at_zero: f64, target: f64 },

    #[error("root lies beyond the claim mgf domain bound {bound}")]
    BeyondMgfDomain { bound: f64 },

    #[error("estimation error: {0}")]
    Estimation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn capability(msg: impl Into<String>) -> Self {
        Error::Capability(msg.into())
    }
}
