use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain the routine supports.
    #[error("domain error in {function}: {detail}")]
    Domain {
        function: &'static str,
        detail: String,
    },

    /// An iterative or adaptive routine stopped before reaching its tolerance.
    /// `best_estimate` is the value it had when it gave up.
    #[error("{routine} did not converge after {iterations} steps (best estimate {best_estimate:e}, error estimate {error_estimate:e})")]
    Convergence {
        routine: &'static str,
        best_estimate: f64,
        error_estimate: f64,
        iterations: usize,
    },

    /// Invalid or inconsistent configuration.
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn domain(function: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            function,
            detail: detail.into(),
        }
    }

    pub(crate) fn config(detail: impl Into<String>) -> Self {
        Error::Config(detail.into())
    }

    /// Best estimate carried by a convergence failure, if any.
    pub fn best_estimate(&self) -> Option<f64> {
        match self {
            Error::Convergence { best_estimate, .. } => Some(*best_estimate),
            _ => None,
        }
    }
}
