use thiserror::Error;

/// Errors surfaced by every fallible operation in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller passed a value outside the operation's domain.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// Model parameters or an experiment configuration failed validation.
    #[error("invalid configuration: {0}")]
    Validation(String),

    /// The enumerated state space would exceed the configured cap.
    #[error("state space of dimension {dim} exceeds the cap of {cap}")]
    DimensionOverflow { dim: usize, cap: usize },

    /// An iterative method or ODE integrator did not reach its tolerance.
    #[error("{method} did not converge: {detail}")]
    NonConvergence {
        method: &'static str,
        detail: String,
    },

    /// The branching simulation hit its population guard.
    #[error("population exceeded {limit} individuals at time {time:.6}")]
    Explosion { limit: usize, time: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    /// True for failures of numerics rather than of inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NonConvergence { .. } | Error::Explosion { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
