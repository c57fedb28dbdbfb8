use thiserror::Error;

use crate::network::ValidationReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid network parameters: {0}")]
    InvalidNetwork(ValidationReport),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("pathloss exponent {alpha} is outside the modeled range (2, {max}]")]
    ExponentOutOfRange { alpha: f64, max: f64 },

    #[error("quadrature did not reach tolerance {tolerance:e} within {evaluations} evaluations (error estimate {estimate:e})")]
    NonConvergence {
        tolerance: f64,
        estimate: f64,
        evaluations: usize,
    },

    #[error("no interior minimum: APC is monotonically decreasing for epsilon = {epsilon} <= 0")]
    NoMinimum { epsilon: f64 },

    #[error("no base station inside the simulation window")]
    EmptyWindow,

    #[error("objective still improving at the bracket cap {cap}")]
    BracketFailure { cap: f64 },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
