use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("singular point: {0}")]
    Singular(String),
    #[error("evaluation failed: {0}")]
    Evaluation(String),
    #[error("sampling failed: {0}")]
    Sampling(String),
    #[error("Newton iteration did not converge at t = {t} (residual {residual:e})")]
    NoConvergence { t: f64, residual: f64 },
    #[error("trajectory entered an excluded set at t = {t}: {what}")]
    Excluded { t: f64, what: String },
    #[error("trajectory is not closed (gap {0:e})")]
    NotClosed(f64),
    #[error("no return to the section within the horizon")]
    NoReturn,
    #[error("grid refinement needed: {0}")]
    RefinementNeeded(String),
    #[error("malformed input: {0}")]
    Input(String),
}

impl Error {
    /// True for failures of the numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Evaluation(_)
                | Error::Sampling(_)
                | Error::NoConvergence { .. }
                | Error::Excluded { .. }
                | Error::NoReturn
                | Error::RefinementNeeded(_)
                | Error::Singular(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
