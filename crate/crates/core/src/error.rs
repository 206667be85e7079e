use thiserror::Error;

/// Errors raised by the learning pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An input lies outside the domain of the log/exp maps.
    #[error("domain error: {0}")]
    Domain(String),
    /// Demonstrations cannot be brought into a common hemisphere.
    #[error("alignment error: {0}")]
    Alignment(String),
    /// Expectation-maximization failed.
    #[error("fit error: {0}")]
    Fit(String),
    /// Gaussian mixture regression produced a non-finite result.
    #[error("condition error: {0}")]
    Condition(String),
    /// The regularized Gram system could not be solved.
    #[error("solve error: {0}")]
    Solve(String),
    /// A kernel or block layout was used with incompatible inputs.
    #[error("layout error: {0}")]
    Layout(String),
    #[error("dimension mismatch: {0}")]
    Dim(String),
    #[error("length error: {0}")]
    Length(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
