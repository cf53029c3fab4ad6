use thiserror::Error;

/// Errors produced by the exact and analytic evaluation routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// A series failed to reach its certified tail bound within the
    /// configured term cap.
    #[error("series did not converge within {terms} terms")]
    Convergence { terms: usize },

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("input too large: {0}")]
    InputTooLarge(String),

    #[error("solver failed: {0}")]
    Solver(String),

    /// An operation produced an infinity or NaN.
    #[error("non-finite value in {0}")]
    NonFinite(String),
}

pub type Result<T> = std::result::Result<T, Error>;
