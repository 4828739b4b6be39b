use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The grid pitch is too coarse to certify covering with the available
    /// margin `R - 2r`.
    #[error("pitch {pitch} too coarse for margin R - 2r = {margin}; refine pitch to at most {required}")]
    RefinePitch { pitch: f64, required: f64, margin: f64 },

    #[error("window half-width {available} too small; at least {required} is required")]
    InsufficientWindow { required: f64, available: f64 },

    #[error("restriction to the open ball of radius {radius} is empty")]
    EmptyRestriction { radius: f64 },

    #[error("resource limit exceeded: {0}")]
    Resource(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
