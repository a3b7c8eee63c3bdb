use alloc::string::String;

/// Failure modes shared by every module in the crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An input does not have the algebraic shape an operation needs
    /// (unknown generator, non-square matrix, word outside a subalgebra).
    #[error("structural error: {0}")]
    Structural(String),

    /// A configured size cap was exceeded.
    #[error("{what}: requested {requested}, cap is {cap}")]
    Resource {
        what: &'static str,
        requested: usize,
        cap: usize,
    },

    /// A Hankel (moment) system was singular at the given size.
    #[error("degenerate moment system: Hankel matrix of size {size} is singular")]
    Degenerate { size: usize },

    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative solver stopped without meeting its tolerance.
    #[error("no convergence after {iterations} iterations (last residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    /// A checked mathematical invariant failed numerically.
    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    /// A model or measure failed validation.
    #[error("invalid model: {0}")]
    InvalidModel(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
