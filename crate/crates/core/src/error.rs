use crate::pds::SolveTrace;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Malformed numeric input (non-finite entries, empty data, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Dimension or block-structure mismatch between composed pieces.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// Parameters that violate a stated precondition (step-size bound,
    /// lo > hi box, negative radius, ...).
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Structurally valid input that this implementation does not handle
    /// (e.g. a non-proximable outermost layer).
    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    /// Non-finite values appeared during an iterative solve. Carries the
    /// trace collected up to the failing iteration.
    #[error("solver diverged at iteration {iter}")]
    Diverged { iter: usize, trace: Box<SolveTrace> },

    /// Byte-accurate parse failure for image files.
    #[error("parse error at byte {offset}: {msg}")]
    Parse { offset: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
