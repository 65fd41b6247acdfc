use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated an operation's precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The operation cannot run on the object in its current state (e.g. an empty net).
    #[error("invalid state: {0}")]
    State(String),

    #[error("parse error in {path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    /// A loaded object failed a structural check (separation, closure).
    #[error("integrity error: {0}")]
    Integrity(String),

    #[error("construction failed: {0}")]
    Construction(String),

    /// Averaging produced a near-zero quaternion for the listed group elements.
    #[error("degenerate mean at elements {elements:?}")]
    DegenerateMean { elements: Vec<usize> },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
