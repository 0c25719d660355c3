use std::fmt;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// The node records do not form a single rooted binary tree.
    #[error("malformed tree structure: {0}")]
    Structure(String),

    #[error("balance violation: {0}")]
    Balance(crate::tree::Violation),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("invalid frequency model: {0}")]
    Model(String),

    #[error("bit source exhausted before decoding finished")]
    Truncated,

    #[error("integrity check failed: {0}")]
    Integrity(String),

    #[error("invalid input: {0}")]
    Format(String),

    #[error("recursion has no positive fixed point")]
    NoFixedPoint,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn format(msg: impl fmt::Display) -> Self {
        Error::Format(msg.to_string())
    }

    pub(crate) fn integrity(msg: impl fmt::Display) -> Self {
        Error::Integrity(msg.to_string())
    }
}
