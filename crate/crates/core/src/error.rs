use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected d={expected}, got d={found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension must be at least 1")]
    ZeroDimension,

    #[error("sites must be distinct for an ordering query")]
    SameSite,

    #[error("site set must be nonempty")]
    EmptySet,

    #[error("interaction radius must be at least 1")]
    ZeroRadius,

    #[error("window shape mismatch: expected {expected} cells, got {found}")]
    WindowShape { expected: usize, found: usize },

    #[error("window center must be vacant")]
    OccupiedCenter,

    #[error("window has {cells} free cells, enumeration is limited to {limit}")]
    WindowTooLarge { cells: usize, limit: usize },

    #[error("invalid scheme: {0}")]
    InvalidScheme(String),

    #[error(
        "armour exploration exceeded budget of {budget} sites ({explored} sites examined); \
         refusing to return a truncated armour"
    )]
    BudgetExceeded { budget: usize, explored: u64 },

    #[error("need at least {needed} replicas, got {found}")]
    TooFewReplicas { needed: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
