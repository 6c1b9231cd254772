use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension must be at least 2, got {0}")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("animal has no edges")]
    EmptyAnimal,

    #[error("edge set is not connected")]
    Disconnected,

    #[error("animal is not translated so that its lexicographically minimal vertex is the origin")]
    NotNormalized,

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("n = {n} exceeds the census depth n_max = {n_max}")]
    BeyondCensus { n: usize, n_max: usize },

    #[error("brute-force oracle refuses n_max = {n_max} (limit {limit})")]
    OracleTooLarge { n_max: usize, limit: usize },

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("census file rejected: {0}")]
    CensusFormat(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
