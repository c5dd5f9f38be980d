use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("rank n={0} outside supported range 2..=6")]
    RankOutOfRange(usize),

    #[error("rank mismatch: expected n={expected}, found n={found}")]
    RankMismatch { expected: usize, found: usize },

    #[error("rank n={n} needs {expected} weight entries, got {found}")]
    WeightLength {
        n: usize,
        expected: usize,
        found: usize,
    },

    #[error("|kappa|={size} exceeds the supported maximum {max}")]
    WeightTooLarge { size: u32, max: u32 },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("evaluation point has a zero coordinate at index {0}")]
    ZeroCoordinate(usize),

    #[error("size guard exceeded: {0}")]
    GuardExceeded(String),

    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("series truncation H={h} is below the required minimum {min}")]
    TruncationTooSmall { h: u32, min: u32 },

    #[error("invalid Satake parameter: {0}")]
    InvalidSatake(String),

    #[error("no Satake data for prime {0}")]
    MissingPrime(u64),

    #[error("Euler factor 1 - alpha/p vanishes at p={p}")]
    EulerPole { p: u64 },

    #[error("invalid prime window: {0}")]
    InvalidWindow(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("rejection sampler exceeded {0} proposals without acceptance")]
    RejectionCap(u64),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
