use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OwaError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("negative entry {value} at ({row}, {col}) of the cost matrix")]
    NegativeCost { row: usize, col: usize, value: String },
    #[error("negative weight {value} at position {position}; signed weights must be requested explicitly")]
    NegativeWeight { position: usize, value: String },
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("invalid position matrix: {0}")]
    InvalidMatrix(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("domain too large to enumerate (cap {cap})")]
    TooLarge { cap: usize },
    #[error("perfect matching needs an even vertex count, graph has {0}")]
    OddVertexCount(usize),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("unknown formulation variant {0:?}")]
    UnknownVariant(String),
    #[error("big-M {m} is not strictly greater than the outcome bound {bound}")]
    BigMTooSmall { m: String, bound: String },
    #[error("signed weights need the cotazy inequalities and a variant keeping the full permutation constraints")]
    SignedWeights,
    #[error("cut family {family} is not compatible with {variant}")]
    IncompatibleCut { family: String, variant: String },
    #[error("point is not in the domain")]
    NotInDomain,
    #[error("LP used for bounds ended with status {0}")]
    LpFailure(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{0}")]
    Io(String),
}

impl From<std::io::Error> for OwaError {
    fn from(e: std::io::Error) -> Self {
        OwaError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, OwaError>;
