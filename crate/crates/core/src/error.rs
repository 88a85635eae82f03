use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("node index {index} out of range for {len} nodes")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("self-loop at node {0}")]
    SelfLoop(usize),

    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),

    #[error("probability {0} outside its allowed range")]
    InvalidProbability(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("graph is disconnected")]
    Disconnected,

    #[error("matrix has two identical columns; the query complexity is undefined")]
    Undefined,

    #[error("no solution within cap {0}")]
    CapExceeded(usize),

    #[error("observation vector has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("query pool is empty")]
    EmptyPool,

    #[error("answer {answer} to query {query} is inconsistent with every candidate")]
    InconsistentAnswer { query: usize, answer: u32 },

    #[error("parameters outside the valid regime: {0}")]
    RegimeInvalid(String),

    #[error("{what} supports at most {max} targets, got {got}")]
    TooLarge {
        what: &'static str,
        max: usize,
        got: usize,
    },

    #[error("invalid experiment config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable tag, used in CLI error objects.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::IndexOutOfRange { .. } => "index_out_of_range",
            Error::Parse { .. } => "parse",
            Error::SelfLoop(_) => "self_loop",
            Error::DuplicateEdge(..) => "duplicate_edge",
            Error::InvalidProbability(_) => "invalid_probability",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::Disconnected => "disconnected",
            Error::Undefined => "undefined",
            Error::CapExceeded(_) => "cap_exceeded",
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::EmptyPool => "empty_pool",
            Error::InconsistentAnswer { .. } => "inconsistent_answer",
            Error::RegimeInvalid(_) => "regime_invalid",
            Error::TooLarge { .. } => "too_large",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
