use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid block: {0}")]
    InvalidBlock(String),
    #[error("arcs do not form an oriented heptagon: {0}")]
    NotAHeptagon(String),
    #[error("unknown heptagon class {0:?}")]
    UnknownClass(String),
    #[error("invalid host: {0}")]
    InvalidHost(String),
    #[error("unsupported block for inflation: {0}")]
    UnsupportedBlock(String),
    #[error("invalid starter: {0}")]
    InvalidStarter(String),
    #[error("no base design registered for {host} / {class}")]
    NoFixture { host: String, class: String },
    #[error("checksum mismatch: stored {stored}, computed {computed}")]
    ChecksumMismatch { stored: String, computed: String },
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("not admissible (v = {v}): {reason}")]
    NotAdmissible { v: u32, reason: String },
    #[error("{0} is not isomorphic to its reverse; cycle doubling does not apply")]
    NotSelfReverse(String),
    #[error("difference partition not found within a budget of {0} nodes")]
    UnsatisfiableWithinBudget(u64),
    #[error("difference {d} modulo {m} does not split into one-factors")]
    NotSplittable { d: u32, m: u32 },
    #[error("search exhausted: {0}")]
    Exhausted(String),
    #[error("host too large for exact cover: {0} arcs/edges (limit 2000)")]
    HostTooLarge(usize),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Malformed(e.to_string())
    }
}
