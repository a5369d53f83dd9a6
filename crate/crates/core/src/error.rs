use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("digit {0} is outside the alphabet")]
    Alphabet(u8),
    #[error("empty word")]
    EmptyWord,
    #[error("pivot {pivot} out of range for word of length {len}")]
    Pivot { pivot: usize, len: usize },
    #[error("periodic block must be non-empty")]
    EmptyBlock,
    #[error("{0}")]
    Inconsistent(String),
    #[error("not certified: {0}")]
    NotCertified(String),
    #[error("undecided after {depth} extensions: {open} open branches (first: {example})")]
    Undecided { depth: usize, open: usize, example: String },
    #[error("preset: {0}")]
    Preset(String),
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
