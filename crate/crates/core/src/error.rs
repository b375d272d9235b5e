use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid numerology: {0}")]
    Numerology(String),

    #[error("invalid FC geometry: {0}")]
    Geometry(String),

    #[error("length mismatch: expected {expected}, got {actual} ({what})")]
    Length {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("index {index} out of range 0..{len} ({what})")]
    OutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("channel profile: {0}")]
    Profile(String),
}

impl Error {
    pub(crate) fn length(what: &'static str, expected: usize, actual: usize) -> Self {
        Error::Length {
            what,
            expected,
            actual,
        }
    }
}
