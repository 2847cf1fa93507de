use thiserror::Error;

/// Errors raised by the arithmetic and verification layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus {0} is even")]
    EvenModulus(u64),
    #[error("modulus {0} is smaller than 3")]
    ModulusTooSmall(u64),
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} exceeds the residue table limit 2^31")]
    ModulusTooLarge(u64),
    #[error("n = {n} is not coprime to p = {p}")]
    NotCoprime { n: i64, p: u64 },
    #[error("residue {a} is not admissible modulo {p}: {reason}")]
    InvalidResidue { a: u64, p: u64, reason: &'static str },
    #[error("character chi_{index} modulo {p} is not admissible: {reason}")]
    InvalidCharacter {
        index: u64,
        p: u64,
        reason: &'static str,
    },
    #[error("moment order m = {0} is outside 1..=4")]
    UnsupportedMoment(u32),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    pub(crate) fn io(path: &std::path::Path, err: impl std::fmt::Display) -> Self {
        Error::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
