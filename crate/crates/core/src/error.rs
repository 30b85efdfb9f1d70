use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} = {value} is outside the domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },
    #[error("enumeration is capped at N = {cap}, got N = {n}")]
    EnumerationCap { n: usize, cap: usize },
    #[error("degenerate endpoint {re} + {im}i: the endpoint map needs a strictly positive imaginary part")]
    DegenerateEndpoint { re: f64, im: f64 },
    #[error("invalid walk: {0}")]
    InvalidWalk(String),
    #[error("invalid chain configuration: {0}")]
    Config(String),
    #[error("pivot chain accepted no moves during warm-up ({iterations} iterations)")]
    NoAcceptance { iterations: u64 },
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unsupported format version: expected {expected}, found {found:?}")]
    Version {
        expected: &'static str,
        found: String,
    },
    #[error("accumulators have mismatched layouts: {0}")]
    Mismatch(String),
    #[error("accumulator holds no weight")]
    EmptyAccumulator,
    #[error("normal matrix is singular")]
    Singular,
    #[error("only {usable} usable points, at least {required} required")]
    TooFewPoints { usable: usize, required: usize },
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
