use thiserror::Error;

use crate::polyring::Poly;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("size limit: {0}")]
    SizeLimit(String),
    #[error("ring mismatch: {0}")]
    RingMismatch(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid generator g{index} (group has {count} generators)")]
    InvalidGenerator { index: usize, count: usize },
    #[error("state {state} out of range 1..={n}")]
    InvalidState { state: usize, n: usize },
    #[error("marking e{index} out of range (spec has {count} markings)")]
    MarkingOutOfRange { index: usize, count: usize },
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("invalid web: {0}")]
    InvalidWeb(String),
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error("missing block {0} in representation")]
    MissingBlock(String),
    #[error("term cap exceeded: {terms} terms > cap {cap}")]
    TermCap { terms: usize, cap: usize },
    #[error("budget exceeded after {reductions} pair reductions ({} polynomials in partial basis)", partial.len())]
    Budget { reductions: usize, partial: Vec<Poly> },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Budget { .. } | Error::TermCap { .. } | Error::SizeLimit(_))
    }
}
