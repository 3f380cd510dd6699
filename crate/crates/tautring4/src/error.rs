use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unstable graph or space: {0}")]
    Unstable(String),
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("ambient mismatch: {0}")]
    AmbientMismatch(String),
    #[error("cannot glue: {0}")]
    Gluing(String),
    #[error("cannot contract: {0}")]
    Contraction(String),
    #[error("unknown class descriptor: {0}")]
    UnknownClass(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0}")]
    Catalog(String),
    #[error("expression does not reduce to the essential basis ({terms} residual terms)")]
    RelationCandidate { terms: usize, residual: String },
}

pub type Result<T> = std::result::Result<T, Error>;
