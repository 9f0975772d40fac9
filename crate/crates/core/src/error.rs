use thiserror::Error;

/// Errors raised by the structural operations of this crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("vertex {vertex} out of range (n = {n})")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("color {color} out of range ({count} colors)")]
    ColorOutOfRange { color: usize, count: usize },
    #[error("expected a {expected}-set, got {got} vertices")]
    WrongUniformity { expected: usize, got: usize },
    #[error("repeated vertex {0} in set")]
    RepeatedVertex(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("malformed walk: {0}")]
    MalformedWalk(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("instance error: {0}")]
    Instance(String),
}

pub type Result<T> = std::result::Result<T, Error>;
