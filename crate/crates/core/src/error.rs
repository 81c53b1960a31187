use thiserror::Error;

/// Errors raised by construction, validation and the exact kernels.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("closure exceeds the element limit {limit}")]
    ClosureExceedsLimit { limit: usize },

    #[error("group order {order} exceeds the supported maximum {cap}")]
    GroupTooLarge { order: usize, cap: usize },

    #[error("unsupported parameter: {0}")]
    UnsupportedParameter(String),

    #[error("multiplication table is not a group: {0}")]
    NotAGroup(String),

    #[error("not a subgroup: {0}")]
    NotASubgroup(String),

    #[error("subgroup has index {actual}, expected index {expected}: {detail}")]
    WrongIndex {
        expected: usize,
        actual: usize,
        detail: String,
    },

    #[error("adjacency is not symmetric at ({u},{v}); undirected instance required")]
    NotUndirected { u: usize, v: usize },

    #[error("adjacency is not invariant under group element {g} at ({u},{v})")]
    NotInvariant { g: usize, u: usize, v: usize },

    #[error("action is not transitive on the vertex set")]
    NotTransitive,

    #[error("matrix is not symmetric")]
    NotSymmetric,

    #[error("n = {n} exceeds the exact-search cap {cap}")]
    TooLargeForExact { n: usize, cap: usize },

    #[error("eigenfunction conditioning failed: {0}")]
    ConditioningFailed(String),

    #[error("degenerate eigenpair: residual {residual} exceeds tolerance {tolerance}")]
    DegenerateEigenpair { residual: f64, tolerance: f64 },

    #[error("delta = {0} outside the open interval (0, 1/2)")]
    InvalidDelta(f64),

    #[error("instance rejected: {0}")]
    InvalidInstance(String),

    #[error("hypothesis not met: {0}")]
    HypothesisNotMet(String),

    #[error("parse error in field `{field}`: {message}")]
    Parse { field: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn parse(field: &str, message: impl Into<String>) -> Self {
        Error::Parse {
            field: field.to_string(),
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
