use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("uniformity mismatch: {left}-graph vs {right}-graph")]
    UniformityMismatch { left: usize, right: usize },

    #[error("parse error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid document at {position}: {message}")]
    Malformed { position: String, message: String },

    #[error("edge {edge}: vertex {vertex} out of range (n = {n})")]
    VertexOutOfRange { edge: usize, vertex: usize, n: usize },

    #[error("edge {edge}: expected {expected} vertices, found {found}")]
    EdgeArity {
        edge: usize,
        expected: usize,
        found: usize,
    },

    #[error("edge {edge}: repeated vertex {vertex}")]
    RepeatedVertex { edge: usize, vertex: usize },

    #[error("edge position {0} out of range")]
    InvalidEdge(usize),

    #[error("map is not a homomorphism: {0}")]
    NotAHomomorphism(String),

    #[error("hypergraph is not linear")]
    NotLinear,

    #[error("step function is not symmetric at index {0:?}")]
    NotSymmetric(Vec<usize>),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("generator shortfall: {0}")]
    GeneratorShortfall(String),

    #[error("internal consistency failure: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn malformed(position: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Malformed {
            position: position.into(),
            message: message.into(),
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Syntax {
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        }
    }
}
