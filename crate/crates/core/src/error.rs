use thiserror::Error;

/// Errors raised by the library.
///
/// Variants split into precondition failures (bad input, violated
/// hypotheses, size caps) and numeric failures (eigensolver or LP solver
/// breakdown); see [`Error::is_numeric`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("duplicate vertex id `{0}`")]
    DuplicateVertex(String),

    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("duplicate edge `{0}` -- `{1}`")]
    DuplicateEdge(String, String),

    #[error("self-loop at vertex `{0}`")]
    SelfLoop(String),

    #[error("{what} must be positive and finite, got {value}")]
    NonPositive { what: String, value: f64 },

    #[error("{what}: size {size} exceeds cap {cap}")]
    SizeCap { what: String, size: usize, cap: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("graph is not weakly spherically symmetric: {detail} (witness `{first}` vs `{second}` on sphere {sphere})")]
    NotWeaklySymmetric {
        sphere: usize,
        first: String,
        second: String,
        detail: String,
    },

    #[error("pair lies on a short cycle: {}", .0.join(" -> "))]
    CycleWitness(Vec<String>),

    #[error("eigendecomposition failed: {0}")]
    EigenFailure(String),

    #[error("linear program: {0}")]
    LinearProgram(String),
}

impl Error {
    /// True for failures of the numeric machinery itself rather than of the input.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::EigenFailure(_) | Error::LinearProgram(_))
    }

    pub(crate) fn pre(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
