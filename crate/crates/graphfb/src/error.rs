//! Crate-wide error type.

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("edge ({i}, {j}) has non-positive weight {w}")]
    NegativeWeight { i: usize, j: usize, w: f64 },
    #[error("edge ({i}, {j}) listed twice with conflicting weights {first} and {second}")]
    DuplicateEdgeConflict { i: usize, j: usize, first: f64, second: f64 },
    #[error("graph is not connected")]
    Disconnected,
    #[error("vertex index {index} out of range for {n} vertices")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("parse error at {path}:{line}: {msg}")]
    ParseError { path: String, line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("eigendecomposition did not converge")]
    EigFailure,
    #[error("matrix is not orthogonal")]
    NotOrthogonal,
    #[error("dense operation refused for n = {n} (limit {limit})")]
    TooLarge { n: usize, limit: usize },
    #[error("spectrum too degenerate for filter design")]
    DegenerateSpectrum,
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("filter values differ on tied eigenvalues (indices {i} and {j})")]
    TieViolation { i: usize, j: usize },
    #[error("allocation problem is infeasible")]
    Infeasible,
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("signal has zero norm")]
    ZeroSignal,
    #[error("coefficient shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid pyramid depth {0}")]
    InvalidDepth(usize),
    #[error("{failed} of {total} checks failed")]
    ChecksFailed { failed: usize, total: usize },
}

impl Error {
    /// Process exit code for the command-line front end: 2 for input or
    /// usage problems, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::EigFailure
            | Error::DegenerateSpectrum
            | Error::Infeasible
            | Error::ChecksFailed { .. } => 3,
            _ => 2,
        }
    }
}
