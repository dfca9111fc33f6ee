use thiserror::Error;

use crate::pcg::SolveReport;

pub type Result<T> = std::result::Result<T, Error>;

/// Stiffly-connected check failure: either the whole rigidity graph is
/// disconnected, or the faces around one vertex are.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StiffnessWitness {
    Global,
    Vertex(usize),
}

impl std::fmt::Display for StiffnessWitness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StiffnessWitness::Global => write!(f, "rigidity graph is disconnected"),
            StiffnessWitness::Vertex(v) => write!(f, "faces around vertex {v} are disconnected"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid truss: {0}")]
    InvalidTruss(String),
    #[error("degenerate face ({0}, {1}, {2}): vertices are collinear")]
    DegenerateFace(usize, usize, usize),
    #[error("element ({0}, {1}) has zero length")]
    ZeroLengthElement(usize, usize),
    #[error("vertex {0} is not contained in any face")]
    VertexInNoFace(usize),
    #[error("truss is not stiffly connected: {0}")]
    NotStifflyConnected(StiffnessWitness),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("subgraph does not span the rigidity graph: {0}")]
    NotSpanning(String),
    #[error("subgraph is not connected")]
    NotConnected,
    #[error("graph is disconnected")]
    Disconnected,
    #[error("graph is not planar")]
    NotPlanar,
    #[error("bad part budget k = {k}: need 1 <= k <= {total}")]
    BadK { k: u64, total: u64 },
    #[error("decomposition produced {parts} parts, more than the budget {k}")]
    PartBudgetExceeded { parts: usize, k: u64 },
    #[error("invalid embedding: {0}")]
    InvalidEmbedding(String),

    #[error("matrix is not positive semidefinite (pivot {pivot:e} at column {column})")]
    NotPsd { column: usize, pivot: f64 },
    #[error("right-hand side has a null-space component of relative size {0:e}")]
    RhsNotInRange(f64),

    #[error("PCG did not converge within {} iterations", report.iterations)]
    MaxIterExceeded {
        solution: Vec<f64>,
        report: Box<SolveReport>,
    },
    #[error("non-finite value in PCG at iteration {0}")]
    NaNDetected(usize),

    #[error("matrix of dimension {0} is too large for the dense oracle")]
    TooLargeForDense(usize),

    #[error("internal invariant violated: {0}")]
    InvariantViolated(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
