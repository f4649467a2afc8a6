use thiserror::Error;

use crate::mesh::VertexId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point ({x}, {y}) is not inside the open unit disk")]
    OutsideDisk { x: f64, y: f64 },

    #[error("coincident points")]
    CoincidentPoints,

    #[error("triangle inequality violated by side {side} of lengths {lengths:?}")]
    TriangleInequality { side: usize, lengths: [f64; 3] },

    #[error("degenerate triangle: the three points are collinear")]
    DegenerateTriangle,

    #[error("degenerate face {face:?}: {reason}")]
    DegenerateFace { face: [VertexId; 3], reason: String },

    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),

    #[error("no position for vertex {0}")]
    MissingPosition(VertexId),

    #[error("no conformal factor for vertex {0}")]
    MissingFactor(VertexId),

    #[error("no length for edge ({0}, {1})")]
    MissingLength(VertexId, VertexId),

    #[error("invalid complex: {0}")]
    InvalidComplex(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("hypothesis not met: {0}")]
    Hypothesis(String),

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("no feasible Newton step at iteration {iteration} (residual {residual:e})")]
    InfeasibleStep { iteration: usize, residual: f64 },

    #[error("singular curvature Jacobian at iteration {0}")]
    SingularJacobian(usize),

    #[error("format error: {0}")]
    Format(String),
}
