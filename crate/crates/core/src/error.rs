use thiserror::Error;

use crate::tree::VertexId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("tree has no vertices")]
    EmptyTree,
    #[error("edge ({0}, {1}) references a vertex outside 0..{2}")]
    EdgeOutOfRange(usize, usize, usize),
    #[error("cycle detected through input vertex {0}")]
    Cycle(usize),
    #[error("input vertex {child} has two parents ({first} and {second})")]
    MultipleParents {
        child: usize,
        first: usize,
        second: usize,
    },
    #[error("input vertex {0} is not reachable from the root")]
    Disconnected(usize),
    #[error("invalid vertex id {0}")]
    InvalidVertex(usize),
    #[error("{v} is not a descendant of {u}")]
    NotDescendant { u: VertexId, v: VertexId },
    #[error("vector belongs to a different tree")]
    TreeMismatch,
    #[error("power {power} from vertex {vertex} reaches depth {reach}, beyond truncation depth {max_depth}")]
    HorizonExceeded {
        vertex: VertexId,
        power: usize,
        reach: usize,
        max_depth: usize,
    },
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("|w| = {0} is not 1")]
    NotUnitModulus(f64),
    #[error(
        "quadrature with {nodes} nodes cannot integrate trigonometric degree {degree} exactly"
    )]
    QuadratureTooSmall { nodes: usize, degree: usize },
    #[error("shift is not injective on the truncation: ||S e_{vertex}|| = {norm}")]
    NonInjective { vertex: VertexId, norm: f64 },
    #[error("path is invalid: {0}")]
    InvalidPath(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("malformed spec: {0}")]
    Spec(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
