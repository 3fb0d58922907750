use thiserror::Error;

use crate::model::Vertex;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("vertices are not affinely independent (affine rank {rank} < {dim})")]
    NotFullDimensional { rank: usize, dim: usize },
    #[error("objective is not generic: vertices {first} and {second} have equal value")]
    NonGenericObjective { first: usize, second: usize },
    #[error("slope is undefined between {from} and {to}: objective difference is zero")]
    ZeroObjectiveDifference { from: Vertex, to: Vertex },
    #[error("weight is not generic: at {vertex}, improving neighbors {first} and {second} tie")]
    NonGenericWeight {
        vertex: Vertex,
        first: Vertex,
        second: Vertex,
    },
    #[error("slope vector has tied entries {first} and {second}")]
    TiedSlopes { first: usize, second: usize },
    #[error("linear map has rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },
    #[error("cone has no interior witness")]
    MissingWitness,
    #[error("size {size} exceeds cap {cap}")]
    SizeCap { size: usize, cap: usize },
    #[error("union of braid regions is not convex for class {0}")]
    NonConvexUnion(String),
    #[error("direction is not generic for summand {0}")]
    NonGenericDirection(usize),
    #[error("{0} is not a vertex of this instance")]
    InvalidVertex(Vertex),
    #[error("invalid arborescence: {0}")]
    InvalidArborescence(String),
    #[error("generation failed: {0}")]
    GenerationFailed(String),
    #[error("invalid input: {0}")]
    Parse(String),
}
