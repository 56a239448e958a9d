use thiserror::Error;

use crate::net::{EdgeId, VertexId};

/// Errors shared across the library. Each variant carries a witness where the
/// contract promises one (e.g. the edge sequence of a discovered cycle).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("cycle found through edges {0:?}")]
    CycleFound(Vec<EdgeId>),
    #[error("edge {0} has an endpoint that is not a declared vertex")]
    DanglingEndpoint(EdgeId),
    #[error("duplicate id {0}")]
    DuplicateId(String),
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("paths not composable: target {0} != source {1}")]
    NonComposable(VertexId, VertexId),
    #[error("enumeration cap of {0} exceeded")]
    LimitExceeded(usize),
    #[error("edge {0} maps to a path whose endpoints disagree with the vertex map")]
    EndpointMismatch(EdgeId),
    #[error("map is missing an entry for {0}")]
    PartialMap(String),
    #[error("edge {0} maps to a path that is not valid in the codomain")]
    PathNotInCodomain(EdgeId),
    #[error("composition mismatch: first.cod != second.dom")]
    DomainMismatch,
    #[error("quotient spec violates condition ({0}): {1}")]
    SpecViolation(u8, String),
    #[error("quotient graph has a directed cycle through {0:?}")]
    QuotientNotAcyclic(Vec<EdgeId>),
    #[error("vertices {0} and {1} are comparable, not a coclique")]
    NotCoclique(VertexId, VertexId),
    #[error("edge set is not a maximal parallel class")]
    NotMultiEdge,
    #[error("edge {0} has parallel siblings; coarse-grain them first")]
    HasParallelSiblings(EdgeId),
    #[error("subdivision length for {0} must be at least 1")]
    ZeroLength(EdgeId),
    #[error("vertices {0} and {1} are comparable")]
    ComparableVertices(VertexId, VertexId),
    #[error("morphism is not a coarse-graining")]
    NotCoarseGraining,
    #[error("morphism is not a vertex-coarse-graining")]
    NotVertexCg,
    #[error("morphism is not a contraction")]
    NotContraction,
    #[error("morphism is not a tree-contraction")]
    NotTreeContraction,
    #[error("morphism is not a fusion")]
    NotFusion,
    #[error("morphism is not in the class required by this factorization")]
    NotInThisClass,
    #[error("position {0} is not a gap")]
    NotAGap(usize),
    #[error("linear colorings are over different nets")]
    DifferentNets,
    #[error("no dualization lemma applies to this defect: {0}")]
    NoLemmaApplies(String),
    #[error("minors not composable: target of first != source of second")]
    MinorEndpointMismatch,
    #[error("zig-zag arrow {0} does not carry the class required by the minor pair")]
    ArrowOutsideClass(usize),
    #[error("order line does not list every vertex exactly once")]
    BadSortingOrder,
    #[error("order is not a topological sorting: edge {0} goes backwards")]
    NotTopological(EdgeId),
    #[error("sorting-net must be simple; {0} has a parallel sibling")]
    NotSimpleNet(EdgeId),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
