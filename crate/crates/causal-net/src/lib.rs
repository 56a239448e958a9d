//! Causal nets: finite acyclic multidigraphs viewed through their path
//! categories. Morphisms are functors between path categories; this crate
//! classifies them (quotient/coarse-graining/merging/contraction on the epi
//! side, inclusion/immersion/embedding on the mono side), builds them from
//! relation data, factors them per the decomposition theorems, and decides
//! the generalized minor relations at desk scale.

pub mod catalog;
pub mod classify;
pub mod coloring;
pub mod construct;
pub mod decompose;
pub mod error;
pub mod fixtures;
pub mod minor;
pub mod morphism;
pub mod net;
pub mod text;

pub use classify::{classify, ClassLabel, FundamentalType};
pub use error::{Error, Result};
pub use morphism::{find_isomorphism, Morphism, MorphismCensus};
pub use net::{CausalNet, DirectedPath, Edge, EdgeId, HomotopySignature, VertexId, DEFAULT_CAP};
