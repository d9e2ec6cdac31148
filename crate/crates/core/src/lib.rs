//! Randomized and deterministic `(Δ+1)`-edge-coloring built from Vizing
//! chains and multi-step Vizing chains, with a sequential driver and a
//! round-based simulator of the distributed variant.

pub mod chain;
pub mod checks;
pub mod coloring;
pub mod fan;
pub mod graph;
pub mod local;
pub mod msva;
pub mod seed;
pub mod sequential;

pub use chain::{first_chain, next_chain, vizing_chain, Chain};
pub use coloring::{
    fan_plus_path, validate, Color, ColoringError, Fan, MultiStepChain, PartialColoring, PathChain,
    ValidationReport, Violation,
};
pub use fan::{first_fan, next_fan, FanResult};
pub use graph::{EdgeId, Graph, GraphError, Vertex};
pub use msva::{msva, FinishMode, MsvaConfig, MsvaError, MsvaOutcome, MsvaRecord, MsvaResult};
