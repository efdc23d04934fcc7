use thiserror::Error;

use crate::model::{ServerId, VertexId};

/// Errors raised while building or validating model values.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("layout does not assign vertex {0}")]
    MissingVertex(VertexId),
    #[error("server {0} does not exist in the edge network")]
    UnknownServer(ServerId),
    #[error("vertex {0} does not exist in the data graph")]
    UnknownVertex(VertexId),
    #[error("self-loop on vertex {0}")]
    SelfLoop(VertexId),
    #[error("link {{{0}, {1}}} already exists")]
    DuplicateLink(VertexId, VertexId),
    #[error("link {{{0}, {1}}} does not exist")]
    MissingLink(VertexId, VertexId),
    #[error("adjacency is not symmetric at ({0}, {1})")]
    AsymmetricAdjacency(VertexId, VertexId),
    #[error("traffic matrix is invalid at ({0}, {1}): {2}")]
    InvalidTraffic(ServerId, ServerId, &'static str),
    #[error("server {0} has a negative or non-finite cost parameter")]
    InvalidServerCost(ServerId),
    #[error("upload cost matrix has shape {rows}x{cols}, expected {expected_rows}x{expected_cols}")]
    UploadShape {
        rows: usize,
        cols: usize,
        expected_rows: usize,
        expected_cols: usize,
    },
    #[error("upload cost for vertex {0} at server {1} is negative or non-finite")]
    InvalidUploadCost(VertexId, ServerId),
    #[error("GNN layer dimensions must have length >= 2 and every entry >= 1")]
    InvalidLayerDims,
    #[error("vertex insertion uses id {got}, expected next free id {expected}")]
    NonDenseVertexId { got: VertexId, expected: VertexId },
    #[error("server ids must be dense: server at position {position} has id {id}")]
    NonDenseServerId { position: usize, id: ServerId },
}

/// Errors raised by cost evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CostError {
    #[error("a cross link spans servers {0} and {1}, which are not connected")]
    UnreachablePair(ServerId, ServerId),
}

/// Errors raised by the layout optimizers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum OptimizeError {
    #[error("servers {0} and {1} are not connected")]
    PairNotConnected(ServerId, ServerId),
    #[error("the edge network has no connected server pair")]
    NoConnectedPairs,
    #[error("R must be at least 1")]
    InvalidRounds,
    #[error("invalid warm-start layout: {0}")]
    InvalidWarmStart(ModelError),
    #[error(transparent)]
    Cost(#[from] CostError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Errors raised by the exhaustive oracle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("search space of {states:.3e} states exceeds the guard of {max_states}")]
    TooLarge { states: f64, max_states: u64 },
    #[error("no feasible layout exists")]
    Infeasible,
}

/// Errors raised by scenario synthesis and file ingestion.
#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("k-means needs at least one point and 1 <= k <= points")]
    EmptyInput,
    #[error("invalid config at `{path}`: {message}")]
    Config { path: String, message: String },
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("self-loop on line {line}: vertex {vertex}")]
    SelfLoop { line: usize, vertex: String },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl ScenarioError {
    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        ScenarioError::Config {
            path: path.into(),
            message: message.into(),
        }
    }
}

/// Errors raised while replaying an evolution trace.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum TimelineError {
    #[error("slot {slot}: trace is inconsistent with the graph: {source}")]
    Trace { slot: usize, source: ModelError },
    #[error("slot {slot}: {source}")]
    Optimize { slot: usize, source: OptimizeError },
}

/// Errors raised while reading instance, layout or trace files.
#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("connectivity and traffic disagree at ({0}, {1})")]
    Connectivity(ServerId, ServerId),
    #[error(transparent)]
    Model(#[from] ModelError),
}
