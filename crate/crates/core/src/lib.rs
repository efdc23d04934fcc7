//! Cost-minimizing placement of a GNN input graph onto heterogeneous edge
//! servers.
//!
//! The static optimizer ([`optimize::optimize`]) improves a layout by
//! repeated minimum s-t cuts over pairs of servers. [`dynamic`] keeps a
//! layout up to date as the graph evolves, choosing between incremental and
//! global re-optimization from an estimated cost drift.

pub mod baseline;
pub mod cost;
pub mod dynamic;
pub mod error;
pub mod flow;
pub mod io;
pub mod model;
pub mod optimize;
pub mod scenario;

pub use cost::{total_cost, CostBreakdown, CostDecomposition};
pub use error::{CostError, FormatError, ModelError, OptimizeError, OracleError, ScenarioError, TimelineError};
pub use model::{DataGraph, EdgeNetwork, EdgeServer, GnnModelSpec, GraphLayout, Instance, MachineClass, ServerId, VertexId};
pub use optimize::{optimize, InitStrategy, IterationLog, OptimizerConfig, TieBreak};
