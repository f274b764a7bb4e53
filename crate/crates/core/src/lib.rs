//! Vertex-cut partitioning of bipartite dependency graphs.
//!
//! Data vertices `U` are spread over `k` machines so that each machine holds
//! the same number of them while touching as few parameters `V` as possible
//! (the memory footprint `|N(U_i)|`). Parameters are then placed on the
//! machines that need them so that inter-machine traffic stays low.
//!
//! Crate layout:
//! - [`graph`]: the bipartite graph, loaders, binary cache, block division
//!   and a synthetic power-law generator.
//! - [`cost_index`]: the per-partition cost structure behind the greedy.
//! - [`partition_u`]: greedy and reference partitioners for `U`.
//! - [`partition_v`]: greedy placement of `V` and repeated sweeps.
//! - [`runtime`]: multi-worker partitioning against shared server state with
//!   bounded delay.
//! - [`metrics`]: footprint, traffic and improvement over random placement.
//! - [`oracle`]: brute-force and naive reference implementations.
//! - [`pipeline`]: end-to-end runs, run manifests and output files.

pub mod cost_index;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod metrics;
pub mod oracle;
pub mod output;
pub mod partition_u;
pub mod partition_v;
pub mod pipeline;
pub mod runtime;

pub use cost_index::CostIndex;
pub use error::{Error, Result};
pub use graph::{BipartiteGraph, SubgraphBlock};
pub use metrics::{evaluate, improvement_vs_random, MetricSelector, MetricsReport};
pub use partition_u::{BalanceRule, GreedyConfig, NeighborSets, UPartition};
pub use partition_v::VPartition;
pub use pipeline::RunManifest;
pub use runtime::{MaxDelay, RuntimeConfig};
