//! End-to-end runs: load a graph, partition `U`, place `V`, evaluate.

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::synth::SyntheticConfig;
use crate::graph::{cache, load_edge_list_with_ids, load_libsvm_with_ids, BipartiteGraph, IdMap};
use crate::metrics::{evaluate, MetricsReport};
use crate::partition_u::{global_initialization, run_sequential, GreedyConfig, UPartition};
use crate::partition_v::{sweep_to_convergence, Demand, VPartition};
use crate::runtime::{run_parallel, RuntimeConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputFormat {
    Libsvm,
    EdgelistDirected,
    EdgelistUndirected,
    Cache,
}

impl fmt::Display for InputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InputFormat::Libsvm => "libsvm",
            InputFormat::EdgelistDirected => "edgelist-directed",
            InputFormat::EdgelistUndirected => "edgelist-undirected",
            InputFormat::Cache => "cache",
        })
    }
}

impl FromStr for InputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "libsvm" => Ok(InputFormat::Libsvm),
            "edgelist-directed" => Ok(InputFormat::EdgelistDirected),
            "edgelist-undirected" => Ok(InputFormat::EdgelistUndirected),
            "cache" => Ok(InputFormat::Cache),
            other => Err(Error::invalid(format!("unknown input format `{other}`"))),
        }
    }
}

/// Loads a graph; text formats also yield the external id map.
pub fn load_graph(path: impl AsRef<Path>, format: InputFormat) -> Result<(BipartiteGraph, Option<IdMap>)> {
    let path = path.as_ref();
    match format {
        InputFormat::Libsvm => load_libsvm_with_ids(path).map(|(g, m)| (g, Some(m))),
        InputFormat::EdgelistDirected => load_edge_list_with_ids(path, true).map(|(g, m)| (g, Some(m))),
        InputFormat::EdgelistUndirected => load_edge_list_with_ids(path, false).map(|(g, m)| (g, Some(m))),
        InputFormat::Cache => cache::read(path).map(|g| (g, None)),
    }
}

/// Where the graph of a run comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum GraphSource {
    File { path: String, format: InputFormat },
    Synthetic(SyntheticConfig),
}

impl GraphSource {
    pub fn load(&self) -> Result<(BipartiteGraph, Option<IdMap>)> {
        match self {
            GraphSource::File { path, format } => load_graph(path, *format),
            GraphSource::Synthetic(cfg) => crate::graph::synth::power_law_bipartite(cfg).map(|g| (g, None)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub greedy: GreedyConfig,
    pub runtime: RuntimeConfig,
    /// Upper bound on `V` placement sweeps.
    pub sweeps: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            greedy: GreedyConfig::default(),
            runtime: RuntimeConfig::default(),
            sweeps: 8,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PipelineResult {
    pub u: UPartition,
    pub v: VPartition,
    pub metrics: MetricsReport,
    pub sweeps: usize,
    pub converged: bool,
}

/// Partitions `U` (sequentially for one worker, otherwise with the
/// parallel runtime), places `V` by sweeping to convergence and evaluates.
pub fn run_partition(g: &BipartiteGraph, cfg: &PipelineConfig) -> Result<PipelineResult> {
    let greedy = &cfg.greedy;
    cfg.runtime.validate()?;
    let up = if cfg.runtime.workers == 1 {
        let initial = match cfg.runtime.global_init {
            Some(f) => Some(global_initialization(
                g,
                greedy.k,
                f,
                greedy.seed,
                greedy.balance_rule,
            )?),
            None => None,
        };
        run_sequential(g, greedy, initial)?.0
    } else {
        run_parallel(g, greedy, &cfg.runtime)?.partition
    };
    let demand = Demand::from_partition(g, &up);
    let placed = sweep_to_convergence(&demand, cfg.sweeps, None)?;
    let mut metrics = evaluate(g, &up, &placed.partition)?;
    metrics.config = Some(serde_json::to_value(cfg)?);
    Ok(PipelineResult {
        u: up,
        v: placed.partition,
        metrics,
        sweeps: placed.sweeps,
        converged: placed.converged,
    })
}

/// Everything needed to reproduce a run, plus when it happened.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub source: GraphSource,
    pub config: PipelineConfig,
    pub output_dir: Option<String>,
    pub started_at_ms: Option<u64>,
    pub finished_at_ms: Option<u64>,
}

impl RunManifest {
    pub fn new(source: GraphSource, config: PipelineConfig) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            source,
            config,
            output_dir: None,
            started_at_ms: None,
            finished_at_ms: None,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }
}

pub fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}
