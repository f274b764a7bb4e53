//! Quality and timing sweeps over partitioning parameters.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::BipartiteGraph;
use crate::metrics::{random_baseline, BaselineOptions, MetricSelector};
use crate::partition_u::GreedyConfig;
use crate::pipeline::{run_partition, PipelineConfig};

/// The parameter grid of a sweep.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sweep {
    /// Vary the partition count.
    K(Vec<usize>),
    /// Vary `(a, b)`.
    Ab(Vec<(usize, usize)>),
}

impl Sweep {
    fn configs(&self, base: &GreedyConfig) -> Vec<GreedyConfig> {
        match self {
            Sweep::K(ks) => ks.iter().map(|&k| GreedyConfig { k, ..base.clone() }).collect(),
            Sweep::Ab(grid) => grid
                .iter()
                .map(|&(a, b)| GreedyConfig { a, b, ..base.clone() })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub k: usize,
    pub a: usize,
    pub b: usize,
    pub seed: u64,
    pub m_max: usize,
    pub t_max: u64,
    pub t_sum: u64,
    pub m_max_improvement: f64,
    pub t_max_improvement: f64,
    pub t_sum_improvement: f64,
    pub partition_ms: f64,
}

/// Runs the pipeline for every configuration of `sweep` and compares each
/// result with `trials` random placements.
pub fn run_bench(
    g: &BipartiteGraph,
    base: &PipelineConfig,
    sweep: &Sweep,
    trials: usize,
    options: BaselineOptions,
) -> Result<Vec<BenchRow>> {
    if trials == 0 {
        return Err(Error::invalid("trials must be >= 1"));
    }
    let configs = sweep.configs(&base.greedy);
    if configs.is_empty() {
        return Err(Error::invalid("sweep has no configurations"));
    }
    let mut rows = Vec::with_capacity(configs.len());
    for greedy in configs {
        let cfg = PipelineConfig {
            greedy: greedy.clone(),
            ..base.clone()
        };
        let started = Instant::now();
        let result = run_partition(g, &cfg)?;
        let partition_ms = started.elapsed().as_secs_f64() * 1e3;
        let baseline = random_baseline(g, greedy.k, trials, greedy.seed, options)?;
        let m = &result.metrics;
        rows.push(BenchRow {
            k: greedy.k,
            a: greedy.a,
            b: greedy.b,
            seed: greedy.seed,
            m_max: m.max_footprint,
            t_max: m.max_traffic,
            t_sum: m.total_traffic,
            m_max_improvement: baseline.improvement_of(m, MetricSelector::MaxFootprint),
            t_max_improvement: baseline.improvement_of(m, MetricSelector::MaxTraffic),
            t_sum_improvement: baseline.improvement_of(m, MetricSelector::TotalTraffic),
            partition_ms,
        });
        log::info!(
            "k={} a={} b={} done in {partition_ms:.1} ms",
            greedy.k,
            greedy.a,
            greedy.b
        );
    }
    Ok(rows)
}

pub fn to_csv(rows: &[BenchRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)
            .map_err(|e| Error::Runtime(format!("csv: {e}")))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Runtime(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
