//! Partition quality: balance, memory footprint and traffic.
//!
//! Traffic is counted in both directions. A machine receives one unit for
//! every parameter it needs but does not own, and sends one unit to every
//! other machine needing a parameter it owns. Parameters nobody needs are
//! left out of all traffic terms.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::BipartiteGraph;
use crate::partition_u::{NeighborSets, UPartition};
use crate::partition_v::VPartition;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub k: usize,
    pub u_sizes: Vec<usize>,
    pub max_u_size: usize,
    pub v_sizes: Vec<usize>,
    /// `|N(U_i)|` per machine.
    pub footprints: Vec<usize>,
    pub max_footprint: usize,
    /// Units received per machine: `|N(U_i) \ V_i|`.
    pub received: Vec<u64>,
    /// Units sent per machine: `Σ_{j≠i} |V_i ∩ N(U_j)|`.
    pub sent: Vec<u64>,
    pub traffic: Vec<u64>,
    pub max_traffic: u64,
    pub total_traffic: u64,
    pub isolated_v_count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<serde_json::Value>,
}

impl MetricsReport {
    pub fn metric(&self, which: MetricSelector) -> f64 {
        match which {
            MetricSelector::MaxTraffic => self.max_traffic as f64,
            MetricSelector::TotalTraffic => self.total_traffic as f64,
            MetricSelector::MaxFootprint => self.max_footprint as f64,
        }
    }

    /// Aligned per-machine table followed by the totals.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:>7} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10}",
            "machine", "|U_i|", "|V_i|", "footprint", "received", "sent", "traffic"
        );
        for i in 0..self.k {
            let _ = writeln!(
                out,
                "{:>7} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10}",
                i,
                self.u_sizes[i],
                self.v_sizes[i],
                self.footprints[i],
                self.received[i],
                self.sent[i],
                self.traffic[i]
            );
        }
        let _ = writeln!(out, "max |U_i|      {}", self.max_u_size);
        let _ = writeln!(out, "M_max          {}", self.max_footprint);
        let _ = writeln!(out, "T_max          {}", self.max_traffic);
        let _ = writeln!(out, "T_sum          {}", self.total_traffic);
        let _ = writeln!(out, "isolated |V|   {}", self.isolated_v_count);
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricSelector {
    MaxTraffic,
    TotalTraffic,
    MaxFootprint,
}

impl MetricSelector {
    pub const ALL: [MetricSelector; 3] = [
        MetricSelector::MaxFootprint,
        MetricSelector::MaxTraffic,
        MetricSelector::TotalTraffic,
    ];
}

fn evaluate_with_sets(
    g: &BipartiteGraph,
    up: &UPartition,
    vp: &VPartition,
    sets: &NeighborSets,
) -> MetricsReport {
    let k = up.k();
    let mut received = vec![0u64; k];
    let mut sent = vec![0u64; k];
    let mut isolated = 0;
    for v in 0..g.num_v() {
        let owner = vp.part_of(v);
        let mut needed = false;
        for (i, r) in received.iter_mut().enumerate() {
            if !sets.contains(i, v) {
                continue;
            }
            needed = true;
            if i != owner {
                *r += 1;
                sent[owner] += 1;
            }
        }
        isolated += usize::from(!needed);
    }
    let traffic: Vec<u64> = received.iter().zip(&sent).map(|(r, s)| r + s).collect();
    let footprints = sets.sizes().to_vec();
    MetricsReport {
        k,
        u_sizes: up.sizes().to_vec(),
        max_u_size: up.sizes().iter().copied().max().unwrap_or(0),
        v_sizes: vp.sizes().to_vec(),
        max_footprint: footprints.iter().copied().max().unwrap_or(0),
        footprints,
        max_traffic: traffic.iter().copied().max().unwrap_or(0),
        total_traffic: traffic.iter().sum(),
        traffic,
        received,
        sent,
        isolated_v_count: isolated,
        config: None,
    }
}

/// Exact metrics for a `U` and `V` assignment of `g`.
pub fn evaluate(g: &BipartiteGraph, up: &UPartition, vp: &VPartition) -> Result<MetricsReport> {
    if up.k() != vp.k() {
        return Err(Error::invalid(format!(
            "U partition has k={}, V partition has k={}",
            up.k(),
            vp.k()
        )));
    }
    if up.len() != g.num_u() || vp.len() != g.num_v() {
        return Err(Error::invalid(format!(
            "partitions cover {}x{} vertices, graph has {}x{}",
            up.len(),
            vp.len(),
            g.num_u(),
            g.num_v()
        )));
    }
    let sets = NeighborSets::from_partition(g, up);
    Ok(evaluate_with_sets(g, up, vp, &sets))
}

/// `(random - candidate) / candidate × 100`; `+∞` when only the candidate
/// is zero and `0` when both are.
pub fn improvement(random: f64, candidate: f64) -> f64 {
    if candidate == 0.0 {
        if random > 0.0 {
            f64::INFINITY
        } else {
            0.0
        }
    } else {
        (random - candidate) / candidate * 100.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct BaselineOptions {
    /// Place `V` uniformly over all machines instead of among the machines
    /// needing each vertex.
    pub uniform_v: bool,
}

/// Metric averages over random placements.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomBaseline {
    pub trials: usize,
    pub max_footprint: f64,
    pub max_traffic: f64,
    pub total_traffic: f64,
}

impl RandomBaseline {
    pub fn metric(&self, which: MetricSelector) -> f64 {
        match which {
            MetricSelector::MaxTraffic => self.max_traffic,
            MetricSelector::TotalTraffic => self.total_traffic,
            MetricSelector::MaxFootprint => self.max_footprint,
        }
    }

    pub fn improvement_of(&self, candidate: &MetricsReport, which: MetricSelector) -> f64 {
        improvement(self.metric(which), candidate.metric(which))
    }
}

/// A balanced random `U` assignment (a shuffled round-robin, so sizes differ
/// by at most one) and a random `V` assignment on top of it.
pub fn random_partition<R: Rng>(
    g: &BipartiteGraph,
    k: usize,
    options: BaselineOptions,
    rng: &mut R,
) -> Result<(UPartition, VPartition, NeighborSets)> {
    let mut order: Vec<usize> = (0..g.num_u()).collect();
    order.shuffle(rng);
    let mut assign = vec![0; g.num_u()];
    for (pos, &u) in order.iter().enumerate() {
        assign[u] = pos % k;
    }
    let up = UPartition::new(k, assign)?;
    let sets = NeighborSets::from_partition(g, &up);
    let mut needers = Vec::with_capacity(k);
    let v_assign = (0..g.num_v())
        .map(|v| {
            if options.uniform_v {
                return rng.random_range(0..k);
            }
            needers.clear();
            needers.extend((0..k).filter(|&i| sets.contains(i, v)));
            if needers.is_empty() {
                rng.random_range(0..k)
            } else {
                needers[rng.random_range(0..needers.len())]
            }
        })
        .collect();
    Ok((up, VPartition::new(k, v_assign)?, sets))
}

pub fn random_baseline(
    g: &BipartiteGraph,
    k: usize,
    trials: usize,
    seed: u64,
    options: BaselineOptions,
) -> Result<RandomBaseline> {
    if trials == 0 {
        return Err(Error::invalid("trials must be >= 1"));
    }
    if k == 0 {
        return Err(Error::invalid("partition count must be >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sums = [0.0f64; 3];
    for _ in 0..trials {
        let (up, vp, sets) = random_partition(g, k, options, &mut rng)?;
        let r = evaluate_with_sets(g, &up, &vp, &sets);
        sums[0] += r.max_footprint as f64;
        sums[1] += r.max_traffic as f64;
        sums[2] += r.total_traffic as f64;
    }
    let n = trials as f64;
    Ok(RandomBaseline {
        trials,
        max_footprint: sums[0] / n,
        max_traffic: sums[1] / n,
        total_traffic: sums[2] / n,
    })
}

/// Improvement of `candidate` over the average of `trials` random
/// placements, in percent.
pub fn improvement_vs_random(
    g: &BipartiteGraph,
    candidate: &MetricsReport,
    which: MetricSelector,
    trials: usize,
    seed: u64,
    options: BaselineOptions,
) -> Result<f64> {
    let baseline = random_baseline(g, candidate.k, trials, seed, options)?;
    Ok(baseline.improvement_of(candidate, which))
}
