//! Multi-worker partitioning against shared, sharded server state.
//!
//! A scheduler splits `U` into `b` blocks and hands them round-robin to
//! worker threads, first for `a` initialization passes, then for the
//! production pass. Per block a worker pulls the slice of the neighbor
//! sets its block touches, runs the greedy locally and pushes back what
//! changed. Server shards are threads owning a contiguous `v` range each.
//! A worker may run ahead of its own unacknowledged pushes by at most
//! `τ` blocks.

pub mod messages;
mod server;
mod worker;

use std::fmt;
use std::str::FromStr;
use std::sync::mpsc;
use std::thread;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, BlockDivision};
use crate::partition_u::{global_initialization, GreedyConfig, NeighborSets, UPartition, UNASSIGNED};

pub use messages::{Ack, PullReply, PullRequest, PushMessage, PROTOCOL_VERSION};
pub use server::{shard_ranges, ServerState};

use server::Request;
use worker::{ShardLink, WorkerReport, WorkerSetup};

/// Bound `τ` on how far a worker may run ahead of its acknowledged pushes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum MaxDelay {
    Bounded(u64),
    Unbounded,
}

impl Default for MaxDelay {
    fn default() -> Self {
        MaxDelay::Bounded(0)
    }
}

impl fmt::Display for MaxDelay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MaxDelay::Bounded(t) => write!(f, "{t}"),
            MaxDelay::Unbounded => f.write_str("inf"),
        }
    }
}

impl FromStr for MaxDelay {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inf" | "unbounded" => Ok(MaxDelay::Unbounded),
            _ => s
                .parse()
                .map(MaxDelay::Bounded)
                .map_err(|_| Error::invalid(format!("delay must be an integer or `inf`, got `{s}`"))),
        }
    }
}

impl From<MaxDelay> for String {
    fn from(d: MaxDelay) -> String {
        d.to_string()
    }
}

impl TryFrom<String> for MaxDelay {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuntimeConfig {
    pub workers: usize,
    pub server_shards: usize,
    pub max_delay: MaxDelay,
    /// Build the next block on a helper thread while the current one runs.
    pub prefetch: bool,
    /// Seed the servers with a greedy partition of this fraction of `U`.
    pub global_init: Option<f64>,
    /// Keep every pushed delta in the trace.
    #[serde(default)]
    pub record_deltas: bool,
}

impl Default for RuntimeConfig {
    fn default() -> Self {
        Self {
            workers: 1,
            server_shards: 1,
            max_delay: MaxDelay::default(),
            prefetch: false,
            global_init: None,
            record_deltas: false,
        }
    }
}

impl RuntimeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.workers == 0 {
            return Err(Error::invalid("workers must be >= 1"));
        }
        if self.server_shards == 0 {
            return Err(Error::invalid("server shards must be >= 1"));
        }
        if let Some(f) = self.global_init {
            if !(f > 0.0 && f <= 1.0) {
                return Err(Error::invalid(format!(
                    "global initialization fraction must be in (0, 1], got {f}"
                )));
            }
        }
        Ok(())
    }
}

/// What the scheduler asks every worker to do in one pass.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TaskSpec {
    pub pass_count: usize,
    pub max_delay: MaxDelay,
    pub initializing: bool,
}

/// One processed block, as seen by its worker.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockEvent {
    pub worker: usize,
    pub initializing: bool,
    /// Position of the block in this worker's list for the pass.
    pub step: usize,
    pub block_id: usize,
    /// The worker's own pushes in this pass acknowledged by every shard
    /// when the block started.
    pub acked_at_start: u64,
    /// The smallest count of this worker's pushes in this pass that any
    /// shard had applied when answering the block's pull.
    pub observed_clock: u64,
    pub deltas: Option<Vec<Vec<usize>>>,
}

#[derive(Clone, Debug)]
pub struct ParallelOutcome {
    pub partition: UPartition,
    pub sets: NeighborSets,
    /// Server state right before the production pass.
    pub initial_sets: NeighborSets,
    pub events: Vec<BlockEvent>,
}

fn snapshot(links: &[ShardLink], k: usize, num_v: usize) -> Result<NeighborSets> {
    let mut sets = NeighborSets::new(k, num_v);
    for link in links {
        let (tx, rx) = mpsc::channel();
        link.requests
            .send(Request::Snapshot(tx))
            .map_err(|_| Error::Runtime("server shard went away".into()))?;
        let state = rx
            .recv()
            .map_err(|_| Error::Runtime("server shard went away".into()))?;
        for i in 0..k {
            for v in state.members(i) {
                sets.insert(i, v);
            }
        }
    }
    Ok(sets)
}

#[allow(clippy::too_many_arguments)]
fn run_pass(
    division: &BlockDivision<'_>,
    cfg: &GreedyConfig,
    rt: &RuntimeConfig,
    links: &[ShardLink],
    task: TaskSpec,
    clocks: &mut [u64],
    events: &mut Vec<BlockEvent>,
) -> Result<Vec<(usize, usize)>> {
    let workers = rt.workers;
    let mut lists = vec![Vec::new(); workers];
    for p in 0..task.pass_count {
        lists[p % workers].push(p % division.len());
    }
    let reports: Vec<Result<WorkerReport>> = thread::scope(|s| {
        let handles: Vec<_> = lists
            .into_iter()
            .enumerate()
            .map(|(id, blocks)| {
                let setup = WorkerSetup {
                    id,
                    k: cfg.k,
                    rule: cfg.balance_rule,
                    division,
                    blocks,
                    task,
                    shards: links.to_vec(),
                    clock_base: clocks[id],
                    prefetch: rt.prefetch,
                    record_deltas: rt.record_deltas,
                };
                s.spawn(move || setup.run())
            })
            .collect();
        handles
            .into_iter()
            .map(|h| {
                h.join()
                    .unwrap_or_else(|_| Err(Error::Runtime("worker panicked".into())))
            })
            .collect()
    });
    let mut assignments = Vec::new();
    for (id, report) in reports.into_iter().enumerate() {
        let report = report.map_err(|e| match e {
            Error::Runtime(m) => Error::Runtime(format!("worker {id}: {m}")),
            other => other,
        })?;
        clocks[id] = report.clock;
        events.extend(report.events);
        assignments.extend(report.assignments);
    }
    Ok(assignments)
}

/// Partitions `U` with `rt.workers` concurrent workers.
///
/// With one worker and `τ = 0` the result equals
/// [`run_sequential`](crate::partition_u::run_sequential) started from the
/// same initial sets.
pub fn run_parallel(g: &BipartiteGraph, cfg: &GreedyConfig, rt: &RuntimeConfig) -> Result<ParallelOutcome> {
    cfg.validate()?;
    rt.validate()?;
    let k = cfg.k;
    let initial = match rt.global_init {
        Some(fraction) => global_initialization(g, k, fraction, cfg.seed, cfg.balance_rule)?,
        None => NeighborSets::new(k, g.num_v()),
    };
    if g.num_u() == 0 {
        return Ok(ParallelOutcome {
            partition: UPartition::new(k, Vec::new())?,
            sets: initial.clone(),
            initial_sets: initial,
            events: Vec::new(),
        });
    }
    let division = BlockDivision::new(g, cfg.b, cfg.seed)?;

    thread::scope(|s| {
        let mut links = Vec::with_capacity(rt.server_shards);
        for (shard, range) in shard_ranges(g.num_v(), rt.server_shards).into_iter().enumerate() {
            let mut state = ServerState::new(shard, range.clone(), k, rt.workers);
            state.load(&initial)?;
            let (tx, rx) = mpsc::channel();
            s.spawn(move || server::serve(state, rx));
            links.push(ShardLink { range, requests: tx });
        }

        let mut clocks = vec![0u64; rt.workers];
        let mut events = Vec::new();
        if cfg.a > 0 {
            let task = TaskSpec {
                pass_count: cfg.a,
                max_delay: rt.max_delay,
                initializing: true,
            };
            run_pass(&division, cfg, rt, &links, task, &mut clocks, &mut events)?;
        }
        let initial_sets = snapshot(&links, k, g.num_v())?;
        let task = TaskSpec {
            pass_count: division.len(),
            max_delay: rt.max_delay,
            initializing: false,
        };
        let assignments = run_pass(&division, cfg, rt, &links, task, &mut clocks, &mut events)?;
        let sets = snapshot(&links, k, g.num_v())?;

        let mut assign = vec![UNASSIGNED; g.num_u()];
        for (u, p) in assignments {
            if assign[u] != UNASSIGNED {
                return Err(Error::Runtime(format!("u={u} assigned twice")));
            }
            assign[u] = p;
        }
        if let Some(u) = assign.iter().position(|&p| p == UNASSIGNED) {
            return Err(Error::Runtime(format!("u={u} never assigned")));
        }
        Ok(ParallelOutcome {
            partition: UPartition::new(k, assign)?,
            sets,
            initial_sets,
            events,
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delay_parsing() {
        assert_eq!("inf".parse::<MaxDelay>().unwrap(), MaxDelay::Unbounded);
        assert_eq!("3".parse::<MaxDelay>().unwrap(), MaxDelay::Bounded(3));
        assert!("-1".parse::<MaxDelay>().is_err());
        let json = serde_json::to_string(&MaxDelay::Unbounded).unwrap();
        assert_eq!(json, "\"inf\"");
        assert_eq!(
            serde_json::from_str::<MaxDelay>("\"7\"").unwrap(),
            MaxDelay::Bounded(7)
        );
    }

    #[test]
    fn config_validation() {
        assert!(RuntimeConfig::default().validate().is_ok());
        assert!(RuntimeConfig {
            workers: 0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(RuntimeConfig {
            server_shards: 0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(RuntimeConfig {
            global_init: Some(1.5),
            ..Default::default()
        }
        .validate()
        .is_err());
    }
}
