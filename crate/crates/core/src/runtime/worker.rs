use std::ops::Range;
use std::sync::mpsc::{self, Receiver, Sender};
use std::thread;

use super::messages::{Ack, PullRequest, PushMessage, PROTOCOL_VERSION};
use super::server::Request;
use super::{BlockEvent, MaxDelay, TaskSpec};
use crate::error::{Error, Result};
use crate::graph::{BlockDivision, SubgraphBlock};
use crate::partition_u::{partition_block, BalanceRule, ScopedSets};

#[derive(Clone)]
pub(crate) struct ShardLink {
    pub range: Range<usize>,
    pub requests: Sender<Request>,
}

pub(crate) struct WorkerSetup<'a, 'g> {
    pub id: usize,
    pub k: usize,
    pub rule: BalanceRule,
    pub division: &'a BlockDivision<'g>,
    /// Block ids in processing order.
    pub blocks: Vec<usize>,
    pub task: TaskSpec,
    pub shards: Vec<ShardLink>,
    /// Pushes this worker made in earlier passes.
    pub clock_base: u64,
    pub prefetch: bool,
    pub record_deltas: bool,
}

pub(crate) struct WorkerReport {
    /// `(global u, partition)` for every vertex processed.
    pub assignments: Vec<(usize, usize)>,
    pub events: Vec<BlockEvent>,
    pub clock: u64,
}

fn disconnected() -> Error {
    Error::Runtime("server shard went away".into())
}

struct Acks {
    rx: Receiver<Result<Ack>>,
    tx: Sender<Result<Ack>>,
    per_shard: Vec<u64>,
}

impl Acks {
    fn new(shards: usize, base: u64) -> Self {
        let (tx, rx) = mpsc::channel();
        Self {
            rx,
            tx,
            per_shard: vec![base; shards],
        }
    }

    /// Pushes acknowledged by every shard.
    fn acked(&self) -> u64 {
        self.per_shard.iter().copied().min().unwrap_or(u64::MAX)
    }

    fn wait_for(&mut self, clock: u64) -> Result<()> {
        while self.acked() < clock {
            let ack = self.rx.recv().map_err(|_| disconnected())??;
            let slot = &mut self.per_shard[ack.shard];
            *slot = (*slot).max(ack.clock);
        }
        Ok(())
    }
}

impl WorkerSetup<'_, '_> {
    fn pull(&self, block: &SubgraphBlock) -> Result<(ScopedSets, u64)> {
        let mut pending = Vec::with_capacity(self.shards.len());
        for link in &self.shards {
            let lo = block.v_ids.partition_point(|&v| v < link.range.start);
            let hi = block.v_ids.partition_point(|&v| v < link.range.end);
            let (tx, rx) = mpsc::channel();
            let req = PullRequest {
                version: PROTOCOL_VERSION,
                worker: self.id,
                scope: block.v_ids[lo..hi].to_vec(),
            };
            link.requests
                .send(Request::Pull(req, tx))
                .map_err(|_| disconnected())?;
            pending.push(rx);
        }
        let mut members = vec![Vec::new(); self.k];
        let mut totals = vec![0; self.k];
        let mut observed = u64::MAX;
        for rx in pending {
            let reply = rx.recv().map_err(|_| disconnected())??;
            if reply.members.len() != self.k || reply.totals.len() != self.k {
                return Err(Error::Protocol(format!(
                    "shard {} replied with {} partitions, expected {}",
                    reply.shard,
                    reply.members.len(),
                    self.k
                )));
            }
            for (i, ids) in reply.members.iter().enumerate() {
                for v in ids {
                    let lv = block
                        .v_ids
                        .binary_search(v)
                        .map_err(|_| Error::Protocol(format!("v={v} outside pull scope")))?;
                    members[i].push(lv);
                }
                totals[i] += reply.totals[i];
            }
            observed = observed.min(reply.clocks.get(self.id).copied().unwrap_or(0));
        }
        Ok((
            ScopedSets::from_parts(block.v_ids.len(), members, totals),
            observed,
        ))
    }

    fn push(&self, acks: &Acks, clock: u64, deltas: &[Vec<usize>]) -> Result<()> {
        for link in &self.shards {
            let slice = deltas
                .iter()
                .map(|ids| {
                    let lo = ids.partition_point(|&v| v < link.range.start);
                    let hi = ids.partition_point(|&v| v < link.range.end);
                    ids[lo..hi].to_vec()
                })
                .collect();
            let msg = PushMessage {
                version: PROTOCOL_VERSION,
                worker: self.id,
                clock,
                initializing: self.task.initializing,
                deltas: slice,
            };
            link.requests
                .send(Request::Push(msg, acks.tx.clone()))
                .map_err(|_| disconnected())?;
        }
        Ok(())
    }

    fn process(
        &self,
        block: SubgraphBlock,
        step: usize,
        acks: &mut Acks,
        loads: &mut [usize],
        report: &mut WorkerReport,
    ) -> Result<()> {
        let base = self.clock_base;
        if let MaxDelay::Bounded(tau) = self.task.max_delay {
            // block `step` may start once pushes through `step - tau - 1` are acknowledged
            let needed = (step as u64).saturating_sub(tau);
            acks.wait_for(base + needed)?;
        }
        let acked_at_start = acks.acked().saturating_sub(base);

        let (mut scoped, observed) = self.pull(&block)?;
        let pulled = scoped.clone();
        let zero = vec![0; self.k];
        let block_loads = if self.task.initializing {
            &zero[..]
        } else {
            &*loads
        };
        let local = partition_block(&block.local_graph, &mut scoped, block_loads, self.rule)?;

        let deltas: Vec<Vec<usize>> = if self.task.initializing {
            let mut fresh = vec![Vec::new(); self.k];
            for (lu, &p) in local.iter().enumerate() {
                fresh[p].extend(
                    block
                        .local_graph
                        .u_neighbors(lu)
                        .iter()
                        .map(|&lv| block.v_ids[lv]),
                );
            }
            for ids in &mut fresh {
                ids.sort_unstable();
                ids.dedup();
            }
            fresh
        } else {
            (0..self.k)
                .map(|i| {
                    scoped
                        .local_members(i)
                        .filter(|&lv| !pulled.contains(i, lv))
                        .map(|lv| block.v_ids[lv])
                        .collect()
                })
                .collect()
        };
        report.clock += 1;
        self.push(acks, report.clock, &deltas)?;

        if !self.task.initializing {
            for (lu, &p) in local.iter().enumerate() {
                report.assignments.push((block.u_ids[lu], p));
                loads[p] += 1;
            }
        }
        report.events.push(BlockEvent {
            worker: self.id,
            initializing: self.task.initializing,
            step,
            block_id: block.block_id,
            acked_at_start,
            observed_clock: observed.saturating_sub(base),
            deltas: self.record_deltas.then_some(deltas),
        });
        Ok(())
    }

    pub(crate) fn run(self) -> Result<WorkerReport> {
        let mut acks = Acks::new(self.shards.len(), self.clock_base);
        let mut loads = vec![0; self.k];
        let mut report = WorkerReport {
            assignments: Vec::new(),
            events: Vec::new(),
            clock: self.clock_base,
        };
        if self.prefetch {
            thread::scope(|s| -> Result<()> {
                let (tx, rx) = mpsc::sync_channel(1);
                let division = self.division;
                let ids = &self.blocks;
                s.spawn(move || {
                    for &j in ids {
                        if tx.send(division.block(j)).is_err() {
                            break;
                        }
                    }
                });
                for (step, block) in rx.iter().enumerate() {
                    self.process(block, step, &mut acks, &mut loads, &mut report)?;
                }
                Ok(())
            })?;
        } else {
            for (step, &j) in self.blocks.iter().enumerate() {
                let block = self.division.block(j);
                self.process(block, step, &mut acks, &mut loads, &mut report)?;
            }
        }
        acks.wait_for(report.clock)?;
        Ok(report)
    }
}
