use std::ops::Range;
use std::sync::mpsc::{Receiver, Sender};

use fixedbitset::FixedBitSet;

use super::messages::{check_version, Ack, PullReply, PullRequest, PushMessage, PROTOCOL_VERSION};
use crate::error::{Error, Result};
use crate::partition_u::NeighborSets;

/// One shard of the authoritative neighbor sets: membership of the `v` ids
/// in `range` for every partition, plus a push clock per worker.
#[derive(Clone, Debug)]
pub struct ServerState {
    shard: usize,
    range: Range<usize>,
    sets: Vec<FixedBitSet>,
    sizes: Vec<usize>,
    clocks: Vec<u64>,
}

impl ServerState {
    pub fn new(shard: usize, range: Range<usize>, k: usize, num_workers: usize) -> Self {
        let width = range.len();
        Self {
            shard,
            range,
            sets: vec![FixedBitSet::with_capacity(width); k],
            sizes: vec![0; k],
            clocks: vec![0; num_workers],
        }
    }

    pub fn k(&self) -> usize {
        self.sets.len()
    }

    pub fn range(&self) -> Range<usize> {
        self.range.clone()
    }

    pub fn clocks(&self) -> &[u64] {
        &self.clocks
    }

    /// This shard's part of `|S_i|`.
    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Global ids in `S_i` held by this shard, ascending.
    pub fn members(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let lo = self.range.start;
        self.sets[i].ones().map(move |x| x + lo)
    }

    /// Seeds the shard with its slice of `sets`.
    pub fn load(&mut self, sets: &NeighborSets) -> Result<()> {
        if sets.k() != self.k() {
            return Err(Error::Protocol(format!(
                "initial sets have k={}, shard has k={}",
                sets.k(),
                self.k()
            )));
        }
        for i in 0..self.k() {
            self.sets[i].clear();
            self.sizes[i] = 0;
            for v in sets.members(i).filter(|v| self.range.contains(v)) {
                self.sets[i].insert(v - self.range.start);
                self.sizes[i] += 1;
            }
        }
        Ok(())
    }

    fn check_ids(&self, ids: &[usize]) -> Result<()> {
        if ids.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Protocol("id list is not strictly increasing".into()));
        }
        if let Some(&v) = ids.iter().find(|v| !self.range.contains(v)) {
            return Err(Error::Protocol(format!(
                "v={v} outside shard {} range {:?}",
                self.shard, self.range
            )));
        }
        Ok(())
    }

    /// Applies one push: replace when initializing, union otherwise.
    pub fn apply_push(&mut self, msg: &PushMessage) -> Result<Ack> {
        check_version(msg.version)?;
        if msg.deltas.len() != self.k() {
            return Err(Error::Protocol(format!(
                "push carries {} partitions, shard has k={}",
                msg.deltas.len(),
                self.k()
            )));
        }
        let expected = self
            .clocks
            .get(msg.worker)
            .map(|c| c + 1)
            .ok_or_else(|| Error::Protocol(format!("unknown worker {}", msg.worker)))?;
        if msg.clock != expected {
            return Err(Error::Protocol(format!(
                "worker {} pushed clock {}, expected {expected}",
                msg.worker, msg.clock
            )));
        }
        for ids in &msg.deltas {
            self.check_ids(ids)?;
        }
        let lo = self.range.start;
        for (i, ids) in msg.deltas.iter().enumerate() {
            if msg.initializing {
                self.sets[i].clear();
                self.sizes[i] = 0;
            }
            for &v in ids {
                if !self.sets[i].put(v - lo) {
                    self.sizes[i] += 1;
                }
            }
        }
        self.clocks[msg.worker] = msg.clock;
        Ok(Ack {
            version: PROTOCOL_VERSION,
            shard: self.shard,
            worker: msg.worker,
            clock: msg.clock,
        })
    }

    /// `S_i ∩ scope` for every `i`, with this shard's sizes and clocks.
    pub fn pull(&self, req: &PullRequest) -> Result<PullReply> {
        check_version(req.version)?;
        self.check_ids(&req.scope)?;
        let lo = self.range.start;
        let members = self
            .sets
            .iter()
            .map(|set| {
                req.scope
                    .iter()
                    .copied()
                    .filter(|&v| set.contains(v - lo))
                    .collect()
            })
            .collect();
        Ok(PullReply {
            version: PROTOCOL_VERSION,
            shard: self.shard,
            members,
            totals: self.sizes.clone(),
            clocks: self.clocks.clone(),
        })
    }
}

/// Splits `0..num_v` into `shards` contiguous ranges whose lengths differ by
/// at most one.
pub fn shard_ranges(num_v: usize, shards: usize) -> Vec<Range<usize>> {
    let base = num_v / shards;
    let extra = num_v % shards;
    let mut start = 0;
    (0..shards)
        .map(|s| {
            let len = base + usize::from(s < extra);
            let r = start..start + len;
            start += len;
            r
        })
        .collect()
}

pub(crate) enum Request {
    Push(PushMessage, Sender<Result<Ack>>),
    Pull(PullRequest, Sender<Result<PullReply>>),
    Snapshot(Sender<ServerState>),
}

/// Serves requests until every sender is dropped.
pub(crate) fn serve(mut state: ServerState, requests: Receiver<Request>) {
    for req in requests {
        match req {
            Request::Push(msg, reply) => {
                let _ = reply.send(state.apply_push(&msg));
            }
            Request::Pull(msg, reply) => {
                let _ = reply.send(state.pull(&msg));
            }
            Request::Snapshot(reply) => {
                let _ = reply.send(state.clone());
            }
        }
    }
}
