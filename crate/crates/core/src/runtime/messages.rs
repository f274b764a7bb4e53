//! Wire types exchanged between workers and server shards.
//!
//! Every message carries [`PROTOCOL_VERSION`]; servers reject other
//! versions. Vertex ids are global and every id list is strictly
//! increasing. All types serialize with serde, so an in-process channel can
//! be swapped for a network transport without touching either side.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const PROTOCOL_VERSION: u32 = 1;

/// Changes to the neighbor sets produced by one block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PushMessage {
    pub version: u32,
    pub worker: usize,
    /// The worker's push count including this one, starting at 1.
    pub clock: u64,
    /// Replace `S_i` with `deltas[i]` instead of adding to it.
    pub initializing: bool,
    /// One sorted id list per partition; its length is `k`.
    pub deltas: Vec<Vec<usize>>,
}

/// Request for `S_i ∩ scope` for every partition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PullRequest {
    pub version: u32,
    pub worker: usize,
    pub scope: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PullReply {
    pub version: u32,
    pub shard: usize,
    /// `S_i ∩ scope` per partition, sorted.
    pub members: Vec<Vec<usize>>,
    /// The shard's share of `|S_i|`; summing over shards gives `|S_i|`.
    pub totals: Vec<usize>,
    /// Pushes applied so far, per worker.
    pub clocks: Vec<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ack {
    pub version: u32,
    pub shard: usize,
    pub worker: usize,
    pub clock: u64,
}

pub(crate) fn check_version(version: u32) -> Result<()> {
    if version != PROTOCOL_VERSION {
        return Err(Error::Protocol(format!(
            "message version {version}, expected {PROTOCOL_VERSION}"
        )));
    }
    Ok(())
}
