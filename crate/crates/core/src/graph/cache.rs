//! Binary graph cache for fast reloads.
//!
//! All integers are little-endian. Layout, version 1:
//!
//! | offset           | size              | field                          |
//! |------------------|-------------------|--------------------------------|
//! | 0                | 8                 | magic `PARSAGRF`               |
//! | 8                | 4                 | format version (`u32`, = 1)    |
//! | 12               | 4                 | flags (`u32`, must be 0)       |
//! | 16               | 8                 | `num_u` (`u64`)                |
//! | 24               | 8                 | `num_v` (`u64`)                |
//! | 32               | 8                 | `num_edges` (`u64`)            |
//! | 40               | 8 * (num_u + 1)   | `U`-side CSR offsets (`u64`)   |
//! | ...              | 4 * num_edges     | `U`-side neighbor ids (`u32`)  |
//!
//! Only the `U` side is stored; the `V` side is rebuilt on load. The file
//! ends right after the last neighbor id.

use std::fs;
use std::path::Path;

use super::BipartiteGraph;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"PARSAGRF";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 40;

pub fn encode(g: &BipartiteGraph) -> Result<Vec<u8>> {
    if g.num_v() > u32::MAX as usize + 1 {
        return Err(Error::invalid("graph cache stores v ids as u32"));
    }
    let (offsets, adj) = g.u_csr();
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * offsets.len() + 4 * adj.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&0u32.to_le_bytes());
    out.extend_from_slice(&(g.num_u() as u64).to_le_bytes());
    out.extend_from_slice(&(g.num_v() as u64).to_le_bytes());
    out.extend_from_slice(&(g.num_edges() as u64).to_le_bytes());
    for &o in offsets {
        out.extend_from_slice(&(o as u64).to_le_bytes());
    }
    for &v in adj {
        out.extend_from_slice(&(v as u32).to_le_bytes());
    }
    Ok(out)
}

pub fn decode(bytes: &[u8]) -> Result<BipartiteGraph> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Cache("truncated header".into()));
    }
    if &bytes[0..8] != MAGIC {
        return Err(Error::Cache("bad magic".into()));
    }
    let version = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
    if version != VERSION {
        return Err(Error::Cache(format!("unsupported version {version}")));
    }
    let flags = u32::from_le_bytes(bytes[12..16].try_into().unwrap());
    if flags != 0 {
        return Err(Error::Cache(format!("unknown flags {flags:#x}")));
    }
    let read_u64 = |at: usize| u64::from_le_bytes(bytes[at..at + 8].try_into().unwrap()) as usize;
    let (num_u, num_v, num_edges) = (read_u64(16), read_u64(24), read_u64(32));

    let expected = num_u
        .checked_add(1)
        .and_then(|n| n.checked_mul(8))
        .and_then(|n| n.checked_add(num_edges.checked_mul(4)?))
        .and_then(|n| n.checked_add(HEADER_LEN))
        .ok_or_else(|| Error::Cache("size overflow".into()))?;
    if bytes.len() != expected {
        return Err(Error::Cache(format!(
            "expected {expected} bytes, found {}",
            bytes.len()
        )));
    }

    let offsets: Vec<usize> = bytes[HEADER_LEN..HEADER_LEN + 8 * (num_u + 1)]
        .chunks_exact(8)
        .map(|c| u64::from_le_bytes(c.try_into().unwrap()) as usize)
        .collect();
    let adj: Vec<usize> = bytes[HEADER_LEN + 8 * (num_u + 1)..]
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes(c.try_into().unwrap()) as usize)
        .collect();
    BipartiteGraph::from_csr(num_u, num_v, offsets, adj).map_err(|e| Error::Cache(e.to_string()))
}

pub fn write(g: &BipartiteGraph, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, encode(g)?)?;
    Ok(())
}

pub fn read(path: impl AsRef<Path>) -> Result<BipartiteGraph> {
    decode(&fs::read(path)?)
}
