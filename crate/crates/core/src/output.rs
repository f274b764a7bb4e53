//! Partition and metrics files.
//!
//! An assignment file has one `<id> <partition>` line per vertex in id
//! order. Next to it sits a JSON sidecar with the partition count, the
//! per-partition sizes and the configuration that produced it.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::MetricsReport;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssignmentSidecar {
    pub side: String,
    pub k: usize,
    pub count: usize,
    pub sizes: Vec<usize>,
    pub seed: Option<u64>,
    pub config: serde_json::Value,
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("json")
}

/// Writes `<id> <partition>` lines and the sidecar next to `path`.
pub fn write_assignment(path: &Path, assign: &[usize], sidecar: &AssignmentSidecar) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for (id, p) in assign.iter().enumerate() {
        writeln!(w, "{id} {p}")?;
    }
    w.flush()?;
    let text = serde_json::to_string_pretty(sidecar)?;
    std::fs::write(sidecar_path(path), text + "\n")?;
    Ok(())
}

/// Reads an assignment file back; ids must be dense and in order.
pub fn read_assignment(path: &Path) -> Result<Vec<usize>> {
    let reader = BufReader::new(File::open(path)?);
    let mut assign = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let parsed = match (it.next(), it.next(), it.next()) {
            (Some(id), Some(p), None) => id.parse::<usize>().ok().zip(p.parse::<usize>().ok()),
            _ => None,
        };
        let (id, p) = parsed.ok_or_else(|| Error::parse(lineno, "expected `<id> <partition>`"))?;
        if id != assign.len() {
            return Err(Error::parse(
                lineno,
                format!("expected id {}, got {id}", assign.len()),
            ));
        }
        assign.push(p);
    }
    Ok(assign)
}

/// Writes `metrics.json` and the `metrics.txt` table into `dir`.
pub fn write_metrics(dir: &Path, report: &MetricsReport) -> Result<()> {
    let text = serde_json::to_string_pretty(report)?;
    std::fs::write(dir.join("metrics.json"), text + "\n")?;
    std::fs::write(dir.join("metrics.txt"), report.to_table())?;
    Ok(())
}
