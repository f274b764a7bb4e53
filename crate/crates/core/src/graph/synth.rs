//! Synthetic power-law bipartite graphs.

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};
use serde::{Deserialize, Serialize};

use super::BipartiteGraph;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticConfig {
    pub num_u: usize,
    pub num_v: usize,
    /// Zipf exponent of the `v`-degree distribution.
    pub exponent: f64,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            num_u: 10_000,
            num_v: 5_000,
            exponent: 1.5,
            seed: 0,
        }
    }
}

/// Each `v` draws its degree from a Zipf law on `1..=num_u` and connects to
/// that many distinct `u` chosen uniformly.
pub fn power_law_bipartite(cfg: &SyntheticConfig) -> Result<BipartiteGraph> {
    if cfg.num_u == 0 {
        return Err(Error::invalid("synthetic graph needs num_u >= 1"));
    }
    let zipf = Zipf::new(cfg.num_u as f64, cfg.exponent)
        .map_err(|e| Error::invalid(format!("zipf parameters: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut edges = Vec::new();
    for v in 0..cfg.num_v {
        let degree = (zipf.sample(&mut rng) as usize).clamp(1, cfg.num_u);
        for u in index::sample(&mut rng, cfg.num_u, degree) {
            edges.push((u, v));
        }
    }
    BipartiteGraph::from_edges(cfg.num_u, cfg.num_v, edges)
}
