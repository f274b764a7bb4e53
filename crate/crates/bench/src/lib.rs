//! Fixtures shared by the criterion benches.

use parsa_core::graph::synth::{power_law_bipartite, SyntheticConfig};
use parsa_core::BipartiteGraph;

/// Power-law graph with the given sizes and the default exponent.
pub fn power_law(num_u: usize, num_v: usize, seed: u64) -> BipartiteGraph {
    power_law_bipartite(&SyntheticConfig {
        num_u,
        num_v,
        exponent: 1.5,
        seed,
    })
    .expect("valid synthetic config")
}

/// Initial greedy costs of a graph: every `u` starts at its degree.
pub fn degree_costs(g: &BipartiteGraph) -> Vec<usize> {
    (0..g.num_u()).map(|u| g.u_degree(u)).collect()
}
