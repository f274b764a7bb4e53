#![allow(dead_code)]

use parsa_core::graph::synth::{power_law_bipartite, SyntheticConfig};
use parsa_core::BipartiteGraph;
use proptest::prelude::*;

/// Graphs with up to `max_u` data vertices, `max_v` parameters and four
/// edges per data vertex on average.
pub fn arb_graph(max_u: usize, max_v: usize) -> impl Strategy<Value = BipartiteGraph> {
    (1..=max_u, 1..=max_v).prop_flat_map(|(nu, nv)| {
        proptest::collection::vec((0..nu, 0..nv), 0..(nu * 4))
            .prop_map(move |es| BipartiteGraph::from_edges(nu, nv, es).unwrap())
    })
}

pub fn synthetic(num_u: usize, num_v: usize, seed: u64) -> BipartiteGraph {
    power_law_bipartite(&SyntheticConfig {
        num_u,
        num_v,
        exponent: 1.5,
        seed,
    })
    .unwrap()
}
