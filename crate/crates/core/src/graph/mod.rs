//! Bipartite dependency graphs `G(U, V, E)`.
//!
//! `U` holds data vertices (examples, rows) and `V` holds parameter vertices
//! (features, columns). Both directions of the adjacency are stored in CSR
//! form so that `N(u)` and `N(v)` are contiguous sorted slices.

mod block;
pub mod cache;
mod load;
pub mod synth;

pub use block::{divide_into_subgraphs, BlockDivision, SubgraphBlock};
pub use load::{
    load_edge_list, load_edge_list_with_ids, load_libsvm, load_libsvm_with_ids, parse_edge_list,
    parse_libsvm, IdMap,
};

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};

/// Immutable sparse bipartite graph with adjacency in both directions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteGraph {
    num_u: usize,
    num_v: usize,
    u_offsets: Vec<usize>,
    u_adj: Vec<usize>,
    v_offsets: Vec<usize>,
    v_adj: Vec<usize>,
}

impl BipartiteGraph {
    /// Graph with no vertices.
    pub fn empty() -> Self {
        Self::from_csr(0, 0, vec![0], Vec::new()).expect("empty graph is valid")
    }

    /// Builds a graph from an edge list. Duplicate edges are collapsed.
    pub fn from_edges<I>(num_u: usize, num_v: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut edges: Vec<(usize, usize)> = edges.into_iter().collect();
        for &(u, v) in &edges {
            if u >= num_u || v >= num_v {
                return Err(Error::invalid(format!(
                    "edge ({u}, {v}) out of range for |U|={num_u}, |V|={num_v}"
                )));
            }
        }
        edges.sort_unstable();
        edges.dedup();

        let mut u_offsets = vec![0usize; num_u + 1];
        for &(u, _) in &edges {
            u_offsets[u + 1] += 1;
        }
        for i in 0..num_u {
            u_offsets[i + 1] += u_offsets[i];
        }
        let u_adj = edges.into_iter().map(|(_, v)| v).collect();
        Self::from_csr(num_u, num_v, u_offsets, u_adj)
    }

    /// Builds a graph from per-`u` neighbor lists. Lists are sorted and
    /// deduplicated.
    pub fn from_adjacency(num_v: usize, adjacency: &[Vec<usize>]) -> Result<Self> {
        let edges = adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.iter().map(move |&v| (u, v)));
        Self::from_edges(adjacency.len(), num_v, edges)
    }

    /// Builds a graph from the `U`-side CSR arrays. Each neighbor list must be
    /// strictly increasing and in range; the `V` side is derived.
    pub fn from_csr(num_u: usize, num_v: usize, u_offsets: Vec<usize>, u_adj: Vec<usize>) -> Result<Self> {
        if u_offsets.len() != num_u + 1 || u_offsets[0] != 0 {
            return Err(Error::invalid(
                "offset array must have |U|+1 entries starting at 0",
            ));
        }
        if *u_offsets.last().unwrap() != u_adj.len() {
            return Err(Error::invalid("final offset must equal the edge count"));
        }
        for u in 0..num_u {
            let (lo, hi) = (u_offsets[u], u_offsets[u + 1]);
            if lo > hi {
                return Err(Error::invalid(format!("offsets decrease at u={u}")));
            }
            let ns = &u_adj[lo..hi];
            if ns.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::invalid(format!(
                    "neighbor list of u={u} is not strictly increasing"
                )));
            }
            if let Some(&v) = ns.last() {
                if v >= num_v {
                    return Err(Error::invalid(format!("u={u} has neighbor v={v} >= |V|")));
                }
            }
        }

        let (v_offsets, v_adj) = transpose(num_u, num_v, &u_offsets, &u_adj);
        Ok(Self {
            num_u,
            num_v,
            u_offsets,
            u_adj,
            v_offsets,
            v_adj,
        })
    }

    pub fn num_u(&self) -> usize {
        self.num_u
    }

    pub fn num_v(&self) -> usize {
        self.num_v
    }

    pub fn num_edges(&self) -> usize {
        self.u_adj.len()
    }

    /// `N(u)`, sorted ascending.
    #[inline]
    pub fn u_neighbors(&self, u: usize) -> &[usize] {
        &self.u_adj[self.u_offsets[u]..self.u_offsets[u + 1]]
    }

    /// `N(v)`, sorted ascending.
    #[inline]
    pub fn v_neighbors(&self, v: usize) -> &[usize] {
        &self.v_adj[self.v_offsets[v]..self.v_offsets[v + 1]]
    }

    #[inline]
    pub fn u_degree(&self, u: usize) -> usize {
        self.u_offsets[u + 1] - self.u_offsets[u]
    }

    #[inline]
    pub fn v_degree(&self, v: usize) -> usize {
        self.v_offsets[v + 1] - self.v_offsets[v]
    }

    pub fn max_u_degree(&self) -> usize {
        (0..self.num_u).map(|u| self.u_degree(u)).max().unwrap_or(0)
    }

    /// Number of `v` with at least one incident edge.
    pub fn non_isolated_v(&self) -> usize {
        (0..self.num_v).filter(|&v| self.v_degree(v) > 0).count()
    }

    /// CSR arrays of the `U` side: `(offsets, adjacency)`.
    pub fn u_csr(&self) -> (&[usize], &[usize]) {
        (&self.u_offsets, &self.u_adj)
    }

    /// All edges in `(u, v)` lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.num_u).flat_map(move |u| self.u_neighbors(u).iter().map(move |&v| (u, v)))
    }

    /// `f(U') = |N(U')|` for a set of data vertices.
    pub fn neighborhood_size(&self, us: impl IntoIterator<Item = usize>) -> usize {
        let mut seen = FixedBitSet::with_capacity(self.num_v);
        for u in us {
            for &v in self.u_neighbors(u) {
                seen.insert(v);
            }
        }
        seen.count_ones(..)
    }
}

fn transpose(num_u: usize, num_v: usize, u_offsets: &[usize], u_adj: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let mut v_offsets = vec![0usize; num_v + 1];
    for &v in u_adj {
        v_offsets[v + 1] += 1;
    }
    for i in 0..num_v {
        v_offsets[i + 1] += v_offsets[i];
    }
    let mut cursor = v_offsets.clone();
    let mut v_adj = vec![0usize; u_adj.len()];
    // u ascending, so each N(v) comes out sorted
    for u in 0..num_u {
        for &v in &u_adj[u_offsets[u]..u_offsets[u + 1]] {
            v_adj[cursor[v]] = u;
            cursor[v] += 1;
        }
    }
    (v_offsets, v_adj)
}
