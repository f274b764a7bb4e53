use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::BipartiteGraph;
use crate::error::{Error, Result};

/// One subgraph of a division: a slice of `U` plus every `v` it touches.
///
/// `local_graph` uses local ids on both sides. Local `u` ids follow
/// ascending global id, and so do local `v` ids, so tie-breaks by id are
/// the same in local and global numbering.
#[derive(Clone, Debug)]
pub struct SubgraphBlock {
    pub block_id: usize,
    /// Global `u` ids, ascending; local id `i` is `u_ids[i]`.
    pub u_ids: Vec<usize>,
    /// Global `v` ids, ascending; local id `j` is `v_ids[j]`.
    pub v_ids: Vec<usize>,
    pub local_graph: BipartiteGraph,
}

impl SubgraphBlock {
    /// Materializes the subgraph induced by `u_ids` and `∪ N(u)`.
    pub fn from_u_ids(g: &BipartiteGraph, block_id: usize, mut u_ids: Vec<usize>) -> Self {
        u_ids.sort_unstable();
        u_ids.dedup();
        let mut v_ids: Vec<usize> = u_ids
            .iter()
            .flat_map(|&u| g.u_neighbors(u).iter().copied())
            .collect();
        v_ids.sort_unstable();
        v_ids.dedup();

        let mut offsets = Vec::with_capacity(u_ids.len() + 1);
        offsets.push(0);
        let mut adj = Vec::new();
        for &u in &u_ids {
            // neighbors are ascending and so is v_ids, so a merge walk suffices
            let mut cursor = 0;
            for &v in g.u_neighbors(u) {
                cursor += v_ids[cursor..].partition_point(|&x| x < v);
                adj.push(cursor);
            }
            offsets.push(adj.len());
        }
        let local_graph = BipartiteGraph::from_csr(u_ids.len(), v_ids.len(), offsets, adj)
            .expect("induced subgraph is well formed");
        Self {
            block_id,
            u_ids,
            v_ids,
            local_graph,
        }
    }

    pub fn len(&self) -> usize {
        self.u_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u_ids.is_empty()
    }
}

/// A seeded random division of `U` into `b` blocks whose sizes differ by at
/// most one. Blocks are built on demand so that only the current one needs
/// to be resident.
#[derive(Clone, Debug)]
pub struct BlockDivision<'g> {
    graph: &'g BipartiteGraph,
    order: Vec<usize>,
    bounds: Vec<usize>,
}

impl<'g> BlockDivision<'g> {
    pub fn new(graph: &'g BipartiteGraph, b: usize, seed: u64) -> Result<Self> {
        let n = graph.num_u();
        if b == 0 || b > n {
            return Err(Error::invalid(format!("block count must be in 1..={n}, got {b}")));
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

        // first n % b blocks take one extra vertex
        let (base, extra) = (n / b, n % b);
        let mut bounds = Vec::with_capacity(b + 1);
        bounds.push(0);
        for j in 0..b {
            let size = base + usize::from(j < extra);
            bounds.push(bounds[j] + size);
        }
        Ok(Self { graph, order, bounds })
    }

    pub fn len(&self) -> usize {
        self.bounds.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn graph(&self) -> &'g BipartiteGraph {
        self.graph
    }

    /// Global `u` ids in block `j`, in shuffled order.
    pub fn members(&self, j: usize) -> &[usize] {
        &self.order[self.bounds[j]..self.bounds[j + 1]]
    }

    pub fn block(&self, j: usize) -> SubgraphBlock {
        SubgraphBlock::from_u_ids(self.graph, j, self.members(j).to_vec())
    }

    pub fn iter(&self) -> impl Iterator<Item = SubgraphBlock> + '_ {
        (0..self.len()).map(|j| self.block(j))
    }
}

/// Eagerly materializes every block of a division.
pub fn divide_into_subgraphs(g: &BipartiteGraph, b: usize, seed: u64) -> Result<Vec<SubgraphBlock>> {
    Ok(BlockDivision::new(g, b, seed)?.iter().collect())
}
