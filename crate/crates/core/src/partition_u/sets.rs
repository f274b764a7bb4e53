use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, SubgraphBlock};

/// The `k` shared sets `S_i ⊆ V`, each with a cached cardinality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NeighborSets {
    num_v: usize,
    sets: Vec<FixedBitSet>,
    sizes: Vec<usize>,
}

impl NeighborSets {
    pub fn new(k: usize, num_v: usize) -> Self {
        Self {
            num_v,
            sets: vec![FixedBitSet::with_capacity(num_v); k],
            sizes: vec![0; k],
        }
    }

    /// `S_i = N(U_i)` for a complete `U` partition.
    pub fn from_partition(g: &BipartiteGraph, up: &UPartition) -> Self {
        let mut sets = Self::new(up.k(), g.num_v());
        for (u, &p) in up.assign().iter().enumerate() {
            for &v in g.u_neighbors(u) {
                sets.insert(p, v);
            }
        }
        sets
    }

    /// `S_i = N(U_i)` restricted to one block's assignment.
    pub fn from_block_assignment(
        k: usize,
        num_v: usize,
        block: &SubgraphBlock,
        local_assign: &[usize],
    ) -> Self {
        let mut sets = Self::new(k, num_v);
        for (lu, &p) in local_assign.iter().enumerate() {
            for &lv in block.local_graph.u_neighbors(lu) {
                sets.insert(p, block.v_ids[lv]);
            }
        }
        sets
    }

    pub fn k(&self) -> usize {
        self.sets.len()
    }

    pub fn num_v(&self) -> usize {
        self.num_v
    }

    #[inline]
    pub fn contains(&self, i: usize, v: usize) -> bool {
        self.sets[i].contains(v)
    }

    /// Adds `v` to `S_i`; returns whether it was new.
    pub fn insert(&mut self, i: usize, v: usize) -> bool {
        let fresh = !self.sets[i].put(v);
        self.sizes[i] += usize::from(fresh);
        fresh
    }

    pub fn size(&self, i: usize) -> usize {
        self.sizes[i]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Members of `S_i`, ascending.
    pub fn members(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.sets[i].ones()
    }

    /// Replaces `S_i` with exactly `members`.
    pub fn replace(&mut self, i: usize, members: impl IntoIterator<Item = usize>) {
        self.sets[i].clear();
        self.sizes[i] = 0;
        for v in members {
            self.insert(i, v);
        }
    }

    /// `S_i ⊇ T_i` for all `i`.
    pub fn is_superset_of(&self, other: &NeighborSets) -> bool {
        self.k() == other.k() && (0..self.k()).all(|i| other.sets[i].is_subset(&self.sets[i]))
    }

    /// Projection onto the `v` ids of a block, with global totals attached.
    pub fn scope(&self, v_ids: &[usize]) -> ScopedSets {
        let mut members = vec![FixedBitSet::with_capacity(v_ids.len()); self.k()];
        for (i, m) in members.iter_mut().enumerate() {
            for (lv, &v) in v_ids.iter().enumerate() {
                if self.sets[i].contains(v) {
                    m.insert(lv);
                }
            }
        }
        ScopedSets {
            members,
            totals: self.sizes.clone(),
        }
    }

    /// Unions a scoped view back in: `S_i ← S_i ∪ scoped_i`.
    pub fn absorb(&mut self, v_ids: &[usize], scoped: &ScopedSets) {
        for i in 0..self.k() {
            for lv in scoped.members[i].ones() {
                self.insert(i, v_ids[lv]);
            }
        }
    }

    pub(crate) fn check_compatible(&self, k: usize, num_v: usize) -> Result<()> {
        if self.k() != k || self.num_v != num_v {
            return Err(Error::invalid(format!(
                "neighbor sets are {}x{}, expected {k}x{num_v}",
                self.k(),
                self.num_v
            )));
        }
        Ok(())
    }
}

/// Neighbor sets restricted to one block's `v` ids (local numbering), plus
/// the global `|S_i|` so that balance decisions see the whole picture.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScopedSets {
    members: Vec<FixedBitSet>,
    totals: Vec<usize>,
}

impl ScopedSets {
    pub fn new(k: usize, num_local_v: usize) -> Self {
        Self {
            members: vec![FixedBitSet::with_capacity(num_local_v); k],
            totals: vec![0; k],
        }
    }

    /// Builds a view from explicit local members and global totals.
    pub fn from_parts(num_local_v: usize, members: Vec<Vec<usize>>, totals: Vec<usize>) -> Self {
        let members = members
            .into_iter()
            .map(|ms| {
                let mut bits = FixedBitSet::with_capacity(num_local_v);
                bits.extend(ms);
                bits
            })
            .collect();
        Self { members, totals }
    }

    pub fn k(&self) -> usize {
        self.members.len()
    }

    #[inline]
    pub fn contains(&self, i: usize, local_v: usize) -> bool {
        self.members[i].contains(local_v)
    }

    /// Adds a local `v` to `S_i`; the global total follows.
    #[inline]
    pub fn insert(&mut self, i: usize, local_v: usize) -> bool {
        let fresh = !self.members[i].put(local_v);
        self.totals[i] += usize::from(fresh);
        fresh
    }

    #[inline]
    pub fn total(&self, i: usize) -> usize {
        self.totals[i]
    }

    pub fn totals(&self) -> &[usize] {
        &self.totals
    }

    pub fn local_members(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.members[i].ones()
    }
}

/// Assignment of every data vertex to one of `k` partitions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UPartition {
    k: usize,
    assign: Vec<usize>,
    sizes: Vec<usize>,
}

impl UPartition {
    pub fn new(k: usize, assign: Vec<usize>) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("partition count must be >= 1"));
        }
        let mut sizes = vec![0; k];
        for (u, &p) in assign.iter().enumerate() {
            if p >= k {
                return Err(Error::invalid(format!("u={u} assigned to {p} >= k={k}")));
            }
            sizes[p] += 1;
        }
        Ok(Self { k, assign, sizes })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn assign(&self) -> &[usize] {
        &self.assign
    }

    pub fn part_of(&self, u: usize) -> usize {
        self.assign[u]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn len(&self) -> usize {
        self.assign.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assign.is_empty()
    }

    pub fn members(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.assign
            .iter()
            .enumerate()
            .filter(move |&(_, &p)| p == i)
            .map(|(u, _)| u)
    }

    /// `|N(U_i)|` for every partition.
    pub fn footprints(&self, g: &BipartiteGraph) -> Vec<usize> {
        NeighborSets::from_partition(g, self).sizes().to_vec()
    }
}
