//! Placement of parameter vertices `V` on the machines holding `U`.
//!
//! Machine `i` pays, per parameter `v` it needs, one unit if `v` lives
//! elsewhere, and one unit per other machine that needs a `v` it owns:
//!
//! ```text
//! cost_i = |N(U_i)| - |V_i| + Σ_{j≠i} |V_i ∩ N(U_j)|
//! ```
//!
//! [`sweep`] assigns each `v`, in ascending id order, to the cheapest machine
//! among those that need it. Re-sweeping from a prior assignment moves a
//! vertex only when that strictly lowers the pair of costs involved, so
//! repeated sweeps stop at a single-move local optimum.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::BipartiteGraph;
use crate::partition_u::{NeighborSets, UPartition};

/// For every `v`, the ascending list of machines `i` with `v ∈ N(U_i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Demand {
    k: usize,
    offsets: Vec<usize>,
    machines: Vec<usize>,
    footprints: Vec<usize>,
}

impl Demand {
    pub fn from_sets(sets: &NeighborSets) -> Self {
        let k = sets.k();
        let mut counts = vec![0usize; sets.num_v() + 1];
        for i in 0..k {
            for v in sets.members(i) {
                counts[v + 1] += 1;
            }
        }
        for v in 0..sets.num_v() {
            counts[v + 1] += counts[v];
        }
        let offsets = counts;
        let mut cursor = offsets.clone();
        let mut machines = vec![0; offsets[sets.num_v()]];
        for i in 0..k {
            for v in sets.members(i) {
                machines[cursor[v]] = i;
                cursor[v] += 1;
            }
        }
        Self {
            k,
            offsets,
            machines,
            footprints: sets.sizes().to_vec(),
        }
    }

    pub fn from_partition(g: &BipartiteGraph, up: &UPartition) -> Self {
        Self::from_sets(&NeighborSets::from_partition(g, up))
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn num_v(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    pub fn machines(&self, v: usize) -> &[usize] {
        &self.machines[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn is_isolated(&self, v: usize) -> bool {
        self.offsets[v] == self.offsets[v + 1]
    }

    pub fn isolated_count(&self) -> usize {
        (0..self.num_v()).filter(|&v| self.is_isolated(v)).count()
    }

    /// `|N(U_i)|` per machine.
    pub fn footprints(&self) -> &[usize] {
        &self.footprints
    }

    /// Per-machine communication cost of a `V` assignment that respects
    /// the demand (every non-isolated `v` is owned by a machine needing it).
    pub fn costs(&self, vp: &VPartition) -> Result<Vec<i64>> {
        self.check(vp)?;
        let mut cost: Vec<i64> = self.footprints.iter().map(|&f| f as i64).collect();
        for v in 0..self.num_v() {
            let ms = self.machines(v);
            if ms.is_empty() {
                continue;
            }
            let o = vp.part_of(v);
            if ms.binary_search(&o).is_err() {
                return Err(Error::invalid(format!(
                    "v={v} placed on machine {o}, which does not need it"
                )));
            }
            cost[o] += ms.len() as i64 - 2;
        }
        Ok(cost)
    }

    fn check(&self, vp: &VPartition) -> Result<()> {
        if vp.k() != self.k || vp.len() != self.num_v() {
            return Err(Error::invalid(format!(
                "V partition is {}-way over {} vertices, expected {}-way over {}",
                vp.k(),
                vp.len(),
                self.k,
                self.num_v()
            )));
        }
        Ok(())
    }
}

/// Assignment of every parameter vertex to one of `k` machines.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VPartition {
    k: usize,
    assign: Vec<usize>,
    sizes: Vec<usize>,
}

impl VPartition {
    pub fn new(k: usize, assign: Vec<usize>) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("partition count must be >= 1"));
        }
        let mut sizes = vec![0; k];
        for (v, &p) in assign.iter().enumerate() {
            if p >= k {
                return Err(Error::invalid(format!("v={v} assigned to {p} >= k={k}")));
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

    pub fn part_of(&self, v: usize) -> usize {
        self.assign[v]
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
}

fn cheapest(machines: &[usize], cost: &[i64]) -> usize {
    *machines
        .iter()
        .min_by_key(|&&i| (cost[i], i))
        .expect("non-isolated vertex")
}

/// One sweep over `V` in ascending id order.
///
/// Without a prior this is the plain greedy: costs start at `|N(U_i)|`,
/// each `v` goes to the cheapest machine that needs it (ties to the smaller
/// index) and that machine's cost changes by `|{i : v ∈ N(U_i)}| - 2`.
/// Vertices no machine needs are dealt round-robin in order of appearance.
///
/// With a prior, costs are recomputed from it and each `v` is taken off its
/// owner and handed to a strictly cheaper machine if there is one, otherwise
/// back to its owner.
pub fn sweep(demand: &Demand, prior: Option<&VPartition>) -> Result<VPartition> {
    let k = demand.k();
    if k == 0 {
        return Err(Error::invalid("partition count must be >= 1"));
    }
    let mut assign = vec![0; demand.num_v()];
    match prior {
        None => {
            let mut cost: Vec<i64> = demand.footprints().iter().map(|&f| f as i64).collect();
            let mut isolated = 0;
            for (v, slot) in assign.iter_mut().enumerate() {
                let ms = demand.machines(v);
                if ms.is_empty() {
                    *slot = isolated % k;
                    isolated += 1;
                    continue;
                }
                let xi = cheapest(ms, &cost);
                cost[xi] += ms.len() as i64 - 2;
                *slot = xi;
            }
        }
        Some(prior) => {
            let mut cost = demand.costs(prior)?;
            for (v, slot) in assign.iter_mut().enumerate() {
                let owner = prior.part_of(v);
                let ms = demand.machines(v);
                // with two or fewer machines involved a move leaves every cost unchanged
                if ms.len() <= 2 {
                    *slot = owner;
                    continue;
                }
                let shift = ms.len() as i64 - 2;
                cost[owner] -= shift;
                let best = cheapest(ms, &cost);
                let target = if cost[best] < cost[owner] { best } else { owner };
                cost[target] += shift;
                *slot = target;
            }
        }
    }
    VPartition::new(k, assign)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepOutcome {
    pub partition: VPartition,
    /// Sweeps performed, including the final one that changed nothing.
    pub sweeps: usize,
    pub converged: bool,
    /// Maximum machine cost after each sweep.
    pub max_cost_history: Vec<i64>,
}

/// Sweeps until an assignment survives a sweep unchanged or `max_sweeps`
/// sweeps were made. Without a prior the first sweep is the plain greedy.
pub fn sweep_to_convergence(
    demand: &Demand,
    max_sweeps: usize,
    prior: Option<&VPartition>,
) -> Result<SweepOutcome> {
    if max_sweeps == 0 {
        return Err(Error::invalid("max_sweeps must be >= 1"));
    }
    let mut current = prior.cloned();
    let mut history = Vec::new();
    for n in 1..=max_sweeps {
        let next = sweep(demand, current.as_ref())?;
        history.push(demand.costs(&next)?.into_iter().max().unwrap_or(0));
        if current.as_ref() == Some(&next) {
            return Ok(SweepOutcome {
                partition: next,
                sweeps: n,
                converged: true,
                max_cost_history: history,
            });
        }
        current = Some(next);
    }
    Ok(SweepOutcome {
        partition: current.expect("at least one sweep"),
        sweeps: max_sweeps,
        converged: false,
        max_cost_history: history,
    })
}
