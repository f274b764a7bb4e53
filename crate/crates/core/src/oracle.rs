//! Slow, obviously-correct reference implementations used to check the
//! fast paths.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::BipartiteGraph;
use crate::partition_u::{pick_partition, BalanceRule, ScopedSets, UPartition, UNASSIGNED};

/// Upper bound on `k^|U|` accepted by [`exhaustive_partition`].
pub const EXHAUSTIVE_LIMIT: u64 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleResult {
    pub best_assignment: UPartition,
    /// `min max_i |N(U_i)|` over all assignments.
    pub best_value: usize,
    /// Search nodes visited.
    pub enumerated_count: u64,
}

struct Search<'a> {
    g: &'a BipartiteGraph,
    k: usize,
    assign: Vec<usize>,
    /// `touch[i][v]`: how many vertices of `U_i` have `v` as a neighbor.
    touch: Vec<Vec<u32>>,
    footprint: Vec<usize>,
    best_value: usize,
    best: Option<Vec<usize>>,
    visited: u64,
}

impl Search<'_> {
    fn place(&mut self, u: usize, i: usize) {
        self.assign[u] = i;
        for &v in self.g.u_neighbors(u) {
            self.touch[i][v] += 1;
            if self.touch[i][v] == 1 {
                self.footprint[i] += 1;
            }
        }
    }

    fn unplace(&mut self, u: usize, i: usize) {
        for &v in self.g.u_neighbors(u) {
            self.touch[i][v] -= 1;
            if self.touch[i][v] == 0 {
                self.footprint[i] -= 1;
            }
        }
    }

    /// Labels are assigned as a restricted growth string: `u` may open at
    /// most one label beyond those already used, so relabelings of the same
    /// partition are visited once.
    fn descend(&mut self, u: usize, used: usize, current_max: usize) {
        self.visited += 1;
        if current_max >= self.best_value {
            return;
        }
        if u == self.g.num_u() {
            self.best_value = current_max;
            self.best = Some(self.assign.clone());
            return;
        }
        for i in 0..(used + 1).min(self.k) {
            self.place(u, i);
            let m = current_max.max(self.footprint[i]);
            self.descend(u + 1, used.max(i + 1), m);
            self.unplace(u, i);
        }
    }
}

/// Finds an assignment minimizing `max_i |N(U_i)|` by enumeration with
/// label symmetry breaking and pruning. Among minimizers the
/// lexicographically first assignment vector wins.
pub fn exhaustive_partition(g: &BipartiteGraph, k: usize) -> Result<OracleResult> {
    if k == 0 {
        return Err(Error::invalid("partition count must be >= 1"));
    }
    let space = (k as u64).checked_pow(g.num_u() as u32).unwrap_or(u64::MAX);
    if space > EXHAUSTIVE_LIMIT {
        return Err(Error::invalid(format!(
            "{k}^{} assignments exceed the enumeration limit of {EXHAUSTIVE_LIMIT}",
            g.num_u()
        )));
    }
    let mut search = Search {
        g,
        k,
        assign: vec![0; g.num_u()],
        touch: vec![vec![0; g.num_v()]; k],
        footprint: vec![0; k],
        best_value: usize::MAX,
        best: None,
        visited: 0,
    };
    search.descend(0, 0, 0);
    let assign = search.best.expect("at least one assignment exists");
    Ok(OracleResult {
        best_assignment: UPartition::new(k, assign)?,
        best_value: search.best_value,
        enumerated_count: search.visited,
    })
}

/// Greedy partitioning that rescans every cost at every step.
///
/// Same contract as [`crate::partition_u::partition_block`]. Equal costs are
/// ordered the way the cost index orders them: vertices whose cost last
/// dropped earlier come first (with all initial costs counted as dropping
/// at time zero) and the smaller id breaks the remaining ties. A drop caused
/// at step `t` by newly covered parameters is timed by the largest of those
/// parameters that the vertex touches.
pub fn naive_greedy(
    graph: &BipartiteGraph,
    sets: &mut ScopedSets,
    loads: &[usize],
    rule: BalanceRule,
) -> Result<Vec<usize>> {
    let k = sets.k();
    if k == 0 {
        return Err(Error::invalid("partition count must be >= 1"));
    }
    if loads.len() != k {
        return Err(Error::invalid(format!(
            "got {} partition loads for k={k}",
            loads.len()
        )));
    }
    let n = graph.num_u();
    let mut loads = loads.to_vec();
    let mut assign = vec![UNASSIGNED; n];
    let mut stamp = vec![vec![(0usize, 0usize); n]; k];
    let mut fresh = Vec::new();

    for t in 1..=n {
        let i = pick_partition(rule, sets.totals(), &loads);
        let (_, _, u) = (0..n)
            .filter(|&u| assign[u] == UNASSIGNED)
            .map(|u| {
                let cost = graph
                    .u_neighbors(u)
                    .iter()
                    .filter(|&&v| !sets.contains(i, v))
                    .count();
                (cost, stamp[i][u], u)
            })
            .min()
            .expect("unassigned vertices remain");
        assign[u] = i;
        loads[i] += 1;

        fresh.clear();
        for &v in graph.u_neighbors(u) {
            if sets.insert(i, v) {
                fresh.push(v);
            }
        }
        for w in 0..n {
            if assign[w] != UNASSIGNED {
                continue;
            }
            let last = graph
                .u_neighbors(w)
                .iter()
                .filter(|v| fresh.binary_search(v).is_ok())
                .max();
            if let Some(&v) = last {
                stamp[i][w] = (t, v);
            }
        }
    }
    Ok(assign)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::{arb_graph, running_example};
    use crate::partition_u::partition_block;
    use proptest::prelude::*;

    #[test]
    fn running_example_optimum() {
        let g = running_example();
        let r = exhaustive_partition(&g, 2).unwrap();
        assert_eq!(r.best_value, 2);
        assert_eq!(r.best_assignment.footprints(&g).into_iter().max(), Some(2));
    }

    #[test]
    fn degenerate_k() {
        let g = running_example();
        assert_eq!(exhaustive_partition(&g, 1).unwrap().best_value, 3);
        assert_eq!(exhaustive_partition(&g, 4).unwrap().best_value, g.max_u_degree());
        assert!(exhaustive_partition(&g, 0).is_err());
    }

    #[test]
    fn oversized_instance_rejected() {
        let g = BipartiteGraph::from_edges(24, 1, []).unwrap();
        assert!(matches!(
            exhaustive_partition(&g, 2),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn naive_matches_on_running_example() {
        let g = running_example();
        let mut a = ScopedSets::new(2, 3);
        let mut b = ScopedSets::new(2, 3);
        let fast = partition_block(&g, &mut a, &[0, 0], BalanceRule::NeighborSetSize).unwrap();
        let slow = naive_greedy(&g, &mut b, &[0, 0], BalanceRule::NeighborSetSize).unwrap();
        assert_eq!(fast, slow);
        assert_eq!(a, b);
    }

    #[test]
    fn empty_block() {
        let g = BipartiteGraph::from_edges(0, 3, []).unwrap();
        let mut s = ScopedSets::from_parts(3, vec![vec![1], vec![]], vec![5, 2]);
        let before = s.clone();
        assert!(naive_greedy(&g, &mut s, &[0, 0], BalanceRule::NeighborSetSize)
            .unwrap()
            .is_empty());
        assert_eq!(s, before);
    }

    /// Brute-force value of an assignment vector, for checking the pruned search.
    fn value_of(g: &BipartiteGraph, k: usize, assign: &[usize]) -> usize {
        UPartition::new(k, assign.to_vec())
            .unwrap()
            .footprints(g)
            .into_iter()
            .max()
            .unwrap()
    }

    proptest! {
        #[test]
        fn exhaustive_beats_every_assignment(g in arb_graph(7, 6), k in 1usize..4) {
            let r = exhaustive_partition(&g, k).unwrap();
            prop_assert_eq!(value_of(&g, k, r.best_assignment.assign()), r.best_value);
            let n = g.num_u();
            let mut assign = vec![0; n];
            loop {
                prop_assert!(value_of(&g, k, &assign) >= r.best_value);
                let mut pos = 0;
                while pos < n && assign[pos] == k - 1 {
                    assign[pos] = 0;
                    pos += 1;
                }
                if pos == n {
                    break;
                }
                assign[pos] += 1;
            }
        }
    }
}
