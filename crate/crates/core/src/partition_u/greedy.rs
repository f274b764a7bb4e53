use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{BalanceRule, GreedyConfig, NeighborSets, ScopedSets, UPartition};
use crate::cost_index::CostIndex;
use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, BlockDivision, SubgraphBlock};

pub(crate) const UNASSIGNED: usize = usize::MAX;

/// `|N(u) \ S_i|`: how many parameters partition `i` would newly need if it
/// took `u`.
pub fn vertex_cost(g: &BipartiteGraph, sets: &NeighborSets, u: usize, i: usize) -> usize {
    g.u_neighbors(u).iter().filter(|&&v| !sets.contains(i, v)).count()
}

/// Picks the partition that receives the next vertex.
///
/// `neighbor-set-size`: smallest `|S_j|`, then smallest `|U_j|`, then index.
/// `partition-size`: smallest `|U_j|`, then index.
pub(crate) fn pick_partition(rule: BalanceRule, totals: &[usize], loads: &[usize]) -> usize {
    let k = loads.len();
    match rule {
        BalanceRule::NeighborSetSize => (0..k).min_by_key(|&j| (totals[j], loads[j], j)),
        BalanceRule::PartitionSize => (0..k).min_by_key(|&j| (loads[j], j)),
    }
    .expect("k >= 1")
}

/// One greedy assignment, recorded for inspection.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Step {
    pub u: usize,
    pub partition: usize,
    pub cost: usize,
}

/// Assigns every vertex of one block to a partition.
///
/// `graph` is the block's local graph and `sets` the matching scoped view of
/// the neighbor sets, which is grown in place to `S_i ∪ N(U_i)`. `loads`
/// holds the `|U_i|` accumulated before this block and is only consulted by
/// the balance rule. Returns the local assignment.
pub fn partition_block(
    graph: &BipartiteGraph,
    sets: &mut ScopedSets,
    loads: &[usize],
    rule: BalanceRule,
) -> Result<Vec<usize>> {
    partition_block_inner(graph, sets, loads, rule, None)
}

/// Like [`partition_block`], also returning every greedy step in order.
pub fn partition_block_traced(
    graph: &BipartiteGraph,
    sets: &mut ScopedSets,
    loads: &[usize],
    rule: BalanceRule,
) -> Result<(Vec<usize>, Vec<Step>)> {
    let mut trace = Vec::with_capacity(graph.num_u());
    let assign = partition_block_inner(graph, sets, loads, rule, Some(&mut trace))?;
    Ok((assign, trace))
}

fn partition_block_inner(
    graph: &BipartiteGraph,
    sets: &mut ScopedSets,
    loads: &[usize],
    rule: BalanceRule,
    mut trace: Option<&mut Vec<Step>>,
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

    let mut indexes: Vec<CostIndex> = (0..k)
        .map(|i| {
            let costs: Vec<usize> = (0..n)
                .map(|u| {
                    graph
                        .u_neighbors(u)
                        .iter()
                        .filter(|&&v| !sets.contains(i, v))
                        .count()
                })
                .collect();
            CostIndex::build(&costs)
        })
        .collect();

    let mut loads = loads.to_vec();
    let mut assign = vec![UNASSIGNED; n];
    for _ in 0..n {
        let i = pick_partition(rule, sets.totals(), &loads);
        let (u, cost) = indexes[i].min().expect("unassigned vertices remain");
        assign[u] = i;
        loads[i] += 1;
        for idx in indexes.iter_mut() {
            idx.remove(u);
        }
        if let Some(t) = trace.as_deref_mut() {
            t.push(Step {
                u,
                partition: i,
                cost,
            });
        }
        if cost == 0 {
            continue;
        }
        let index = &mut indexes[i];
        for &v in graph.u_neighbors(u) {
            if !sets.insert(i, v) {
                continue;
            }
            for &w in graph.v_neighbors(v) {
                if assign[w] == UNASSIGNED {
                    index.decrement(w);
                }
            }
        }
    }
    Ok(assign)
}

fn derive_seed(seed: u64, stream: u64) -> u64 {
    seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Global initialization: partitions a random sample of `U` (a
/// `fraction` of it, at least one vertex) from empty sets and returns the
/// resulting `N(U_i)` of the sample.
pub fn global_initialization(
    g: &BipartiteGraph,
    k: usize,
    fraction: f64,
    seed: u64,
    rule: BalanceRule,
) -> Result<NeighborSets> {
    if k == 0 {
        return Err(Error::invalid("partition count must be >= 1"));
    }
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::invalid(format!(
            "initialization fraction must be in (0, 1], got {fraction}"
        )));
    }
    let n = g.num_u();
    if n == 0 {
        return Ok(NeighborSets::new(k, g.num_v()));
    }
    let amount = ((n as f64 * fraction).ceil() as usize).clamp(1, n);
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 1));
    let sample = index::sample(&mut rng, n, amount).into_vec();
    let block = SubgraphBlock::from_u_ids(g, 0, sample);
    let mut scoped = ScopedSets::new(k, block.v_ids.len());
    let local = partition_block(&block.local_graph, &mut scoped, &vec![0; k], rule)?;
    Ok(NeighborSets::from_block_assignment(k, g.num_v(), &block, &local))
}

/// Sequential partitioning over `b` seeded blocks.
///
/// The first `a` passes (over blocks `0, 1, ..`, wrapping around when
/// `a > b`) are initialization passes: their assignments are discarded and
/// after each one the neighbor sets are reset to exactly the `N(U_i)` of
/// that block. The `b` production passes then grow the sets by union, and
/// their block assignments form the result.
pub fn run_sequential(
    g: &BipartiteGraph,
    cfg: &GreedyConfig,
    initial: Option<NeighborSets>,
) -> Result<(UPartition, NeighborSets)> {
    cfg.validate()?;
    let k = cfg.k;
    let mut sets = match initial {
        Some(s) => {
            s.check_compatible(k, g.num_v())?;
            s
        }
        None => NeighborSets::new(k, g.num_v()),
    };
    if g.num_u() == 0 {
        return Ok((UPartition::new(k, Vec::new())?, sets));
    }

    let division = BlockDivision::new(g, cfg.b, cfg.seed)?;
    let zero_loads = vec![0; k];
    for pass in 0..cfg.a {
        let block = division.block(pass % division.len());
        let mut scoped = sets.scope(&block.v_ids);
        let local = partition_block(&block.local_graph, &mut scoped, &zero_loads, cfg.balance_rule)?;
        sets = NeighborSets::from_block_assignment(k, g.num_v(), &block, &local);
    }

    let mut assign = vec![UNASSIGNED; g.num_u()];
    let mut loads = vec![0; k];
    for block in division.iter() {
        let mut scoped = sets.scope(&block.v_ids);
        let local = partition_block(&block.local_graph, &mut scoped, &loads, cfg.balance_rule)?;
        sets.absorb(&block.v_ids, &scoped);
        for (lu, &p) in local.iter().enumerate() {
            assign[block.u_ids[lu]] = p;
            loads[p] += 1;
        }
        log::debug!(
            "block {} ({} vertices) done, |S| = {:?}",
            block.block_id,
            block.len(),
            sets.sizes()
        );
    }
    Ok((UPartition::new(k, assign)?, sets))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::synth::{power_law_bipartite, SyntheticConfig};
    use crate::graph::tests::{arb_graph, running_example};
    use proptest::prelude::*;

    fn whole(g: &BipartiteGraph, k: usize, rule: BalanceRule) -> (Vec<usize>, ScopedSets) {
        let mut scoped = ScopedSets::new(k, g.num_v());
        let assign = partition_block(g, &mut scoped, &vec![0; k], rule).unwrap();
        (assign, scoped)
    }

    #[test]
    fn vertex_cost_examples() {
        let g = running_example();
        let mut s = NeighborSets::new(1, 3);
        assert_eq!(vertex_cost(&g, &s, 0, 0), 2);
        s.insert(0, 0);
        assert_eq!(vertex_cost(&g, &s, 0, 0), 1);
        s.insert(0, 1);
        s.insert(0, 2);
        assert_eq!(vertex_cost(&g, &s, 0, 0), 0);
    }

    #[test]
    fn running_example_trace() {
        let g = running_example();
        let (assign, sets) = whole(&g, 2, BalanceRule::NeighborSetSize);
        assert_eq!(assign, vec![0, 0, 1, 1]);
        assert_eq!(sets.local_members(0).collect::<Vec<_>>(), vec![0, 1]);
        assert_eq!(sets.local_members(1).collect::<Vec<_>>(), vec![1, 2]);
    }

    #[test]
    fn single_partition_takes_everything() {
        let g = BipartiteGraph::from_edges(4, 6, [(0, 0), (1, 2), (3, 5)]).unwrap();
        let (assign, sets) = whole(&g, 1, BalanceRule::NeighborSetSize);
        assert_eq!(assign, vec![0; 4]);
        assert_eq!(sets.local_members(0).collect::<Vec<_>>(), vec![0, 2, 5]);
    }

    #[test]
    fn zero_partitions_rejected() {
        let g = running_example();
        let mut scoped = ScopedSets::new(0, 3);
        assert!(matches!(
            partition_block(&g, &mut scoped, &[], BalanceRule::NeighborSetSize),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn isolated_u_assigned_by_balance() {
        let g = BipartiteGraph::from_edges(3, 1, []).unwrap();
        let (assign, _) = whole(&g, 2, BalanceRule::NeighborSetSize);
        assert_eq!(assign, vec![0, 1, 0]);
    }

    #[test]
    fn sequential_single_block_equals_block_run() {
        let g = power_law_bipartite(&SyntheticConfig {
            num_u: 300,
            num_v: 200,
            exponent: 1.5,
            seed: 3,
        })
        .unwrap();
        for rule in [BalanceRule::NeighborSetSize, BalanceRule::PartitionSize] {
            let cfg = GreedyConfig {
                k: 4,
                a: 0,
                b: 1,
                seed: 9,
                balance_rule: rule,
            };
            let (up, sets) = run_sequential(&g, &cfg, None).unwrap();
            let (assign, _) = whole(&g, 4, rule);
            assert_eq!(up.assign(), assign.as_slice());
            assert_eq!(sets, NeighborSets::from_partition(&g, &up));
        }
    }

    #[test]
    fn sequential_is_deterministic() {
        let g = power_law_bipartite(&SyntheticConfig {
            num_u: 500,
            num_v: 300,
            exponent: 1.5,
            seed: 1,
        })
        .unwrap();
        let cfg = GreedyConfig {
            k: 8,
            a: 0,
            b: 4,
            seed: 77,
            balance_rule: BalanceRule::NeighborSetSize,
        };
        assert_eq!(
            run_sequential(&g, &cfg, None).unwrap(),
            run_sequential(&g, &cfg, None).unwrap()
        );
    }

    #[test]
    fn initialization_keeps_sets_as_superset() {
        let g = power_law_bipartite(&SyntheticConfig {
            num_u: 400,
            num_v: 300,
            exponent: 1.5,
            seed: 2,
        })
        .unwrap();
        let cfg = GreedyConfig {
            k: 4,
            a: 6,
            b: 4,
            seed: 5,
            balance_rule: BalanceRule::NeighborSetSize,
        };
        let (up, sets) = run_sequential(&g, &cfg, None).unwrap();
        assert!(sets.is_superset_of(&NeighborSets::from_partition(&g, &up)));
        assert_eq!(up.len(), g.num_u());
    }

    #[test]
    fn global_init_covers_sample_neighbors() {
        let g = power_law_bipartite(&SyntheticConfig {
            num_u: 1000,
            num_v: 400,
            exponent: 1.5,
            seed: 4,
        })
        .unwrap();
        let s = global_initialization(&g, 4, 0.05, 3, BalanceRule::NeighborSetSize).unwrap();
        assert!(s.sizes().iter().all(|&x| x > 0));
        assert!(global_initialization(&g, 4, 0.0, 3, BalanceRule::NeighborSetSize).is_err());
    }

    #[test]
    fn sequential_rejects_mismatched_initial_sets() {
        let g = running_example();
        let cfg = GreedyConfig {
            k: 2,
            a: 0,
            b: 1,
            seed: 0,
            balance_rule: BalanceRule::NeighborSetSize,
        };
        assert!(run_sequential(&g, &cfg, Some(NeighborSets::new(3, 3))).is_err());
    }

    proptest! {
        #[test]
        fn greedy_picks_true_min_and_costs_never_rise(g in arb_graph(40, 30), k in 1usize..5,
                                                       psize in any::<bool>()) {
            let rule = if psize { BalanceRule::PartitionSize } else { BalanceRule::NeighborSetSize };
            let mut scoped = ScopedSets::new(k, g.num_v());
            let (assign, trace) = partition_block_traced(&g, &mut scoped, &vec![0; k], rule).unwrap();

            // replay with explicit sets, recomputing every cost from scratch
            let mut sets = NeighborSets::new(k, g.num_v());
            let mut live = vec![true; g.num_u()];
            let mut last_cost = vec![vec![usize::MAX; g.num_u()]; k];
            for step in &trace {
                let i = step.partition;
                let best = (0..g.num_u()).filter(|&u| live[u]).map(|u| vertex_cost(&g, &sets, u, i)).min().unwrap();
                prop_assert_eq!(step.cost, best);
                prop_assert_eq!(vertex_cost(&g, &sets, step.u, i), step.cost);
                for (p, row) in last_cost.iter_mut().enumerate() {
                    for u in (0..g.num_u()).filter(|&u| live[u]) {
                        let c = vertex_cost(&g, &sets, u, p);
                        prop_assert!(c <= row[u]);
                        prop_assert!(c <= g.u_degree(u));
                        row[u] = c;
                    }
                }
                live[step.u] = false;
                for &v in g.u_neighbors(step.u) {
                    sets.insert(i, v);
                }
            }
            prop_assert!(assign.iter().all(|&p| p < k));
            let up = UPartition::new(k, assign).unwrap();
            prop_assert_eq!(&NeighborSets::from_partition(&g, &up), &sets);
            for i in 0..k {
                prop_assert_eq!(scoped.local_members(i).collect::<Vec<_>>(), sets.members(i).collect::<Vec<_>>());
            }
            if psize {
                let sizes = up.sizes();
                prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
            }
        }

        #[test]
        fn sequential_sets_are_exact_neighborhoods(g in arb_graph(50, 30), k in 1usize..5, b_frac in 0.0f64..1.0, seed in any::<u64>()) {
            let b = 1 + ((g.num_u() - 1) as f64 * b_frac) as usize;
            let cfg = GreedyConfig { k, a: 0, b, seed, balance_rule: BalanceRule::NeighborSetSize };
            let (up, sets) = run_sequential(&g, &cfg, None).unwrap();
            prop_assert_eq!(up.len(), g.num_u());
            prop_assert_eq!(sets, NeighborSets::from_partition(&g, &up));
        }
    }
}
