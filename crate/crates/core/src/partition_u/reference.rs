//! Desk-scale reference partitioner built on exact subset minimization.
//!
//! Each round picks the smallest partition `U_i`, samples a candidate set
//! `R` from the unassigned vertices, and commits the subset `T ⊆ R` that
//! minimizes `g_i(T) = f(T ∪ U_i) - α |T ∪ U_i|` with `f = |N(·)|`, provided
//! `g_i(T) <= 0`. The minimization is exhaustive, so candidate sets are
//! limited to [`MAX_CANDIDATES`] vertices.

use fixedbitset::FixedBitSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::UPartition;
use crate::error::{Error, Result};
use crate::graph::BipartiteGraph;

pub const MAX_CANDIDATES: usize = 20;

/// Exact minimizer of `g_i(T)` over all `T ⊆ candidates`, including the
/// empty set. Ties go to the smaller `|T|`, then the lexicographically
/// smaller sorted `T`. Returns `T*` (ascending) and `g_i(T*)`.
pub fn reference_round(
    g: &BipartiteGraph,
    candidates: &[usize],
    current: &[usize],
    alpha: f64,
) -> Result<(Vec<usize>, f64)> {
    let r = candidates.len();
    if r > MAX_CANDIDATES {
        return Err(Error::invalid(format!(
            "{r} candidates exceed the exhaustive limit of {MAX_CANDIDATES}"
        )));
    }
    let mut cands = candidates.to_vec();
    cands.sort_unstable();
    cands.dedup();
    let r = cands.len();

    let mut base = FixedBitSet::with_capacity(g.num_v());
    let mut base_set = FixedBitSet::with_capacity(g.num_u());
    for &u in current {
        base_set.insert(u);
        base.extend(g.u_neighbors(u).iter().copied());
    }
    let neighbor_bits: Vec<FixedBitSet> = cands
        .iter()
        .map(|&u| {
            let mut b = FixedBitSet::with_capacity(g.num_v());
            b.extend(g.u_neighbors(u).iter().copied());
            b
        })
        .collect();

    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut scratch = base.clone();
    for mask in 0u32..(1u32 << r) {
        scratch.clone_from(&base);
        let mut size = base_set.count_ones(..);
        let mut subset = Vec::with_capacity(mask.count_ones() as usize);
        for (bit, &u) in cands.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                scratch.union_with(&neighbor_bits[bit]);
                subset.push(u);
                size += usize::from(!base_set.contains(u));
            }
        }
        let value = scratch.count_ones(..) as f64 - alpha * size as f64;
        let better = match &best {
            None => true,
            Some((bv, bt)) => value < *bv || (value == *bv && (subset.len(), &subset) < (bt.len(), bt)),
        };
        if better {
            best = Some((value, subset));
        }
    }
    let (value, subset) = best.expect("the empty set is always enumerated");
    Ok((subset, value))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Round {
    pub iteration: usize,
    pub partition: usize,
    pub candidates: Vec<usize>,
    /// `None` when the round was skipped for an oversized sample.
    pub chosen: Option<Vec<usize>>,
    pub value: f64,
    pub committed: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ReferenceOutcome {
    Success {
        partition: UPartition,
        rounds: Vec<Round>,
    },
    /// More than `k · θ` vertices were still unassigned when the iteration
    /// budget ran out.
    Failure { remaining: usize, rounds: Vec<Round> },
}

impl ReferenceOutcome {
    pub fn partition(&self) -> Option<&UPartition> {
        match self {
            ReferenceOutcome::Success { partition, .. } => Some(partition),
            ReferenceOutcome::Failure { .. } => None,
        }
    }

    pub fn rounds(&self) -> &[Round] {
        match self {
            ReferenceOutcome::Success { rounds, .. } | ReferenceOutcome::Failure { rounds, .. } => rounds,
        }
    }
}

/// Runs the reference partitioner on a graph with at most
/// [`MAX_CANDIDATES`] data vertices.
///
/// With `n = |U|`, each round samples every unassigned vertex with
/// probability `n / (|remaining| k)` and skips the round if more than
/// `2n / k` were drawn. The loop stops once at most `k θ` vertices remain
/// or after `max_iters` rounds. Leftovers go one by one, in id order, to
/// the currently smallest partition.
pub fn run_reference(
    g: &BipartiteGraph,
    k: usize,
    alpha: f64,
    theta_residue: f64,
    max_iters: usize,
    seed: u64,
) -> Result<ReferenceOutcome> {
    let n = g.num_u();
    if k == 0 {
        return Err(Error::invalid("partition count must be >= 1"));
    }
    if n > MAX_CANDIDATES {
        return Err(Error::invalid(format!(
            "reference partitioner handles at most {MAX_CANDIDATES} vertices, got {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut parts: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut remaining: Vec<bool> = vec![true; n];
    let mut remaining_count = n;
    let residue_limit = k as f64 * theta_residue;
    let sample_limit = 2.0 * n as f64 / k as f64;
    let mut rounds = Vec::new();

    let smallest = |parts: &[Vec<usize>]| (0..k).min_by_key(|&j| (parts[j].len(), j)).unwrap();

    for iteration in 0..max_iters {
        if remaining_count as f64 <= residue_limit {
            break;
        }
        let i = smallest(&parts);
        let p = (n as f64 / (remaining_count * k) as f64).min(1.0);
        let candidates: Vec<usize> = (0..n)
            .filter(|&u| remaining[u])
            .filter(|_| rng.random::<f64>() < p)
            .collect();
        if candidates.len() as f64 > sample_limit {
            rounds.push(Round {
                iteration,
                partition: i,
                candidates,
                chosen: None,
                value: f64::NAN,
                committed: false,
            });
            continue;
        }
        let (chosen, value) = reference_round(g, &candidates, &parts[i], alpha)?;
        let committed = value <= 0.0;
        if committed {
            for &u in &chosen {
                remaining[u] = false;
                parts[i].push(u);
            }
            remaining_count -= chosen.len();
        }
        rounds.push(Round {
            iteration,
            partition: i,
            candidates,
            chosen: Some(chosen),
            value,
            committed,
        });
    }

    if remaining_count as f64 > residue_limit {
        return Ok(ReferenceOutcome::Failure {
            remaining: remaining_count,
            rounds,
        });
    }
    for u in (0..n).filter(|&u| remaining[u]) {
        let i = smallest(&parts);
        parts[i].push(u);
    }
    let mut assign = vec![0; n];
    for (i, members) in parts.iter().enumerate() {
        for &u in members {
            assign[u] = i;
        }
    }
    Ok(ReferenceOutcome::Success {
        partition: UPartition::new(k, assign)?,
        rounds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::running_example;

    #[test]
    fn running_example_round() {
        let g = running_example();
        let (t, value) = reference_round(&g, &[0, 1], &[], 1.5).unwrap();
        assert_eq!(t, vec![0, 1]);
        assert_eq!(value, -1.0);
        let (t, value) = reference_round(&g, &[1], &[], 1.5).unwrap();
        assert_eq!((t, value), (vec![1], -0.5));
    }

    #[test]
    fn alpha_limits() {
        let g = running_example();
        let all = [0, 1, 2, 3];
        let (t, v) = reference_round(&g, &all, &[], 0.0).unwrap();
        assert!(t.is_empty());
        assert_eq!(v, 0.0);
        let alpha = g.max_u_degree() as f64 + 1.0;
        let (t, _) = reference_round(&g, &all, &[], alpha).unwrap();
        assert_eq!(t, all.to_vec());
    }

    #[test]
    fn round_counts_current_members() {
        let g = running_example();
        // U_i = {u0} already owns v0,v1, so u1 is free and gains alpha
        let (t, v) = reference_round(&g, &[1, 3], &[0], 0.5).unwrap();
        assert_eq!(t, vec![1]);
        assert_eq!(v, 2.0 - 0.5 * 2.0);
    }

    #[test]
    fn too_many_candidates() {
        let g = BipartiteGraph::from_edges(21, 1, (0..21).map(|u| (u, 0))).unwrap();
        let cands: Vec<usize> = (0..21).collect();
        assert!(reference_round(&g, &cands, &[], 1.0).is_err());
        assert!(run_reference(&g, 2, 1.0, 1.0, 10, 0).is_err());
    }

    #[test]
    fn zero_alpha_fails_when_residue_is_large() {
        let g = running_example();
        let out = run_reference(&g, 2, 0.0, 1.0, 50, 3).unwrap();
        match out {
            ReferenceOutcome::Failure { remaining, rounds } => {
                assert_eq!(remaining, 4);
                assert!(rounds
                    .iter()
                    .all(|r| r.chosen.as_deref().is_none_or(|c| c.is_empty())));
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn generous_alpha_succeeds_and_covers() {
        let g = running_example();
        let out = run_reference(&g, 2, 3.0, 0.5, 200, 11).unwrap();
        let up = out.partition().expect("success");
        assert_eq!(up.len(), 4);
        assert_eq!(up.sizes().iter().sum::<usize>(), 4);
    }
}
