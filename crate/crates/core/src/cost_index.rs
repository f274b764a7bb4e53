//! Per-partition vertex-cost index.
//!
//! Costs live in a plain array addressed by local `u` id. A doubly-linked
//! list threads the live vertices in nondecreasing cost order, and a small
//! array of head pointers gives direct access to the first node whose cost
//! is at least `c` for every `c <= head_cap`. Because costs only ever drop by
//! one, a decrement relocates a node to just before `heads[old_cost]`, which
//! is constant time.
//!
//! Ordering among equal costs: after [`CostIndex::build`] ties are in
//! ascending id order. A vertex whose cost is decremented is placed at the
//! end of the run for its new cost. Equivalently, the list is sorted by
//! `(cost, time the vertex reached that cost, id)`, where build counts as
//! time zero.

use std::fmt::Write as _;

/// Default cap for head pointers; costs above it fall back to a list walk.
pub const DEFAULT_HEAD_CAP: usize = 1024;

const NIL: usize = usize::MAX;
const TOMBSTONE: u32 = u32::MAX;

#[derive(Clone, Debug)]
pub struct CostIndex {
    cost: Vec<u32>,
    prev: Vec<usize>,
    next: Vec<usize>,
    /// `heads[c]` = first node with cost >= c, or NIL. `heads[0]` is the list head.
    heads: Vec<usize>,
    live: usize,
    ops: u64,
}

impl CostIndex {
    pub fn build(costs: &[usize]) -> Self {
        Self::with_head_cap(costs, DEFAULT_HEAD_CAP)
    }

    /// Builds the index with counting sort; ties are ordered by id.
    pub fn with_head_cap(costs: &[usize], head_cap: usize) -> Self {
        let n = costs.len();
        let max = costs.iter().copied().max().unwrap_or(0);
        assert!(max < TOMBSTONE as usize, "cost {max} too large");

        let mut starts = vec![0usize; max + 2];
        for &c in costs {
            starts[c + 1] += 1;
        }
        for c in 0..=max {
            starts[c + 1] += starts[c];
        }
        let mut order = vec![0usize; n];
        for (u, &c) in costs.iter().enumerate() {
            order[starts[c]] = u;
            starts[c] += 1;
        }

        let mut prev = vec![NIL; n];
        let mut next = vec![NIL; n];
        for w in order.windows(2) {
            next[w[0]] = w[1];
            prev[w[1]] = w[0];
        }

        let mut heads = vec![NIL; head_cap + 1];
        let mut pos = 0;
        for (c, head) in heads.iter_mut().enumerate() {
            while pos < n && costs[order[pos]] < c {
                pos += 1;
            }
            if pos == n {
                break;
            }
            *head = order[pos];
        }

        Self {
            cost: costs.iter().map(|&c| c as u32).collect(),
            prev,
            next,
            heads,
            live: n,
            ops: (n + head_cap) as u64,
        }
    }

    /// Number of slots, live or removed.
    pub fn capacity(&self) -> usize {
        self.cost.len()
    }

    pub fn len(&self) -> usize {
        self.live
    }

    pub fn is_empty(&self) -> bool {
        self.live == 0
    }

    pub fn head_cap(&self) -> usize {
        self.heads.len() - 1
    }

    pub fn contains(&self, u: usize) -> bool {
        self.cost[u] != TOMBSTONE
    }

    pub fn cost(&self, u: usize) -> Option<usize> {
        self.contains(u).then(|| self.cost[u] as usize)
    }

    /// Lowest-cost live vertex and its cost.
    #[inline]
    pub fn min(&self) -> Option<(usize, usize)> {
        let u = self.heads[0];
        (u != NIL).then(|| (u, self.cost[u] as usize))
    }

    /// Pointer operations performed so far, including the build.
    pub fn pointer_ops(&self) -> u64 {
        self.ops
    }

    /// Lowers the cost of `u` by one and returns the new cost.
    ///
    /// Panics if `u` was removed or already has cost 0.
    pub fn decrement(&mut self, u: usize) -> usize {
        let c = self.cost[u];
        assert!(c != TOMBSTONE, "decrement of removed vertex {u}");
        assert!(c > 0, "decrement of zero-cost vertex {u}");
        let c = c as usize;
        let nc = c - 1;
        let cap = self.head_cap();

        let p = self.prev[u];
        if p == NIL || (self.cost[p] as usize) < c {
            // u opens its run, so it already sits at the end of run nc
            self.cost[u] = nc as u32;
            if c <= cap {
                debug_assert_eq!(self.heads[c], u);
                self.heads[c] = self.next[u];
                self.ops += 1;
            }
            return nc;
        }

        let start = if c <= cap {
            self.heads[c]
        } else {
            let mut s = p;
            while self.prev[s] != NIL && self.cost[self.prev[s]] as usize == c {
                s = self.prev[s];
                self.ops += 1;
            }
            s
        };
        self.unlink(u);
        self.insert_before(u, start);
        self.cost[u] = nc as u32;

        let mut j = nc.min(cap);
        loop {
            if self.heads[j] != start {
                break;
            }
            self.heads[j] = u;
            self.ops += 1;
            if j == 0 {
                break;
            }
            j -= 1;
        }
        nc
    }

    /// Removes `u`. Panics on a double remove.
    pub fn remove(&mut self, u: usize) {
        let c = self.cost[u];
        assert!(c != TOMBSTONE, "double remove of vertex {u}");
        let succ = self.next[u];
        let mut j = (c as usize).min(self.head_cap());
        loop {
            if self.heads[j] != u {
                break;
            }
            self.heads[j] = succ;
            self.ops += 1;
            if j == 0 {
                break;
            }
            j -= 1;
        }
        self.unlink(u);
        self.cost[u] = TOMBSTONE;
        self.live -= 1;
    }

    fn unlink(&mut self, u: usize) {
        let (p, n) = (self.prev[u], self.next[u]);
        if p != NIL {
            self.next[p] = n;
        }
        if n != NIL {
            self.prev[n] = p;
        }
        self.prev[u] = NIL;
        self.next[u] = NIL;
        self.ops += 2;
    }

    fn insert_before(&mut self, u: usize, at: usize) {
        let p = self.prev[at];
        self.prev[u] = p;
        self.next[u] = at;
        self.prev[at] = u;
        if p != NIL {
            self.next[p] = u;
        }
        self.ops += 3;
    }

    /// Live vertices in list order with their costs.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let mut cur = self.heads[0];
        std::iter::from_fn(move || {
            if cur == NIL {
                return None;
            }
            let out = (cur, self.cost[cur] as usize);
            cur = self.next[cur];
            Some(out)
        })
    }

    /// Text dump: one `u:cost` per node in list order, then the non-empty
    /// head pointers.
    pub fn dump(&self) -> String {
        let mut out = String::from("list");
        for (u, c) in self.iter() {
            let _ = write!(out, " {u}:{c}");
        }
        out.push_str("\nheads");
        for (c, &h) in self.heads.iter().enumerate() {
            if h != NIL {
                let _ = write!(out, " {c}->{h}");
            }
        }
        out.push('\n');
        out
    }

    /// Checks every structural invariant; returns a description of the
    /// first violation.
    pub fn validate(&self) -> Result<(), String> {
        let order: Vec<(usize, usize)> = self.iter().take(self.capacity() + 1).collect();
        if order.len() != self.live {
            return Err(format!(
                "list has {} nodes, live count {}",
                order.len(),
                self.live
            ));
        }
        if order.windows(2).any(|w| w[0].1 > w[1].1) {
            return Err("list costs decrease".into());
        }
        let mut prev = NIL;
        for &(u, _) in &order {
            if self.prev[u] != prev {
                return Err(format!("bad prev pointer at {u}"));
            }
            prev = u;
        }
        for (c, &h) in self.heads.iter().enumerate() {
            let want = order
                .iter()
                .find(|&&(_, cost)| cost >= c)
                .map_or(NIL, |&(u, _)| u);
            if h != want {
                return Err(format!("heads[{c}] = {h}, expected {want}"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn order(idx: &CostIndex) -> Vec<usize> {
        idx.iter().map(|(u, _)| u).collect()
    }

    #[test]
    fn build_orders_by_cost_then_id() {
        let idx = CostIndex::build(&[2, 1, 2, 1]);
        assert_eq!(order(&idx), vec![1, 3, 0, 2]);
        assert_eq!(idx.min(), Some((1, 1)));
        idx.validate().unwrap();
        assert_eq!(order(&CostIndex::build(&[0, 0, 0])), vec![0, 1, 2]);
    }

    #[test]
    fn empty_and_singleton() {
        let idx = CostIndex::build(&[]);
        assert_eq!(idx.min(), None);
        assert!(idx.is_empty());
        assert_eq!(CostIndex::build(&[5]).min(), Some((0, 5)));
    }

    #[test]
    fn decrement_keeps_tie_order() {
        let mut idx = CostIndex::build(&[2, 1, 2, 1]);
        assert_eq!(idx.decrement(0), 1);
        assert_eq!(idx.cost(0), Some(1));
        assert_eq!(idx.min(), Some((1, 1)));
        assert_eq!(order(&idx), vec![1, 3, 0, 2]);
        idx.validate().unwrap();

        let mut one = CostIndex::build(&[3]);
        assert_eq!(one.decrement(0), 2);
        assert_eq!(one.min(), Some((0, 2)));
    }

    #[test]
    fn decrement_moves_to_end_of_new_run() {
        let mut idx = CostIndex::build(&[1, 2, 2, 1]);
        // u2 is not first of run 2, so it moves in front of u1
        idx.decrement(2);
        assert_eq!(order(&idx), vec![0, 3, 2, 1]);
        idx.validate().unwrap();
        idx.decrement(1);
        assert_eq!(order(&idx), vec![0, 3, 2, 1]);
        idx.decrement(1);
        assert_eq!(order(&idx), vec![1, 0, 3, 2]);
        idx.validate().unwrap();
    }

    #[test]
    fn remove_updates_min() {
        let mut idx = CostIndex::build(&[2, 1, 2, 1]);
        idx.remove(1);
        assert_eq!(idx.min(), Some((3, 1)));
        assert!(!idx.contains(1));
        idx.validate().unwrap();

        let mut one = CostIndex::build(&[4]);
        one.remove(0);
        assert!(one.is_empty());
        assert_eq!(one.min(), None);
        one.validate().unwrap();
    }

    #[test]
    fn dump_is_stable() {
        let mut idx = CostIndex::with_head_cap(&[2, 1, 2, 1], 3);
        idx.decrement(2);
        idx.remove(1);
        assert_eq!(idx.dump(), "list 3:1 2:1 0:2\nheads 0->3 1->3 2->0\n");
    }

    #[test]
    #[should_panic(expected = "zero-cost")]
    fn decrement_at_zero_panics() {
        CostIndex::build(&[0]).decrement(0);
    }

    #[test]
    #[should_panic(expected = "double remove")]
    fn double_remove_panics() {
        let mut idx = CostIndex::build(&[1, 1]);
        idx.remove(0);
        idx.remove(0);
    }

    #[test]
    #[should_panic(expected = "removed vertex")]
    fn decrement_removed_panics() {
        let mut idx = CostIndex::build(&[1, 1]);
        idx.remove(0);
        idx.decrement(0);
    }

    #[test]
    fn costs_above_cap_walk_back() {
        let mut idx = CostIndex::with_head_cap(&[9, 9, 9, 3, 12], 4);
        idx.decrement(2);
        assert_eq!(order(&idx), vec![3, 2, 0, 1, 4]);
        idx.validate().unwrap();
        for _ in 0..5 {
            idx.decrement(4);
            idx.validate().unwrap();
        }
        for _ in 0..5 {
            idx.decrement(2);
            idx.validate().unwrap();
        }
        assert_eq!(idx.min(), Some((3, 3)));
        assert_eq!(order(&idx)[..2], [3, 2]);
    }

    #[derive(Clone, Debug)]
    enum Op {
        Decrement(usize),
        Remove(usize),
    }

    /// Shadow model: arrays plus a full scan ordered by (cost, stamp, id).
    struct Shadow {
        cost: Vec<Option<usize>>,
        stamp: Vec<u64>,
        clock: u64,
    }

    impl Shadow {
        fn min(&self) -> Option<(usize, usize)> {
            (0..self.cost.len())
                .filter_map(|u| self.cost[u].map(|c| (c, self.stamp[u], u)))
                .min()
                .map(|(c, _, u)| (u, c))
        }
    }

    fn run_ops(costs: Vec<usize>, ops: Vec<Op>, cap: usize) -> Result<(), TestCaseError> {
        let mut idx = CostIndex::with_head_cap(&costs, cap);
        let mut shadow = Shadow {
            cost: costs.iter().map(|&c| Some(c)).collect(),
            stamp: vec![0; costs.len()],
            clock: 0,
        };
        prop_assert_eq!(idx.min(), shadow.min());
        for op in ops {
            match op {
                Op::Decrement(u) => {
                    let u = u % costs.len();
                    match shadow.cost[u] {
                        Some(c) if c > 0 => {
                            shadow.clock += 1;
                            shadow.cost[u] = Some(c - 1);
                            shadow.stamp[u] = shadow.clock;
                            prop_assert_eq!(idx.decrement(u), c - 1);
                        }
                        _ => continue,
                    }
                }
                Op::Remove(u) => {
                    let u = u % costs.len();
                    if shadow.cost[u].take().is_none() {
                        continue;
                    }
                    idx.remove(u);
                }
            }
            prop_assert_eq!(idx.min(), shadow.min());
            prop_assert_eq!(idx.len(), shadow.cost.iter().flatten().count());
            if let Err(e) = idx.validate() {
                return Err(TestCaseError::fail(e));
            }
        }
        Ok(())
    }

    fn arb_op() -> impl Strategy<Value = Op> {
        prop_oneof![
            4 => any::<usize>().prop_map(Op::Decrement),
            1 => any::<usize>().prop_map(Op::Remove),
        ]
    }

    proptest! {
        #[test]
        fn matches_shadow(costs in proptest::collection::vec(0usize..12, 1..40),
                          ops in proptest::collection::vec(arb_op(), 0..200),
                          cap in prop_oneof![Just(0usize), Just(3), Just(1024)]) {
            run_ops(costs, ops, cap)?;
        }
    }
}
