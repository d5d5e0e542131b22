//! Exact resilience by memoized branch and bound.
//!
//! The residual graph after any prefix of steps is determined by the set of
//! vertices still present, so subproblems are keyed by that set (a `u64`
//! mask). Components of a residual are disintegrated independently and the
//! results merged stepwise, which gives
//!
//! ```text
//! r(∅) = 0,  r(C₁ ⊕ … ⊕ Cₖ) = maxᵢ r(Cᵢ),  r(C) = 1 + min_{v∈C} r(C ∖ v)
//! ```
//!
//! for connected `C`. Candidates are tried in order of (largest remaining
//! component, label); a branch is cut as soon as it cannot beat the best
//! value so far, and the loop stops early once the clique lower bound is met.

use std::collections::HashMap;

use super::estimate::resilience_estimate_inexact;
use super::{merge_stepwise, Disintegration, LowerWitness, ResilienceCertificate};
use crate::graph::{Graph, VertexSet};

pub const DEFAULT_EXACT_BUDGET: u64 = 1 << 24;
pub const DEFAULT_MEMO_CAP: usize = 1 << 24;

struct Solver {
    adj: Vec<u64>,
    memo: HashMap<u64, (u8, u8)>,
    memo_cap: usize,
    nodes: u64,
    budget: u64,
}

#[derive(Debug)]
struct OutOfBudget;

fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let b = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(b)
        }
    })
}

impl Solver {
    fn components(&self, within: u64) -> Vec<u64> {
        let mut left = within;
        let mut out = Vec::new();
        while left != 0 {
            let start = left & left.wrapping_neg();
            let mut comp = start;
            let mut frontier = start;
            left &= !start;
            while frontier != 0 {
                let mut next = 0;
                for v in bits(frontier) {
                    next |= self.adj[v] & left;
                }
                left &= !next;
                comp |= next;
                frontier = next;
            }
            out.push(comp);
        }
        out
    }

    fn is_clique(&self, c: u64) -> bool {
        bits(c).all(|v| self.adj[v] & c == c & !(1 << v))
    }

    /// Size of a greedily grown clique inside `c`; a valid lower bound.
    fn greedy_clique(&self, c: u64) -> u8 {
        let mut order: Vec<usize> = bits(c).collect();
        order.sort_by_key(|&v| (std::cmp::Reverse((self.adj[v] & c).count_ones()), v));
        let mut k = 0u64;
        for v in order {
            if self.adj[v] & k == k {
                k |= 1 << v;
            }
        }
        k.count_ones() as u8
    }

    fn largest_after(&self, c: u64, v: usize) -> u32 {
        self.components(c & !(1 << v))
            .iter()
            .map(|m| m.count_ones())
            .max()
            .unwrap_or(0)
    }

    /// Resilience of an arbitrary residual set.
    fn solve_set(&mut self, set: u64) -> Result<u8, OutOfBudget> {
        let mut best = 0;
        for c in self.components(set) {
            best = best.max(self.solve_connected(c)?);
        }
        Ok(best)
    }

    /// Resilience of a connected residual `c`.
    fn solve_connected(&mut self, c: u64) -> Result<u8, OutOfBudget> {
        let n = c.count_ones() as u8;
        if n <= 1 {
            return Ok(n);
        }
        if let Some(&(val, _)) = self.memo.get(&c) {
            return Ok(val);
        }
        if self.nodes >= self.budget {
            return Err(OutOfBudget);
        }
        self.nodes += 1;
        if self.is_clique(c) {
            self.remember(c, n, c.trailing_zeros() as u8);
            return Ok(n);
        }
        let lower = self.greedy_clique(c).max(2);
        let mut cands: Vec<(u32, usize)> =
            bits(c).map(|v| (self.largest_after(c, v), v)).collect();
        cands.sort_unstable();
        // removing one vertex per step always works
        let mut best = n;
        let mut best_v = cands[0].1;
        for &(_, v) in &cands {
            let mut comps = self.components(c & !(1 << v));
            comps.sort_by_key(|m| std::cmp::Reverse(m.count_ones()));
            let mut worst = 0u8;
            for comp in comps {
                // a component of size k needs at most k steps
                if (comp.count_ones() as u8) <= worst {
                    continue;
                }
                worst = worst.max(self.solve_connected(comp)?);
                if worst + 1 >= best {
                    break;
                }
            }
            if worst + 1 < best {
                best = worst + 1;
                best_v = v;
                if best <= lower {
                    break;
                }
            }
        }
        self.remember(c, best, best_v as u8);
        Ok(best)
    }

    fn remember(&mut self, c: u64, val: u8, v: u8) {
        if self.memo.len() < self.memo_cap {
            self.memo.insert(c, (val, v));
        }
    }

    /// Finds an optimal first vertex for `c` when the memo entry was not kept.
    fn recover_choice(&mut self, c: u64) -> Result<usize, OutOfBudget> {
        let target = self.solve_connected(c)?;
        for v in bits(c) {
            if self.solve_set(c & !(1 << v))? + 1 == target {
                return Ok(v);
            }
        }
        unreachable!("some vertex attains the optimum")
    }

    /// Rebuilds an optimal disintegration of `set` from the memo.
    fn witness(&mut self, set: u64) -> Result<Vec<VertexSet>, OutOfBudget> {
        let mut parts = Vec::new();
        for c in self.components(set) {
            parts.push(self.witness_connected(c)?);
        }
        Ok(merge_stepwise(parts))
    }

    fn witness_connected(&mut self, c: u64) -> Result<Vec<VertexSet>, OutOfBudget> {
        if c.count_ones() == 1 {
            return Ok(vec![VertexSet::from_u64(c)]);
        }
        let v = match self.memo.get(&c) {
            Some(&(_, v)) => v as usize,
            None => self.recover_choice(c)?,
        };
        let mut steps = vec![VertexSet::singleton(v)];
        steps.extend(self.witness(c & !(1 << v))?);
        Ok(steps)
    }
}

/// Exact `r(G)` with a witnessing disintegration.
///
/// Returns best-known bounds with `exact = false` when more than `budget`
/// subproblems would be needed or `d > 64`.
pub fn resilience_exact(g: &Graph, budget: u64) -> ResilienceCertificate {
    resilience_exact_with_memo_cap(g, budget, DEFAULT_MEMO_CAP)
}

pub(crate) fn resilience_exact_with_memo_cap(
    g: &Graph,
    budget: u64,
    memo_cap: usize,
) -> ResilienceCertificate {
    match solve(g, budget, memo_cap) {
        Some((steps, nodes)) => {
            let upper = Disintegration::new(g, steps).expect("witness is a disintegration");
            ResilienceCertificate {
                lower: upper.len(),
                lower_witness: LowerWitness::Exhaustive { nodes },
                upper,
                exact: true,
            }
        }
        None => resilience_estimate_inexact(g),
    }
}

/// Optimal steps and the number of subproblems solved, or `None` when the
/// budget runs out or `d > 64`.
pub(crate) fn solve(g: &Graph, budget: u64, memo_cap: usize) -> Option<(Vec<VertexSet>, u64)> {
    if g.d() > 64 {
        return None;
    }
    let adj = (0..g.d())
        .map(|v| g.neighbors(v).as_u64().expect("d ≤ 64"))
        .collect();
    let mut solver = Solver {
        adj,
        memo: HashMap::new(),
        memo_cap,
        nodes: 0,
        budget,
    };
    let all = g.vertices().as_u64().expect("d ≤ 64");
    let r = solver.solve_set(all).ok()?;
    let steps = solver.witness(all).ok()?;
    debug_assert_eq!(steps.len(), r as usize);
    Some((steps, solver.nodes))
}
