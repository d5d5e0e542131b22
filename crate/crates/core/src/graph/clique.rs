use serde::{Deserialize, Serialize};

use super::{Graph, VertexSet};

pub const DEFAULT_CLIQUE_BUDGET: u64 = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliqueResult {
    pub clique: VertexSet,
    /// False when the node budget ran out; `clique` is then only maximal.
    pub exact: bool,
    pub nodes: u64,
}

struct Search<'a> {
    g: &'a Graph,
    best: VertexSet,
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

impl Search<'_> {
    /// Bron–Kerbosch with Tomita pivoting, bounded by `|R| + |P| ≤ |best|`.
    fn expand(&mut self, r: &VertexSet, mut p: VertexSet, mut x: VertexSet) {
        if self.nodes >= self.budget {
            self.exhausted = true;
            return;
        }
        self.nodes += 1;
        if p.is_empty() {
            if x.is_empty() && r.len() > self.best.len() {
                self.best = r.clone();
            }
            return;
        }
        if r.len() + p.len() <= self.best.len() {
            return;
        }
        let pivot = p
            .union(&x)
            .iter()
            .max_by_key(|&u| (self.g.neighbors(u).intersection(&p).len(), std::cmp::Reverse(u)))
            .expect("p is nonempty");
        let cands = p.difference(self.g.neighbors(pivot));
        for v in &cands {
            let nb = self.g.neighbors(v);
            let mut r2 = r.clone();
            r2.insert(v);
            self.expand(&r2, p.intersection(nb), x.intersection(nb));
            if self.exhausted {
                return;
            }
            p.remove(v);
            x.insert(v);
        }
    }
}

/// Greedy maximal clique seeded at the highest-degree vertex.
fn greedy(g: &Graph) -> VertexSet {
    let mut order: Vec<usize> = (0..g.d()).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    let mut c = VertexSet::new();
    for v in order {
        if c.iter().all(|u| g.has_edge(u, v)) {
            c.insert(v);
        }
    }
    c
}

/// A maximum clique, or a maximal one flagged `exact = false` if the search
/// visits more than `budget` nodes.
pub fn max_clique(g: &Graph, budget: u64) -> CliqueResult {
    let mut s = Search {
        g,
        best: greedy(g),
        nodes: 0,
        budget,
        exhausted: false,
    };
    s.expand(&VertexSet::new(), g.vertices(), VertexSet::new());
    CliqueResult {
        clique: s.best,
        exact: !s.exhausted,
        nodes: s.nodes,
    }
}
