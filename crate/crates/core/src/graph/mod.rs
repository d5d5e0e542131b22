//! Undirected simple graphs on `d` labeled vertices.
//!
//! Vertices are 0-based internally and 1-based in every file format and in
//! `Display` output.

mod clique;
mod family;
mod vertex_set;

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub use clique::{max_clique, CliqueResult, DEFAULT_CLIQUE_BUDGET};
pub use family::{make_family, FamilySpec};
pub use vertex_set::VertexSet;

/// Default cap on `d` for [`enumerate_graphs`].
pub const DEFAULT_ENUMERATION_CAP: usize = 5;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    d: usize,
    adj: Vec<VertexSet>,
}

/// On-disk form: `{"d": 4, "edges": [[1,2],[2,3]]}` with 1-based labels.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphJson {
    pub d: usize,
    pub edges: Vec<[usize; 2]>,
}

impl Graph {
    /// The edgeless graph on `d` vertices (`d = 0` is the null graph).
    pub fn empty(d: usize) -> Self {
        Self {
            d,
            adj: vec![VertexSet::new(); d],
        }
    }

    /// Builds a graph from 0-based edges, rejecting loops, duplicates and
    /// out-of-range endpoints.
    pub fn from_edges(d: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(d);
        for &(u, v) in edges {
            g.insert_edge(u, v)?;
        }
        Ok(g)
    }

    /// Builds a graph from 1-based labeled edges.
    pub fn from_labeled_edges(d: usize, edges: &[[usize; 2]]) -> Result<Self> {
        let mut g = Self::empty(d);
        for &[u, v] in edges {
            if u == 0 || v == 0 {
                return Err(Error::InvalidGraph(format!(
                    "edge {{{u},{v}}} uses label 0; labels are 1-based"
                )));
            }
            g.insert_edge(u - 1, v - 1)?;
        }
        Ok(g)
    }

    fn insert_edge(&mut self, u: usize, v: usize) -> Result<()> {
        if u >= self.d || v >= self.d {
            return Err(Error::InvalidGraph(format!(
                "edge {{{},{}}} outside [1, {}]",
                u + 1,
                v + 1,
                self.d
            )));
        }
        if u == v {
            return Err(Error::InvalidGraph(format!("self-loop at {}", u + 1)));
        }
        if !self.adj[u].insert(v) {
            return Err(Error::InvalidGraph(format!(
                "duplicate edge {{{},{}}}",
                u.min(v) + 1,
                u.max(v) + 1
            )));
        }
        self.adj[v].insert(u);
        Ok(())
    }

    /// A copy with extra edges; edges already present are an error.
    pub fn with_edges(&self, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = self.clone();
        for &(u, v) in edges {
            g.insert_edge(u, v)?;
        }
        Ok(g)
    }

    /// A copy with the given edges deleted; missing edges are ignored.
    pub fn without_edges(&self, edges: &[(usize, usize)]) -> Self {
        let mut g = self.clone();
        for &(u, v) in edges {
            if u < g.d && v < g.d {
                g.adj[u].remove(v);
                g.adj[v].remove(u);
            }
        }
        g
    }

    /// The cycle `1-2-…-d-1` (`d ≥ 3`).
    pub fn cycle(d: usize) -> Result<Self> {
        if d < 3 {
            return Err(Error::InvalidParameter(format!("cycle needs d ≥ 3, got {d}")));
        }
        let edges: Vec<_> = (0..d).map(|i| (i, (i + 1) % d)).collect();
        Self::from_edges(d, &edges)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn vertices(&self) -> VertexSet {
        VertexSet::full(self.d)
    }

    pub fn neighbors(&self, v: usize) -> &VertexSet {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.d && self.adj[u].contains(v)
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(VertexSet::len).sum::<usize>() / 2
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.d)
            .flat_map(|u| self.adj[u].iter().filter(move |&v| v > u).map(move |v| (u, v)))
            .collect()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.d).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn is_complete(&self) -> bool {
        (0..self.d).all(|v| self.degree(v) + 1 == self.d)
    }

    pub fn is_clique(&self, s: &VertexSet) -> bool {
        s.iter()
            .all(|u| s.iter().all(|v| u == v || self.adj[u].contains(v)))
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<VertexSet> {
        self.components_within(&self.vertices())
    }

    /// Connected components of the subgraph induced on `within`.
    pub fn components_within(&self, within: &VertexSet) -> Vec<VertexSet> {
        let mut left = within.clone();
        let mut out = Vec::new();
        while let Some(start) = left.first() {
            let mut comp = VertexSet::singleton(start);
            let mut frontier = VertexSet::singleton(start);
            left.remove(start);
            while !frontier.is_empty() {
                let mut next = VertexSet::new();
                for v in &frontier {
                    next.union_with(&self.adj[v].intersection(&left));
                }
                left = left.difference(&next);
                comp.union_with(&next);
                frontier = next;
            }
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// True when the graph has no cycles.
    pub fn is_forest(&self) -> bool {
        self.edge_count() + self.components().len() == self.d
    }

    pub fn is_tree(&self) -> bool {
        self.d > 0 && self.is_connected() && self.edge_count() + 1 == self.d
    }

    /// Induced subgraph on `keep`, relabeled order-preservingly.
    /// The second value maps new indices to old ones.
    pub fn induced(&self, keep: &VertexSet) -> (Graph, Vec<usize>) {
        let map: Vec<usize> = keep.iter().filter(|&v| v < self.d).collect();
        let mut inv = vec![usize::MAX; self.d];
        for (i, &v) in map.iter().enumerate() {
            inv[v] = i;
        }
        let mut g = Graph::empty(map.len());
        for (i, &v) in map.iter().enumerate() {
            for u in self.adj[v].intersection(keep).iter() {
                g.adj[i].insert(inv[u]);
            }
        }
        (g, map)
    }

    /// `G ∖ s`: the induced subgraph on the remaining vertices, plus the
    /// new-to-old label map.
    pub fn remove_vertices(&self, s: &VertexSet) -> (Graph, Vec<usize>) {
        self.induced(&self.vertices().difference(s))
    }

    /// BFS distances from `src`; `None` for unreachable vertices.
    pub fn distances_from(&self, src: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.d];
        let mut queue = VecDeque::from([src]);
        dist[src] = Some(0);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for v in &self.adj[u] {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Longest geodesic; `None` if disconnected or null.
    pub fn diameter(&self) -> Option<usize> {
        if self.d == 0 || !self.is_connected() {
            return None;
        }
        (0..self.d)
            .map(|v| self.distances_from(v).into_iter().flatten().max().unwrap_or(0))
            .max()
    }

    /// `G^t`: `u ~ v` iff their distance in `G` is in `[1, t]`.
    pub fn power(&self, t: usize) -> Result<Graph> {
        if t == 0 {
            return Err(Error::InvalidParameter("graph power needs t ≥ 1".into()));
        }
        let mut g = Graph::empty(self.d);
        for u in 0..self.d {
            for (v, dv) in self.distances_from(u).into_iter().enumerate() {
                if matches!(dv, Some(k) if k >= 1 && k <= t) {
                    g.adj[u].insert(v);
                }
            }
        }
        Ok(g)
    }

    /// `G₁ ⊕ … ⊕ Gₘ` with the operands' vertices laid out consecutively.
    pub fn disjoint_union(gs: &[Graph]) -> Result<Graph> {
        if gs.is_empty() {
            return Err(Error::Empty("disjoint union of zero graphs"));
        }
        let d = gs.iter().map(Graph::d).sum();
        let mut out = Graph::empty(d);
        let mut offset = 0;
        for g in gs {
            for (u, nb) in g.adj.iter().enumerate() {
                out.adj[offset + u] = nb.iter().map(|v| v + offset).collect();
            }
            offset += g.d;
        }
        Ok(out)
    }

    /// Stable identity: hex SHA-256 prefix of the canonical edge list.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(format!("d={};", self.d).as_bytes());
        for (u, v) in self.edges() {
            h.update(format!("{}-{},", u + 1, v + 1).as_bytes());
        }
        h.finalize()
            .iter()
            .take(8)
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            d: self.d,
            edges: self.edges().into_iter().map(|(u, v)| [u + 1, v + 1]).collect(),
        }
    }

    pub fn from_json(j: &GraphJson) -> Result<Self> {
        Self::from_labeled_edges(j.d, &j.edges)
    }
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Graph(d={}, edges={:?})", self.d, self.to_json().edges)
    }
}

impl Serialize for Graph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let j = GraphJson::deserialize(de)?;
        Graph::from_json(&j).map_err(serde::de::Error::custom)
    }
}

/// All `2^{d(d-1)/2}` labeled simple graphs on `d` vertices, ordered
/// lexicographically by the edge-presence bitstring over pairs
/// `(1,2), (1,3), …, (d-1,d)` (first pair most significant).
pub fn enumerate_graphs(d: usize, cap: usize) -> Result<impl Iterator<Item = Graph>> {
    if d == 0 {
        return Err(Error::InvalidParameter("enumeration needs d ≥ 1".into()));
    }
    if d > cap {
        return Err(Error::AboveCap {
            what: "d",
            value: d,
            cap,
        });
    }
    let pairs: Vec<(usize, usize)> = (0..d)
        .flat_map(|u| (u + 1..d).map(move |v| (u, v)))
        .collect();
    let m = pairs.len();
    Ok((0u64..1 << m).map(move |code| {
        let edges: Vec<_> = pairs
            .iter()
            .enumerate()
            .filter(|(j, _)| code >> (m - 1 - j) & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        Graph::from_edges(d, &edges).expect("enumerated edges are simple")
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle_plus_path() -> Graph {
        let c4 = Graph::cycle(4).unwrap();
        let p3 = make_family(&FamilySpec::Path { d: 3 }).unwrap();
        Graph::disjoint_union(&[c4, p3]).unwrap()
    }

    #[test]
    fn loader_rejects_bad_edges() {
        assert!(Graph::from_labeled_edges(3, &[[1, 1]]).is_err());
        assert!(Graph::from_labeled_edges(3, &[[1, 2], [2, 1]]).is_err());
        assert!(Graph::from_labeled_edges(3, &[[1, 4]]).is_err());
        assert!(Graph::from_labeled_edges(3, &[[0, 1]]).is_err());
        let g: Graph = serde_json::from_str(r#"{"d":3,"edges":[[1,2],[3,2]]}"#).unwrap();
        assert_eq!(g.edges(), vec![(0, 1), (1, 2)]);
        assert!(serde_json::from_str::<Graph>(r#"{"d":2,"edges":[[1,1]]}"#).is_err());
    }

    #[test]
    fn components_examples() {
        let p4 = make_family(&FamilySpec::Path { d: 4 }).unwrap();
        assert_eq!(p4.components(), vec![VertexSet::full(4)]);
        assert_eq!(Graph::empty(3).components().len(), 3);
        let comps: Vec<_> = cycle_plus_path().components().iter().map(|c| c.to_labels()).collect();
        assert_eq!(comps, vec![vec![1, 2, 3, 4], vec![5, 6, 7]]);
        assert!(Graph::empty(0).components().is_empty());
    }

    #[test]
    fn remove_vertices_examples() {
        let p4 = make_family(&FamilySpec::Path { d: 4 }).unwrap();
        let (g, map) = p4.remove_vertices(&VertexSet::singleton(1));
        assert_eq!(map, vec![0, 2, 3]);
        let comps: Vec<Vec<usize>> = g
            .components()
            .iter()
            .map(|c| c.iter().map(|v| map[v] + 1).collect())
            .collect();
        assert_eq!(comps, vec![vec![1], vec![3, 4]]);
        let (same, _) = p4.remove_vertices(&VertexSet::new());
        assert_eq!(same, p4);
        let k4 = make_family(&FamilySpec::Complete { d: 4 }).unwrap();
        let (k3, _) = k4.remove_vertices(&VertexSet::singleton(0));
        assert_eq!(k3, make_family(&FamilySpec::Complete { d: 3 }).unwrap());
        let (null, _) = k4.remove_vertices(&k4.vertices());
        assert_eq!(null.d(), 0);
    }

    #[test]
    fn power_examples() {
        let p3 = make_family(&FamilySpec::Path { d: 3 }).unwrap();
        assert_eq!(p3.power(1).unwrap(), p3);
        assert!(p3.power(2).unwrap().is_complete());
        let g33 = make_family(&FamilySpec::Grid { rows: 3, cols: 3 }).unwrap();
        assert!(g33.power(2).unwrap().is_complete());
        assert!(p3.power(0).is_err());
    }

    #[test]
    fn union_examples() {
        let k2 = make_family(&FamilySpec::Complete { d: 2 }).unwrap();
        let u = Graph::disjoint_union(&[k2.clone(), k2.clone()]).unwrap();
        assert_eq!((u.d(), u.edge_count(), u.components().len()), (4, 2, 2));
        assert_eq!(Graph::disjoint_union(std::slice::from_ref(&k2)).unwrap(), k2);
        assert!(Graph::disjoint_union(&[]).is_err());
        let g = cycle_plus_path();
        assert_eq!(g.edge_count(), 6);
        assert!(g.has_edge(0, 3) && g.has_edge(4, 5) && !g.has_edge(3, 4));
    }

    #[test]
    fn enumeration_counts_and_order() {
        assert_eq!(enumerate_graphs(1, 5).unwrap().count(), 1);
        assert_eq!(enumerate_graphs(3, 5).unwrap().count(), 8);
        assert_eq!(enumerate_graphs(4, 5).unwrap().count(), 64);
        assert!(enumerate_graphs(6, 5).is_err());
        let all: Vec<_> = enumerate_graphs(3, 5).unwrap().collect();
        assert_eq!(all[0], Graph::empty(3));
        // code 1 sets only the last pair (2,3)
        assert_eq!(all[1].edges(), vec![(1, 2)]);
        assert!(all[7].is_complete());
        let distinct: std::collections::HashSet<_> = all.iter().map(Graph::hash).collect();
        assert_eq!(distinct.len(), 8);
    }

    #[test]
    fn structural_predicates() {
        let star = make_family(&FamilySpec::Star { d: 6 }).unwrap();
        assert!(star.is_tree() && star.is_forest());
        assert_eq!(star.max_degree(), 5);
        assert_eq!(star.diameter(), Some(2));
        assert!(!Graph::cycle(4).unwrap().is_forest());
        assert_eq!(Graph::empty(3).diameter(), None);
        assert!(Graph::empty(3).is_forest());
    }
}
