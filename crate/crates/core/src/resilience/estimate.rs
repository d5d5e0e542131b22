//! Heuristic bounds for graphs too large for the exact search.

use super::constructive::centroid_disintegration;
use super::exact::{solve, DEFAULT_EXACT_BUDGET, DEFAULT_MEMO_CAP};
use super::{lift_steps, merge_stepwise, normalize, Disintegration, LowerWitness, ResilienceCertificate};
use crate::graph::{max_clique, DEFAULT_CLIQUE_BUDGET};
use crate::graph::{Graph, VertexSet};

/// Graphs up to this size always get the exact solver.
const EXACT_UP_TO: usize = 16;
/// Budget for an opportunistic exact attempt on larger graphs.
const PROBE_BUDGET: u64 = 1 << 14;
/// Pieces of a separator recursion small enough to solve exactly.
const SEPARATOR_LEAF: usize = 12;

/// Clique lower bound `r(G) ≥ ω(G)` with its witness.
pub fn lower_bound_clique(g: &Graph) -> (usize, LowerWitness) {
    let c = max_clique(g, DEFAULT_CLIQUE_BUDGET);
    let n = c.clique.len();
    (
        n,
        LowerWitness::Clique {
            vertices: c.clique.to_labels(),
        },
    )
}

/// Exact when cheap, otherwise clique lower bound against the best of the
/// greedy, separator and (for forests) centroid upper bounds.
pub fn resilience_estimate(g: &Graph) -> ResilienceCertificate {
    let budget = if g.d() <= EXACT_UP_TO {
        DEFAULT_EXACT_BUDGET
    } else {
        PROBE_BUDGET
    };
    if let Some((steps, nodes)) = solve(g, budget, DEFAULT_MEMO_CAP) {
        let upper = Disintegration::new(g, steps).expect("exact witness validates");
        return ResilienceCertificate {
            lower: upper.len(),
            lower_witness: LowerWitness::Exhaustive { nodes },
            upper,
            exact: true,
        };
    }
    resilience_estimate_inexact(g)
}

pub(crate) fn resilience_estimate_inexact(g: &Graph) -> ResilienceCertificate {
    let (lower, lower_witness) = lower_bound_clique(g);
    let mut upper = greedy_disintegration(g);
    let sep = separator_disintegration(g);
    if sep.len() < upper.len() {
        upper = sep;
    }
    if g.is_forest() {
        if let Ok(c) = centroid_disintegration(g) {
            if c.len() < upper.len() {
                upper = c;
            }
        }
    }
    ResilienceCertificate {
        exact: lower == upper.len(),
        lower,
        lower_witness,
        upper,
    }
}

/// Removes, in every residual component, the vertex that minimizes the
/// largest component left behind (ties to the lowest label).
pub fn greedy_disintegration(g: &Graph) -> Disintegration {
    let mut residual = g.vertices();
    let mut steps = Vec::new();
    while !residual.is_empty() {
        let mut step = VertexSet::new();
        for comp in g.components_within(&residual) {
            let mut best = (usize::MAX, usize::MAX);
            for v in &comp {
                let mut rest = comp.clone();
                rest.remove(v);
                let largest = g
                    .components_within(&rest)
                    .iter()
                    .map(VertexSet::len)
                    .max()
                    .unwrap_or(0);
                best = best.min((largest, v));
            }
            step.insert(best.1);
        }
        residual = residual.difference(&step);
        steps.push(step);
    }
    Disintegration::new(g, steps).expect("greedy steps validate")
}

/// Recursive balanced-separator construction.
///
/// Each connected piece above a small size is cut along a BFS layer; the
/// layer is removed one vertex per step, the remaining pieces recurse and
/// run in parallel, and the resulting pre-disintegration is normalized.
pub fn separator_disintegration(g: &Graph) -> Disintegration {
    let pre = separator_steps(g, &g.vertices());
    normalize(g, &pre).expect("separator steps form a pre-disintegration")
}

fn separator_steps(g: &Graph, within: &VertexSet) -> Vec<VertexSet> {
    let parts = g
        .components_within(within)
        .into_iter()
        .map(|c| separator_connected(g, &c));
    merge_stepwise(parts)
}

fn separator_connected(g: &Graph, comp: &VertexSet) -> Vec<VertexSet> {
    if comp.len() <= SEPARATOR_LEAF {
        let (sub, map) = g.induced(comp);
        if let Some((steps, _)) = solve(&sub, DEFAULT_EXACT_BUDGET, DEFAULT_MEMO_CAP) {
            return lift_steps(&steps, &map);
        }
    }
    let mut best: Option<Vec<VertexSet>> = None;
    for sep in candidate_separators(g, comp) {
        let mut steps: Vec<VertexSet> = sep.iter().map(VertexSet::singleton).collect();
        steps.extend(separator_steps(g, &comp.difference(&sep)));
        if best.as_ref().is_none_or(|b| steps.len() < b.len()) {
            best = Some(steps);
        }
    }
    best.unwrap_or_else(|| comp.iter().map(VertexSet::singleton).collect())
}

/// The most balanced BFS layers from two peripheral starting points.
fn candidate_separators(g: &Graph, comp: &VertexSet) -> Vec<VertexSet> {
    let start = comp.first().expect("component is nonempty");
    let far = farthest(g, comp, start);
    let far2 = farthest(g, comp, far);
    let mut out: Vec<(usize, usize, VertexSet)> = Vec::new();
    for src in [far, far2] {
        let layers = bfs_layers(g, comp, src);
        for (i, layer) in layers.iter().enumerate().skip(1) {
            if i + 1 == layers.len() {
                break;
            }
            let rest = comp.difference(layer);
            let largest = g
                .components_within(&rest)
                .iter()
                .map(VertexSet::len)
                .max()
                .unwrap_or(0);
            out.push((largest + layer.len(), layer.len(), layer.clone()));
        }
    }
    out.sort();
    out.dedup_by(|a, b| a.2 == b.2);
    out.into_iter().take(2).map(|t| t.2).collect()
}

fn bfs_layers(g: &Graph, comp: &VertexSet, src: usize) -> Vec<VertexSet> {
    let mut seen = VertexSet::singleton(src);
    let mut layers = vec![VertexSet::singleton(src)];
    loop {
        let mut next = VertexSet::new();
        for v in layers.last().expect("nonempty") {
            for u in g.neighbors(v) {
                if comp.contains(u) && !seen.contains(u) {
                    next.insert(u);
                }
            }
        }
        if next.is_empty() {
            return layers;
        }
        seen.union_with(&next);
        layers.push(next);
    }
}

fn farthest(g: &Graph, comp: &VertexSet, src: usize) -> usize {
    let layers = bfs_layers(g, comp, src);
    layers.last().and_then(VertexSet::first).unwrap_or(src)
}
