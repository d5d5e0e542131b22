//! Explicit disintegrations for the structured families, each paired with
//! its closed-form length bound.

use serde::{Deserialize, Serialize};

use super::{exact::solve, lift_steps, merge_stepwise, normalize, Disintegration};
use super::{resilience_estimate, DEFAULT_EXACT_BUDGET, DEFAULT_MEMO_CAP};
use super::estimate::{greedy_disintegration, separator_disintegration};
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};

/// Construction to run. Vertex labels in parameters are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "snake_case")]
pub enum Strategy {
    /// Center first, then every leaf.
    Star,
    /// Levels of a rooted tree with branching at most `k`.
    KaryTree { k: usize, root: Option<usize> },
    /// Recursive centroid removal on a forest.
    TreeCentroid,
    /// Middle-block recursion for a graph whose edges satisfy `|u − v| ≤ t`.
    PathPower { t: usize, s: Option<u32> },
    /// Middle-stripe recursion for a row-major `rows × cols` layout whose
    /// edges have Chebyshev length at most `t`.
    GridPower {
        rows: usize,
        cols: usize,
        t: usize,
        s: Option<u32>,
    },
    /// Block lifting of a quotient disintegration.
    Meta { blocks: Vec<Vec<usize>>, quotient: Graph },
    /// Per-component solutions merged stepwise.
    Union,
    /// The listed vertices first as singleton steps, then the rest.
    Removal { removed: Vec<usize> },
    Greedy,
    Separator,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstructiveBound {
    pub disintegration: Disintegration,
    /// Closed-form bound evaluated on the instance.
    pub bound: f64,
}

impl ConstructiveBound {
    pub fn len(&self) -> usize {
        self.disintegration.len()
    }

    pub fn is_empty(&self) -> bool {
        self.disintegration.is_empty()
    }
}

pub fn bound_constructive(g: &Graph, strategy: &Strategy) -> Result<ConstructiveBound> {
    let (disintegration, bound) = match strategy {
        Strategy::Star => star(g)?,
        Strategy::KaryTree { k, root } => kary(g, *k, *root)?,
        Strategy::TreeCentroid => {
            let dis = centroid_disintegration(g)?;
            let bound = if g.d() == 0 {
                0.0
            } else {
                (g.d() as f64).log2() + 1.0
            };
            (dis, bound)
        }
        Strategy::PathPower { t, s } => path_power(g, *t, *s)?,
        Strategy::GridPower { rows, cols, t, s } => grid_power(g, *rows, *cols, *t, *s)?,
        Strategy::Meta { blocks, quotient } => meta(g, blocks, quotient)?,
        Strategy::Union => {
            let parts = g.components().into_iter().map(|c| {
                let (sub, map) = g.induced(&c);
                lift_steps(resilience_estimate(&sub).upper.steps(), &map)
            });
            let dis = Disintegration::new(g, merge_stepwise(parts))?;
            let n = dis.len() as f64;
            (dis, n)
        }
        Strategy::Removal { removed } => {
            let removed = VertexSet::from_labels(removed, g.d())?;
            let (rest, map) = g.remove_vertices(&removed);
            let tail = resilience_estimate(&rest);
            let mut pre: Vec<VertexSet> = removed.iter().map(VertexSet::singleton).collect();
            pre.extend(lift_steps(tail.upper.steps(), &map));
            let bound = (removed.len() + tail.upper_len()) as f64;
            (normalize(g, &pre)?, bound)
        }
        Strategy::Greedy => {
            let dis = greedy_disintegration(g);
            let n = dis.len() as f64;
            (dis, n)
        }
        Strategy::Separator => {
            let dis = separator_disintegration(g);
            let n = dis.len() as f64;
            (dis, n)
        }
    };
    debug_assert!(disintegration.len() as f64 <= bound + 1e-9);
    Ok(ConstructiveBound {
        disintegration,
        bound,
    })
}

fn star(g: &Graph) -> Result<(Disintegration, f64)> {
    if g.d() <= 1 {
        let steps = if g.d() == 1 {
            vec![VertexSet::singleton(0)]
        } else {
            vec![]
        };
        return Ok((Disintegration::new(g, steps)?, g.d() as f64));
    }
    let center = (0..g.d())
        .find(|&c| g.edges().iter().all(|&(u, v)| u == c || v == c))
        .ok_or_else(|| Error::Precondition("no vertex touches every edge; not a star".into()))?;
    let pre = vec![
        VertexSet::singleton(center),
        g.vertices().difference(&VertexSet::singleton(center)),
    ];
    Ok((normalize(g, &pre)?, 2.0))
}

fn kary(g: &Graph, k: usize, root: Option<usize>) -> Result<(Disintegration, f64)> {
    if !g.is_tree() {
        return Err(Error::Precondition("k-ary strategy needs a tree".into()));
    }
    if k == 0 && g.d() > 1 {
        return Err(Error::Precondition("k = 0 admits only a single vertex".into()));
    }
    let root = match root {
        Some(0) => return Err(Error::InvalidParameter("root label must be ≥ 1".into())),
        Some(r) if r > g.d() => return Err(Error::InvalidParameter("root out of range".into())),
        Some(r) => r - 1,
        None => 0,
    };
    let dist = g.distances_from(root);
    let depth = dist.iter().flatten().max().map_or(0, |m| m + 1);
    let mut levels = vec![VertexSet::new(); depth];
    for (v, dv) in dist.iter().enumerate() {
        let dv = dv.expect("tree is connected");
        let children = g.degree(v) - usize::from(v != root);
        if children > k {
            return Err(Error::Precondition(format!(
                "vertex {} has {children} children, more than k = {k}",
                v + 1
            )));
        }
        levels[dv].insert(v);
    }
    Ok((Disintegration::new(g, levels)?, depth as f64))
}

/// Recursive centroid removal; each piece has at most half the vertices of
/// its parent.
pub fn centroid_disintegration(g: &Graph) -> Result<Disintegration> {
    if !g.is_forest() {
        return Err(Error::Precondition("centroid strategy needs a forest".into()));
    }
    let steps = centroid_steps(g, &g.vertices());
    Disintegration::new(g, steps)
}

fn centroid_steps(g: &Graph, within: &VertexSet) -> Vec<VertexSet> {
    let parts = g.components_within(within).into_iter().map(|comp| {
        let c = centroid(g, &comp);
        let mut rest = comp.clone();
        rest.remove(c);
        let mut steps = vec![VertexSet::singleton(c)];
        steps.extend(centroid_steps(g, &rest));
        steps
    });
    merge_stepwise(parts)
}

/// Walks from the lowest label toward the heavy side until no component
/// left by the current vertex exceeds half the tree.
fn centroid(g: &Graph, tree: &VertexSet) -> usize {
    let half = tree.len() / 2;
    let mut v = tree.first().expect("nonempty tree");
    loop {
        let mut rest = tree.clone();
        rest.remove(v);
        let heavy = g
            .components_within(&rest)
            .into_iter()
            .find(|c| c.len() > half);
        match heavy {
            None => return v,
            Some(h) => {
                v = g
                    .neighbors(v)
                    .iter()
                    .find(|&u| h.contains(u))
                    .expect("heavy component touches v");
            }
        }
    }
}

/// Smallest `s` with `t(2^s − 1) ≥ n`.
fn default_s(n: usize, t: usize) -> u32 {
    let mut s = 0u32;
    while t * ((1usize << s) - 1) < n {
        s += 1;
    }
    s
}

fn check_s(n: usize, t: usize, s: Option<u32>) -> Result<u32> {
    if t == 0 {
        return Err(Error::InvalidParameter("t must be ≥ 1".into()));
    }
    let s = s.unwrap_or_else(|| default_s(n, t));
    if s >= 40 || t * ((1usize << s) - 1) < n {
        return Err(Error::Precondition(format!(
            "t(2^s − 1) = {t}·(2^{s} − 1) does not cover {n} positions"
        )));
    }
    Ok(s)
}

fn path_power(g: &Graph, t: usize, s: Option<u32>) -> Result<(Disintegration, f64)> {
    let s = check_s(g.d(), t, s)?;
    if let Some((u, v)) = g.edges().into_iter().find(|&(u, v)| v - u > t) {
        return Err(Error::Precondition(format!(
            "edge {{{}, {}}} is longer than t = {t}",
            u + 1,
            v + 1
        )));
    }
    let pre = path_block(0, s, t)
        .into_iter()
        .map(|step| step.into_iter().filter(|&v| v < g.d()).collect())
        .collect::<Vec<VertexSet>>();
    Ok((normalize(g, &pre)?, (s as usize * t) as f64))
}

/// Steps for positions `lo .. lo + t(2^s − 1)` of the full path power.
fn path_block(lo: usize, s: u32, t: usize) -> Vec<VertexSet> {
    if s == 0 {
        return Vec::new();
    }
    let half = t * ((1usize << (s - 1)) - 1);
    let mid = lo + half;
    let mut steps: Vec<VertexSet> = (mid..mid + t).map(VertexSet::singleton).collect();
    steps.extend(merge_stepwise([
        path_block(lo, s - 1, t),
        path_block(mid + t, s - 1, t),
    ]));
    steps
}

fn grid_power(
    g: &Graph,
    rows: usize,
    cols: usize,
    t: usize,
    s: Option<u32>,
) -> Result<(Disintegration, f64)> {
    if rows * cols != g.d() {
        return Err(Error::Precondition(format!(
            "{rows} × {cols} layout does not match d = {}",
            g.d()
        )));
    }
    let s = check_s(rows.max(cols), t, s)?;
    for (u, v) in g.edges() {
        let (ru, cu, rv, cv) = (u / cols, u % cols, v / cols, v % cols);
        if ru.abs_diff(rv) > t || cu.abs_diff(cv) > t {
            return Err(Error::Precondition(format!(
                "edge {{{}, {}}} spans more than t = {t} rows or columns",
                u + 1,
                v + 1
            )));
        }
    }
    let cell = |r: usize, c: usize| (r < rows && c < cols).then(|| r * cols + c);
    let pre = grid_block(0, 0, s, t)
        .into_iter()
        .map(|step| step.into_iter().filter_map(|(r, c)| cell(r, c)).collect())
        .collect::<Vec<VertexSet>>();
    let bound = (4 * t * t) as f64 * 2f64.powi(s as i32);
    Ok((normalize(g, &pre)?, bound))
}

/// Steps (as cell lists) for the square with corner `(r0, c0)` and side
/// `t(2^s − 1)`.
fn grid_block(r0: usize, c0: usize, s: u32, t: usize) -> Vec<Vec<(usize, usize)>> {
    if s == 0 {
        return Vec::new();
    }
    let side = t * ((1usize << s) - 1);
    let half = t * ((1usize << (s - 1)) - 1);
    let mut steps = Vec::new();
    for r in r0..r0 + side {
        for c in c0..c0 + side {
            let in_row_stripe = (r0 + half..r0 + half + t).contains(&r);
            let in_col_stripe = (c0 + half..c0 + half + t).contains(&c);
            if in_row_stripe || in_col_stripe {
                steps.push(vec![(r, c)]);
            }
        }
    }
    let far = half + t;
    let quads = [(0, 0), (0, far), (far, 0), (far, far)].map(|(dr, dc)| {
        grid_block(r0 + dr, c0 + dc, s - 1, t)
    });
    let mut merged: Vec<Vec<(usize, usize)>> = Vec::new();
    for q in quads {
        for (i, step) in q.into_iter().enumerate() {
            if i == merged.len() {
                merged.push(step);
            } else {
                merged[i].extend(step);
            }
        }
    }
    steps.extend(merged);
    steps
}

fn meta(g: &Graph, blocks: &[Vec<usize>], quotient: &Graph) -> Result<(Disintegration, f64)> {
    if blocks.len() != quotient.d() {
        return Err(Error::Precondition(format!(
            "{} blocks but the quotient has {} vertices",
            blocks.len(),
            quotient.d()
        )));
    }
    let mut block_of = vec![usize::MAX; g.d()];
    for (i, b) in blocks.iter().enumerate() {
        for &label in b {
            if label == 0 || label > g.d() {
                return Err(Error::InvalidParameter(format!("vertex {label} out of range")));
            }
            if block_of[label - 1] != usize::MAX {
                return Err(Error::Precondition(format!("vertex {label} is in two blocks")));
            }
            block_of[label - 1] = i;
        }
    }
    if let Some(v) = block_of.iter().position(|&b| b == usize::MAX) {
        return Err(Error::Precondition(format!("vertex {} is in no block", v + 1)));
    }
    for (u, v) in g.edges() {
        let (bu, bv) = (block_of[u], block_of[v]);
        if bu != bv && !quotient.has_edge(bu, bv) {
            return Err(Error::Precondition(format!(
                "edge {{{}, {}}} joins blocks {} and {} which are not adjacent in the quotient",
                u + 1,
                v + 1,
                bu + 1,
                bv + 1
            )));
        }
    }
    let outer: Vec<VertexSet> = match solve(quotient, DEFAULT_EXACT_BUDGET, DEFAULT_MEMO_CAP) {
        Some((steps, _)) => steps,
        None => resilience_estimate(quotient).upper.steps().to_vec(),
    };
    let m = blocks.iter().map(Vec::len).max().unwrap_or(0);
    let mut pre = Vec::new();
    for step in &outer {
        for j in 0..m {
            let layer: VertexSet = step
                .iter()
                .filter_map(|b| blocks[b].get(j).map(|&l| l - 1))
                .collect();
            pre.push(layer);
        }
    }
    Ok((normalize(g, &pre)?, (outer.len() * m) as f64))
}
