//! Randomized checks of the structural resilience lemmas.
//!
//! Each check draws its instances from an independent seeded stream and
//! compares exact resilience values (or validated constructive
//! disintegrations) against the stated equality or bound. Instances are
//! small enough (`d ≤ 8` by default) that the exact solver always finishes.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{make_family, max_clique, FamilySpec, Graph, VertexSet, DEFAULT_CLIQUE_BUDGET};
use crate::resilience::{
    bound_constructive, normalize, resilience_estimate, resilience_exact, validate, Mode,
    Strategy, DEFAULT_EXACT_BUDGET,
};
use crate::{exec, seed, VERSION};

/// Largest `d` accepted for randomized instances.
pub const MAX_VERIFY_D: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaConfig {
    pub max_d: usize,
    pub trials: usize,
    pub seed: u64,
}

impl Default for LemmaConfig {
    fn default() -> Self {
        LemmaConfig {
            max_d: 8,
            trials: 200,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaCheck {
    pub name: String,
    pub instances: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

impl LemmaCheck {
    pub fn pass(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub version: String,
    pub config: LemmaConfig,
    pub checks: Vec<LemmaCheck>,
    pub pass: bool,
}

impl LemmaReport {
    /// Fixed-width table, one row per check.
    pub fn table(&self) -> String {
        let mut out = format!("{:<22} {:>9} {:>8}  status\n", "check", "instances", "failures");
        for c in &self.checks {
            out.push_str(&format!(
                "{:<22} {:>9} {:>8}  {}\n",
                c.name,
                c.instances,
                c.failures,
                if c.pass() { "pass" } else { "FAIL" }
            ));
        }
        out
    }
}

type Outcome = std::result::Result<(), String>;

/// Erdős–Rényi graph on `d` vertices.
pub fn random_graph(d: usize, p: f64, rng: &mut impl Rng) -> Graph {
    let mut edges = Vec::new();
    for u in 0..d {
        for v in u + 1..d {
            if rng.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(d, &edges).expect("edges are in range")
}

/// Uniform random recursive tree: vertex `v > 0` attaches to a uniform
/// earlier vertex.
pub fn random_tree(d: usize, rng: &mut impl Rng) -> Graph {
    let edges: Vec<_> = (1..d).map(|v| (rng.random_range(0..v), v)).collect();
    Graph::from_edges(d, &edges).expect("edges are in range")
}

/// Rooted tree (root 0) with branching at most `k` and at most `depth`
/// levels, grown breadth-first up to `max_d` vertices.
pub fn random_kary_tree(k: usize, depth: usize, max_d: usize, rng: &mut impl Rng) -> Graph {
    let mut edges = Vec::new();
    let mut level = vec![0usize];
    let mut d = 1;
    for _ in 1..depth {
        let mut next = Vec::new();
        for &p in &level {
            for _ in 0..rng.random_range(0..=k) {
                if d == max_d {
                    break;
                }
                edges.push((p, d));
                next.push(d);
                d += 1;
            }
        }
        level = next;
    }
    Graph::from_edges(d, &edges).expect("edges are in range")
}

/// Random spanning subgraph with each edge kept with probability `keep`.
fn thin(g: &Graph, keep: f64, rng: &mut impl Rng) -> Graph {
    let edges: Vec<_> = g.edges().into_iter().filter(|_| rng.random_bool(keep)).collect();
    Graph::from_edges(g.d(), &edges).expect("subset of valid edges")
}

fn relabel(g: &Graph, perm: &[usize]) -> Graph {
    let edges: Vec<_> = g.edges().into_iter().map(|(u, v)| (perm[u], perm[v])).collect();
    Graph::from_edges(g.d(), &edges).expect("permutation preserves range")
}

fn random_subset(d: usize, p: f64, rng: &mut impl Rng) -> VertexSet {
    (0..d).filter(|_| rng.random_bool(p)).collect()
}

/// Exact resilience; instances here are always within the solver's reach.
pub fn exact_r(g: &Graph) -> usize {
    let c = resilience_exact(g, DEFAULT_EXACT_BUDGET);
    assert!(c.exact, "exact solver ran out of budget at d = {}", g.d());
    c.upper_len()
}

/// A random pre-disintegration: each step picks at most one vertex per
/// residual component (possibly none) and empty steps are sprinkled in.
pub fn random_pre_disintegration(g: &Graph, rng: &mut impl Rng) -> Vec<VertexSet> {
    let mut residual = g.vertices();
    let mut steps = Vec::new();
    while !residual.is_empty() {
        let mut step = VertexSet::new();
        if !rng.random_bool(0.15) {
            for c in g.components_within(&residual) {
                if rng.random_bool(0.6) {
                    let members: Vec<usize> = c.iter().collect();
                    step.insert(*members.choose(rng).expect("nonempty component"));
                }
            }
        }
        residual = residual.difference(&step);
        steps.push(step);
    }
    steps
}

fn pre_length(steps: &[VertexSet]) -> usize {
    steps.iter().rposition(|s| !s.is_empty()).map_or(0, |i| i + 1)
}

fn constructive(g: &Graph, s: &Strategy, exact_too: bool) -> Outcome {
    let b = bound_constructive(g, s).map_err(|e| format!("{s:?} failed: {e}"))?;
    let report = validate(g, b.disintegration.steps(), Mode::Disintegration);
    if !report.ok() {
        return Err(format!("{s:?} produced an invalid disintegration: {}", report.summary()));
    }
    if b.len() as f64 > b.bound + 1e-9 {
        return Err(format!("{s:?}: length {} above bound {}", b.len(), b.bound));
    }
    if exact_too && exact_r(g) as f64 > b.bound + 1e-9 {
        return Err(format!("{s:?}: exact r {} above bound {}", exact_r(g), b.bound));
    }
    Ok(())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn check_union(rng: &mut ChaCha8Rng, max_d: usize) -> Outcome {
    let d1 = rng.random_range(1..max_d);
    let d2 = rng.random_range(1..=max_d - d1);
    let g1 = random_graph(d1, rng.random_range(0.2..0.8), rng);
    let g2 = random_graph(d2, rng.random_range(0.2..0.8), rng);
    let u = Graph::disjoint_union(&[g1.clone(), g2.clone()]).map_err(|e| e.to_string())?;
    let (r1, r2, ru) = (exact_r(&g1), exact_r(&g2), exact_r(&u));
    ensure(ru == r1.max(r2), || format!("r(G1 ⊕ G2) = {ru}, max = {}", r1.max(r2)))?;
    constructive(&u, &Strategy::Union, false)?;
    let b = bound_constructive(&u, &Strategy::Union).map_err(|e| e.to_string())?;
    ensure(b.len() == ru, || format!("union construction {} ≠ {ru}", b.len()))
}

fn check_removal(rng: &mut ChaCha8Rng, max_d: usize) -> Outcome {
    let d = rng.random_range(2..=max_d);
    let g = random_graph(d, rng.random_range(0.2..0.9), rng);
    let removed = random_subset(d, 0.35, rng);
    let (rest, _) = g.remove_vertices(&removed);
    let (r, rr) = (exact_r(&g), exact_r(&rest));
    ensure(r <= rr + removed.len(), || {
        format!("r(G) = {r} > r(G∖V') + |V'| = {rr} + {}", removed.len())
    })?;
    let labels: Vec<usize> = removed.iter().map(|v| v + 1).collect();
    constructive(&g, &Strategy::Removal { removed: labels }, false)
}

fn check_edge_addition(rng: &mut ChaCha8Rng, max_d: usize) -> Outcome {
    let d = rng.random_range(2..=max_d);
    let g = random_graph(d, rng.random_range(0.1..0.7), rng);
    let mut missing: Vec<(usize, usize)> = (0..d)
        .flat_map(|u| (u + 1..d).map(move |v| (u, v)))
        .filter(|&(u, v)| !g.has_edge(u, v))
        .collect();
    missing.shuffle(rng);
    let k = if missing.is_empty() {
        0
    } else {
        rng.random_range(1..=missing.len().min(3))
    };
    let added = &missing[..k];
    let g2 = g.with_edges(added).map_err(|e| e.to_string())?;
    let (r, r2) = (exact_r(&g), exact_r(&g2));
    ensure(r2 <= r + k, || format!("r(G ∪ E') = {r2} > r(G) + |E'| = {r} + {k}"))?;
    ensure(r <= r2, || format!("adding edges lowered r from {r} to {r2}"))
}

fn check_subgraph(rng: &mut ChaCha8Rng, max_d: usize) -> Outcome {
    let d = rng.random_range(1..=max_d);
    let g = random_graph(d, rng.random_range(0.2..0.9), rng);
    let keep = random_subset(d, 0.7, rng);
    let (sub, _) = g.induced(&keep);
    let sub = thin(&sub, 0.7, rng);
    let mut perm: Vec<usize> = (0..sub.d()).collect();
    perm.shuffle(rng);
    let iso = relabel(&sub, &perm);
    let (r, rs, ri) = (exact_r(&g), exact_r(&sub), exact_r(&iso));
    ensure(rs == ri, || format!("relabeling changed r from {rs} to {ri}"))?;
    ensure(rs <= r, || format!("subgraph r = {rs} > r(G) = {r}"))
}

fn check_max_clique(rng: &mut ChaCha8Rng, max_d: usize) -> Outcome {
    let d = rng.random_range(1..=max_d);
    let g = random_graph(d, rng.random_range(0.2..0.95), rng);
    let w = max_clique(&g, DEFAULT_CLIQUE_BUDGET).clique.len();
    let r = exact_r(&g);
    ensure(r >= w, || format!("r = {r} below clique number {w}"))
}

fn check_complete_empty(rng: &mut ChaCha8Rng, max_d: usize) -> Outcome {
    let d = rng.random_range(1..=max_d);
    let p = [0.0, 1.0, rng.random_range(0.0..1.0), 0.95, 0.05][rng.random_range(0..5)];
    let g = random_graph(d, p, rng);
    let r = exact_r(&g);
    ensure((r == d) == g.is_complete(), || {
        format!("r = {r}, d = {d}, complete = {}", g.is_complete())
    })?;
    ensure((r == 1) == (g.edge_count() == 0), || {
        format!("r = {r} with {} edges", g.edge_count())
    })
}

fn check_star(rng: &mut ChaCha8Rng, max_d: usize) -> Outcome {
    let d = rng.random_range(1..=max_d);
    let g = make_family(&FamilySpec::Star { d }).map_err(|e| e.to_string())?;
    let mut perm: Vec<usize> = (0..d).collect();
    perm.shuffle(rng);
    let g = relabel(&g, &perm);
    let r = exact_r(&g);
    ensure(r == d.min(2), || format!("r(S_{d}) = {r}"))?;
    constructive(&g, &Strategy::Star, false)
}

fn check_normalization(rng: &mut ChaCha8Rng, max_d: usize) -> Outcome {
    let d = rng.random_range(1..=max_d);
    let g = random_graph(d, rng.random_range(0.1..0.8), rng);
    let pre = random_pre_disintegration(&g, rng);
    let report = validate(&g, &pre, Mode::PreDisintegration);
    ensure(report.ok(), || format!("generator made an invalid pre-disintegration: {}", report.summary()))?;
    let dis = normalize(&g, &pre).map_err(|e| e.to_string())?;
    let v = validate(&g, dis.steps(), Mode::Disintegration);
    ensure(v.ok(), || format!("normalized output invalid: {}", v.summary()))?;
    let l = pre_length(&pre);
    ensure(dis.len() <= l, || format!("normalized length {} > pre length {l}", dis.len()))?;
    let r = exact_r(&g);
    ensure(r <= l, || format!("r = {r} > pre length {l}"))
}

fn check_meta(rng: &mut ChaCha8Rng, max_d: usize) -> Outcome {
    let k = rng.random_range(1..=max_d.min(4));
    let quotient = random_graph(k, rng.random_range(0.2..0.9), rng);
    let d = rng.random_range(k..=max_d);
    let mut block_of: Vec<usize> = (0..d).map(|v| if v < k { v } else { rng.random_range(0..k) }).collect();
    block_of.shuffle(rng);
    let mut edges = Vec::new();
    for u in 0..d {
        for v in u + 1..d {
            let (bu, bv) = (block_of[u], block_of[v]);
            if (bu == bv || quotient.has_edge(bu, bv)) && rng.random_bool(0.6) {
                edges.push((u, v));
            }
        }
    }
    let g = Graph::from_edges(d, &edges).map_err(|e| e.to_string())?;
    let blocks: Vec<Vec<usize>> = (0..k)
        .map(|b| (0..d).filter(|&v| block_of[v] == b).map(|v| v + 1).collect())
        .collect();
    let width = blocks.iter().map(Vec::len).max().unwrap_or(0);
    let (r, rq) = (exact_r(&g), exact_r(&quotient));
    ensure(r <= rq * width, || format!("r(G) = {r} > r(G') · max|V_i| = {rq} · {width}"))?;
    constructive(&g, &Strategy::Meta { blocks, quotient }, false)
}

fn check_kary(rng: &mut ChaCha8Rng, max_d: usize) -> Outcome {
    let k = rng.random_range(1..=3);
    let depth = rng.random_range(1..=4);
    let g = random_kary_tree(k, depth, max_d, rng);
    let levels = g
        .distances_from(0)
        .iter()
        .flatten()
        .max()
        .map_or(0, |m| m + 1);
    let r = exact_r(&g);
    ensure(r <= levels, || format!("r = {r} above depth {levels}"))?;
    constructive(&g, &Strategy::KaryTree { k, root: Some(1) }, false)
}

fn check_tree(rng: &mut ChaCha8Rng, max_d: usize) -> Outcome {
    let d = rng.random_range(1..=max_d);
    let g = random_tree(d, rng);
    let mut perm: Vec<usize> = (0..d).collect();
    perm.shuffle(rng);
    let g = relabel(&g, &perm);
    constructive(&g, &Strategy::TreeCentroid, true)
}

fn check_path_power(rng: &mut ChaCha8Rng, max_d: usize) -> Outcome {
    let t = rng.random_range(1..=max_d.min(4));
    let mut s = 1u32;
    while t * ((1usize << (s + 1)) - 1) <= max_d && rng.random_bool(0.6) {
        s += 1;
    }
    let n = t * ((1usize << s) - 1);
    let d = rng.random_range(1..=n);
    let full = make_family(&FamilySpec::Path { d })
        .and_then(|p| p.power(t))
        .map_err(|e| e.to_string())?;
    let g = if rng.random_bool(0.5) { full } else { thin(&full, 0.7, rng) };
    constructive(&g, &Strategy::PathPower { t, s: Some(s) }, true)?;
    ensure(exact_r(&g) <= s as usize * t, || "exact above st".into())
}

fn check_grid_power(rng: &mut ChaCha8Rng, max_d: usize) -> Outcome {
    let rows = rng.random_range(1..=max_d.min(4));
    let cols = rng.random_range(1..=(max_d / rows).max(1));
    let t = rng.random_range(1..=2);
    let grid = make_family(&FamilySpec::Grid { rows, cols }).map_err(|e| e.to_string())?;
    let full = grid.power(t).map_err(|e| e.to_string())?;
    let g = if rng.random_bool(0.5) { full } else { thin(&full, 0.7, rng) };
    constructive(&g, &Strategy::GridPower { rows, cols, t, s: None }, true)
}

type CheckFn = fn(&mut ChaCha8Rng, usize) -> Outcome;

const CHECKS: &[(&str, CheckFn)] = &[
    ("union", check_union),
    ("removal", check_removal),
    ("edge_addition", check_edge_addition),
    ("subgraph", check_subgraph),
    ("max_clique", check_max_clique),
    ("complete_empty", check_complete_empty),
    ("star", check_star),
    ("p_normalization", check_normalization),
    ("meta_graph", check_meta),
    ("kary_tree", check_kary),
    ("tree_centroid", check_tree),
    ("path_power", check_path_power),
    ("grid_power", check_grid_power),
];

/// Names of the randomized checks, in report order.
pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.0).collect()
}

fn run_one(name: &str, f: CheckFn, cfg: &LemmaConfig) -> LemmaCheck {
    let results = exec::map_range(cfg.trials, |i| {
        let mut rng = seed::rng(cfg.seed, &[seed::label(name), i as u64]);
        f(&mut rng, cfg.max_d).map_err(|e| format!("instance {i}: {e}"))
    });
    let failures: Vec<String> = results.into_iter().filter_map(|r| r.err()).collect();
    LemmaCheck {
        name: name.into(),
        instances: cfg.trials,
        failures: failures.len(),
        first_failure: failures.into_iter().next(),
    }
}

/// Deterministic family instances checked against their
/// constructive bounds.
fn table_instances(max_d: usize) -> LemmaCheck {
    let mut failures = Vec::new();
    let mut n = 0;
    for (spec, strategy) in table1_instances() {
        if spec.vertex_count() > max_d.max(16) {
            continue;
        }
        n += 1;
        let out = make_family(&spec)
            .map_err(|e| e.to_string())
            .and_then(|g| constructive(&g, &strategy, true));
        if let Err(e) = out {
            failures.push(format!("{spec:?}: {e}"));
        }
    }
    LemmaCheck {
        name: "table1_instances".into(),
        instances: n,
        failures: failures.len(),
        first_failure: failures.into_iter().next(),
    }
}

pub fn verify_lemmas(cfg: &LemmaConfig) -> Result<LemmaReport> {
    if cfg.max_d < 2 || cfg.max_d > MAX_VERIFY_D {
        return Err(Error::InvalidParameter(format!(
            "max_d must lie in 2..={MAX_VERIFY_D}, got {}",
            cfg.max_d
        )));
    }
    let mut checks: Vec<LemmaCheck> = CHECKS.iter().map(|&(name, f)| run_one(name, f, cfg)).collect();
    checks.push(table_instances(cfg.max_d));
    let pass = checks.iter().all(LemmaCheck::pass);
    Ok(LemmaReport {
        version: VERSION.into(),
        config: *cfg,
        checks,
        pass,
    })
}

/// One row of the example-resilience table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1Row {
    /// Row label: trees (depth k), trees (general), paths, grid, complete.
    pub row: String,
    pub family: FamilySpec,
    pub d: usize,
    pub lower: usize,
    pub upper: usize,
    pub exact: bool,
    /// Length of the row's constructive disintegration.
    pub constructive: usize,
    /// Closed-form bound evaluated at this instance.
    pub bound: f64,
    /// Growth class as stated for the row.
    pub rate: String,
}

fn table1_instances() -> Vec<(FamilySpec, Strategy)> {
    let mut v = Vec::new();
    for depth in 1..=5 {
        v.push((FamilySpec::KaryTree { k: 2, depth }, Strategy::KaryTree { k: 2, root: Some(1) }));
    }
    for depth in 1..=3 {
        v.push((FamilySpec::KaryTree { k: 3, depth }, Strategy::TreeCentroid));
    }
    for d in [3, 7, 15, 31, 63] {
        v.push((FamilySpec::Path { d }, Strategy::PathPower { t: 1, s: None }));
    }
    for k in [2, 3, 4, 8] {
        v.push((
            FamilySpec::Grid { rows: k, cols: k },
            Strategy::GridPower { rows: k, cols: k, t: 1, s: None },
        ));
    }
    for d in 1..=6 {
        v.push((FamilySpec::Complete { d }, Strategy::Greedy));
    }
    v
}

/// Resilience of the example families: exact where the solver reaches,
/// certified lower/upper bounds elsewhere, plus the constructive bound.
pub fn table1() -> Result<Vec<Table1Row>> {
    table1_instances()
        .into_iter()
        .map(|(family, strategy)| {
            let g = make_family(&family)?;
            let cert = if g.d() <= 16 {
                resilience_exact(&g, DEFAULT_EXACT_BUDGET)
            } else {
                resilience_estimate(&g)
            };
            let c = bound_constructive(&g, &strategy)?;
            let (row, rate) = match (&family, &strategy) {
                (FamilySpec::KaryTree { .. }, Strategy::KaryTree { .. }) => ("trees (depth k)", "≤ k"),
                (FamilySpec::KaryTree { .. }, _) => ("trees (general)", "O(log d)"),
                (FamilySpec::Path { .. }, _) => ("paths", "O(log d)"),
                (FamilySpec::Grid { .. }, _) => ("grid", "O(√d)"),
                _ => ("complete", "d"),
            };
            let bound = if row == "complete" { g.d() as f64 } else { c.bound };
            Ok(Table1Row {
                row: row.into(),
                d: g.d(),
                family,
                lower: cert.lower,
                upper: cert.upper_len(),
                exact: cert.exact,
                constructive: c.len(),
                bound,
                rate: rate.into(),
            })
        })
        .collect()
}
