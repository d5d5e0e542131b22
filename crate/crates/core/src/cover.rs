//! ℓ¹ covers of Markov tensor classes and the associated calculators.
//!
//! [`build_cover`] follows a disintegration: a disconnected graph is covered
//! by products of component covers at radius `ε/t`; a connected one removes
//! its earliest vertex `v`, covers the marginal of `v` at `ε/(t+1)` and each
//! of the `b` conditionals of the rest at `tε/(t+1)`, where `t` is the number
//! of components left behind.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{enumerate_graphs, Graph, VertexSet};
use crate::resilience::{resilience_exact, Disintegration, DEFAULT_EXACT_BUDGET};
use crate::tensor::{cell_count, ProbabilityTensor, DEFAULT_CELL_CAP};
use crate::{exec, VERSION};

pub const DEFAULT_SIZE_LIMIT: usize = 1_000_000;
/// Largest `d` accepted by [`build_union_cover`].
pub const UNION_ENUMERATION_CAP: usize = 4;
/// Total `f64` entries a cover may hold (512 MiB).
const ENTRY_LIMIT: f64 = (1u64 << 26) as f64;

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps <= 2.0) {
        return Err(Error::InvalidParameter(format!("ε = {eps} must lie in (0, 2]")));
    }
    Ok(())
}

/// Lattice resolution `m = ⌈2b/ε⌉`, robust to `2b/ε` landing a hair above an
/// integer through rounding.
fn lattice_m(b: usize, eps: f64) -> usize {
    let x = 2.0 * b as f64 / eps;
    let r = x.round();
    if (x - r).abs() < 1e-9 * x.max(1.0) {
        r as usize
    } else {
        x.ceil() as usize
    }
}

fn ln_binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).map(|i| ((n - i) as f64 / (i + 1) as f64).ln()).sum()
}

/// Number of lattice points `C(m + b − 1, b − 1)`, as a natural log.
pub fn simplex_cover_ln_size(b: usize, eps: f64) -> Result<f64> {
    check_eps(eps)?;
    if b == 0 {
        return Err(Error::InvalidParameter("b must be ≥ 1".into()));
    }
    let m = lattice_m(b, eps);
    Ok(ln_binomial(m + b - 1, b - 1))
}

/// All vectors `k/m` with `Σk = m`, `m = ⌈2b/ε⌉`, in lexicographic order.
///
/// Rounding any point of the simplex to the lattice moves it by less than
/// `b/m ≤ ε/2` in ℓ¹.
pub fn simplex_cover(b: usize, eps: f64, size_limit: usize) -> Result<Vec<Vec<f64>>> {
    let ln = simplex_cover_ln_size(b, eps)?;
    gate(ln, size_limit, b as f64)?;
    let m = lattice_m(b, eps);
    let mut out = Vec::new();
    let mut k = vec![0usize; b];
    compositions(&mut k, 0, m, &mut |k| {
        out.push(k.iter().map(|&x| x as f64 / m as f64).collect());
    });
    Ok(out)
}

fn compositions(k: &mut [usize], i: usize, left: usize, f: &mut impl FnMut(&[usize])) {
    if i + 1 == k.len() {
        k[i] = left;
        f(k);
        return;
    }
    for x in 0..=left {
        k[i] = x;
        compositions(k, i + 1, left - x, f);
    }
}

/// `d·b^r·ln(2·d^(r+1)·b/ε)`, the log covering-number bound for `r`-resilient
/// graphs.
pub fn cover_size_bound(d: usize, b: usize, r: usize, eps: f64) -> Result<f64> {
    if d == 0 || b == 0 || r == 0 {
        return Err(Error::InvalidParameter("d, b and r must be ≥ 1".into()));
    }
    check_eps(eps)?;
    let (d, b, r) = (d as f64, b as f64, r as f64);
    Ok(d * b.powf(r) * (2.0 * d.powf(r + 1.0) * b / eps).ln())
}

fn gate(ln_size: f64, size_limit: usize, cells: f64) -> Result<()> {
    let limit = size_limit.min((ENTRY_LIMIT / cells.max(1.0)) as usize);
    if ln_size > (limit.max(1) as f64).ln() + 1e-9 {
        return Err(Error::CoverTooLarge {
            predicted: ln_size.exp(),
            log_predicted: ln_size,
            limit,
        });
    }
    Ok(())
}

/// The recursion tree of a cover, sized before anything is allocated.
#[derive(Debug, Clone)]
enum Plan {
    /// The null graph: the single tensor `[1]`.
    Null,
    /// A lone vertex: the simplex lattice.
    Vertex { eps: f64 },
    /// Components covered independently; positions are relative to the
    /// parent's sorted vertex list.
    Product(Vec<(VertexSet, Plan)>),
    /// Marginal of the vertex at position `v`, then one conditional per bin.
    Stack { v: usize, eps: f64, rest: Box<Plan> },
}

impl Plan {
    fn new(g: &Graph, step_of: &[usize], within: &VertexSet, eps: f64) -> Plan {
        let comps = g.components_within(within);
        match comps.len() {
            0 => Plan::Null,
            1 => Self::connected(g, step_of, within, eps),
            t => {
                let local: Vec<usize> = within.iter().collect();
                let parts = comps
                    .iter()
                    .map(|c| {
                        let pos = c
                            .iter()
                            .map(|v| local.binary_search(&v).expect("member"))
                            .collect();
                        (pos, Self::connected(g, step_of, c, eps / t as f64))
                    })
                    .collect();
                Plan::Product(parts)
            }
        }
    }

    fn connected(g: &Graph, step_of: &[usize], comp: &VertexSet, eps: f64) -> Plan {
        if comp.len() == 1 {
            return Plan::Vertex { eps };
        }
        let v = comp
            .iter()
            .min_by_key(|&u| (step_of[u], u))
            .expect("nonempty");
        let mut rest = comp.clone();
        rest.remove(v);
        let t = g.components_within(&rest).len() as f64;
        Plan::Stack {
            v: comp.iter().position(|u| u == v).expect("member"),
            eps: eps / (t + 1.0),
            rest: Box::new(Self::new(g, step_of, &rest, eps * t / (t + 1.0))),
        }
    }

    fn ln_size(&self, b: usize) -> f64 {
        match self {
            Plan::Null => 0.0,
            Plan::Vertex { eps } => simplex_cover_ln_size(b, *eps).expect("valid ε"),
            Plan::Product(parts) => parts.iter().map(|(_, p)| p.ln_size(b)).sum(),
            Plan::Stack { eps, rest, .. } => {
                simplex_cover_ln_size(b, *eps).expect("valid ε") + b as f64 * rest.ln_size(b)
            }
        }
    }

    fn dim(&self) -> usize {
        match self {
            Plan::Null => 0,
            Plan::Vertex { .. } => 1,
            Plan::Product(parts) => parts.iter().map(|(s, _)| s.len()).sum(),
            Plan::Stack { rest, .. } => rest.dim() + 1,
        }
    }

    fn build(&self, b: usize) -> Vec<ProbabilityTensor> {
        match self {
            Plan::Null => vec![ProbabilityTensor::uniform(0, b).expect("one cell")],
            Plan::Vertex { eps } => simplex_cover(b, *eps, usize::MAX)
                .expect("gated")
                .into_iter()
                .map(|p| ProbabilityTensor::from_raw(1, b, p))
                .collect(),
            Plan::Product(parts) => {
                let covers: Vec<Vec<ProbabilityTensor>> =
                    parts.iter().map(|(_, p)| p.build(b)).collect();
                let d = self.dim();
                let total: usize = covers.iter().map(Vec::len).product();
                exec::map_range(total, |mut idx| {
                    let mut pick = vec![0usize; covers.len()];
                    for k in (0..covers.len()).rev() {
                        pick[k] = idx % covers[k].len();
                        idx /= covers[k].len();
                    }
                    let factors: Vec<(VertexSet, &ProbabilityTensor)> = parts
                        .iter()
                        .zip(&pick)
                        .enumerate()
                        .map(|(k, ((s, _), &j))| (s.clone(), &covers[k][j]))
                        .collect();
                    ProbabilityTensor::product_over(d, b, &factors).expect("partition")
                })
            }
            Plan::Stack { v, eps, rest } => {
                let deltas = simplex_cover(b, *eps, usize::MAX).expect("gated");
                let inner = rest.build(b);
                let k = inner.len();
                let tuples = k.pow(b as u32);
                exec::map_range(deltas.len() * tuples, |idx| {
                    let delta = &deltas[idx / tuples];
                    let mut rem = idx % tuples;
                    let mut pick = vec![&inner[0]; b];
                    for slot in pick.iter_mut().rev() {
                        *slot = &inner[rem % k];
                        rem /= k;
                    }
                    ProbabilityTensor::stack_axis(*v, delta, &pick).expect("shapes agree")
                })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cover {
    pub elements: Vec<ProbabilityTensor>,
    pub eps: f64,
    pub graph_hash: String,
    pub d: usize,
    pub b: usize,
    /// Length of the disintegration used (max over graphs for a union).
    pub r: usize,
    /// `cover_size_bound(d, b, r, ε)`.
    pub ln_size_bound: f64,
    /// Graphs contributing to a union cover; 1 otherwise.
    pub sources: usize,
}

/// Summary written next to the element files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverManifest {
    pub version: String,
    pub graph_hash: String,
    pub d: usize,
    pub b: usize,
    pub eps: f64,
    pub r: usize,
    pub element_count: usize,
    pub ln_size_bound: f64,
    pub sources: usize,
}

impl Cover {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Index and ℓ¹ distance of the closest element (lowest index on ties).
    pub fn nearest(&self, t: &ProbabilityTensor) -> Result<(usize, f64)> {
        if (t.d(), t.b()) != (self.d, self.b) {
            return Err(Error::ShapeMismatch("tensor does not match the cover grid".into()));
        }
        exec::min_by_key_f64(&self.elements, |e| e.l1(t).expect("same shape"))
            .ok_or(Error::Empty("cover"))
    }

    pub fn manifest(&self) -> CoverManifest {
        CoverManifest {
            version: VERSION.into(),
            graph_hash: self.graph_hash.clone(),
            d: self.d,
            b: self.b,
            eps: self.eps,
            r: self.r,
            element_count: self.len(),
            ln_size_bound: self.ln_size_bound,
            sources: self.sources,
        }
    }
}

/// Natural log of the number of elements [`build_cover`] would produce.
pub fn predicted_ln_size(g: &Graph, b: usize, eps: f64, dis: &Disintegration) -> Result<f64> {
    check_eps(eps)?;
    check_dis(g, dis)?;
    Ok(Plan::new(g, &dis.step_of(g.d()), &g.vertices(), eps).ln_size(b))
}

fn check_dis(g: &Graph, dis: &Disintegration) -> Result<()> {
    if dis.graph_hash() != g.hash() {
        return Err(Error::InvalidDisintegration(
            "disintegration was built for a different graph".into(),
        ));
    }
    Ok(())
}

pub fn build_cover(
    g: &Graph,
    b: usize,
    eps: f64,
    dis: &Disintegration,
    size_limit: usize,
) -> Result<Cover> {
    check_eps(eps)?;
    check_dis(g, dis)?;
    let plan = Plan::new(g, &dis.step_of(g.d()), &g.vertices(), eps);
    gate(plan.ln_size(b), size_limit, (b as f64).powi(g.d() as i32))?;
    cell_count(g.d(), b, DEFAULT_CELL_CAP)?;
    let r = dis.len();
    Ok(Cover {
        elements: plan.build(b),
        eps,
        graph_hash: g.hash(),
        d: g.d(),
        b,
        r,
        ln_size_bound: if g.d() == 0 {
            0.0
        } else {
            cover_size_bound(g.d(), b, r, eps)?
        },
        sources: 1,
    })
}

/// Union of [`build_cover`] over every graph on `d` vertices with
/// resilience at most `r`, deduplicated bitwise.
pub fn build_union_cover(d: usize, r: usize, b: usize, eps: f64, size_limit: usize) -> Result<Cover> {
    check_eps(eps)?;
    let cells = cell_count(d, b, DEFAULT_CELL_CAP)? as f64;
    let mut members = Vec::new();
    for g in enumerate_graphs(d, UNION_ENUMERATION_CAP)? {
        let cert = resilience_exact(&g, DEFAULT_EXACT_BUDGET);
        if cert.upper_len() <= r {
            members.push((g, cert.upper));
        }
    }
    let mut ln_total = f64::NEG_INFINITY;
    for (g, dis) in &members {
        let ln = predicted_ln_size(g, b, eps, dis)?;
        ln_total = ln_total.max(ln) + (1.0 + (ln_total.min(ln) - ln_total.max(ln)).exp()).ln();
    }
    gate(ln_total, size_limit, cells)?;
    let mut seen = HashSet::new();
    let mut elements = Vec::new();
    for (g, dis) in &members {
        for t in build_cover(g, b, eps, dis, usize::MAX)?.elements {
            let key: Vec<u64> = t.data().iter().map(|x| x.to_bits()).collect();
            if seen.insert(key) {
                elements.push(t);
            }
        }
    }
    let r_used = members.iter().map(|(_, dis)| dis.len()).max().unwrap_or(0);
    Ok(Cover {
        elements,
        eps,
        graph_hash: format!("union-d{d}-r{r}"),
        d,
        b,
        r: r_used,
        ln_size_bound: cover_size_bound(d, b, r_used.max(1), eps)?,
        sources: members.len(),
    })
}

/// Constants for the known-graph estimator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexityQuote {
    pub d: usize,
    pub r: usize,
    pub lipschitz: f64,
    pub eps_target: f64,
    pub delta: f64,
    /// `max(1, ⌈6√d·L/ε_target⌉)`.
    pub b: usize,
    /// `ε = ε_target/14`.
    pub cover_radius: f64,
    /// Discretization bias bound `√d·L/b`.
    pub bias_bound: f64,
    /// `d·b^r·ln(2d^(r+1)b/ε)`.
    pub ln_cover_bound: f64,
    /// `ln_cover_bound/ε²`.
    pub n_cover_term: f64,
    /// `ln(3/δ)/(2ε²)`.
    pub n_confidence_term: f64,
    /// Sum of the two terms.
    pub n_required: f64,
    /// `ln(3M²/δ)/(2ε²)` with `ln M = ln_cover_bound`; equal to `n_required`.
    pub n_selection: f64,
}

pub fn sample_complexity(d: usize, r: usize, lipschitz: f64, eps_target: f64, delta: f64) -> Result<ComplexityQuote> {
    if !(lipschitz >= 0.0 && lipschitz.is_finite()) {
        return Err(Error::InvalidParameter("L must be finite and ≥ 0".into()));
    }
    if !(eps_target > 0.0 && eps_target < 2.0) {
        return Err(Error::InvalidParameter("ε_target must lie in (0, 2)".into()));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter("δ must lie in (0, 1)".into()));
    }
    let eps = eps_target / 14.0;
    let b = ((6.0 * (d as f64).sqrt() * lipschitz / eps_target).ceil() as usize).max(1);
    let ln_m = cover_size_bound(d, b, r, eps)?;
    let n_cover_term = ln_m / (eps * eps);
    let n_confidence_term = (3.0 / delta).ln() / (2.0 * eps * eps);
    Ok(ComplexityQuote {
        d,
        r,
        lipschitz,
        eps_target,
        delta,
        b,
        cover_radius: eps,
        bias_bound: (d as f64).sqrt() * lipschitz / b as f64,
        ln_cover_bound: ln_m,
        n_cover_term,
        n_confidence_term,
        n_required: n_cover_term + n_confidence_term,
        n_selection: ((3.0 / delta).ln() + 2.0 * ln_m) / (2.0 * eps * eps),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{make_family, FamilySpec};

    #[test]
    fn simplex_small_cases() {
        assert_eq!(simplex_cover(1, 0.3, 10).unwrap(), vec![vec![1.0]]);
        let c = simplex_cover(2, 1.0, 100).unwrap();
        assert_eq!(c.len(), 5);
        assert_eq!(c[1], vec![0.25, 0.75]);
        assert!(matches!(
            simplex_cover(4, 0.01, 1000),
            Err(Error::CoverTooLarge { .. })
        ));
    }

    #[test]
    fn size_bound_substitution() {
        let v = cover_size_bound(1, 2, 1, 0.5).unwrap();
        assert!((v - 2.0 * 8f64.ln()).abs() < 1e-12);
        assert!(cover_size_bound(0, 2, 1, 0.5).is_err());
    }

    #[test]
    fn single_vertex_cover_is_simplex() {
        let g = Graph::empty(1);
        let dis = Disintegration::new(&g, vec![VertexSet::singleton(0)]).unwrap();
        let c = build_cover(&g, 3, 0.5, &dis, DEFAULT_SIZE_LIMIT).unwrap();
        let s = simplex_cover(3, 0.5, DEFAULT_SIZE_LIMIT).unwrap();
        assert_eq!(c.len(), s.len());
        for (e, p) in c.elements.iter().zip(&s) {
            assert_eq!(e.data(), p.as_slice());
        }
    }

    #[test]
    fn predicted_matches_built() {
        let g = make_family(&FamilySpec::Path { d: 3 }).unwrap();
        let dis = Disintegration::from_labels(&g, &[vec![2], vec![1, 3]]).unwrap();
        let ln = predicted_ln_size(&g, 2, 1.0, &dis).unwrap();
        let c = build_cover(&g, 2, 1.0, &dis, DEFAULT_SIZE_LIMIT).unwrap();
        assert_eq!(c.len(), ln.exp().round() as usize);
        assert!((c.len() as f64).ln() <= c.ln_size_bound);
    }

    #[test]
    fn gate_refuses_large() {
        let g = make_family(&FamilySpec::Complete { d: 3 }).unwrap();
        let dis = crate::resilience::resilience_exact(&g, 1 << 20).upper;
        let e = build_cover(&g, 3, 0.1, &dis, 1000).unwrap_err();
        assert!(matches!(e, Error::CoverTooLarge { .. }));
    }

    #[test]
    fn union_counts() {
        let c = build_union_cover(2, 2, 2, 1.0, DEFAULT_SIZE_LIMIT).unwrap();
        assert_eq!(c.sources, 2);
        let c = build_union_cover(3, 2, 1, 1.0, DEFAULT_SIZE_LIMIT).unwrap();
        assert_eq!(c.sources, 7);
        let one = build_union_cover(1, 1, 2, 0.5, DEFAULT_SIZE_LIMIT).unwrap();
        assert_eq!(one.len(), simplex_cover(2, 0.5, 100).unwrap().len());
    }

    #[test]
    fn quote_constants() {
        let q = sample_complexity(2, 1, 0.05, 0.3, 0.05).unwrap();
        assert_eq!(q.b, 2);
        assert!((q.cover_radius - 0.3 / 14.0).abs() < 1e-15);
        assert!((q.n_selection - q.n_required).abs() < 1e-6 * q.n_required);
        let flat = sample_complexity(3, 2, 0.0, 0.5, 0.1).unwrap();
        assert_eq!(flat.b, 1);
        assert!(flat.n_required.is_finite());
    }
}
