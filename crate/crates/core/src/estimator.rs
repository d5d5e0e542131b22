//! Density selection and the structured estimators.

use serde::{Deserialize, Serialize};

use crate::cover::{build_cover, sample_complexity, ComplexityQuote, DEFAULT_SIZE_LIMIT};
use crate::error::{Error, Result};
use crate::exec;
use crate::graph::{Graph, VertexSet};
use crate::resilience::{resilience_estimate, Disintegration};
use crate::tensor::{cell_count, pairwise_sum, HistogramDensity, ProbabilityTensor, DEFAULT_CELL_CAP};

pub use crate::tensor::SampleSet;

/// How a winner is picked from the candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionRule {
    /// Pairwise Scheffé tests; most wins, ties to the lowest index.
    MostWins,
    /// Minimum distance over the Yatracos sets `{p_i > p_k}`.
    Yatracos,
    /// Minimum distance over every union of bins, a superset of the
    /// Yatracos class; linear in the number of candidates.
    BinUnions,
}

/// Candidate counts above this use [`SelectionRule::BinUnions`] by default.
pub const PAIRWISE_LIMIT: usize = 2048;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    /// 0-based index of the winner.
    pub winner: usize,
    pub rule: SelectionRule,
    pub candidates: usize,
    /// Wins per candidate ([`SelectionRule::MostWins`]) or the discrepancy
    /// `max_A |P_j(A) − μ_n(A)|` (minimum-distance rules).
    pub scores: Vec<f64>,
    /// Number of distinct sets in the class (minimum-distance rules).
    pub class_size: Option<usize>,
}

/// Empirical bin masses `μ_n` on the `b^d` grid (all zero when `n = 0`).
fn empirical_masses(samples: &SampleSet, b: usize) -> Vec<f64> {
    let n = samples.len().max(1) as f64;
    samples.counts(b).into_iter().map(|c| c as f64 / n).collect()
}

fn check_grid(cands: &[HistogramDensity], samples: &SampleSet) -> Result<(usize, usize)> {
    let first = cands.first().ok_or(Error::Empty("candidate list"))?;
    let (d, b) = (first.d(), first.b());
    if cands.iter().any(|c| (c.d(), c.b()) != (d, b)) {
        return Err(Error::ShapeMismatch("candidates live on different grids".into()));
    }
    if samples.d() != d && !samples.is_empty() {
        return Err(Error::ShapeMismatch(format!(
            "samples have d = {}, candidates d = {d}",
            samples.d()
        )));
    }
    Ok((d, b))
}

/// Pairwise Scheffé tournament, most wins.
pub fn scheffe_select(cands: &[HistogramDensity], samples: &SampleSet) -> Result<SelectionResult> {
    select(cands, samples, SelectionRule::MostWins)
}

pub fn select(
    cands: &[HistogramDensity],
    samples: &SampleSet,
    rule: SelectionRule,
) -> Result<SelectionResult> {
    let (_, b) = check_grid(cands, samples)?;
    let mu = empirical_masses(samples, b);
    let m = cands.len();
    let (scores, class_size) = match rule {
        SelectionRule::MostWins => (most_wins(cands, &mu), None),
        SelectionRule::Yatracos => {
            let class = yatracos_class(cands);
            let scores = exec::map(cands, |c| {
                class
                    .iter()
                    .map(|a| (mass(c.tensor().data(), a) - mass(&mu, a)).abs())
                    .fold(0.0, f64::max)
            });
            (scores, Some(class.len()))
        }
        SelectionRule::BinUnions => {
            // the sup over unions of bins is attained at {p_j > μ_n}
            let scores = exec::map(cands, |c| {
                let pos: Vec<f64> = c
                    .tensor()
                    .data()
                    .iter()
                    .zip(&mu)
                    .map(|(p, q)| (p - q).max(0.0))
                    .collect();
                pairwise_sum(&pos)
            });
            (scores, Some((1usize << mu.len().min(63)) - 2))
        }
    };
    let winner = match rule {
        SelectionRule::MostWins => argbest(&scores, |a, b| a > b),
        _ => argbest(&scores, |a, b| a < b),
    };
    Ok(SelectionResult {
        winner,
        rule,
        candidates: m,
        scores,
        class_size,
    })
}

/// First index whose score beats all earlier ones under `better`.
fn argbest(scores: &[f64], better: impl Fn(f64, f64) -> bool) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate() {
        if better(s, scores[best]) {
            best = i;
        }
    }
    best
}

fn mass(p: &[f64], set: &VertexSet) -> f64 {
    set.iter().map(|i| p[i]).sum()
}

fn scheffe_set(p: &[f64], q: &[f64]) -> VertexSet {
    (0..p.len()).filter(|&i| p[i] > q[i]).collect()
}

fn most_wins(cands: &[HistogramDensity], mu: &[f64]) -> Vec<f64> {
    let m = cands.len();
    let rows = exec::map_range(m, |i| {
        let p = cands[i].tensor().data();
        let mut wins = vec![0u32; m];
        for k in i + 1..m {
            let q = cands[k].tensor().data();
            let a = scheffe_set(p, q);
            let e = mass(mu, &a);
            let di = (mass(p, &a) - e).abs();
            let dk = (mass(q, &a) - e).abs();
            if dk < di {
                wins[k] += 1;
            } else {
                wins[i] += 1;
            }
        }
        wins
    });
    let mut total = vec![0.0; m];
    for row in rows {
        for (t, w) in total.iter_mut().zip(row) {
            *t += w as f64;
        }
    }
    total
}

/// Distinct nonempty sets `{p_i > p_k}` over ordered pairs, in first-seen
/// order. Stops early once every nonempty proper union of bins has appeared.
fn yatracos_class(cands: &[HistogramDensity]) -> Vec<VertexSet> {
    let cells = cands[0].tensor().len();
    let all = if cells < 63 { (1u64 << cells) - 2 } else { u64::MAX };
    let mut seen = std::collections::HashSet::new();
    let mut class = Vec::new();
    'outer: for (i, ci) in cands.iter().enumerate() {
        for (k, ck) in cands.iter().enumerate() {
            if i == k {
                continue;
            }
            let a = scheffe_set(ci.tensor().data(), ck.tensor().data());
            if !a.is_empty() && seen.insert(a.clone()) {
                class.push(a);
                if class.len() as u64 >= all {
                    break 'outer;
                }
            }
        }
    }
    class
}

/// Unstructured baseline: `(count + 1)/(n + b^d)` per bin.
pub fn estimate_empirical(samples: &SampleSet, d: usize, b: usize) -> Result<HistogramDensity> {
    let cells = cell_count(d, b, DEFAULT_CELL_CAP)?;
    if !samples.is_empty() && samples.d() != d {
        return Err(Error::ShapeMismatch("sample dimension differs from d".into()));
    }
    let n = samples.len() as f64;
    let w = if samples.is_empty() {
        vec![1.0 / cells as f64; cells]
    } else {
        samples
            .counts(b)
            .into_iter()
            .map(|c| (c as f64 + 1.0) / (n + cells as f64))
            .collect()
    };
    Ok(ProbabilityTensor::from_raw(d, b, w).into())
}

/// Empirical conditional factorization along `dis`.
///
/// A disconnected piece is estimated as the product of its components; a
/// connected piece estimates the add-one-smoothed marginal of its earliest
/// vertex and recurses on the rest separately for every bin of that vertex.
pub fn estimate_factorized(
    samples: &SampleSet,
    g: &Graph,
    dis: &Disintegration,
    b: usize,
) -> Result<HistogramDensity> {
    if dis.graph_hash() != g.hash() {
        return Err(Error::InvalidDisintegration(
            "disintegration was built for a different graph".into(),
        ));
    }
    if !samples.is_empty() && samples.d() != g.d() {
        return Err(Error::ShapeMismatch("sample dimension differs from the graph".into()));
    }
    cell_count(g.d(), b, DEFAULT_CELL_CAP)?;
    let bins: Vec<Vec<usize>> = samples
        .rows()
        .map(|r| r.iter().map(|&x| ((x * b as f64) as usize).min(b - 1)).collect())
        .collect();
    let rows: Vec<usize> = (0..bins.len()).collect();
    let ctx = Factorizer {
        g,
        step_of: dis.step_of(g.d()),
        bins: &bins,
        b,
    };
    Ok(ctx.piece(&g.vertices(), &rows).into())
}

struct Factorizer<'a> {
    g: &'a Graph,
    step_of: Vec<usize>,
    bins: &'a [Vec<usize>],
    b: usize,
}

impl Factorizer<'_> {
    /// Tensor over the sorted vertices of `within`, fitted on `rows`.
    fn piece(&self, within: &VertexSet, rows: &[usize]) -> ProbabilityTensor {
        let comps = self.g.components_within(within);
        if comps.len() <= 1 {
            return match comps.first() {
                None => ProbabilityTensor::uniform(0, self.b).expect("one cell"),
                Some(c) => self.connected(c, rows),
            };
        }
        let local: Vec<usize> = within.iter().collect();
        let fitted: Vec<(VertexSet, ProbabilityTensor)> = comps
            .iter()
            .map(|c| {
                let pos = c.iter().map(|v| local.binary_search(&v).expect("member")).collect();
                (pos, self.connected(c, rows))
            })
            .collect();
        let parts: Vec<(VertexSet, &ProbabilityTensor)> =
            fitted.iter().map(|(s, t)| (s.clone(), t)).collect();
        ProbabilityTensor::product_over(within.len(), self.b, &parts).expect("partition")
    }

    fn connected(&self, comp: &VertexSet, rows: &[usize]) -> ProbabilityTensor {
        let v = comp
            .iter()
            .min_by_key(|&u| (self.step_of[u], u))
            .expect("nonempty");
        let mut counts = vec![0usize; self.b];
        let mut split: Vec<Vec<usize>> = vec![Vec::new(); self.b];
        for &r in rows {
            let k = self.bins[r][v];
            counts[k] += 1;
            split[k].push(r);
        }
        let n = rows.len() as f64;
        let delta: Vec<f64> = counts
            .iter()
            .map(|&c| (c as f64 + 1.0) / (n + self.b as f64))
            .collect();
        if comp.len() == 1 {
            return ProbabilityTensor::from_raw(1, self.b, delta);
        }
        let mut rest = comp.clone();
        rest.remove(v);
        let conds: Vec<ProbabilityTensor> = split.iter().map(|rs| self.piece(&rest, rs)).collect();
        let refs: Vec<&ProbabilityTensor> = conds.iter().collect();
        let pos = comp.iter().position(|u| u == v).expect("member");
        ProbabilityTensor::stack_axis(pos, &delta, &refs).expect("shapes agree")
    }
}

/// Feasibility and selection knobs for [`estimate_structured`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Limits {
    pub cover_size: usize,
    /// `None` picks [`SelectionRule::Yatracos`] up to [`PAIRWISE_LIMIT`]
    /// candidates and [`SelectionRule::BinUnions`] beyond.
    pub rule: Option<SelectionRule>,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            cover_size: DEFAULT_SIZE_LIMIT,
            rule: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct StructuredEstimate {
    pub density: HistogramDensity,
    pub quote: ComplexityQuote,
    pub warnings: Vec<String>,
    pub selection: SelectionResult,
    pub disintegration: Disintegration,
    pub cover_size: usize,
}

/// Cover of the Markov tensor class at the quoted `(b, ε)`, then selection
/// against the samples.
pub fn estimate_structured(
    samples: &SampleSet,
    g: &Graph,
    lipschitz: f64,
    eps_target: f64,
    delta: f64,
    limits: Limits,
) -> Result<StructuredEstimate> {
    if g.d() == 0 {
        return Err(Error::InvalidParameter("graph has no vertices".into()));
    }
    if !samples.is_empty() && samples.d() != g.d() {
        return Err(Error::ShapeMismatch("sample dimension differs from the graph".into()));
    }
    let cert = resilience_estimate(g);
    let quote = sample_complexity(g.d(), cert.upper_len(), lipschitz, eps_target, delta)?;
    let mut warnings = Vec::new();
    if (samples.len() as f64) < quote.n_required {
        warnings.push(format!(
            "n = {} is below the quoted requirement {:.0}",
            samples.len(),
            quote.n_required.ceil()
        ));
    }
    let cover = build_cover(g, quote.b, quote.cover_radius, &cert.upper, limits.cover_size)?;
    let rule = limits.rule.unwrap_or(if cover.len() <= PAIRWISE_LIMIT {
        SelectionRule::Yatracos
    } else {
        SelectionRule::BinUnions
    });
    let cands: Vec<HistogramDensity> = cover.elements.into_iter().map(Into::into).collect();
    let selection = select(&cands, samples, rule)?;
    Ok(StructuredEstimate {
        density: cands[selection.winner].clone(),
        cover_size: cands.len(),
        quote,
        warnings,
        selection,
        disintegration: cert.upper,
    })
}
