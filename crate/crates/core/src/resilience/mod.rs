//! Disintegrations and graph resilience.
//!
//! A disintegration of `G` is an ordered partition of `V` in which every
//! step removes exactly one vertex from each component of what is left.
//! The resilience `r(G)` is the length of the shortest one; `r(null) = 0`.
//!
//! Everything here produces certificates that can be re-checked with
//! [`validate`]: exact values come with a witnessing disintegration and an
//! exhaustive-search flag, bounds come with explicit disintegrations.

mod constructive;
mod estimate;
mod exact;
mod validate;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};

pub use constructive::{bound_constructive, ConstructiveBound, Strategy};
pub use constructive::centroid_disintegration;
pub use estimate::{
    greedy_disintegration, lower_bound_clique, resilience_estimate, separator_disintegration,
};
pub use exact::{resilience_exact, DEFAULT_EXACT_BUDGET, DEFAULT_MEMO_CAP};
pub use validate::{normalize, validate, Mode, ValidityReport, Violation};

/// A validated disintegration of a specific graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Disintegration {
    steps: Vec<VertexSet>,
    graph_hash: String,
}

impl Disintegration {
    /// Validates `steps` against `g`.
    pub fn new(g: &Graph, steps: Vec<VertexSet>) -> Result<Self> {
        let report = validate(g, &steps, Mode::Disintegration);
        if !report.ok() {
            return Err(Error::InvalidDisintegration(report.summary()));
        }
        Ok(Self {
            steps,
            graph_hash: g.hash(),
        })
    }

    pub fn steps(&self) -> &[VertexSet] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn graph_hash(&self) -> &str {
        &self.graph_hash
    }

    /// `step_of[v]` = 0-based index of the step containing `v`.
    pub fn step_of(&self, d: usize) -> Vec<usize> {
        let mut out = vec![usize::MAX; d];
        for (i, s) in self.steps.iter().enumerate() {
            for v in s {
                out[v] = i;
            }
        }
        out
    }

    /// Steps as 1-based labels.
    pub fn to_labels(&self) -> Vec<Vec<usize>> {
        self.steps.iter().map(VertexSet::to_labels).collect()
    }

    pub fn from_labels(g: &Graph, steps: &[Vec<usize>]) -> Result<Self> {
        let sets = steps
            .iter()
            .map(|s| VertexSet::from_labels(s, g.d()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(g, sets)
    }
}

/// Lower bound evidence for a resilience certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LowerWitness {
    /// A clique of this many vertices (1-based labels).
    Clique { vertices: Vec<usize> },
    /// The exact search finished; `nodes` is the number of subproblems solved.
    Exhaustive { nodes: u64 },
}

/// Paired bounds `lower ≤ r(G) ≤ upper.len()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResilienceCertificate {
    pub lower: usize,
    pub lower_witness: LowerWitness,
    pub upper: Disintegration,
    pub exact: bool,
}

/// `{"lower", "lower_witness", "upper", "steps", "exact"}` plus the graph hash.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub lower: usize,
    pub lower_witness: LowerWitness,
    pub upper: usize,
    pub steps: Vec<Vec<usize>>,
    pub exact: bool,
    pub graph_hash: String,
}

impl ResilienceCertificate {
    pub fn upper_len(&self) -> usize {
        self.upper.len()
    }

    /// Re-checks every claim against `g`.
    pub fn check(&self, g: &Graph) -> Result<()> {
        let report = validate(g, self.upper.steps(), Mode::Disintegration);
        if !report.ok() {
            return Err(Error::InvalidDisintegration(report.summary()));
        }
        if self.lower > self.upper.len() {
            return Err(Error::InvalidDisintegration(format!(
                "lower {} exceeds upper {}",
                self.lower,
                self.upper.len()
            )));
        }
        if self.exact != (self.lower == self.upper.len()) {
            return Err(Error::InvalidDisintegration("exact flag inconsistent".into()));
        }
        if let LowerWitness::Clique { vertices } = &self.lower_witness {
            let c = VertexSet::from_labels(vertices, g.d())?;
            if !g.is_clique(&c) || c.len() != self.lower {
                return Err(Error::InvalidDisintegration(
                    "clique witness does not certify the lower bound".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> CertificateJson {
        CertificateJson {
            lower: self.lower,
            lower_witness: self.lower_witness.clone(),
            upper: self.upper.len(),
            steps: self.upper.to_labels(),
            exact: self.exact,
            graph_hash: self.upper.graph_hash.clone(),
        }
    }
}

/// Merges per-part step lists stepwise: step `i` of the result is the union
/// of step `i` of every part.
pub fn merge_stepwise(parts: impl IntoIterator<Item = Vec<VertexSet>>) -> Vec<VertexSet> {
    let mut out: Vec<VertexSet> = Vec::new();
    for part in parts {
        for (i, s) in part.into_iter().enumerate() {
            if i == out.len() {
                out.push(s);
            } else {
                out[i].union_with(&s);
            }
        }
    }
    out
}

/// Maps steps on a relabeled subgraph back through `map` (new → old).
pub(crate) fn lift_steps(steps: &[VertexSet], map: &[usize]) -> Vec<VertexSet> {
    steps
        .iter()
        .map(|s| s.iter().map(|v| map[v]).collect())
        .collect()
}
