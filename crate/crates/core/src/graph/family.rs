use serde::{Deserialize, Serialize};

use super::Graph;
use crate::error::{Error, Result};

/// A named graph family with its size parameters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilySpec {
    /// `L_d`: `i ~ j` iff `|i - j| = 1`.
    Path { d: usize },
    /// `L_{k×k'}` with 8-neighborhood adjacency; vertex `(i, j)` is
    /// `i·cols + j + 1` (row-major).
    Grid { rows: usize, cols: usize },
    /// Complete `k`-ary tree with `depth` levels, root at level 1, numbered
    /// breadth-first from the root.
    KaryTree { k: usize, depth: usize },
    /// `S_d`: vertex 1 adjacent to every other vertex.
    Star { d: usize },
    Complete { d: usize },
    Empty { d: usize },
}

impl FamilySpec {
    /// Parses `kind` plus comma-separated parameters, e.g. `grid` + `3,4`.
    pub fn parse(kind: &str, params: &[usize]) -> Result<Self> {
        let want = |n: usize| -> Result<()> {
            if params.len() == n {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!(
                    "family {kind} takes {n} parameter(s), got {}",
                    params.len()
                )))
            }
        };
        let spec = match kind {
            "path" => {
                want(1)?;
                FamilySpec::Path { d: params[0] }
            }
            "grid" => {
                want(2)?;
                FamilySpec::Grid {
                    rows: params[0],
                    cols: params[1],
                }
            }
            "kary_tree" | "kary" => {
                want(2)?;
                FamilySpec::KaryTree {
                    k: params[0],
                    depth: params[1],
                }
            }
            "star" => {
                want(1)?;
                FamilySpec::Star { d: params[0] }
            }
            "complete" => {
                want(1)?;
                FamilySpec::Complete { d: params[0] }
            }
            "empty" => {
                want(1)?;
                FamilySpec::Empty { d: params[0] }
            }
            other => return Err(Error::InvalidParameter(format!("unknown family {other}"))),
        };
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            FamilySpec::Path { d }
            | FamilySpec::Star { d }
            | FamilySpec::Complete { d }
            | FamilySpec::Empty { d } => d >= 1,
            FamilySpec::Grid { rows, cols } => rows >= 1 && cols >= 1,
            FamilySpec::KaryTree { k, depth } => k >= 1 && depth >= 1,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "family parameters must be positive: {self:?}"
            )))
        }
    }

    /// Family names accepted by [`FamilySpec::parse`] (plus the alias `kary`).
    pub const KINDS: [&'static str; 6] = ["path", "grid", "kary_tree", "star", "complete", "empty"];

    pub fn kind(&self) -> &'static str {
        match self {
            FamilySpec::Path { .. } => "path",
            FamilySpec::Grid { .. } => "grid",
            FamilySpec::KaryTree { .. } => "kary_tree",
            FamilySpec::Star { .. } => "star",
            FamilySpec::Complete { .. } => "complete",
            FamilySpec::Empty { .. } => "empty",
        }
    }

    /// Number of vertices of the generated graph.
    pub fn vertex_count(&self) -> usize {
        match *self {
            FamilySpec::Path { d }
            | FamilySpec::Star { d }
            | FamilySpec::Complete { d }
            | FamilySpec::Empty { d } => d,
            FamilySpec::Grid { rows, cols } => rows * cols,
            FamilySpec::KaryTree { k, depth } => (0..depth).map(|l| k.pow(l as u32)).sum(),
        }
    }
}

pub fn make_family(spec: &FamilySpec) -> Result<Graph> {
    spec.validate()?;
    let d = spec.vertex_count();
    let edges: Vec<(usize, usize)> = match *spec {
        FamilySpec::Path { d } => (1..d).map(|i| (i - 1, i)).collect(),
        FamilySpec::Grid { rows, cols } => {
            let id = |i: usize, j: usize| i * cols + j;
            let mut e = Vec::new();
            for i in 0..rows {
                for j in 0..cols {
                    // forward half of the 8-neighborhood
                    if j + 1 < cols {
                        e.push((id(i, j), id(i, j + 1)));
                    }
                    if i + 1 < rows {
                        e.push((id(i, j), id(i + 1, j)));
                        if j + 1 < cols {
                            e.push((id(i, j), id(i + 1, j + 1)));
                        }
                        if j >= 1 {
                            e.push((id(i, j), id(i + 1, j - 1)));
                        }
                    }
                }
            }
            e
        }
        FamilySpec::KaryTree { k, .. } => (1..d).map(|c| ((c - 1) / k, c)).collect(),
        FamilySpec::Star { d } => (1..d).map(|v| (0, v)).collect(),
        FamilySpec::Complete { d } => (0..d)
            .flat_map(|u| (u + 1..d).map(move |v| (u, v)))
            .collect(),
        FamilySpec::Empty { .. } => Vec::new(),
    };
    Graph::from_edges(d, &edges)
}
