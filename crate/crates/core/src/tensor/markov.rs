//! Conditional-independence checks in multiplied-out form.
//!
//! `V₀` separates `V₁` from `V₂` for `T` when, at every bin,
//!
//! ```text
//! T(a₁, a₂, a₀) · T(:, :, a₀) = T(a₁, :, a₀) · T(:, a₂, a₀)
//! ```
//!
//! which avoids dividing by zero-mass slices.

use serde::Serialize;

use super::{increment, project, ProbabilityTensor};
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Separation {
    v0: VertexSet,
    v1: VertexSet,
    v2: VertexSet,
}

impl Separation {
    pub fn new(d: usize, v0: VertexSet, v1: VertexSet, v2: VertexSet) -> Result<Self> {
        if v1.is_empty() || v2.is_empty() {
            return Err(Error::InvalidParameter("V1 and V2 must be nonempty".into()));
        }
        let disjoint = v0.is_disjoint(&v1) && v0.is_disjoint(&v2) && v1.is_disjoint(&v2);
        if !disjoint || v0.union(&v1).union(&v2) != VertexSet::full(d) {
            return Err(Error::InvalidParameter("V0, V1, V2 must partition [d]".into()));
        }
        Ok(Self { v0, v1, v2 })
    }

    /// Whether removing `V₀` disconnects every vertex of `V₁` from `V₂` in `g`.
    pub fn holds_in(&self, g: &Graph) -> bool {
        let rest = g.vertices().difference(&self.v0);
        g.components_within(&rest)
            .iter()
            .all(|c| c.is_disjoint(&self.v1) || c.is_disjoint(&self.v2))
    }

    pub fn v0(&self) -> &VertexSet {
        &self.v0
    }

    pub fn v1(&self) -> &VertexSet {
        &self.v1
    }

    pub fn v2(&self) -> &VertexSet {
        &self.v2
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarkovReport {
    pub pass: bool,
    pub max_violation: f64,
    /// 1-based pair attaining the maximum (pairwise checks only).
    pub worst_pair: Option<(usize, usize)>,
    pub checked: usize,
}

/// Largest violation of the separation identity over all bins.
fn violation(t: &ProbabilityTensor, s: &Separation) -> f64 {
    let b = t.b();
    let m0 = t.marginalize(&s.v0).expect("axes in range");
    let v10 = s.v1.union(&s.v0);
    let v20 = s.v2.union(&s.v0);
    let m10 = t.marginalize(&v10).expect("axes in range");
    let m20 = t.marginalize(&v20).expect("axes in range");
    let (a0, a10, a20): (Vec<usize>, Vec<usize>, Vec<usize>) = (
        s.v0.iter().collect(),
        v10.iter().collect(),
        v20.iter().collect(),
    );
    let mut digits = vec![0usize; t.d()];
    let mut worst = 0.0f64;
    for &x in t.data() {
        let lhs = x * m0.data()[project(&digits, &a0, b)];
        let rhs = m10.data()[project(&digits, &a10, b)] * m20.data()[project(&digits, &a20, b)];
        worst = worst.max((lhs - rhs).abs());
        increment(&mut digits, b);
    }
    worst
}

pub fn check_separation(t: &ProbabilityTensor, s: &Separation, tol: f64) -> Result<MarkovReport> {
    if s.v0.union(&s.v1).union(&s.v2) != VertexSet::full(t.d()) {
        return Err(Error::ShapeMismatch("separation does not match tensor dimension".into()));
    }
    let v = violation(t, s);
    Ok(MarkovReport {
        pass: v <= tol,
        max_violation: v,
        worst_pair: None,
        checked: 1,
    })
}

/// `X_i ⊥ X_j | rest` for every non-adjacent pair of `g`.
pub fn check_pairwise_markov(t: &ProbabilityTensor, g: &Graph, tol: f64) -> Result<MarkovReport> {
    if t.d() != g.d() {
        return Err(Error::ShapeMismatch(format!(
            "tensor has d = {}, graph has d = {}",
            t.d(),
            g.d()
        )));
    }
    let mut worst = 0.0f64;
    let mut worst_pair = None;
    let mut checked = 0;
    for i in 0..g.d() {
        for j in i + 1..g.d() {
            if g.has_edge(i, j) {
                continue;
            }
            let mut v0 = g.vertices();
            v0.remove(i);
            v0.remove(j);
            let s = Separation {
                v0,
                v1: VertexSet::singleton(i),
                v2: VertexSet::singleton(j),
            };
            let v = violation(t, &s);
            checked += 1;
            if v > worst || worst_pair.is_none() {
                worst = worst.max(v);
                worst_pair = Some((i + 1, j + 1));
            }
        }
    }
    Ok(MarkovReport {
        pass: worst <= tol,
        max_violation: worst,
        worst_pair,
        checked,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_passes_correlated_fails() {
        let u = ProbabilityTensor::new(1, 2, vec![0.3, 0.7]).unwrap();
        let v = ProbabilityTensor::new(1, 2, vec![0.6, 0.4]).unwrap();
        let g = Graph::empty(2);
        assert!(check_pairwise_markov(&u.product(&v).unwrap(), &g, 1e-12).unwrap().pass);
        let c = ProbabilityTensor::new(2, 2, vec![0.4, 0.1, 0.1, 0.4]).unwrap();
        let r = check_pairwise_markov(&c, &g, 1e-9).unwrap();
        assert!(!r.pass);
        assert_eq!(r.worst_pair, Some((1, 2)));
        let k2 = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let r = check_pairwise_markov(&c, &k2, 1e-9).unwrap();
        assert!(r.pass && r.checked == 0);
    }

    #[test]
    fn empty_separator_is_independence() {
        let u = ProbabilityTensor::new(1, 3, vec![0.2, 0.3, 0.5]).unwrap();
        let t = u.product(&u).unwrap();
        let s = Separation::new(
            2,
            VertexSet::new(),
            VertexSet::singleton(0),
            VertexSet::singleton(1),
        )
        .unwrap();
        assert!(check_separation(&t, &s, 1e-12).unwrap().pass);
        assert!(s.holds_in(&Graph::empty(2)));
        assert!(!s.holds_in(&Graph::from_edges(2, &[(0, 1)]).unwrap()));
    }

    #[test]
    fn separation_must_partition() {
        let e = VertexSet::new();
        assert!(Separation::new(3, e.clone(), VertexSet::singleton(0), VertexSet::singleton(1)).is_err());
        assert!(Separation::new(2, e, VertexSet::new(), VertexSet::from_u64(3)).is_err());
    }
}
