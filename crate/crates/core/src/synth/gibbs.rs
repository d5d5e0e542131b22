//! Smooth Gibbs densities `p(x) ∝ exp(Σ φ_uv(x_u, x_v) + Σ φ_v(x_v))`.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::tensor::{discretize, DensityOracle, ProbabilityTensor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKind {
    /// `a·cos(2πx_u)·cos(2πx_v)`
    Cosine,
    /// `a·x_u·x_v`
    Bilinear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexKind {
    /// `a·cos(2πx)`
    Cosine,
    /// `a·x`
    Linear,
}

/// Edge term on 1-based endpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgePotential {
    pub u: usize,
    pub v: usize,
    pub kind: EdgeKind,
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexPotential {
    pub v: usize,
    pub kind: VertexKind,
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GibbsSpec {
    pub graph: Graph,
    #[serde(default)]
    pub edges: Vec<EdgePotential>,
    #[serde(default)]
    pub vertices: Vec<VertexPotential>,
}

impl EdgePotential {
    fn eval(&self, x: &[f64]) -> f64 {
        let (a, b) = (x[self.u - 1], x[self.v - 1]);
        match self.kind {
            EdgeKind::Cosine => self.amplitude * (2.0 * PI * a).cos() * (2.0 * PI * b).cos(),
            EdgeKind::Bilinear => self.amplitude * a * b,
        }
    }

    fn sup(&self) -> f64 {
        match self.kind {
            EdgeKind::Cosine => self.amplitude.abs(),
            EdgeKind::Bilinear => self.amplitude.max(0.0),
        }
    }

    /// Bound on the Euclidean norm of the gradient.
    fn grad(&self) -> f64 {
        match self.kind {
            EdgeKind::Cosine => 2.0 * PI * self.amplitude.abs(),
            EdgeKind::Bilinear => 2f64.sqrt() * self.amplitude.abs(),
        }
    }
}

impl VertexPotential {
    fn eval(&self, x: &[f64]) -> f64 {
        let a = x[self.v - 1];
        match self.kind {
            VertexKind::Cosine => self.amplitude * (2.0 * PI * a).cos(),
            VertexKind::Linear => self.amplitude * a,
        }
    }

    fn sup(&self) -> f64 {
        match self.kind {
            VertexKind::Cosine => self.amplitude.abs(),
            VertexKind::Linear => self.amplitude.max(0.0),
        }
    }

    fn grad(&self) -> f64 {
        match self.kind {
            VertexKind::Cosine => 2.0 * PI * self.amplitude.abs(),
            VertexKind::Linear => self.amplitude.abs(),
        }
    }
}

impl GibbsSpec {
    /// No potentials: the uniform density.
    pub fn flat(graph: Graph) -> Self {
        Self {
            graph,
            edges: Vec::new(),
            vertices: Vec::new(),
        }
    }

    /// One potential per edge and per vertex with kinds drawn uniformly and
    /// amplitudes uniform in `[−a_max, a_max]`.
    pub fn random(graph: Graph, a_max: f64, rng: &mut impl Rng) -> Self {
        let edges = graph
            .edges()
            .into_iter()
            .map(|(u, v)| EdgePotential {
                u: u + 1,
                v: v + 1,
                kind: if rng.random() { EdgeKind::Cosine } else { EdgeKind::Bilinear },
                amplitude: rng.random_range(-a_max..=a_max),
            })
            .collect();
        let vertices = (0..graph.d())
            .map(|v| VertexPotential {
                v: v + 1,
                kind: if rng.random() { VertexKind::Cosine } else { VertexKind::Linear },
                amplitude: rng.random_range(-a_max..=a_max),
            })
            .collect();
        Self {
            graph,
            edges,
            vertices,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.graph.d();
        for e in &self.edges {
            if e.u == 0 || e.v == 0 || e.u > d || e.v > d || !self.graph.has_edge(e.u - 1, e.v - 1) {
                return Err(Error::InvalidParameter(format!(
                    "potential on {{{}, {}}} which is not an edge",
                    e.u, e.v
                )));
            }
            if !e.amplitude.is_finite() {
                return Err(Error::InvalidParameter("amplitudes must be finite".into()));
            }
        }
        for p in &self.vertices {
            if p.v == 0 || p.v > d || !p.amplitude.is_finite() {
                return Err(Error::InvalidParameter(format!("bad vertex potential on {}", p.v)));
            }
        }
        Ok(())
    }

    pub fn energy(&self, x: &[f64]) -> f64 {
        self.edges.iter().map(|e| e.eval(x)).sum::<f64>()
            + self.vertices.iter().map(|p| p.eval(x)).sum::<f64>()
    }

    fn energy_sup(&self) -> f64 {
        self.edges.iter().map(EdgePotential::sup).sum::<f64>()
            + self.vertices.iter().map(VertexPotential::sup).sum::<f64>()
    }

    fn grad_bound(&self) -> f64 {
        self.edges.iter().map(EdgePotential::grad).sum::<f64>()
            + self.vertices.iter().map(VertexPotential::grad).sum::<f64>()
    }
}

/// Gauss–Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = 0.5 * (1.0 - z);
        x[n - 1 - i] = 0.5 * (1.0 + z);
        w[i] = 0.5 * wi;
        w[n - 1 - i] = 0.5 * wi;
    }
    (x, w)
}

/// Tensor-product Gauss–Legendre integral of `f` over `[0,1]^d`.
fn integrate(d: usize, f: impl Fn(&[f64]) -> f64) -> f64 {
    let n = if d == 0 {
        1
    } else {
        ((1u64 << 21) as f64).powf(1.0 / d as f64).floor().clamp(8.0, 48.0) as usize
    };
    let (xs, ws) = gauss_legendre(n);
    let mut idx = vec![0usize; d];
    let mut pt = vec![0.0; d];
    let mut total = 0.0;
    loop {
        let mut w = 1.0;
        for i in 0..d {
            pt[i] = xs[idx[i]];
            w *= ws[idx[i]];
        }
        total += w * f(&pt);
        let mut k = d;
        loop {
            if k == 0 {
                return total;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < n {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// The normalized density together with its analytic Lipschitz bound
/// `sup p · Σ‖∇φ‖`.
pub fn gibbs_density(spec: &GibbsSpec) -> Result<DensityOracle> {
    spec.validate()?;
    let d = spec.graph.d();
    let shift = spec.energy_sup();
    let z = integrate(d, |x| (spec.energy(x) - shift).exp());
    let lipschitz = spec.grad_bound() / z;
    let s = Arc::new(spec.clone());
    Ok(DensityOracle::new(d, lipschitz, move |x| {
        (s.energy(x) - shift).exp() / z
    }))
}

/// Centroid discretization of the Gibbs density on the `b^d` grid.
pub fn gibbs_tensor(spec: &GibbsSpec, b: usize) -> Result<(ProbabilityTensor, DensityOracle)> {
    let p = gibbs_density(spec)?;
    Ok((discretize(&p, b)?, p))
}
