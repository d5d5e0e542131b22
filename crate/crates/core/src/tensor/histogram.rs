use std::fmt;
use std::sync::Arc;

use super::{cell_count, increment, pairwise_sum, ProbabilityTensor, DEFAULT_CELL_CAP};
use crate::error::{Error, Result};
use crate::exec;

/// Piecewise-constant density on `[0,1)^d` with value `b^d · T_A` on bin `A`.
///
/// The map tensor ↔ histogram is an ℓ¹/L¹ isometry; both sides share the
/// same entries, so distances agree exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct HistogramDensity {
    tensor: ProbabilityTensor,
}

impl HistogramDensity {
    pub fn from_tensor(tensor: ProbabilityTensor) -> Self {
        Self { tensor }
    }

    pub fn tensor(&self) -> &ProbabilityTensor {
        &self.tensor
    }

    pub fn into_tensor(self) -> ProbabilityTensor {
        self.tensor
    }

    pub fn d(&self) -> usize {
        self.tensor.d()
    }

    pub fn b(&self) -> usize {
        self.tensor.b()
    }

    /// Density on bin `A` (flat offset).
    pub fn bin_value(&self, flat: usize) -> f64 {
        self.tensor.data()[flat] * (self.tensor.len() as f64)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let b = self.b();
        let flat = x
            .iter()
            .fold(0, |acc, &xi| acc * b + bin_of(xi, b));
        self.bin_value(flat)
    }

    /// `∫|h − h′|`, which equals the tensor distance.
    pub fn l1(&self, other: &Self) -> Result<f64> {
        self.tensor.l1(&other.tensor)
    }
}

impl From<ProbabilityTensor> for HistogramDensity {
    fn from(t: ProbabilityTensor) -> Self {
        Self::from_tensor(t)
    }
}

/// 0-based bin of a coordinate in `[0,1)`; out-of-range values clamp.
pub(crate) fn bin_of(x: f64, b: usize) -> usize {
    ((x * b as f64).floor().max(0.0) as usize).min(b - 1)
}

type DensityFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A density on `[0,1)^d` with a declared Euclidean Lipschitz constant.
#[derive(Clone)]
pub struct DensityOracle {
    d: usize,
    lipschitz: f64,
    f: DensityFn,
}

impl fmt::Debug for DensityOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DensityOracle")
            .field("d", &self.d)
            .field("lipschitz", &self.lipschitz)
            .finish_non_exhaustive()
    }
}

impl DensityOracle {
    pub fn new(
        d: usize,
        lipschitz: f64,
        f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            d,
            lipschitz,
            f: Arc::new(f),
        }
    }

    pub fn uniform(d: usize) -> Self {
        Self::new(d, 0.0, |_| 1.0)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}

/// Evaluates `f` at the centre of every cell of a `q^d` grid, in parallel
/// chunks, and returns the results in cell order.
fn over_centroids(d: usize, q: usize, f: impl Fn(&[f64]) -> f64 + Sync) -> Vec<f64> {
    let n = q.pow(d as u32);
    const CHUNK: usize = 1 << 12;
    let chunks = n.div_ceil(CHUNK);
    let parts = exec::map_range(chunks, |c| {
        let start = c * CHUNK;
        let end = (start + CHUNK).min(n);
        let mut digits = vec![0usize; d];
        let mut rem = start;
        for i in (0..d).rev() {
            digits[i] = rem % q;
            rem /= q;
        }
        let mut x = vec![0.0; d];
        let mut out = Vec::with_capacity(end - start);
        for _ in start..end {
            for i in 0..d {
                x[i] = (digits[i] as f64 + 0.5) / q as f64;
            }
            out.push(f(&x));
            increment(&mut digits, q);
        }
        out
    });
    parts.concat()
}

/// Centroid discretization: `T_A ∝ p(λ_A)` with `λ_A` the bin centre.
///
/// For an `L`-Lipschitz density the histogram is within `√d·L/b` of `p`.
pub fn discretize(p: &DensityOracle, b: usize) -> Result<ProbabilityTensor> {
    cell_count(p.d(), b, DEFAULT_CELL_CAP)?;
    let vals = over_centroids(p.d(), b, |x| p.eval(x));
    if vals.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::InvalidParameter(
            "density oracle returned a negative or non-finite value".into(),
        ));
    }
    if pairwise_sum(&vals) == 0.0 {
        return Err(Error::DegenerateDiscretization);
    }
    ProbabilityTensor::from_weights(p.d(), b, vals)
}

/// Midpoint-rule estimate of `‖p − h‖₁` and its error allowance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    /// `√d·L/quad_b`.
    pub slack: f64,
}

pub fn tv_vs_density(h: &HistogramDensity, p: &DensityOracle, quad_b: usize) -> Result<Quadrature> {
    if h.d() != p.d() {
        return Err(Error::ShapeMismatch("density and histogram dimensions differ".into()));
    }
    if quad_b == 0 || !quad_b.is_multiple_of(h.b()) {
        return Err(Error::InvalidParameter(format!(
            "quad_b = {quad_b} must be a positive multiple of b = {}",
            h.b()
        )));
    }
    let n = cell_count(p.d(), quad_b, DEFAULT_CELL_CAP)?;
    let vals = over_centroids(p.d(), quad_b, |x| (p.eval(x) - h.eval(x)).abs());
    Ok(Quadrature {
        value: pairwise_sum(&vals) / n as f64,
        slack: (p.d() as f64).sqrt() * p.lipschitz() / quad_b as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linear() -> DensityOracle {
        DensityOracle::new(1, 2.0, |x| 2.0 * x[0])
    }

    #[test]
    fn histogram_scaling() {
        let t = ProbabilityTensor::new(1, 2, vec![0.25, 0.75]).unwrap();
        let h = HistogramDensity::from(t);
        assert_eq!(h.eval(&[0.1]), 0.5);
        assert_eq!(h.eval(&[0.7]), 1.5);
        let u = HistogramDensity::from(ProbabilityTensor::uniform(3, 4).unwrap());
        assert!((u.eval(&[0.3, 0.9, 0.0]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn linear_density_two_bins() {
        let t = discretize(&linear(), 2).unwrap();
        assert!((t.data()[0] - 0.25).abs() < 1e-15);
        let q = tv_vs_density(&t.clone().into(), &linear(), 512).unwrap();
        assert!((q.value - 0.25).abs() <= q.slack + 1e-12);
        assert!((q.value - 0.25).abs() < 1e-3);
        assert!(q.value <= 1.0);
    }

    #[test]
    fn uniform_has_no_bias() {
        let p = DensityOracle::uniform(2);
        let t = discretize(&p, 3).unwrap();
        let q = tv_vs_density(&t.into(), &p, 9).unwrap();
        assert!(q.value < 1e-12);
        assert_eq!(q.slack, 0.0);
    }

    #[test]
    fn degenerate_and_bad_quad() {
        let p = DensityOracle::new(1, 4.0, |x| (2.0 * (x[0] - 0.5).abs() - 0.5).max(0.0) * 4.0);
        // zero at both centroids of the 2-bin grid
        assert!(matches!(discretize(&p, 2), Err(Error::DegenerateDiscretization)));
        let h: HistogramDensity = ProbabilityTensor::uniform(1, 4).unwrap().into();
        assert!(tv_vs_density(&h, &p, 6).is_err());
    }
}
