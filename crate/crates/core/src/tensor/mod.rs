//! Probability tensors on the `b^d` bin grid.
//!
//! Entries are stored densely in row-major order with axis 1 slowest, so the
//! multi-index `(A₁, …, A_d)` (0-based bins) lives at
//! `Σᵢ Aᵢ · b^(d−1−i)`.

mod histogram;
mod io;
mod markov;
mod sample;

use crate::error::{Error, Result};
use crate::graph::VertexSet;

pub use histogram::{discretize, tv_vs_density, DensityOracle, HistogramDensity, Quadrature};
pub use io::TensorFile;
pub use markov::{check_pairwise_markov, check_separation, MarkovReport, Separation};
pub use sample::{sample, SampleSet};

/// Default limit on `b^d`.
pub const DEFAULT_CELL_CAP: usize = 1 << 24;

/// Tolerance on `Σ T_A = 1` for tensors read from outside.
const SUM_TOL: f64 = 1e-9;

/// Number of cells `b^d`, or an error above `cap`.
pub fn cell_count(d: usize, b: usize, cap: usize) -> Result<usize> {
    if b == 0 {
        return Err(Error::InvalidParameter("b must be ≥ 1".into()));
    }
    let cells = (b as u128).checked_pow(d as u32).unwrap_or(u128::MAX);
    if cells > cap as u128 {
        return Err(Error::TensorTooLarge { cells, cap });
    }
    Ok(cells as usize)
}

/// Sum by recursive halving; fixed order, `O(log n)` error growth.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        xs.iter().sum()
    } else {
        let (a, b) = xs.split_at(xs.len() / 2);
        pairwise_sum(a) + pairwise_sum(b)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityTensor {
    d: usize,
    b: usize,
    data: Vec<f64>,
}

impl ProbabilityTensor {
    /// Checks shape, non-negativity and normalization.
    pub fn new(d: usize, b: usize, data: Vec<f64>) -> Result<Self> {
        let n = cell_count(d, b, DEFAULT_CELL_CAP)?;
        if data.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "expected {n} entries for d = {d}, b = {b}, got {}",
                data.len()
            )));
        }
        if let Some(x) = data.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(Error::InvalidParameter(format!("entry {x} is not a probability")));
        }
        let s = pairwise_sum(&data);
        if (s - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidParameter(format!("entries sum to {s}, not 1")));
        }
        Ok(Self { d, b, data })
    }

    /// Normalizes non-negative weights.
    pub fn from_weights(d: usize, b: usize, mut w: Vec<f64>) -> Result<Self> {
        let n = cell_count(d, b, DEFAULT_CELL_CAP)?;
        if w.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "expected {n} weights, got {}",
                w.len()
            )));
        }
        if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::InvalidParameter("weights must be finite and ≥ 0".into()));
        }
        let z = pairwise_sum(&w);
        if z <= 0.0 {
            return Err(Error::InvalidParameter("weights sum to zero".into()));
        }
        w.iter_mut().for_each(|x| *x /= z);
        Ok(Self { d, b, data: w })
    }

    pub(crate) fn from_raw(d: usize, b: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), b.pow(d as u32));
        Self { d, b, data }
    }

    pub fn uniform(d: usize, b: usize) -> Result<Self> {
        let n = cell_count(d, b, DEFAULT_CELL_CAP)?;
        Ok(Self::from_raw(d, b, vec![1.0 / n as f64; n]))
    }

    /// All mass on the bin with 0-based multi-index `at`.
    pub fn point_mass(d: usize, b: usize, at: &[usize]) -> Result<Self> {
        let n = cell_count(d, b, DEFAULT_CELL_CAP)?;
        if at.len() != d || at.iter().any(|&a| a >= b) {
            return Err(Error::InvalidParameter("bin index out of range".into()));
        }
        let mut data = vec![0.0; n];
        data[flat_index(at, b)] = 1.0;
        Ok(Self::from_raw(d, b, data))
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Entry at a 0-based multi-index.
    pub fn get(&self, at: &[usize]) -> f64 {
        self.data[flat_index(at, self.b)]
    }

    pub fn sum(&self) -> f64 {
        pairwise_sum(&self.data)
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if (self.d, self.b) != (other.d, other.b) {
            return Err(Error::ShapeMismatch(format!(
                "(d, b) = ({}, {}) vs ({}, {})",
                self.d, self.b, other.d, other.b
            )));
        }
        Ok(())
    }

    /// `Σ_A |x_A − y_A|`, unhalved.
    pub fn l1(&self, other: &Self) -> Result<f64> {
        self.same_shape(other)?;
        let diff: Vec<f64> = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(x, y)| (x - y).abs())
            .collect();
        Ok(pairwise_sum(&diff))
    }

    /// Marginal on the axes in `keep`, in increasing axis order.
    pub fn marginalize(&self, keep: &VertexSet) -> Result<Self> {
        if keep.iter().any(|a| a >= self.d) {
            return Err(Error::InvalidParameter("axis out of range".into()));
        }
        let axes: Vec<usize> = keep.iter().collect();
        let out_n = self.b.pow(axes.len() as u32);
        let mut out = vec![0.0; out_n];
        let mut digits = vec![0usize; self.d];
        for &x in &self.data {
            out[project(&digits, &axes, self.b)] += x;
            increment(&mut digits, self.b);
        }
        Ok(Self::from_raw(axes.len(), self.b, out))
    }

    /// Conditional tensor on the other axes given `axis = bin` (0-based).
    pub fn condition(&self, axis: usize, bin: usize) -> Result<Self> {
        if axis >= self.d || bin >= self.b {
            return Err(Error::InvalidParameter("axis or bin out of range".into()));
        }
        let stride = self.b.pow((self.d - 1 - axis) as u32);
        let block = stride * self.b;
        let mut out = Vec::with_capacity(self.len() / self.b);
        for chunk in self.data.chunks(block) {
            out.extend_from_slice(&chunk[bin * stride..(bin + 1) * stride]);
        }
        let z = pairwise_sum(&out);
        if z <= 0.0 {
            return Err(Error::ZeroMassSlice { axis: axis + 1, bin: bin + 1 });
        }
        out.iter_mut().for_each(|x| *x /= z);
        Ok(Self::from_raw(self.d - 1, self.b, out))
    }

    /// Outer product; the axes of `other` follow those of `self`.
    pub fn product(&self, other: &Self) -> Result<Self> {
        if self.b != other.b {
            return Err(Error::ShapeMismatch("product needs a common b".into()));
        }
        cell_count(self.d + other.d, self.b, DEFAULT_CELL_CAP)?;
        let mut out = Vec::with_capacity(self.len() * other.len());
        for &x in &self.data {
            out.extend(other.data.iter().map(|y| x * y));
        }
        Ok(Self::from_raw(self.d + other.d, self.b, out))
    }

    /// Joint tensor whose axes `parts[i].0` carry the independent factor
    /// `parts[i].1`. The vertex sets must partition `[d]`.
    pub fn product_over(d: usize, b: usize, parts: &[(VertexSet, &Self)]) -> Result<Self> {
        let n = cell_count(d, b, DEFAULT_CELL_CAP)?;
        let mut owner = vec![usize::MAX; d];
        for (i, (vs, t)) in parts.iter().enumerate() {
            if t.b != b || t.d != vs.len() {
                return Err(Error::ShapeMismatch("factor shape does not match its axes".into()));
            }
            for a in vs {
                if a >= d || owner[a] != usize::MAX {
                    return Err(Error::InvalidParameter("factor axes must partition [d]".into()));
                }
                owner[a] = i;
            }
        }
        if owner.contains(&usize::MAX) {
            return Err(Error::InvalidParameter("factor axes must partition [d]".into()));
        }
        let axes: Vec<Vec<usize>> = parts.iter().map(|(vs, _)| vs.iter().collect()).collect();
        let mut digits = vec![0usize; d];
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let mut x = 1.0;
            for (k, (_, t)) in parts.iter().enumerate() {
                x *= t.data[project(&digits, &axes[k], b)];
            }
            out.push(x);
            increment(&mut digits, b);
        }
        Ok(Self::from_raw(d, b, out))
    }

    /// `T_A = δ[A_v] · rest[A_v][A without v]`, where every `rest[k]` is a
    /// tensor over the remaining axes in increasing order.
    pub fn stack_axis(v: usize, delta: &[f64], rest: &[&Self]) -> Result<Self> {
        let b = delta.len();
        if b == 0 || rest.len() != b {
            return Err(Error::ShapeMismatch("need one conditional tensor per bin".into()));
        }
        let dr = rest[0].d;
        if rest.iter().any(|t| t.d != dr || t.b != b) || v > dr {
            return Err(Error::ShapeMismatch("conditional tensors disagree in shape".into()));
        }
        let d = dr + 1;
        let n = cell_count(d, b, DEFAULT_CELL_CAP)?;
        let outer = b.pow(v as u32);
        let inner = b.pow((dr - v) as u32);
        let mut out = Vec::with_capacity(n);
        for hi in 0..outer {
            for (k, t) in rest.iter().enumerate() {
                let src = &t.data[hi * inner..(hi + 1) * inner];
                out.extend(src.iter().map(|x| delta[k] * x));
            }
        }
        Ok(Self::from_raw(d, b, out))
    }
}

/// Flat offset of a 0-based multi-index.
pub fn flat_index(at: &[usize], b: usize) -> usize {
    at.iter().fold(0, |acc, &a| acc * b + a)
}

/// Offset within the marginal on `axes` for the full multi-index `digits`.
pub(crate) fn project(digits: &[usize], axes: &[usize], b: usize) -> usize {
    axes.iter().fold(0, |acc, &a| acc * b + digits[a])
}

/// Advances a row-major multi-index by one cell.
pub(crate) fn increment(digits: &mut [usize], b: usize) {
    for x in digits.iter_mut().rev() {
        *x += 1;
        if *x < b {
            return;
        }
        *x = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t2(x: [f64; 4]) -> ProbabilityTensor {
        ProbabilityTensor::new(2, 2, x.to_vec()).unwrap()
    }

    #[test]
    fn marginal_arithmetic() {
        let t = t2([0.1, 0.2, 0.3, 0.4]);
        let m = t.marginalize(&VertexSet::singleton(0)).unwrap();
        assert!((m.data()[0] - 0.3).abs() < 1e-15 && (m.data()[1] - 0.7).abs() < 1e-15);
        let m2 = t.marginalize(&VertexSet::singleton(1)).unwrap();
        assert!((m2.data()[0] - 0.4).abs() < 1e-15);
        let u = ProbabilityTensor::uniform(3, 3).unwrap();
        let mu = u.marginalize(&VertexSet::from_u64(0b101)).unwrap();
        assert!(mu.l1(&ProbabilityTensor::uniform(2, 3).unwrap()).unwrap() < 1e-15);
    }

    #[test]
    fn l1_disjoint_support_is_two() {
        let a = ProbabilityTensor::new(1, 2, vec![1.0, 0.0]).unwrap();
        let b = ProbabilityTensor::new(1, 2, vec![0.0, 1.0]).unwrap();
        assert_eq!(a.l1(&b).unwrap(), 2.0);
        assert_eq!(a.l1(&a).unwrap(), 0.0);
        assert!(a.l1(&ProbabilityTensor::uniform(2, 2).unwrap()).is_err());
    }

    #[test]
    fn condition_and_zero_slice() {
        let t = ProbabilityTensor::from_weights(2, 2, vec![0.1, 0.2, 0.0, 0.0]).unwrap();
        assert!(matches!(t.condition(0, 1), Err(Error::ZeroMassSlice { axis: 1, bin: 2 })));
        let c = t.condition(0, 0).unwrap();
        assert!((c.data()[0] - 1.0 / 3.0).abs() < 1e-15);
        let c = t.condition(1, 1).unwrap();
        assert_eq!(c.data(), &[1.0, 0.0]);
    }

    #[test]
    fn product_roundtrip() {
        let u = ProbabilityTensor::new(1, 3, vec![0.2, 0.3, 0.5]).unwrap();
        let v = ProbabilityTensor::new(1, 3, vec![0.6, 0.4, 0.0]).unwrap();
        let p = u.product(&v).unwrap();
        let mu = p.marginalize(&VertexSet::singleton(0)).unwrap();
        let mv = p.marginalize(&VertexSet::singleton(1)).unwrap();
        assert!(mu.product(&mv).unwrap().l1(&p).unwrap() < 1e-15);
        // same product with the factors placed on swapped axes
        let q = ProbabilityTensor::product_over(
            2,
            3,
            &[(VertexSet::singleton(1), &u), (VertexSet::singleton(0), &v)],
        )
        .unwrap();
        assert!(q.l1(&v.product(&u).unwrap()).unwrap() < 1e-15);
    }

    #[test]
    fn stack_axis_places_the_new_axis() {
        let a = ProbabilityTensor::new(1, 2, vec![0.25, 0.75]).unwrap();
        let b = ProbabilityTensor::new(1, 2, vec![0.5, 0.5]).unwrap();
        let t = ProbabilityTensor::stack_axis(1, &[0.4, 0.6], &[&a, &b]).unwrap();
        // axis 2 is the stacked one: T[x, y] = δ[y] · rest[y][x]
        assert!((t.get(&[0, 0]) - 0.4 * 0.25).abs() < 1e-15);
        assert!((t.get(&[0, 1]) - 0.6 * 0.5).abs() < 1e-15);
        assert!((t.get(&[1, 0]) - 0.4 * 0.75).abs() < 1e-15);
        assert!((t.sum() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn caps() {
        assert!(matches!(
            ProbabilityTensor::uniform(25, 2),
            Err(Error::TensorTooLarge { .. })
        ));
        assert_eq!(ProbabilityTensor::uniform(0, 5).unwrap().data(), &[1.0]);
    }
}
