use std::io::{Read, Write};

use rand::Rng;

use super::histogram::bin_of;
use super::ProbabilityTensor;
use crate::error::{Error, Result};
use crate::{exec, seed};

/// Points in `[0,1)^d`, stored row by row.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    d: usize,
    points: Vec<f64>,
    /// Root seed the points were drawn with, when known.
    pub seed: Option<u64>,
}

impl SampleSet {
    pub fn new(d: usize, points: Vec<f64>) -> Result<Self> {
        if d == 0 && !points.is_empty() || d > 0 && !points.len().is_multiple_of(d) {
            return Err(Error::ShapeMismatch(format!(
                "{} coordinates do not form rows of length {d}",
                points.len()
            )));
        }
        if let Some(x) = points.iter().find(|x| !(0.0..1.0).contains(*x)) {
            return Err(Error::InvalidParameter(format!("coordinate {x} outside [0,1)")));
        }
        Ok(Self {
            d,
            points,
            seed: None,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.points.len().checked_div(self.d).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.points[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.points.chunks_exact(self.d.max(1))
    }

    /// Rows `range` as a new set.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Self {
        Self {
            d: self.d,
            points: self.points[range.start * self.d..range.end * self.d].to_vec(),
            seed: self.seed,
        }
    }

    /// Flat bin index of every row on the `b^d` grid.
    pub fn bins(&self, b: usize) -> Vec<usize> {
        self.rows()
            .map(|r| r.iter().fold(0, |acc, &x| acc * b + bin_of(x, b)))
            .collect()
    }

    /// Counts per bin of the `b^d` grid.
    pub fn counts(&self, b: usize) -> Vec<u64> {
        let mut c = vec![0u64; b.pow(self.d as u32)];
        for i in self.bins(b) {
            c[i] += 1;
        }
        c
    }

    /// One row per point, no header; values printed with full precision.
    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let mut wr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
        for r in self.rows() {
            wr.write_record(r.iter().map(|x| format!("{x:?}")))?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv(r: impl Read) -> Result<Self> {
        let mut rd = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(r);
        let mut d = None;
        let mut points = Vec::new();
        for rec in rd.records() {
            let rec = rec?;
            if *d.get_or_insert(rec.len()) != rec.len() {
                return Err(Error::Parse("rows have different lengths".into()));
            }
            for f in rec.iter() {
                points.push(
                    f.parse::<f64>()
                        .map_err(|e| Error::Parse(format!("{f:?}: {e}")))?,
                );
            }
        }
        Self::new(d.unwrap_or(0), points)
    }
}

const SAMPLE_CHUNK: usize = 4096;

/// `n` i.i.d. draws from the histogram density of `t`: a bin by inverse CDF,
/// then a uniform point inside it. Chunk `c` uses its own stream derived
/// from `(root, c)`, so the result is independent of the thread count.
pub fn sample(t: &ProbabilityTensor, root: u64, n: usize) -> SampleSet {
    let (d, b) = (t.d(), t.b());
    let mut cdf = Vec::with_capacity(t.len());
    let mut acc = 0.0;
    for &x in t.data() {
        acc += x;
        cdf.push(acc);
    }
    let total = acc;
    let chunks = n.div_ceil(SAMPLE_CHUNK);
    let parts = exec::map_range(chunks, |c| {
        let mut rng = seed::rng(root, &[seed::label("sample"), c as u64]);
        let rows = SAMPLE_CHUNK.min(n - c * SAMPLE_CHUNK);
        let mut out = Vec::with_capacity(rows * d);
        let mut digits = vec![0usize; d];
        for _ in 0..rows {
            let u: f64 = rng.random::<f64>() * total;
            let mut cell = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
            // never land on a zero-mass cell through rounding at the edge
            while t.data()[cell] == 0.0 && cell > 0 {
                cell -= 1;
            }
            let mut rem = cell;
            for i in (0..d).rev() {
                digits[i] = rem % b;
                rem /= b;
            }
            for &a in &digits {
                let x = (a as f64 + rng.random::<f64>()) / b as f64;
                out.push(if x < 1.0 { x } else { 1.0 - f64::EPSILON / 2.0 });
            }
        }
        out
    });
    SampleSet {
        d,
        points: parts.concat(),
        seed: Some(root),
    }
}
