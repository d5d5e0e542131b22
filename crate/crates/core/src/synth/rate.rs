//! Error-versus-sample-size experiments against a Gibbs ground truth.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::gibbs::{gibbs_tensor, GibbsSpec};
use crate::error::{Error, Result};
use crate::estimator::{estimate_empirical, estimate_factorized, estimate_structured, Limits};
use crate::graph::{make_family, FamilySpec, Graph};
use crate::resilience::{resilience_estimate, Disintegration};
use crate::tensor::{sample, ProbabilityTensor};
use crate::{exec, seed, VERSION};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GraphSource {
    Family(FamilySpec),
    Explicit(Graph),
}

impl GraphSource {
    pub fn build(&self) -> Result<Graph> {
        match self {
            GraphSource::Family(f) => make_family(f),
            GraphSource::Explicit(g) => Ok(g.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum Method {
    Empirical,
    Factorized,
    /// Cover + selection at the quoted constants; cells whose quoted `b`
    /// differs from the experiment grid are recorded as infeasible.
    Structured {
        lipschitz: Option<f64>,
        eps_target: f64,
        delta: f64,
    },
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Empirical => "empirical",
            Method::Factorized => "factorized",
            Method::Structured { .. } => "structured",
        }
    }
}

/// Ground truth: explicit potentials, or random ones drawn from the root
/// seed with amplitudes in `[−a_max, a_max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TruthSource {
    Explicit {
        edges: Vec<super::gibbs::EdgePotential>,
        #[serde(default)]
        vertices: Vec<super::gibbs::VertexPotential>,
    },
    Random {
        a_max: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateConfig {
    pub graph: GraphSource,
    pub truth: TruthSource,
    pub methods: Vec<Method>,
    pub n_grid: Vec<usize>,
    pub repetitions: usize,
    pub b: usize,
    #[serde(default)]
    pub seed: u64,
    /// Steps (1-based) for the factorized estimator; defaults to the
    /// resilience witness.
    #[serde(default)]
    pub disintegration: Option<Vec<Vec<usize>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub method: String,
    pub n: usize,
    pub seed: u64,
    /// `None` when the method could not run in this cell.
    pub error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateCell {
    pub method: String,
    pub n: usize,
    pub repetitions: usize,
    pub mean: f64,
    pub median: f64,
    /// Normal-approximation 95% interval for the mean.
    pub ci_low: f64,
    pub ci_high: f64,
    pub failures: usize,
    pub failure_reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub version: String,
    pub config: RateConfig,
    pub truth_lipschitz: f64,
    pub cells: Vec<RateCell>,
    /// Least-squares slope of `ln(median)` against `ln(n)` over the top half
    /// of the grid, per method.
    pub slopes: Vec<(String, Option<f64>)>,
    #[serde(skip)]
    pub rows: Vec<RateRow>,
}

impl RateReport {
    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["method", "n", "seed", "error"])?;
        for r in &self.rows {
            wr.write_record([
                r.method.clone(),
                r.n.to_string(),
                r.seed.to_string(),
                r.error.map_or_else(|| "NA".into(), |e| format!("{e:?}")),
            ])?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn medians(&self, method: &str) -> Vec<(usize, f64)> {
        self.cells
            .iter()
            .filter(|c| c.method == method)
            .map(|c| (c.n, c.median))
            .collect()
    }
}

fn median(xs: &mut [f64]) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

/// Least-squares slope through `(ln n, ln y)` over the upper half of the
/// points; `None` with fewer than two usable points.
pub fn top_half_slope(points: &[(usize, f64)]) -> Option<f64> {
    let tail: Vec<(f64, f64)> = points[points.len() / 2..]
        .iter()
        .filter(|(n, y)| *n > 0 && *y > 0.0 && y.is_finite())
        .map(|&(n, y)| ((n as f64).ln(), y.ln()))
        .collect();
    if tail.len() < 2 {
        return None;
    }
    let k = tail.len() as f64;
    let mx = tail.iter().map(|p| p.0).sum::<f64>() / k;
    let my = tail.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = tail.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = tail.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

struct Context {
    graph: Graph,
    dis: Disintegration,
    truth: ProbabilityTensor,
    lipschitz: f64,
    b: usize,
}

impl Context {
    fn run(&self, method: &Method, n: usize, cell_seed: u64) -> Result<f64> {
        let s = sample(&self.truth, cell_seed, n);
        let est = match method {
            Method::Empirical => estimate_empirical(&s, self.graph.d(), self.b)?,
            Method::Factorized => estimate_factorized(&s, &self.graph, &self.dis, self.b)?,
            Method::Structured {
                lipschitz,
                eps_target,
                delta,
            } => {
                let l = lipschitz.unwrap_or(self.lipschitz);
                let e = estimate_structured(&s, &self.graph, l, *eps_target, *delta, Limits::default())?;
                if e.quote.b != self.b {
                    return Err(Error::ShapeMismatch(format!(
                        "quoted b = {} differs from the experiment grid b = {}",
                        e.quote.b, self.b
                    )));
                }
                e.density
            }
        };
        est.tensor().l1(&self.truth)
    }
}

pub fn run_rate_experiment(config: &RateConfig) -> Result<RateReport> {
    let graph = config.graph.build()?;
    let spec = match &config.truth {
        TruthSource::Explicit { edges, vertices } => GibbsSpec {
            graph: graph.clone(),
            edges: edges.clone(),
            vertices: vertices.clone(),
        },
        TruthSource::Random { a_max } => {
            let mut rng = seed::rng(config.seed, &[seed::label("truth")]);
            GibbsSpec::random(graph.clone(), *a_max, &mut rng)
        }
    };
    let (truth, oracle) = gibbs_tensor(&spec, config.b)?;
    let dis = match &config.disintegration {
        Some(steps) => Disintegration::from_labels(&graph, steps)?,
        None => resilience_estimate(&graph).upper,
    };
    let ctx = Context {
        graph,
        dis,
        truth,
        lipschitz: oracle.lipschitz(),
        b: config.b,
    };
    let mut jobs = Vec::new();
    for m in &config.methods {
        for &n in &config.n_grid {
            for rep in 0..config.repetitions {
                let s = seed::derive(
                    config.seed,
                    &[seed::label(m.name()), n as u64, rep as u64],
                );
                jobs.push((m, n, s));
            }
        }
    }
    let results = exec::map(&jobs, |&(m, n, s)| ctx.run(m, n, s));
    let mut rows = Vec::with_capacity(jobs.len());
    let mut cells = Vec::new();
    let mut slopes = Vec::new();
    let mut it = jobs.iter().zip(results);
    for m in &config.methods {
        let mut curve = Vec::new();
        for &n in &config.n_grid {
            let mut errs = Vec::new();
            let mut failures = 0;
            let mut reason = None;
            for _ in 0..config.repetitions {
                let ((_, _, s), res) = it.next().expect("one result per job");
                let error = match res {
                    Ok(e) => {
                        errs.push(e);
                        Some(e)
                    }
                    Err(e) => {
                        failures += 1;
                        reason.get_or_insert_with(|| e.to_string());
                        None
                    }
                };
                rows.push(RateRow {
                    method: m.name().into(),
                    n,
                    seed: *s,
                    error,
                });
            }
            let k = errs.len() as f64;
            let mean = errs.iter().sum::<f64>() / k;
            let sd = if errs.len() > 1 {
                (errs.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (k - 1.0)).sqrt()
            } else {
                0.0
            };
            let half = 1.96 * sd / k.sqrt();
            let med = median(&mut errs);
            curve.push((n, med));
            cells.push(RateCell {
                method: m.name().into(),
                n,
                repetitions: config.repetitions,
                mean,
                median: med,
                ci_low: mean - half,
                ci_high: mean + half,
                failures,
                failure_reason: reason,
            });
        }
        slopes.push((m.name().to_string(), top_half_slope(&curve)));
    }
    Ok(RateReport {
        version: VERSION.into(),
        config: config.clone(),
        truth_lipschitz: ctx.lipschitz,
        cells,
        slopes,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(n_grid: Vec<usize>) -> RateConfig {
        RateConfig {
            graph: GraphSource::Family(FamilySpec::Empty { d: 1 }),
            truth: TruthSource::Random { a_max: 0.0 },
            methods: vec![Method::Empirical],
            n_grid,
            repetitions: 8,
            b: 8,
            seed: 3,
            disintegration: None,
        }
    }

    #[test]
    fn empty_grid_is_empty_report() {
        let r = run_rate_experiment(&config(vec![])).unwrap();
        assert!(r.cells.is_empty() && r.rows.is_empty());
        assert_eq!(r.slopes, vec![("empirical".to_string(), None)]);
    }

    #[test]
    fn uniform_empirical_slope_is_parametric() {
        let r = run_rate_experiment(&config(vec![100, 300, 1000, 3000, 10_000, 30_000])).unwrap();
        let s = r.slopes[0].1.unwrap();
        assert!((s + 0.5).abs() < 0.15, "slope {s}");
    }

    #[test]
    fn config_parses_from_json() {
        let j = r#"{"graph": {"kind": "path", "d": 3}, "truth": {"a_max": 1.0},
                    "methods": [{"method": "empirical"}, {"method": "factorized"}],
                    "n_grid": [10], "repetitions": 2, "b": 2}"#;
        let c: RateConfig = serde_json::from_str(j).unwrap();
        assert_eq!(c.graph.build().unwrap().edge_count(), 2);
        let r = run_rate_experiment(&c).unwrap();
        assert_eq!(r.rows.len(), 4);
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("method,n,seed,error\n"));
    }
}
