use std::fs;
use std::path::Path;

use resil_core::cover::{
    build_cover, build_union_cover, cover_size_bound, predicted_ln_size, simplex_cover_ln_size, Cover,
};
use resil_core::estimator::{
    estimate_empirical, estimate_factorized, estimate_structured, Limits, SelectionRule,
};
use resil_core::graph::{make_family, max_clique, FamilySpec, GraphJson, DEFAULT_CLIQUE_BUDGET};
use resil_core::resilience::{
    bound_constructive, resilience_estimate, resilience_exact, CertificateJson, Disintegration,
    ResilienceCertificate, Strategy,
};
use resil_core::synth::{run_rate_experiment, RateConfig};
use resil_core::tensor::{SampleSet, TensorFile};
use resil_core::verify::{table1, verify_lemmas, LemmaConfig};
use resil_core::Graph;
use serde::Serialize;
use serde_json::json;

use crate::args::*;
use crate::fail::Fail;
use crate::output::Run;

fn read(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| Fail::io(path, e))
}

fn parse_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Fail> {
    serde_json::from_str(&read(path)?).map_err(|e| Fail::usage(format!("{}: {e}", path.display())))
}

fn load_graph_file(path: &Path) -> Result<Graph, Fail> {
    let j: GraphJson = parse_json(path)?;
    Graph::from_json(&j).map_err(|e| Fail::usage(format!("{}: {e}", path.display())))
}

impl GraphInput {
    fn family_spec(&self) -> Result<Option<FamilySpec>, Fail> {
        match &self.family {
            Some(kind) => FamilySpec::parse(kind, &self.params)
                .map(Some)
                .map_err(|e| Fail::usage(e.to_string())),
            None => Ok(None),
        }
    }

    fn load(&self) -> Result<Graph, Fail> {
        let g = match (&self.graph, self.family_spec()?) {
            (Some(path), _) => load_graph_file(path)?,
            (None, Some(spec)) => make_family(&spec)?,
            (None, None) => return Err(Fail::usage("give --graph FILE or --family KIND --params ...")),
        };
        match self.power {
            Some(t) => Ok(g.power(t)?),
            None => Ok(g),
        }
    }

    fn is_given(&self) -> bool {
        self.graph.is_some() || self.family.is_some()
    }
}

fn need_json(format: Format, verb: &str) -> Result<(), Fail> {
    if format == Format::Csv {
        return Err(Fail::usage(format!("{verb} has no tabular output; drop --format csv")));
    }
    Ok(())
}

fn pretty<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

/// Executes the parsed command, writing artifacts through `run`. Returns
/// the text to print on stdout.
pub fn dispatch(cli: &Cli, run: &mut Run) -> Result<String, Fail> {
    match &cli.command {
        Command::Graph(GraphCmd::Gen(input)) => {
            need_json(cli.format, "graph gen")?;
            let g = input.load()?;
            let j = g.to_json();
            run.json("graph.json", &j)?;
            Ok(pretty(&j))
        }
        Command::Graph(GraphCmd::Info(a)) => graph_info(cli, a, run),
        Command::Resilience(ResilienceCmd::Exact(a)) => {
            need_json(cli.format, "resilience exact")?;
            let g = a.input.load()?;
            certificate(run, &g, resilience_exact(&g, a.budget))
        }
        Command::Resilience(ResilienceCmd::Estimate(a)) => {
            need_json(cli.format, "resilience estimate")?;
            let g = a.input.load()?;
            certificate(run, &g, resilience_estimate(&g))
        }
        Command::Resilience(ResilienceCmd::Bound(a)) => bound(cli, a, run),
        Command::Cover(CoverCmd::Size(a)) => cover_size(cli, a, run),
        Command::Cover(CoverCmd::Build(a)) => {
            need_json(cli.format, "cover build")?;
            let g = a.input.load()?;
            let dis = resilience_estimate(&g).upper;
            let cover = build_cover(&g, a.b, a.eps, &dis, a.size_limit)?;
            write_cover(run, &cover)
        }
        Command::Cover(CoverCmd::Union(a)) => {
            need_json(cli.format, "cover union")?;
            let cover = build_union_cover(a.d, a.r, a.b, a.eps, a.size_limit)?;
            write_cover(run, &cover)
        }
        Command::Estimate(a) => estimate(cli, a, run),
        Command::Experiment(ExperimentCmd::Rate(a)) => rate(cli, a, run),
        Command::Verify(VerifyCmd::Lemmas(a)) => {
            let report = verify_lemmas(&LemmaConfig {
                max_d: a.max_d,
                trials: a.trials,
                seed: cli.seed,
            })?;
            match cli.format {
                Format::Json => run.json("lemmas.json", &report)?,
                Format::Csv => run.csv("lemmas.csv", &report.checks)?,
            }
            let mut text = report.table();
            if !report.pass {
                for c in report.checks.iter().filter(|c| !c.pass()) {
                    text.push_str(&format!("{}: {}\n", c.name, c.first_failure.as_deref().unwrap_or("")));
                }
                eprint!("{text}");
                return Err(Fail::Domain(resil_core::Error::Precondition(
                    "lemma checks failed".into(),
                )));
            }
            Ok(text)
        }
    }
}

#[derive(Serialize)]
struct GraphInfo {
    d: usize,
    edges: usize,
    components: usize,
    connected: bool,
    is_forest: bool,
    is_tree: bool,
    is_complete: bool,
    max_degree: usize,
    diameter: Option<usize>,
    clique_number: usize,
    clique_exact: bool,
    hash: String,
}

fn graph_info(cli: &Cli, a: &GraphInfoArgs, run: &mut Run) -> Result<String, Fail> {
    if a.table1 {
        // Only the family kind filters rows; parameters are ignored here.
        let kind = match a.input.family.as_deref() {
            None => None,
            Some("kary") => Some("kary_tree"),
            Some(k) if FamilySpec::KINDS.contains(&k) => Some(k),
            Some(k) => return Err(Fail::usage(format!("unknown family {k:?}"))),
        };
        let rows: Vec<_> = table1()?
            .into_iter()
            .filter(|r| kind.is_none_or(|k| r.family.kind() == k))
            .collect();
        #[derive(Serialize)]
        struct Flat<'a> {
            row: &'a str,
            family: String,
            d: usize,
            lower: usize,
            upper: usize,
            exact: bool,
            constructive: usize,
            bound: f64,
            rate: &'a str,
        }
        let flat: Vec<Flat> = rows
            .iter()
            .map(|r| Flat {
                row: &r.row,
                family: serde_json::to_string(&r.family).expect("serializable"),
                d: r.d,
                lower: r.lower,
                upper: r.upper,
                exact: r.exact,
                constructive: r.constructive,
                bound: r.bound,
                rate: &r.rate,
            })
            .collect();
        match cli.format {
            Format::Json => run.json("table1.json", &json!({ "rows": rows }))?,
            Format::Csv => run.csv("table1.csv", &flat)?,
        }
        let mut text = format!(
            "{:<16} {:<34} {:>4} {:>6} {:>6} {:>6} {:>8}  {}\n",
            "row", "family", "d", "lower", "upper", "constr", "bound", "rate"
        );
        for f in &flat {
            text.push_str(&format!(
                "{:<16} {:<34} {:>4} {:>6} {:>6} {:>6} {:>8.1}  {}\n",
                f.row, f.family, f.d, f.lower, f.upper, f.constructive, f.bound, f.rate
            ));
        }
        return Ok(text);
    }
    need_json(cli.format, "graph info")?;
    let g = a.input.load()?;
    let clique = max_clique(&g, DEFAULT_CLIQUE_BUDGET);
    let info = GraphInfo {
        d: g.d(),
        edges: g.edge_count(),
        components: g.components().len(),
        connected: g.is_connected(),
        is_forest: g.is_forest(),
        is_tree: g.is_tree(),
        is_complete: g.is_complete(),
        max_degree: g.max_degree(),
        diameter: g.diameter(),
        clique_number: clique.clique.len(),
        clique_exact: clique.exact,
        hash: g.hash(),
    };
    run.json("info.json", &info)?;
    Ok(pretty(&info))
}

fn certificate(run: &mut Run, g: &Graph, cert: ResilienceCertificate) -> Result<String, Fail> {
    cert.check(g)?;
    let j = cert.to_json();
    run.json("certificate.json", &j)?;
    Ok(pretty(&j))
}

fn parse_blocks(s: &str) -> Result<Vec<Vec<usize>>, Fail> {
    s.split(';')
        .map(|b| {
            b.split(',')
                .map(|x| x.trim().parse::<usize>().map_err(|e| Fail::usage(format!("--blocks: {e}"))))
                .collect()
        })
        .collect()
}

fn bound(cli: &Cli, a: &BoundArgs, run: &mut Run) -> Result<String, Fail> {
    need_json(cli.format, "resilience bound")?;
    let g = a.input.load()?;
    let grid_dims = match a.input.family_spec()? {
        Some(FamilySpec::Grid { rows, cols }) => Some((rows, cols)),
        _ => None,
    };
    let req = |v: Option<usize>, flag: &str| v.ok_or_else(|| Fail::usage(format!("--strategy needs --{flag}")));
    let strategy = match a.strategy {
        StrategyName::Star => Strategy::Star,
        StrategyName::KaryTree => Strategy::KaryTree {
            k: req(a.k, "k")?,
            root: a.root,
        },
        StrategyName::TreeCentroid => Strategy::TreeCentroid,
        StrategyName::PathPower => Strategy::PathPower {
            t: a.t.or(a.input.power).unwrap_or(1),
            s: a.s,
        },
        StrategyName::GridPower => Strategy::GridPower {
            rows: req(a.rows.or(grid_dims.map(|g| g.0)), "rows")?,
            cols: req(a.cols.or(grid_dims.map(|g| g.1)), "cols")?,
            t: a.t.or(a.input.power).unwrap_or(1),
            s: a.s,
        },
        StrategyName::Meta => Strategy::Meta {
            blocks: parse_blocks(a.blocks.as_deref().ok_or_else(|| Fail::usage("meta needs --blocks"))?)?,
            quotient: load_graph_file(
                a.quotient.as_deref().ok_or_else(|| Fail::usage("meta needs --quotient"))?,
            )?,
        },
        StrategyName::Union => Strategy::Union,
        StrategyName::Removal => Strategy::Removal {
            removed: a.removed.clone(),
        },
        StrategyName::Greedy => Strategy::Greedy,
        StrategyName::Separator => Strategy::Separator,
    };
    let b = bound_constructive(&g, &strategy)?;
    let out = json!({
        "strategy": strategy,
        "length": b.len(),
        "bound": b.bound,
        "steps": b.disintegration.to_labels(),
        "graph_hash": g.hash(),
    });
    run.json("bound.json", &out)?;
    Ok(pretty(&out))
}

fn cover_size(cli: &Cli, a: &CoverSizeArgs, run: &mut Run) -> Result<String, Fail> {
    #[derive(Serialize)]
    struct Size {
        d: usize,
        b: usize,
        r: usize,
        eps: f64,
        ln_size_bound: f64,
        log10_size_bound: f64,
        ln_simplex_cover: f64,
        /// Exact element count of the construction, when a graph is given.
        ln_predicted: Option<f64>,
        size_limit: usize,
        feasible: Option<bool>,
    }
    let (d, r, predicted) = if a.input.is_given() {
        let g = a.input.load()?;
        let dis = resilience_estimate(&g).upper;
        let p = predicted_ln_size(&g, a.b, a.eps, &dis)?;
        (g.d(), dis.len(), Some(p))
    } else {
        match (a.d, a.r) {
            (Some(d), Some(r)) => (d, r, None),
            _ => return Err(Fail::usage("give a graph or both --d and --r")),
        }
    };
    let ln = cover_size_bound(d, a.b, r, a.eps)?;
    let s = Size {
        d,
        b: a.b,
        r,
        eps: a.eps,
        ln_size_bound: ln,
        log10_size_bound: ln / std::f64::consts::LN_10,
        ln_simplex_cover: simplex_cover_ln_size(a.b, a.eps)?,
        ln_predicted: predicted,
        size_limit: a.size_limit,
        feasible: predicted.map(|p| p <= (a.size_limit as f64).ln()),
    };
    match cli.format {
        Format::Json => run.json("size.json", &s)?,
        Format::Csv => run.csv("size.csv", std::slice::from_ref(&s))?,
    }
    Ok(pretty(&s))
}

fn write_cover(run: &mut Run, cover: &Cover) -> Result<String, Fail> {
    let width = cover.len().max(1).to_string().len().max(5);
    for (i, t) in cover.elements.iter().enumerate() {
        run.json(&format!("elements/{i:0width$}.json"), &TensorFile::encode(t))?;
    }
    let m = cover.manifest();
    run.json("cover.json", &m)?;
    Ok(pretty(&m))
}

fn read_samples(path: &Path) -> Result<SampleSet, Fail> {
    let f = fs::File::open(path).map_err(|e| Fail::io(path, e))?;
    SampleSet::read_csv(f).map_err(|e| Fail::usage(format!("{}: {e}", path.display())))
}

fn estimate(cli: &Cli, a: &EstimateArgs, run: &mut Run) -> Result<String, Fail> {
    need_json(cli.format, "estimate")?;
    let g = a.input.load()?;
    let samples = read_samples(&a.samples)?;
    if !samples.is_empty() && samples.d() != g.d() {
        return Err(Fail::usage(format!(
            "samples have {} columns, graph has {} vertices",
            samples.d(),
            g.d()
        )));
    }
    let need_b = || a.b.ok_or_else(|| Fail::usage("--b is required for this method"));
    let (density, report) = match a.method {
        MethodName::Empirical => {
            let b = need_b()?;
            let h = estimate_empirical(&samples, g.d(), b)?;
            (h, json!({ "method": "empirical", "b": b, "n": samples.len() }))
        }
        MethodName::Factorized => {
            let b = need_b()?;
            let dis = match &a.certificate {
                Some(p) => {
                    let c: CertificateJson = parse_json(p)?;
                    Disintegration::from_labels(&g, &c.steps)?
                }
                None => resilience_estimate(&g).upper,
            };
            let h = estimate_factorized(&samples, &g, &dis, b)?;
            (
                h,
                json!({ "method": "factorized", "b": b, "n": samples.len(), "steps": dis.to_labels() }),
            )
        }
        MethodName::Structured => {
            let eps = a.eps.ok_or_else(|| Fail::usage("structured needs --eps"))?;
            let l = a.lipschitz.ok_or_else(|| Fail::usage("structured needs --lipschitz"))?;
            let limits = Limits {
                cover_size: a.cover_limit,
                rule: a.rule.map(|r| match r {
                    RuleName::MostWins => SelectionRule::MostWins,
                    RuleName::Yatracos => SelectionRule::Yatracos,
                    RuleName::BinUnions => SelectionRule::BinUnions,
                }),
            };
            let e = estimate_structured(&samples, &g, l, eps, a.delta, limits)?;
            let mut warnings = e.warnings.clone();
            if let Some(b) = a.b.filter(|&b| b != e.quote.b) {
                warnings.push(format!("--b {b} ignored; the quote fixes b = {}", e.quote.b));
            }
            let winner_score = e.selection.scores[e.selection.winner];
            let report = json!({
                "method": "structured",
                "n": samples.len(),
                "quote": e.quote,
                "warnings": warnings,
                "selection": {
                    "rule": e.selection.rule,
                    "winner": e.selection.winner,
                    "candidates": e.selection.candidates,
                    "class_size": e.selection.class_size,
                    "winner_score": winner_score,
                },
                "cover_size": e.cover_size,
                "steps": e.disintegration.to_labels(),
            });
            (e.density, report)
        }
    };
    run.json("estimate.json", &TensorFile::encode(density.tensor()))?;
    run.json("report.json", &report)?;
    Ok(pretty(&report))
}

fn rate(cli: &Cli, a: &RateArgs, run: &mut Run) -> Result<String, Fail> {
    let text = read(&a.config)?;
    let mut config: RateConfig = if a.config.extension().is_some_and(|e| e == "toml") {
        toml::from_str(&text).map_err(|e| Fail::usage(format!("{}: {e}", a.config.display())))?
    } else {
        serde_json::from_str(&text).map_err(|e| Fail::usage(format!("{}: {e}", a.config.display())))?
    };
    if cli.seed != 0 {
        config.seed = cli.seed;
    }
    let report = run_rate_experiment(&config)?;
    let mut csv = Vec::new();
    report.write_csv(&mut csv)?;
    run.bytes("rate.csv", &csv)?;
    match cli.format {
        Format::Json => run.json("summary.json", &report)?,
        Format::Csv => run.csv("summary.csv", &report.cells)?,
    }
    let mut out = format!("{:<12} {:>8} {:>12} {:>12}\n", "method", "n", "median", "mean");
    for c in &report.cells {
        out.push_str(&format!("{:<12} {:>8} {:>12.6} {:>12.6}\n", c.method, c.n, c.median, c.mean));
    }
    for (m, s) in &report.slopes {
        out.push_str(&format!("slope {m}: {}\n", s.map_or("n/a".into(), |s| format!("{s:.3}"))));
    }
    Ok(out)
}
