use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use resil_core::cover::{build_cover, DEFAULT_SIZE_LIMIT};
use resil_core::estimator::{select, SelectionRule};
use resil_core::exec;
use resil_core::graph::make_family;
use resil_core::resilience::resilience_exact;
use resil_core::synth::{run_rate_experiment, GraphSource, Method, RateConfig, TruthSource};
use resil_core::tensor::{sample, HistogramDensity, ProbabilityTensor};
use resil_core::verify::{verify_lemmas, LemmaConfig};
use resil_core::{FamilySpec, Graph};

/// Runs `f` once through the default path and once pinned sequential.
fn both<R>(c: &mut Criterion, group: &str, mut f: impl FnMut() -> R) {
    let mut g = c.benchmark_group(group);
    g.sample_size(10);
    g.bench_function(BenchmarkId::new("parallel", exec::is_parallel()), |b| b.iter(|| black_box(f())));
    g.bench_function("sequential", |b| b.iter(|| exec::sequential(|| black_box(f()))));
    g.finish();
}

fn selection(c: &mut Criterion) {
    let g = Graph::empty(2);
    let dis = resilience_exact(&g, 1 << 20).upper;
    let cover = build_cover(&g, 2, 0.3 / 14.0, &dis, DEFAULT_SIZE_LIMIT).unwrap();
    let cands: Vec<HistogramDensity> = cover.elements.into_iter().map(Into::into).collect();
    let s = sample(&ProbabilityTensor::uniform(2, 2).unwrap(), 1, 50_000);
    both(c, "select_bin_unions_140k", || select(&cands, &s, SelectionRule::BinUnions).unwrap().winner);
    let few = &cands[..1500];
    both(c, "select_yatracos_1500", || select(few, &s, SelectionRule::Yatracos).unwrap().winner);
}

fn nearest(c: &mut Criterion) {
    let g = make_family(&FamilySpec::Path { d: 3 }).unwrap();
    let dis = resilience_exact(&g, 1 << 20).upper;
    let cover = build_cover(&g, 2, 1.0, &dis, DEFAULT_SIZE_LIMIT).unwrap();
    let t = ProbabilityTensor::uniform(3, 2).unwrap();
    both(c, "cover_nearest_path3", || cover.nearest(&t).unwrap());
}

fn rate(c: &mut Criterion) {
    let cfg = RateConfig {
        graph: GraphSource::Family(FamilySpec::Path { d: 3 }),
        truth: TruthSource::Random { a_max: 1.0 },
        methods: vec![Method::Empirical, Method::Factorized],
        n_grid: vec![1000, 10_000],
        repetitions: 16,
        b: 4,
        seed: 1,
        disintegration: None,
    };
    both(c, "rate_chain3", || run_rate_experiment(&cfg).unwrap().cells.len());
}

fn lemmas(c: &mut Criterion) {
    let cfg = LemmaConfig {
        max_d: 8,
        trials: 100,
        seed: 7,
    };
    both(c, "verify_lemmas_d8", || verify_lemmas(&cfg).unwrap().pass);
}

criterion_group!(benches, selection, nearest, rate, lemmas);
criterion_main!(benches);
