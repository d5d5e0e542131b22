use rand::Rng;
use resil_core::graph::make_family;
use resil_core::synth::{gibbs_tensor, EdgeKind, EdgePotential, GibbsSpec};
use resil_core::tensor::{
    check_pairwise_markov, check_separation, discretize, sample, tv_vs_density, DensityOracle,
    HistogramDensity, ProbabilityTensor, Separation,
};
use resil_core::{FamilySpec, Graph, VertexSet};
use resil_testkit::{ci_violation, coords, l1, max_difference_quotient, random_tensor, rng};

fn t(d: usize, b: usize, data: &[f64]) -> ProbabilityTensor {
    ProbabilityTensor::new(d, b, data.to_vec()).unwrap()
}

fn labels(xs: &[usize], d: usize) -> VertexSet {
    VertexSet::from_labels(xs, d).unwrap()
}

fn sep(d: usize, v0: &[usize], v1: &[usize], v2: &[usize]) -> Separation {
    Separation::new(d, labels(v0, d), labels(v1, d), labels(v2, d)).unwrap()
}

#[test]
fn histogram_examples() {
    let u = HistogramDensity::from(ProbabilityTensor::uniform(2, 3).unwrap());
    for x in [[0.1, 0.2], [0.9, 0.5], [0.4, 0.99]] {
        assert!((u.eval(&x) - 1.0).abs() < 1e-12);
    }
    let h = HistogramDensity::from(t(1, 2, &[0.25, 0.75]));
    assert_eq!((h.eval(&[0.2]), h.eval(&[0.6])), (0.5, 1.5));
    let a = t(1, 2, &[1.0, 0.0]);
    let b = t(1, 2, &[0.0, 1.0]);
    assert_eq!(a.l1(&b).unwrap(), 2.0);
    assert_eq!(a.l1(&a).unwrap(), 0.0);
}

#[test]
fn isometry_on_random_pairs() {
    let mut r = rng(1);
    for i in 0..1000 {
        let (d, b) = (1 + i % 3, 2 + i % 3);
        let (p, q) = (random_tensor(d, b, &mut r), random_tensor(d, b, &mut r));
        let (hp, hq) = (HistogramDensity::from(p.clone()), HistogramDensity::from(q.clone()));
        let direct = l1(p.data(), q.data());
        assert!((hp.l1(&hq).unwrap() - direct).abs() < 1e-12);
        // L¹ of the step functions by summing over cells of volume b^-d.
        let cells = b.pow(d as u32);
        let by_cells: f64 = (0..cells)
            .map(|f| {
                let x: Vec<f64> = coords(f, d, b).iter().map(|&k| (k as f64 + 0.5) / b as f64).collect();
                (hp.eval(&x) - hq.eval(&x)).abs() / cells as f64
            })
            .sum();
        assert!((by_cells - direct).abs() < 1e-12);
    }
}

#[test]
fn product_bound_on_random_factors() {
    let mut r = rng(2);
    for i in 0..1000 {
        let k = 1 + i % 4;
        let b = 2 + i % 2;
        let mu: Vec<_> = (0..k).map(|_| random_tensor(1, b, &mut r)).collect();
        let nu: Vec<_> = (0..k).map(|_| random_tensor(1, b, &mut r)).collect();
        let prod = |xs: &[ProbabilityTensor]| {
            xs[1..].iter().fold(xs[0].clone(), |acc, x| acc.product(x).unwrap())
        };
        let lhs = prod(&mu).l1(&prod(&nu)).unwrap();
        let rhs: f64 = mu.iter().zip(&nu).map(|(a, b)| a.l1(b).unwrap()).sum();
        assert!(lhs <= rhs + 1e-12, "{lhs} > {rhs}");
    }
}

#[test]
fn operation_examples() {
    let u = ProbabilityTensor::uniform(3, 2).unwrap();
    assert_eq!(u.marginalize(&labels(&[1, 3], 3)).unwrap(), ProbabilityTensor::uniform(2, 2).unwrap());
    let m = t(2, 2, &[0.1, 0.2, 0.3, 0.4]).marginalize(&labels(&[1], 2)).unwrap();
    assert!(l1(m.data(), &[0.3, 0.7]) < 1e-15);
    let mut r = rng(3);
    let (a, b) = (random_tensor(1, 3, &mut r), random_tensor(2, 3, &mut r));
    let ab = a.product(&b).unwrap();
    let back = ab
        .marginalize(&labels(&[1], 3))
        .unwrap()
        .product(&ab.marginalize(&labels(&[2, 3], 3)).unwrap())
        .unwrap();
    assert!(l1(back.data(), ab.data()) < 1e-14);
    assert!((ab.sum() - 1.0).abs() < 1e-12);
}

#[test]
fn discretization_examples() {
    let lin = DensityOracle::new(1, 2.0, |x| 2.0 * x[0]);
    let p = discretize(&lin, 2).unwrap();
    assert!(l1(p.data(), &[0.25, 0.75]) < 1e-15);
    let q = tv_vs_density(&p.clone().into(), &lin, 512).unwrap();
    // ∫|2x − p̃| over [0,1] = 0.25 in closed form.
    assert!((q.value - 0.25).abs() <= 1e-3);
    assert!(q.value <= 2.0 / 2.0);
    for b in [1, 3, 7] {
        let u = discretize(&DensityOracle::uniform(2), b).unwrap();
        assert_eq!(u, ProbabilityTensor::uniform(2, b).unwrap());
        assert!(tv_vs_density(&u.into(), &DensityOracle::uniform(2), b).unwrap().value < 1e-12);
    }
}

#[test]
fn markov_examples() {
    let e2 = Graph::empty(2);
    let mut r = rng(4);
    let (a, b) = (random_tensor(1, 3, &mut r), random_tensor(1, 3, &mut r));
    assert!(check_pairwise_markov(&a.product(&b).unwrap(), &e2, 1e-9).unwrap().pass);
    let corr = t(2, 2, &[0.4, 0.1, 0.1, 0.4]);
    assert!(!check_pairwise_markov(&corr, &e2, 1e-9).unwrap().pass);
    assert!(check_separation(&a.product(&b).unwrap(), &sep(2, &[], &[1], &[2]), 1e-12).unwrap().pass);
}

fn bilinear(g: Graph, amp: f64) -> GibbsSpec {
    let edges = g
        .edges()
        .into_iter()
        .map(|(u, v)| EdgePotential {
            u: u + 1,
            v: v + 1,
            kind: EdgeKind::Bilinear,
            amplitude: amp,
        })
        .collect();
    GibbsSpec {
        graph: g,
        edges,
        vertices: vec![],
    }
}

#[test]
fn gibbs_examples() {
    let (u, oracle) = gibbs_tensor(&GibbsSpec::flat(Graph::empty(2)), 4).unwrap();
    assert_eq!(oracle.lipschitz(), 0.0);
    assert!(l1(u.data(), ProbabilityTensor::uniform(2, 4).unwrap().data()) < 1e-12);

    let k2 = make_family(&FamilySpec::Complete { d: 2 }).unwrap();
    let (t2, _) = gibbs_tensor(&bilinear(k2.clone(), 2.0), 4).unwrap();
    assert!(!check_pairwise_markov(&t2, &Graph::empty(2), 1e-9).unwrap().pass);
    assert!(check_pairwise_markov(&t2, &k2, 1e-9).unwrap().pass);

    let chain = make_family(&FamilySpec::Path { d: 3 }).unwrap();
    let (tc, _) = gibbs_tensor(&bilinear(chain, 2.0), 4).unwrap();
    assert!(check_separation(&tc, &sep(3, &[2], &[1], &[3]), 1e-9).unwrap().pass);
    assert!(ci_violation(&tc, &[1], &[0], &[2]) < 1e-12);

    let tri = make_family(&FamilySpec::Complete { d: 3 }).unwrap();
    let (tt, _) = gibbs_tensor(&bilinear(tri, 2.0), 4).unwrap();
    assert!(!check_separation(&tt, &sep(3, &[2], &[1], &[3]), 1e-9).unwrap().pass);
    assert!(ci_violation(&tt, &[1], &[0], &[2]) > 1e-6);
}

fn random_gibbs(i: usize, r: &mut impl Rng) -> GibbsSpec {
    let d = 1 + i % 3;
    let g = match i % 4 {
        0 => Graph::empty(d),
        1 => make_family(&FamilySpec::Path { d }).unwrap(),
        2 => make_family(&FamilySpec::Complete { d }).unwrap(),
        _ => make_family(&FamilySpec::Star { d }).unwrap(),
    };
    GibbsSpec::random(g, r.random_range(0.2..1.5), r)
}

#[test]
fn bias_bound_and_markov_preservation() {
    let mut r = rng(5);
    for i in 0..60 {
        let spec = random_gibbs(i, &mut r);
        let d = spec.graph.d();
        for b in [2usize, 4, 8, 16] {
            let (p, oracle) = gibbs_tensor(&spec, b).unwrap();
            let quad_b = if d == 3 { 64 } else { 256 };
            let q = tv_vs_density(&p.clone().into(), &oracle, quad_b).unwrap();
            let bound = (d as f64).sqrt() * oracle.lipschitz() / b as f64;
            assert!(q.value <= bound + q.slack + 1e-12, "i={i} b={b}: {} > {bound}", q.value);
            assert!(check_pairwise_markov(&p, &spec.graph, 1e-9).unwrap().pass);
        }
    }
}

#[test]
fn lipschitz_dominates_difference_quotients() {
    let mut r = rng(6);
    for i in 0..12 {
        let spec = random_gibbs(i, &mut r);
        let (_, oracle) = gibbs_tensor(&spec, 2).unwrap();
        let q = max_difference_quotient(&oracle, 100_000, &mut r);
        assert!(q <= oracle.lipschitz() + 1e-9, "i={i}: {q} > {}", oracle.lipschitz());
    }
}

#[test]
fn sampling_examples() {
    let pm = ProbabilityTensor::point_mass(2, 3, &[2, 0]).unwrap();
    let s = sample(&pm, 1, 500);
    assert!(s.bins(3).iter().all(|&f| f == 6));
    let u = ProbabilityTensor::uniform(2, 2).unwrap();
    let n = 100_000;
    let counts = sample(&u, 2, n).counts(2);
    let sigma = (n as f64 * 0.25 * 0.75).sqrt();
    for c in counts {
        assert!((c as f64 - n as f64 / 4.0).abs() <= 4.0 * sigma);
    }
    assert_eq!(sample(&u, 9, 1000), sample(&u, 9, 1000));
}

#[test]
fn sample_csv_roundtrip() {
    let mut r = rng(7);
    let t = random_tensor(3, 4, &mut r);
    let s = sample(&t, 3, 200);
    let mut buf = Vec::new();
    s.write_csv(&mut buf).unwrap();
    let back = resil_core::tensor::SampleSet::read_csv(&buf[..]).unwrap();
    assert_eq!(back.len(), 200);
    assert_eq!(back.d(), 3);
    for (a, b) in s.rows().zip(back.rows()) {
        assert_eq!(a, b);
    }
}
