use proptest::prelude::*;
use resil_core::estimator::{estimate_empirical, estimate_factorized};
use resil_core::graph::{max_clique, DEFAULT_CLIQUE_BUDGET};
use resil_core::resilience::{
    bound_constructive, normalize, resilience_estimate, resilience_exact, validate, Mode,
    Strategy as Construct, DEFAULT_EXACT_BUDGET,
};
use resil_core::tensor::{sample, ProbabilityTensor, SampleSet, TensorFile};
use resil_core::verify::random_pre_disintegration;
use resil_core::{Graph, VertexSet};
use resil_testkit::{brute_force_resilience, random_markov_tensor, random_tensor, rng};

fn graph(max_d: usize) -> impl Strategy<Value = Graph> {
    (1..=max_d).prop_flat_map(|d| {
        proptest::collection::vec(any::<bool>(), d * (d - 1) / 2).prop_map(move |bits| {
            let mut edges = Vec::new();
            let mut k = 0;
            for u in 0..d {
                for v in u + 1..d {
                    if bits[k] {
                        edges.push((u, v));
                    }
                    k += 1;
                }
            }
            Graph::from_edges(d, &edges).unwrap()
        })
    })
}

fn subset(d: usize, mask: u64) -> VertexSet {
    VertexSet::from_u64(mask & ((1u64 << d) - 1))
}

fn bfs(g: &Graph, s: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.d()];
    dist[s] = Some(0);
    let mut queue = std::collections::VecDeque::from([s]);
    while let Some(u) = queue.pop_front() {
        for v in 0..g.d() {
            if g.has_edge(u, v) && dist[v].is_none() {
                dist[v] = Some(dist[u].unwrap() + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

fn relabel(g: &Graph, perm: &[usize]) -> Graph {
    let edges: Vec<_> = g.edges().into_iter().map(|(u, v)| (perm[u], perm[v])).collect();
    Graph::from_edges(g.d(), &edges).unwrap()
}

fn permutation(d: usize, seed: u64) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut p: Vec<usize> = (0..d).collect();
    p.shuffle(&mut rng(seed));
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn removal_partitions_vertices(g in graph(10), mask in any::<u64>()) {
        let s = subset(g.d(), mask);
        let (rest, map) = g.remove_vertices(&s);
        prop_assert_eq!(rest.d() + s.len(), g.d());
        let mut seen = s.clone();
        for c in rest.components() {
            for v in c.iter() {
                prop_assert!(seen.insert(map[v]));
            }
        }
        prop_assert_eq!(seen, g.vertices());
        for (a, b) in rest.edges() {
            prop_assert!(g.has_edge(map[a], map[b]));
        }
    }

    #[test]
    fn power_matches_bfs(g in graph(12), t in 1usize..5) {
        let p = g.power(t).unwrap();
        for u in 0..g.d() {
            let dist = bfs(&g, u);
            for (v, dv) in dist.iter().enumerate() {
                let near = u != v && dv.is_some_and(|k| k <= t);
                prop_assert_eq!(p.has_edge(u, v), near);
            }
        }
    }

    #[test]
    fn union_adds_components(a in graph(6), b in graph(6)) {
        let u = Graph::disjoint_union(&[a.clone(), b.clone()]).unwrap();
        prop_assert_eq!(u.d(), a.d() + b.d());
        prop_assert_eq!(u.edge_count(), a.edge_count() + b.edge_count());
        prop_assert_eq!(u.components().len(), a.components().len() + b.components().len());
        let r = resilience_exact(&u, DEFAULT_EXACT_BUDGET).upper_len();
        let ra = resilience_exact(&a, DEFAULT_EXACT_BUDGET).upper_len();
        let rb = resilience_exact(&b, DEFAULT_EXACT_BUDGET).upper_len();
        prop_assert_eq!(r, ra.max(rb));
    }

    #[test]
    fn clique_is_valid_and_maximum(g in graph(9)) {
        let c = max_clique(&g, DEFAULT_CLIQUE_BUDGET).clique;
        prop_assert!(g.is_clique(&c));
        let mut best = 0;
        for mask in 0u64..1 << g.d() {
            let s = VertexSet::from_u64(mask);
            if g.is_clique(&s) {
                best = best.max(s.len());
            }
        }
        prop_assert_eq!(c.len(), best);
    }

    #[test]
    fn normalization_yields_shorter_disintegration(g in graph(9), seed in any::<u64>()) {
        let pre = random_pre_disintegration(&g, &mut rng(seed));
        prop_assert!(validate(&g, &pre, Mode::PreDisintegration).ok());
        let n = normalize(&g, &pre).unwrap();
        prop_assert!(validate(&g, n.steps(), Mode::Disintegration).ok());
        prop_assert!(n.len() <= pre.iter().filter(|s| !s.is_empty()).count());
        prop_assert!(n.len() >= brute_force_resilience(&g));
    }

    #[test]
    fn constructive_bounds_validate(g in graph(10)) {
        let r = resilience_exact(&g, DEFAULT_EXACT_BUDGET).upper_len();
        for s in [Construct::Greedy, Construct::Separator, Construct::Union] {
            let b = bound_constructive(&g, &s).unwrap();
            prop_assert!(validate(&g, b.disintegration.steps(), Mode::Disintegration).ok());
            prop_assert!(b.len() >= r);
        }
        if g.is_forest() {
            let b = bound_constructive(&g, &Construct::TreeCentroid).unwrap();
            prop_assert!(b.len() as f64 <= b.bound);
        }
        let e = resilience_estimate(&g);
        prop_assert!(e.lower <= r && r <= e.upper_len());
    }

    #[test]
    fn relabelling_preserves_resilience(g in graph(8), seed in any::<u64>()) {
        let h = relabel(&g, &permutation(g.d(), seed));
        let r = |g: &Graph| resilience_exact(g, DEFAULT_EXACT_BUDGET).upper_len();
        prop_assert_eq!(r(&g), r(&h));
        let w = |g: &Graph| max_clique(g, DEFAULT_CLIQUE_BUDGET).clique.len();
        prop_assert_eq!(w(&g), w(&h));
    }

    #[test]
    fn tensor_operations_stay_normalized(d in 1usize..4, b in 1usize..5, seed in any::<u64>(), keep in any::<u64>()) {
        let mut r = rng(seed);
        let t = random_tensor(d, b, &mut r);
        let s = subset(d, keep);
        prop_assert!((t.marginalize(&s).unwrap().sum() - 1.0).abs() < 1e-12);
        let c = t.condition(0, b - 1).unwrap();
        prop_assert!((c.sum() - 1.0).abs() < 1e-12);
        let p = t.product(&random_tensor(1, b, &mut r)).unwrap();
        prop_assert!((p.sum() - 1.0).abs() < 1e-12);
        prop_assert_eq!(p.d(), d + 1);
    }

    #[test]
    fn tensor_file_roundtrip(d in 0usize..4, b in 1usize..5, seed in any::<u64>()) {
        let t = random_tensor(d, b, &mut rng(seed));
        let json = serde_json::to_string(&TensorFile::encode(&t)).unwrap();
        let back: TensorFile = serde_json::from_str(&json).unwrap();
        let u = back.decode().unwrap();
        prop_assert!(t.data().iter().zip(u.data()).all(|(x, y)| x.to_bits() == y.to_bits()));
        prop_assert_eq!((u.d(), u.b()), (d, b));
    }

    #[test]
    fn samples_csv_roundtrip(d in 1usize..4, n in 0usize..50, seed in any::<u64>()) {
        let t = random_tensor(d, 3, &mut rng(seed));
        let s = sample(&t, seed, n);
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let back = SampleSet::read_csv(&buf[..]).unwrap();
        prop_assert_eq!(back.len(), n);
        for (a, b) in s.rows().zip(back.rows()) {
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn marginals_follow_permutation(seed in any::<u64>()) {
        // Swapping two axes swaps the corresponding marginals.
        let t = random_tensor(2, 3, &mut rng(seed));
        let swapped: Vec<f64> = (0..9).map(|f| t.data()[(f % 3) * 3 + f / 3]).collect();
        let s = ProbabilityTensor::new(2, 3, swapped).unwrap();
        let m = |t: &ProbabilityTensor, v| t.marginalize(&VertexSet::singleton(v)).unwrap();
        prop_assert!(m(&t, 0).l1(&m(&s, 1)).unwrap() < 1e-14);
        prop_assert!(m(&t, 1).l1(&m(&s, 0)).unwrap() < 1e-14);
    }

    #[test]
    fn estimators_are_deterministic(g in graph(4), seed in any::<u64>()) {
        let mut r = rng(seed);
        let t = random_markov_tensor(&g, 2, 1.0, &mut r);
        let (s1, s2) = (sample(&t, seed, 100), sample(&t, seed, 100));
        prop_assert_eq!(&s1, &s2);
        let dis = resilience_exact(&g, DEFAULT_EXACT_BUDGET).upper;
        let f1 = estimate_factorized(&s1, &g, &dis, 2).unwrap();
        let f2 = estimate_factorized(&s2, &g, &dis, 2).unwrap();
        prop_assert_eq!(f1.tensor(), f2.tensor());
        let e = estimate_empirical(&s1, g.d(), 2).unwrap();
        prop_assert!((e.tensor().sum() - 1.0).abs() < 1e-12);
        prop_assert!((f1.tensor().sum() - 1.0).abs() < 1e-12);
    }
}
