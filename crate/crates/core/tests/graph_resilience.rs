use resil_core::graph::{enumerate_graphs, make_family, max_clique, DEFAULT_CLIQUE_BUDGET};
use resil_core::resilience::{
    bound_constructive, normalize, resilience_estimate, resilience_exact, validate, Disintegration,
    Mode, Strategy, DEFAULT_EXACT_BUDGET,
};
use resil_core::{FamilySpec, Graph, VertexSet};
use resil_testkit::{all_graphs, brute_force_resilience, gnp, rng};

fn exact(g: &Graph) -> usize {
    let c = resilience_exact(g, DEFAULT_EXACT_BUDGET);
    assert!(c.exact);
    c.check(g).unwrap();
    c.upper_len()
}

fn fam(spec: FamilySpec) -> Graph {
    make_family(&spec).unwrap()
}

fn sets(g: &Graph, steps: &[&[usize]]) -> Vec<VertexSet> {
    steps
        .iter()
        .map(|s| VertexSet::from_labels(s, g.d()).unwrap())
        .collect()
}

fn cycle_plus_path() -> Graph {
    Graph::disjoint_union(&[Graph::cycle(4).unwrap(), fam(FamilySpec::Path { d: 3 })]).unwrap()
}

#[test]
fn family_examples() {
    let p4 = fam(FamilySpec::Path { d: 4 });
    assert_eq!(p4.edges(), vec![(0, 1), (1, 2), (2, 3)]);
    assert_eq!(fam(FamilySpec::Complete { d: 1 }).edge_count(), 0);
    assert_eq!(fam(FamilySpec::Grid { rows: 2, cols: 2 }).edge_count(), 6);
    assert_eq!(p4.components(), vec![VertexSet::full(4)]);
    assert_eq!(fam(FamilySpec::Empty { d: 3 }).components().len(), 3);
    let comps = cycle_plus_path().components();
    assert_eq!(comps, vec![VertexSet::from_u64(0b1111), VertexSet::from_u64(0b111_0000)]);
}

#[test]
fn removal_and_power_examples() {
    let p4 = fam(FamilySpec::Path { d: 4 });
    let (rest, map) = p4.remove_vertices(&VertexSet::singleton(1));
    assert_eq!(map, vec![0, 2, 3]);
    assert_eq!(rest.components().len(), 2);
    assert_eq!(p4.remove_vertices(&VertexSet::new()).0, p4);
    let k4 = fam(FamilySpec::Complete { d: 4 });
    assert_eq!(k4.remove_vertices(&VertexSet::singleton(0)).0, fam(FamilySpec::Complete { d: 3 }));
    assert_eq!(p4.power(1).unwrap(), p4);
    assert!(fam(FamilySpec::Path { d: 3 }).power(2).unwrap().is_complete());
    assert!(fam(FamilySpec::Grid { rows: 3, cols: 3 }).power(2).unwrap().is_complete());
}

#[test]
fn union_and_clique_examples() {
    let k2 = fam(FamilySpec::Complete { d: 2 });
    let u = Graph::disjoint_union(&[k2.clone(), k2.clone()]).unwrap();
    assert_eq!((u.d(), u.edge_count(), u.components().len()), (4, 2, 2));
    assert_eq!(Graph::disjoint_union(std::slice::from_ref(&k2)).unwrap(), k2);
    let labeled = Graph::from_labeled_edges(7, &[[1, 2], [2, 3], [3, 4], [4, 1], [5, 6], [6, 7]]).unwrap();
    assert_eq!(cycle_plus_path(), labeled);
    let w = |g: &Graph| max_clique(g, DEFAULT_CLIQUE_BUDGET).clique.len();
    assert_eq!(w(&fam(FamilySpec::Complete { d: 5 })), 5);
    assert_eq!(w(&fam(FamilySpec::Path { d: 4 })), 2);
    assert_eq!(w(&fam(FamilySpec::Grid { rows: 2, cols: 2 })), 4);
    assert_eq!(w(&fam(FamilySpec::Grid { rows: 3, cols: 3 })), 4);
    assert_eq!(w(&fam(FamilySpec::Empty { d: 4 })), 1);
}

#[test]
fn enumeration_counts() {
    assert_eq!(enumerate_graphs(1, 5).unwrap().count(), 1);
    assert_eq!(enumerate_graphs(3, 5).unwrap().count(), 8);
    assert_eq!(enumerate_graphs(4, 5).unwrap().count(), 64);
    assert!(enumerate_graphs(6, 5).is_err());
}

#[test]
fn validation_examples() {
    let g = cycle_plus_path();
    assert!(validate(&g, &sets(&g, &[&[1, 6], &[3, 5, 7], &[2, 4]]), Mode::Disintegration).ok());
    let p2 = fam(FamilySpec::Path { d: 2 });
    assert!(!validate(&p2, &sets(&p2, &[&[1, 2]]), Mode::Disintegration).ok());
    let p4 = fam(FamilySpec::Path { d: 4 });
    assert!(validate(&p4, &sets(&p4, &[&[2], &[1, 3], &[4]]), Mode::Disintegration).ok());
}

#[test]
fn normalization_examples() {
    let p4 = fam(FamilySpec::Path { d: 4 });
    let good = sets(&p4, &[&[2], &[1, 3], &[4]]);
    assert_eq!(normalize(&p4, &good).unwrap().steps(), &good[..]);
    let e3 = fam(FamilySpec::Empty { d: 3 });
    let n = normalize(&e3, &sets(&e3, &[&[1], &[2], &[3]])).unwrap();
    assert_eq!(n.to_labels(), vec![vec![1, 2, 3]]);
    let k2 = fam(FamilySpec::Complete { d: 2 });
    let n = normalize(&k2, &sets(&k2, &[&[], &[1], &[2]])).unwrap();
    assert_eq!(n.to_labels(), vec![vec![1], vec![2]]);
}

#[test]
fn exact_values() {
    for d in 1..=6 {
        assert_eq!(exact(&fam(FamilySpec::Complete { d })), d);
    }
    for d in 1..=8 {
        assert_eq!(exact(&fam(FamilySpec::Empty { d })), 1);
    }
    for d in 2..=8 {
        assert_eq!(exact(&fam(FamilySpec::Star { d })), 2);
    }
    assert_eq!(exact(&fam(FamilySpec::Path { d: 4 })), 3);
    assert_eq!(exact(&cycle_plus_path()), 3);
    assert_eq!(exact(&Graph::empty(0)), 0);
}

#[test]
fn counterexample_shapes() {
    for d in 2..=8 {
        let s = fam(FamilySpec::Star { d });
        assert_eq!((exact(&s), s.max_degree()), (2, d - 1));
    }
    for d in 2..=6 {
        let k = fam(FamilySpec::Complete { d });
        assert_eq!((exact(&k), k.diameter()), (d, Some(1)));
    }
    for d in [4usize, 8, 16] {
        let r = exact(&fam(FamilySpec::Path { d }));
        assert!(r as f64 >= (d as f64).log2(), "path {d}: r = {r}");
    }
}

#[test]
fn oracle_exhaustive_small() {
    let mut n = 0;
    for d in 0..=5 {
        for g in all_graphs(d) {
            let r = exact(&g);
            assert_eq!(r, brute_force_resilience(&g), "{:?}", g.edges());
            assert_eq!(r == d, g.is_complete());
            if d > 0 {
                assert_eq!(r == 1, g.edge_count() == 0);
            }
            n += 1;
        }
    }
    assert_eq!(n, 1 + 1 + 2 + 8 + 64 + 1024);
}

#[test]
fn oracle_random_medium() {
    let mut r = rng(11);
    for i in 0..300 {
        let d = 6 + i % 3;
        let p = [0.2, 0.4, 0.6, 0.8][i % 4];
        let g = gnp(d, p, &mut r);
        assert_eq!(exact(&g), brute_force_resilience(&g), "{:?}", g.edges());
    }
}

#[test]
fn estimate_matches_exact_small() {
    let mut r = rng(12);
    for i in 0..100 {
        let g = gnp(3 + i % 6, 0.5, &mut r);
        let c = resilience_estimate(&g);
        assert!(c.exact);
        c.check(&g).unwrap();
        assert_eq!(c.upper_len(), brute_force_resilience(&g));
    }
    let k10 = fam(FamilySpec::Complete { d: 10 });
    let c = resilience_estimate(&k10);
    assert_eq!((c.lower, c.upper_len()), (10, 10));
}

#[test]
fn grid8_bounds() {
    let g = fam(FamilySpec::Grid { rows: 8, cols: 8 });
    let c = resilience_estimate(&g);
    c.check(&g).unwrap();
    let gp = bound_constructive(&g, &Strategy::GridPower { rows: 8, cols: 8, t: 1, s: None }).unwrap();
    assert!(c.lower >= 4);
    assert!(c.upper_len() <= gp.len());
}

#[test]
fn constructive_examples() {
    let s6 = fam(FamilySpec::Star { d: 6 });
    let b = bound_constructive(&s6, &Strategy::Star).unwrap();
    assert_eq!(b.disintegration.to_labels(), vec![vec![1], vec![2, 3, 4, 5, 6]]);
    let t7 = fam(FamilySpec::KaryTree { k: 2, depth: 3 });
    let b = bound_constructive(&t7, &Strategy::KaryTree { k: 2, root: Some(1) }).unwrap();
    assert_eq!(b.disintegration.to_labels(), vec![vec![1], vec![2, 3], vec![4, 5, 6, 7]]);
    let p3 = fam(FamilySpec::Path { d: 3 });
    let b = bound_constructive(&p3, &Strategy::PathPower { t: 1, s: Some(2) }).unwrap();
    assert!(b.len() <= 2);
    let p7 = fam(FamilySpec::Path { d: 7 });
    let b = bound_constructive(&p7, &Strategy::TreeCentroid).unwrap();
    assert!(b.len() <= 3 && b.len() == exact(&p7));
}

#[test]
fn disintegration_label_roundtrip() {
    let g = cycle_plus_path();
    let d = Disintegration::from_labels(&g, &[vec![1, 6], vec![3, 5, 7], vec![2, 4]]).unwrap();
    assert_eq!(d.len(), 3);
    assert_eq!(d.to_labels(), vec![vec![1, 6], vec![3, 5, 7], vec![2, 4]]);
    assert!(Disintegration::from_labels(&g, &[vec![1, 2, 3, 4, 5, 6, 7]]).is_err());
}
