//! Independent oracles and fixtures for the test suites.
//!
//! Nothing here calls into the code it is used to check: resilience is
//! computed straight from the definition, tensor indices are recomputed
//! from scratch, and conditional independence is tested on explicit
//! marginal tables.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use resil_core::tensor::{DensityOracle, HistogramDensity, ProbabilityTensor, SampleSet};
use resil_core::Graph;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Adjacency bitmasks, `adj[v]` bit `u` set iff `u ~ v`.
fn masks(g: &Graph) -> Vec<u64> {
    let mut adj = vec![0u64; g.d()];
    for (u, v) in g.edges() {
        adj[u] |= 1 << v;
        adj[v] |= 1 << u;
    }
    adj
}

fn components(adj: &[u64], mut rest: u64) -> Vec<u64> {
    let mut out = Vec::new();
    while rest != 0 {
        let mut comp = rest & rest.wrapping_neg();
        loop {
            let mut grown = comp;
            for (v, a) in adj.iter().enumerate() {
                if comp >> v & 1 == 1 {
                    grown |= a & rest;
                }
            }
            if grown == comp {
                break;
            }
            comp = grown;
        }
        out.push(comp);
        rest &= !comp;
    }
    out
}

fn bits(m: u64) -> Vec<usize> {
    (0..64).filter(|&v| m >> v & 1 == 1).collect()
}

/// Resilience from the definition: every step picks one vertex in every
/// residual component, all combinations are tried, no bounds are used.
/// Memoized on the residual set only. Meant for `d ≤ 8`.
pub fn brute_force_resilience(g: &Graph) -> usize {
    assert!(g.d() <= 16, "brute force is for small graphs");
    let adj = masks(g);
    let mut memo = HashMap::new();
    brute(&adj, (1u64 << g.d()) - 1, &mut memo)
}

fn brute(adj: &[u64], rest: u64, memo: &mut HashMap<u64, usize>) -> usize {
    if rest == 0 {
        return 0;
    }
    if let Some(&r) = memo.get(&rest) {
        return r;
    }
    let comps: Vec<Vec<usize>> = components(adj, rest).into_iter().map(bits).collect();
    let mut pick = vec![0usize; comps.len()];
    let mut best = usize::MAX;
    loop {
        let step: u64 = comps.iter().zip(&pick).map(|(c, &i)| 1u64 << c[i]).sum();
        best = best.min(1 + brute(adj, rest & !step, memo));
        let mut k = 0;
        while k < comps.len() {
            pick[k] += 1;
            if pick[k] < comps[k].len() {
                break;
            }
            pick[k] = 0;
            k += 1;
        }
        if k == comps.len() {
            break;
        }
    }
    memo.insert(rest, best);
    best
}

/// Every labeled graph on `d` vertices, one per edge subset.
pub fn all_graphs(d: usize) -> impl Iterator<Item = Graph> {
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|u| (u + 1..d).map(move |v| (u, v))).collect();
    let m = pairs.len();
    (0u64..1 << m).map(move |mask| {
        let edges: Vec<_> = (0..m).filter(|&i| mask >> i & 1 == 1).map(|i| pairs[i]).collect();
        Graph::from_edges(d, &edges).unwrap()
    })
}

/// Erdős–Rényi graph, drawn independently of the library's generators.
pub fn gnp(d: usize, p: f64, rng: &mut impl Rng) -> Graph {
    let mut edges = Vec::new();
    for u in 0..d {
        for v in u + 1..d {
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(d, &edges).unwrap()
}

/// Row-major cell coordinates, axis 1 slowest.
pub fn coords(mut flat: usize, d: usize, b: usize) -> Vec<usize> {
    let mut x = vec![0; d];
    for i in (0..d).rev() {
        x[i] = flat % b;
        flat /= b;
    }
    x
}

/// A strictly positive tensor `∝ Π_edges φ_uv(x_u, x_v) · Π_v ψ_v(x_v)`
/// with log-factors uniform in `[−spread, spread]`. Positive pairwise
/// factorizations are Markov to their graph.
pub fn random_markov_tensor(g: &Graph, b: usize, spread: f64, rng: &mut impl Rng) -> ProbabilityTensor {
    let d = g.d();
    let mut draw = |n: usize| -> Vec<f64> { (0..n).map(|_| rng.random_range(-spread..=spread)).collect() };
    let edges = g.edges();
    let phi: Vec<Vec<f64>> = edges.iter().map(|_| draw(b * b)).collect();
    let psi: Vec<Vec<f64>> = (0..d).map(|_| draw(b)).collect();
    let n = b.pow(d as u32);
    let w: Vec<f64> = (0..n)
        .map(|f| {
            let x = coords(f, d, b);
            let e: f64 = edges.iter().zip(&phi).map(|(&(u, v), t)| t[x[u] * b + x[v]]).sum::<f64>()
                + (0..d).map(|v| psi[v][x[v]]).sum::<f64>();
            e.exp()
        })
        .collect();
    ProbabilityTensor::from_weights(d, b, w).unwrap()
}

/// A uniformly random point of the simplex over all `b^d` cells.
pub fn random_tensor(d: usize, b: usize, rng: &mut impl Rng) -> ProbabilityTensor {
    let n = b.pow(d as u32);
    let w: Vec<f64> = (0..n).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
    ProbabilityTensor::from_weights(d, b, w).unwrap()
}

pub fn l1(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Largest `|p(a,b,c)·p(c) − p(a,c)·p(b,c)|` over all assignments, where
/// `c` ranges over `sep` and `a`, `b` over the blocks `x`, `y` (0-based
/// axes). Zero iff `X ⊥ Y | sep`.
pub fn ci_violation(t: &ProbabilityTensor, sep: &[usize], x: &[usize], y: &[usize]) -> f64 {
    let (d, b) = (t.d(), t.b());
    let key = |c: &[usize], axes: &[usize]| -> Vec<usize> { axes.iter().map(|&a| c[a]).collect() };
    type Key = Vec<usize>;
    let mut abc: HashMap<(Key, Key, Key), f64> = HashMap::new();
    let mut ac: HashMap<(Key, Key), f64> = HashMap::new();
    let mut bc: HashMap<(Key, Key), f64> = HashMap::new();
    let mut cc: HashMap<Vec<usize>, f64> = HashMap::new();
    for (f, &p) in t.data().iter().enumerate() {
        let c = coords(f, d, b);
        let (ka, kb, kc) = (key(&c, x), key(&c, y), key(&c, sep));
        *abc.entry((ka.clone(), kb.clone(), kc.clone())).or_default() += p;
        *ac.entry((ka, kc.clone())).or_default() += p;
        *bc.entry((kb, kc.clone())).or_default() += p;
        *cc.entry(kc).or_default() += p;
    }
    abc.iter()
        .map(|((a, bb, c), &p)| {
            (p * cc[c] - ac[&(a.clone(), c.clone())] * bc[&(bb.clone(), c.clone())]).abs()
        })
        .fold(0.0, f64::max)
}

/// Largest `|p(x) − p(y)| / ‖x − y‖₂` over `n` random pairs, half of them
/// at distance ≤ 1e−3.
pub fn max_difference_quotient(p: &DensityOracle, n: usize, rng: &mut impl Rng) -> f64 {
    let d = p.d();
    let mut worst = 0.0f64;
    for i in 0..n {
        let x: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
        let y: Vec<f64> = if i % 2 == 0 {
            (0..d).map(|_| rng.random::<f64>()).collect()
        } else {
            x.iter()
                .map(|&xi| (xi + rng.random_range(-1e-3..1e-3)).clamp(0.0, 1.0))
                .collect()
        };
        let dist = x.iter().zip(&y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        if dist > 0.0 {
            worst = worst.max((p.eval(&x) - p.eval(&y)).abs() / dist);
        }
    }
    worst
}

/// `n` points from `p` by rejection against the uniform proposal. `sup`
/// must bound `p` on the cube.
pub fn rejection_sample(p: &DensityOracle, sup: f64, n: usize, rng: &mut impl Rng) -> SampleSet {
    let d = p.d();
    let mut pts = Vec::with_capacity(n * d);
    let mut x = vec![0.0; d];
    while pts.len() < n * d {
        x.iter_mut().for_each(|xi| *xi = rng.random::<f64>());
        let v = p.eval(&x);
        assert!(v <= sup * (1.0 + 1e-12), "density {v} exceeds sup {sup}");
        if rng.random::<f64>() * sup < v {
            pts.extend_from_slice(&x);
        }
    }
    SampleSet::new(d, pts).unwrap()
}

/// A truth tensor and `m` candidates, one of them planted at ℓ¹ distance
/// `eps_star` from it.
pub struct Planted {
    pub truth: ProbabilityTensor,
    pub candidates: Vec<HistogramDensity>,
    /// Smallest candidate distance to the truth (the planted one or less).
    pub eps_star: f64,
}

pub fn planted(d: usize, b: usize, m: usize, eps_star: f64, rng: &mut impl Rng) -> Planted {
    assert!(m >= 1);
    let truth = random_tensor(d, b, rng);
    let near = loop {
        let q = random_tensor(d, b, rng);
        let dist = l1(q.data(), truth.data());
        if dist >= eps_star {
            let lam = eps_star / dist;
            let w: Vec<f64> = truth.data().iter().zip(q.data()).map(|(p, q)| (1.0 - lam) * p + lam * q).collect();
            break ProbabilityTensor::from_weights(d, b, w).unwrap();
        }
    };
    let slot = rng.random_range(0..m);
    let candidates: Vec<HistogramDensity> = (0..m)
        .map(|i| if i == slot { near.clone() } else { random_tensor(d, b, rng) }.into())
        .collect();
    let eps_star = candidates
        .iter()
        .map(|c| l1(c.tensor().data(), truth.data()))
        .fold(f64::INFINITY, f64::min);
    Planted {
        truth,
        candidates,
        eps_star,
    }
}

/// Sample size that makes every pairwise Scheffé comparison among `m`
/// candidates `eps`-accurate with probability `1 − δ`.
pub fn selection_n(m: usize, eps: f64, delta: f64) -> usize {
    (((3.0 / delta).ln() + 2.0 * (m as f64).ln()) / (2.0 * eps * eps)).ceil() as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brute_force_small_cases() {
        let path = |d: usize| Graph::from_edges(d, &(1..d).map(|i| (i - 1, i)).collect::<Vec<_>>()).unwrap();
        assert_eq!(brute_force_resilience(&Graph::empty(0)), 0);
        assert_eq!(brute_force_resilience(&path(3)), 2);
        assert_eq!(brute_force_resilience(&path(4)), 3);
        assert_eq!(brute_force_resilience(&path(7)), 3);
        let k4 = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(brute_force_resilience(&k4), 4);
    }

    #[test]
    fn graph_counts() {
        assert_eq!(all_graphs(4).count(), 64);
        let total: usize = (1..=5).map(|d| all_graphs(d).count()).sum();
        assert_eq!(total, 1 + 2 + 8 + 64 + 1024);
    }

    #[test]
    fn random_markov_tensor_path_is_markov() {
        let mut r = rng(1);
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let t = random_markov_tensor(&g, 3, 1.0, &mut r);
        assert!(ci_violation(&t, &[1], &[0], &[2]) < 1e-12);
        assert!(ci_violation(&t, &[], &[0], &[2]) > 1e-6);
    }
}
