//! Brute-force reference implementations shared by the integration tests.
//! Nothing here calls into the engine or spanning code under test.
#![allow(dead_code)]

use std::collections::BTreeSet;

use aniso_core::{Configuration, Geometry, NeighborhoodSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Pt = Vec<i64>;

/// `±m·e_j` for `1 ≤ m ≤ a_j`, built directly from the exponents.
pub fn offsets(a: &[usize]) -> Vec<Pt> {
    let d = a.len();
    let mut out = Vec::new();
    for (j, &aj) in a.iter().enumerate() {
        for m in 1..=aj as i64 {
            for s in [1, -1] {
                let mut v = vec![0; d];
                v[j] = s * m;
                out.push(v);
            }
        }
    }
    out
}

pub fn all_points(dims: &[usize]) -> Vec<Pt> {
    let mut pts = vec![vec![]];
    for &n in dims {
        pts = pts
            .into_iter()
            .flat_map(|p| {
                (1..=n as i64).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    pts
}

fn neighbour(p: &[i64], o: &[i64], dims: &[usize], torus: bool) -> Option<Pt> {
    let mut q = Vec::with_capacity(p.len());
    for ((&x, &dx), &n) in p.iter().zip(o).zip(dims) {
        let y = x + dx;
        let n = n as i64;
        if torus {
            q.push((y - 1).rem_euclid(n) + 1);
        } else if (1..=n).contains(&y) {
            q.push(y);
        } else {
            return None;
        }
    }
    Some(q)
}

/// Synchronous sweeps until nothing changes.
pub fn closure_nr(infected: &BTreeSet<Pt>, dims: &[usize], a: &[usize], r: usize, torus: bool) -> BTreeSet<Pt> {
    let offs = offsets(a);
    let pts = all_points(dims);
    let mut cur = infected.clone();
    loop {
        let mut next = cur.clone();
        for p in &pts {
            if cur.contains(p) {
                continue;
            }
            let hits = offs
                .iter()
                .filter(|o| neighbour(p, o, dims, torus).is_some_and(|q| cur.contains(&q)))
                .count();
            if hits >= r {
                next.insert(p.clone());
            }
        }
        if next.len() == cur.len() {
            return cur;
        }
        cur = next;
    }
}

/// Closure under explicit rules: `x` joins when `x + X ⊂ A` for a rule `X`.
pub fn closure_rules(infected: &BTreeSet<Pt>, dims: &[usize], rules: &[Vec<Pt>], torus: bool) -> BTreeSet<Pt> {
    let pts = all_points(dims);
    let mut cur = infected.clone();
    loop {
        let mut next = cur.clone();
        for p in &pts {
            if cur.contains(p) {
                continue;
            }
            let fires = rules.iter().any(|rule| {
                rule.iter()
                    .all(|o| neighbour(p, o, dims, torus).is_some_and(|q| cur.contains(&q)))
            });
            if fires {
                next.insert(p.clone());
            }
        }
        if next.len() == cur.len() {
            return cur;
        }
        cur = next;
    }
}

pub fn linf(u: &[i64], v: &[i64]) -> i64 {
    u.iter().zip(v).map(|(a, b)| (a - b).abs()).max().unwrap_or(0)
}

/// Components of the graph `‖u − v‖∞ ≤ t`, by quadratic BFS.
pub fn components(sites: &[Pt], t: i64) -> Vec<Vec<Pt>> {
    let mut seen = vec![false; sites.len()];
    let mut out = Vec::new();
    for s in 0..sites.len() {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut stack = vec![s];
        let mut comp = Vec::new();
        while let Some(i) = stack.pop() {
            comp.push(sites[i].clone());
            for j in 0..sites.len() {
                if !seen[j] && linf(&sites[i], &sites[j]) <= t {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        comp.sort();
        out.push(comp);
    }
    out.sort();
    out
}

/// Largest bounding-box side of a site set.
pub fn long(sites: &[Pt]) -> usize {
    if sites.is_empty() {
        return 0;
    }
    (0..sites[0].len())
        .map(|j| {
            let lo = sites.iter().map(|s| s[j]).min().unwrap();
            let hi = sites.iter().map(|s| s[j]).max().unwrap();
            (hi - lo + 1) as usize
        })
        .max()
        .unwrap()
}

/// `diam`: largest `long` over strong components.
pub fn diam(sites: &[Pt], t: i64) -> usize {
    components(sites, t).iter().map(|c| long(c)).max().unwrap_or(0)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random nondecreasing exponents with `a_j ≤ amax`.
pub fn random_exponents<R: Rng>(rng: &mut R, d: usize, amax: usize) -> Vec<usize> {
    let mut a: Vec<usize> = (0..d).map(|_| rng.random_range(1..=amax)).collect();
    a.sort();
    a
}

pub fn random_set<R: Rng>(rng: &mut R, dims: &[usize], p: f64) -> BTreeSet<Pt> {
    all_points(dims).into_iter().filter(|_| rng.random_bool(p)).collect()
}

pub fn to_config(set: &BTreeSet<Pt>, dims: &[usize], geometry: Geometry) -> Configuration {
    let sites: Vec<Pt> = set.iter().cloned().collect();
    Configuration::from_sites(dims.to_vec(), geometry, &sites).unwrap()
}

pub fn to_set(config: &Configuration) -> BTreeSet<Pt> {
    config.infected_sites().into_iter().collect()
}

pub fn spec(a: &[usize], r: usize) -> NeighborhoodSpec {
    NeighborhoodSpec::new(a.to_vec(), r).unwrap()
}

/// `ℙ(⟨A⟩ = [L]^d)` by enumerating all `2^(L^d)` configurations.
pub fn exact_fill_probability(a: &[usize], r: usize, l: usize, p: f64) -> f64 {
    let dims = vec![l; a.len()];
    let pts = all_points(&dims);
    let n = pts.len();
    assert!(n <= 16, "enumeration too large");
    let mut total = 0.0;
    for mask in 0u32..(1 << n) {
        let set: BTreeSet<Pt> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| pts[i].clone()).collect();
        let k = set.len() as i32;
        if closure_nr(&set, &dims, a, r, false).len() == n {
            total += p.powi(k) * (1.0 - p).powi(n as i32 - k);
        }
    }
    total
}

/// Number of offsets with negative inner product against `u`.
pub fn negative_count(a: &[usize], u: &[i64]) -> usize {
    offsets(a)
        .iter()
        .filter(|o| o.iter().zip(u).map(|(x, y)| x * y).sum::<i64>() < 0)
        .count()
}

