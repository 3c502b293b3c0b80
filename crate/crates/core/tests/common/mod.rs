#![allow(dead_code)]

use std::sync::Arc;

use metricat_core::corpus::{random_map, random_space, stream};
use metricat_core::{Budget, ExtRat, FinDiagram, MetMap, Space};
use proptest::prelude::*;

pub fn values() -> Vec<ExtRat> {
    vec![ExtRat::frac(1, 2), ExtRat::one(), ExtRat::int(2), ExtRat::INF]
}

pub fn eps_values() -> Vec<ExtRat> {
    vec![ExtRat::zero(), ExtRat::frac(1, 2), ExtRat::one(), ExtRat::INF]
}

/// A seeded space with `lo..=hi` points.
pub fn space(lo: usize, hi: usize) -> impl Strategy<Value = Arc<Space>> {
    (lo..=hi, any::<u64>()).prop_map(|(n, seed)| Arc::new(random_space(&mut stream(seed, 0), n, &values())))
}

pub fn eps() -> impl Strategy<Value = ExtRat> {
    prop::sample::select(eps_values())
}

/// A seeded non-expansive map `dom → cod`, if there is one.
pub fn map_between(dom: &Arc<Space>, cod: &Arc<Space>, seed: u64) -> Option<MetMap> {
    random_map(&mut stream(seed, 1), dom, cod, &Budget::default()).unwrap()
}

/// Every function `0..n → 0..m`.
pub fn all_functions(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out.into_iter().flat_map(|p: Vec<usize>| (0..m).map(move |y| [p.clone(), vec![y]].concat())).collect();
    }
    out
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    permutations(n - 1)
        .into_iter()
        .flat_map(|p| {
            (0..n).map(move |pos| {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                q
            })
        })
        .collect()
}

/// Sup distance between two point maps into `k`, computed directly.
pub fn sup_dist(k: &Space, f: &[usize], g: &[usize]) -> ExtRat {
    f.iter().zip(g).map(|(&a, &b)| k.d(a, b).clone()).max().unwrap_or_else(ExtRat::zero)
}

pub fn non_expansive(a: &Space, b: &Space, f: &[usize]) -> bool {
    (0..a.len()).all(|i| (0..a.len()).all(|j| b.d(f[i], f[j]) <= a.d(i, j)))
}

/// Shortest simple path between every pair, by exhaustive depth-first search.
pub fn simple_path_closure(n: usize, d: &[ExtRat]) -> Vec<ExtRat> {
    fn walk(n: usize, d: &[ExtRat], at: usize, len: ExtRat, seen: &mut Vec<bool>, best: &mut [ExtRat]) {
        if len < best[at] {
            best[at] = len.clone();
        }
        for next in 0..n {
            if !seen[next] && !d[at * n + next].is_inf() {
                seen[next] = true;
                walk(n, d, next, &len + &d[at * n + next], seen, best);
                seen[next] = false;
            }
        }
    }
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        let mut best = vec![ExtRat::INF; n];
        let mut seen = vec![false; n];
        seen[i] = true;
        walk(n, d, i, ExtRat::zero(), &mut seen, &mut best);
        out.extend(best);
    }
    out
}

/// A symmetric matrix with zero diagonal and off-diagonal entries drawn
/// from `values` by `picks`.
pub fn semimetric_entries(n: usize, values: &[ExtRat], picks: &[usize]) -> Vec<ExtRat> {
    let mut d = vec![ExtRat::zero(); n * n];
    let mut k = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            let v = values[picks[k] % values.len()].clone();
            k += 1;
            d[i * n + j] = v.clone();
            d[j * n + i] = v;
        }
    }
    d
}

/// Shortest paths by repeated Dijkstra over the disjoint union of the
/// objects, with an `eps` edge from each `x` to `e(x)`; zero-distance
/// classes are then merged.
pub fn colimit_oracle(d: &FinDiagram, eps: &ExtRat) -> Space {
    let offsets: Vec<usize> = d
        .objects()
        .iter()
        .scan(0, |acc, o| {
            let at = *acc;
            *acc += o.len();
            Some(at)
        })
        .collect();
    let n: usize = d.objects().iter().map(|o| o.len()).sum();
    let mut w = vec![ExtRat::INF; n * n];
    for (o, s) in d.objects().iter().enumerate() {
        for i in 0..s.len() {
            for j in 0..s.len() {
                w[(offsets[o] + i) * n + offsets[o] + j] = s.d(i, j).clone();
            }
        }
    }
    for a in d.arrows() {
        for x in 0..a.map.dom().len() {
            let (p, q) = (offsets[a.src] + x, offsets[a.dst] + a.map.apply(x));
            if eps < &w[p * n + q] {
                w[p * n + q] = eps.clone();
                w[q * n + p] = eps.clone();
            }
        }
    }
    let mut dist = vec![ExtRat::INF; n * n];
    for s in 0..n {
        let mut best = vec![ExtRat::INF; n];
        let mut done = vec![false; n];
        best[s] = ExtRat::zero();
        loop {
            let Some(u) = (0..n).filter(|&u| !done[u] && !best[u].is_inf()).min_by(|&a, &b| best[a].cmp(&best[b])) else { break };
            done[u] = true;
            for v in 0..n {
                if !w[u * n + v].is_inf() {
                    let via = &best[u] + &w[u * n + v];
                    if via < best[v] {
                        best[v] = via;
                    }
                }
            }
        }
        dist[s * n..(s + 1) * n].clone_from_slice(&best);
    }
    let mut reps: Vec<usize> = Vec::new();
    for i in 0..n {
        if !reps.iter().any(|&r| dist[r * n + i].is_zero()) {
            reps.push(i);
        }
    }
    let m = reps.len();
    let flat = reps.iter().flat_map(|&a| reps.iter().map(move |&b| (a, b))).map(|(a, b)| dist[a * n + b].clone()).collect();
    Space::from_flat(m, flat).unwrap()
}
