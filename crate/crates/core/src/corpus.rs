//! Seeded random spaces and maps over a finite distance grid.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::budget::{Budget, BudgetExceeded};
use crate::extrat::ExtRat;
use crate::hom::{HomSearch, MapKind};
use crate::morphism::MetMap;
use crate::space::Space;

/// The default distance values `{1/2, 1, 3/2, 2, inf}`.
pub fn default_values() -> Vec<ExtRat> {
    vec![ExtRat::frac(1, 2), ExtRat::one(), ExtRat::frac(3, 2), ExtRat::int(2), ExtRat::INF]
}

/// An independent stream for item `index` of a run seeded with `seed`.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// A uniformly drawn valid space with `n` points: upper-triangle entries are
/// sampled from `values` until the triangle inequality holds, falling back to
/// infinite distances after a bounded number of attempts.
pub fn random_space<R: Rng>(rng: &mut R, n: usize, values: &[ExtRat]) -> Space {
    for _ in 0..200 {
        let mut dist = vec![ExtRat::zero(); n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = values.choose(rng).expect("nonempty values").clone();
                dist[i * n + j] = v.clone();
                dist[j * n + i] = v;
            }
        }
        if let Ok(s) = Space::from_flat(n, dist) {
            return s;
        }
    }
    Space::uniform(n, ExtRat::INF)
}

/// `k` with `extra` new points appended; `k` stays an isometric subspace.
pub fn random_extension<R: Rng>(rng: &mut R, k: &Space, extra: usize, values: &[ExtRat]) -> Space {
    let mut cur = k.clone();
    for _ in 0..extra {
        let n = cur.len();
        let mut next = None;
        for _ in 0..200 {
            let new: Vec<ExtRat> = (0..n).map(|_| values.choose(rng).expect("nonempty values").clone()).collect();
            if let Ok(s) = extend_by(&cur, &new) {
                next = Some(s);
                break;
            }
        }
        cur = next.unwrap_or_else(|| extend_by(&cur, &vec![ExtRat::INF; n]).expect("a point at infinity is always valid"));
    }
    cur
}

fn extend_by(k: &Space, new: &[ExtRat]) -> Result<Space, crate::space::InvalidSpace> {
    let n = k.len();
    let m = n + 1;
    let mut dist = vec![ExtRat::zero(); m * m];
    for i in 0..n {
        for j in 0..n {
            dist[i * m + j] = k.d(i, j).clone();
        }
        dist[i * m + n] = new[i].clone();
        dist[n * m + i] = new[i].clone();
    }
    Space::from_flat(m, dist)
}

/// A uniformly drawn non-expansive map, or `None` if there is none.
pub fn random_map<R: Rng>(rng: &mut R, dom: &Arc<Space>, cod: &Arc<Space>, budget: &Budget) -> Result<Option<MetMap>, BudgetExceeded> {
    let all = HomSearch::new(dom.clone(), cod.clone(), MapKind::NonExpansive).collect(&[], budget)?;
    Ok(all.choose(rng).cloned())
}

/// A map out of `dom`: with even odds an inclusion into a random extension
/// (when there is room) or a random map into a fresh random space, never
/// exceeding `max_points` points.
pub fn random_arrow<R: Rng>(
    rng: &mut R,
    dom: &Arc<Space>,
    max_points: usize,
    values: &[ExtRat],
    budget: &Budget,
) -> Result<MetMap, BudgetExceeded> {
    if dom.len() < max_points && rng.gen_bool(0.5) {
        let extra = rng.gen_range(0..=max_points - dom.len());
        let cod = Arc::new(random_extension(rng, dom, extra, values));
        return Ok(MetMap::new_unchecked(dom.clone(), cod, (0..dom.len()).collect()));
    }
    loop {
        let n = rng.gen_range(1..=max_points.max(1));
        let cod = Arc::new(random_space(rng, n, values));
        if let Some(f) = random_map(rng, dom, &cod, budget)? {
            return Ok(f);
        }
    }
}

/// A span `B <- A -> C` with an ε for it.
#[derive(Debug, Clone)]
pub struct SpanInstance {
    pub f: MetMap,
    pub g: MetMap,
    pub eps: ExtRat,
}

/// `count` seeded spans whose spaces have at most `max_points` points.
pub fn standard_spans(
    seed: u64,
    count: usize,
    max_points: usize,
    eps: &[ExtRat],
    budget: &Budget,
) -> Result<Vec<SpanInstance>, BudgetExceeded> {
    let values = default_values();
    (0..count)
        .map(|i| {
            let mut rng = stream(seed, i as u64);
            let n = rng.gen_range(0..=max_points.min(3));
            let a = Arc::new(random_space(&mut rng, n, &values));
            let f = random_arrow(&mut rng, &a, max_points, &values, budget)?;
            let g = random_arrow(&mut rng, &a, max_points, &values, budget)?;
            let eps = eps.choose(&mut rng).expect("nonempty eps list").clone();
            Ok(SpanInstance { f, g, eps })
        })
        .collect()
}

/// A random subset of `0..n` (possibly empty), in increasing order.
pub fn random_subset<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    (0..n).filter(|_| rng.gen_bool(0.5)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_independent() {
        let a: Vec<u32> = (0..4).map(|_| stream(7, 3).gen()).collect();
        let b: Vec<u32> = (0..4).map(|_| stream(7, 3).gen()).collect();
        assert_eq!(a, b);
        let mut s3 = stream(7, 3);
        let mut s4 = stream(7, 4);
        assert_ne!(s3.gen::<u64>(), s4.gen::<u64>());
    }

    #[test]
    fn samples_are_valid() {
        let mut rng = stream(1, 0);
        let values = default_values();
        for n in 0..6 {
            let s = random_space(&mut rng, n, &values);
            assert_eq!(s.len(), n);
            Space::from_flat(n, s.rows().concat()).unwrap();
            let e = random_extension(&mut rng, &s, 2, &values);
            assert_eq!(e.len(), n + 2);
            let keep: Vec<usize> = (0..n).collect();
            assert!(e.subspace(&keep).same_metric(&s));
        }
    }
}
