//! Canonical labelling of finite metric spaces.
//!
//! Points are first split into classes by iterated refinement of an
//! isomorphism-invariant colour (the multiset of distances to each other
//! colour class). The canonical form is then the lexicographically smallest
//! distance matrix over all orderings that list the colour classes in
//! increasing order, found by branch and bound.

use crate::budget::{Budget, BudgetExceeded, NodeMeter};
use crate::extrat::ExtRat;
use crate::hom::joint_ranks;
use crate::space::Space;

/// A canonical representative together with the relabelling that produced it:
/// `space.d(i, j) == original.d(perm[i], perm[j])`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Canonical {
    pub space: Space,
    pub perm: Vec<usize>,
}

fn refine_colours(n: usize, rank: &[u32]) -> Vec<usize> {
    let mut colour = vec![0usize; n];
    let mut classes = if n == 0 { 0 } else { 1 };
    loop {
        let keys: Vec<(usize, Vec<(usize, u32)>)> = (0..n)
            .map(|i| {
                let mut around: Vec<(usize, u32)> = (0..n).filter(|&j| j != i).map(|j| (colour[j], rank[i * n + j])).collect();
                around.sort_unstable();
                (colour[i], around)
            })
            .collect();
        let mut distinct: Vec<&(usize, Vec<(usize, u32)>)> = keys.iter().collect();
        distinct.sort();
        distinct.dedup();
        let next: Vec<usize> = keys.iter().map(|k| distinct.binary_search(&k).unwrap()).collect();
        let count = distinct.len();
        colour = next;
        if count == classes {
            return colour;
        }
        classes = count;
    }
}

struct Search<'a> {
    n: usize,
    rank: &'a [u32],
    target: Vec<usize>,
    colour: Vec<usize>,
    perm: Vec<usize>,
    used: Vec<bool>,
    best: Option<(Vec<usize>, Vec<u32>)>,
    meter: NodeMeter,
}

impl Search<'_> {
    /// `less` is true once the current prefix is already smaller than `best`.
    fn extend(&mut self, pos: usize, less: bool, row_buf: &mut Vec<u32>) -> Result<(), BudgetExceeded> {
        if pos == self.n {
            if less || self.best.is_none() {
                self.best = Some((self.perm.clone(), row_buf.clone()));
            }
            return Ok(());
        }
        for x in 0..self.n {
            if self.used[x] || self.colour[x] != self.target[pos] {
                continue;
            }
            self.meter.tick()?;
            let start = row_buf.len();
            for q in 0..pos {
                row_buf.push(self.rank[x * self.n + self.perm[q]]);
            }
            let mut now_less = less;
            let mut prune = false;
            if !less {
                if let Some((_, best_seq)) = &self.best {
                    match row_buf[start..].cmp(&best_seq[start..row_buf.len()]) {
                        std::cmp::Ordering::Less => now_less = true,
                        std::cmp::Ordering::Greater => prune = true,
                        std::cmp::Ordering::Equal => {}
                    }
                }
            }
            if !prune {
                self.used[x] = true;
                self.perm.push(x);
                self.extend(pos + 1, now_less, row_buf)?;
                self.perm.pop();
                self.used[x] = false;
            }
            row_buf.truncate(start);
        }
        Ok(())
    }
}

/// The canonical representative of the isometry class of `k` (labels are
/// dropped).
pub fn canonical_form(k: &Space, budget: &Budget) -> Result<Canonical, BudgetExceeded> {
    budget.check_points(k.len())?;
    let n = k.len();
    let rank = joint_ranks(&[k]).pop().unwrap();
    let colour = refine_colours(n, &rank);
    let mut target = colour.clone();
    target.sort_unstable();
    let mut search =
        Search { n, rank: &rank, target, colour, perm: Vec::with_capacity(n), used: vec![false; n], best: None, meter: budget.meter() };
    search.extend(0, false, &mut Vec::new())?;
    let perm = search.best.map(|(p, _)| p).unwrap_or_default();
    let dist: Vec<ExtRat> = perm.iter().flat_map(|&i| perm.iter().map(move |&j| (i, j))).map(|(i, j)| k.d(i, j).clone()).collect();
    Ok(Canonical { space: Space::from_flat_unchecked(n, dist), perm })
}

pub fn are_isometric(a: &Space, b: &Space, budget: &Budget) -> Result<bool, BudgetExceeded> {
    if a.len() != b.len() || a.distance_values() != b.distance_values() {
        return Ok(false);
    }
    Ok(canonical_form(a, budget)?.space == canonical_form(b, budget)?.space)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hom::isometries;
    use proptest::prelude::*;
    use std::sync::Arc;

    fn grid_value(code: u8) -> ExtRat {
        match code % 4 {
            0 => ExtRat::frac(1, 2),
            1 => ExtRat::one(),
            2 => ExtRat::int(2),
            _ => ExtRat::INF,
        }
    }

    /// Rejection-sample a valid space from upper-triangle codes.
    fn space_from_codes(n: usize, codes: &[u8]) -> Option<Space> {
        let mut dist = vec![ExtRat::zero(); n * n];
        let mut c = codes.iter();
        for i in 0..n {
            for j in (i + 1)..n {
                let v = grid_value(*c.next()?);
                dist[i * n + j] = v.clone();
                dist[j * n + i] = v;
            }
        }
        Space::from_flat(n, dist).ok()
    }

    fn permute(k: &Space, p: &[usize]) -> Space {
        k.subspace(p)
    }

    fn all_perms(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in all_perms(n - 1) {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }

    fn brute_isomorphic(a: &Space, b: &Space) -> bool {
        a.len() == b.len() && all_perms(a.len()).iter().any(|p| permute(a, p).same_metric(b))
    }

    #[test]
    fn relabelled_two_point_spaces_agree() {
        let b = Budget::default();
        let two = Space::two(ExtRat::one());
        assert_eq!(canonical_form(&two, &b).unwrap().space, canonical_form(&permute(&two, &[1, 0]), &b).unwrap().space);
        assert_ne!(canonical_form(&two, &b).unwrap().space, canonical_form(&Space::two(ExtRat::int(2)), &b).unwrap().space);
    }

    #[test]
    fn same_distance_multiset_different_structure() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let b = Budget::default();
        let mut by_multiset: std::collections::HashMap<Vec<ExtRat>, Vec<Space>> = Default::default();
        let mut found = 0;
        for _ in 0..4000 {
            let codes: Vec<u8> = (0..10).map(|_| rng.gen_range(0..3)).collect();
            let Some(k) = space_from_codes(5, &codes) else { continue };
            let mut multiset = k.flat().to_vec();
            multiset.sort();
            let bucket = by_multiset.entry(multiset).or_default();
            for other in bucket.iter() {
                if !brute_isomorphic(&k, other) {
                    found += 1;
                    assert_ne!(canonical_form(&k, &b).unwrap().space, canonical_form(other, &b).unwrap().space);
                } else {
                    assert_eq!(canonical_form(&k, &b).unwrap().space, canonical_form(other, &b).unwrap().space);
                }
            }
            if bucket.len() < 4 {
                bucket.push(k);
            }
        }
        assert!(found > 10, "only {found} non-isomorphic pairs with equal multisets");
    }

    #[test]
    fn budget_on_points() {
        let k = Space::uniform(5, ExtRat::one());
        assert!(canonical_form(&k, &Budget::new(4, 1000)).is_err());
    }

    #[test]
    fn highly_symmetric_space_is_fine() {
        let k = Space::uniform(7, ExtRat::one());
        let c = canonical_form(&k, &Budget::default()).unwrap();
        assert!(c.space.same_metric(&k));
        let auts = isometries(&Arc::new(k.clone()), &Arc::new(k), &Budget::default()).unwrap();
        assert_eq!(auts.len(), 5040);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn agrees_with_all_permutations_oracle(
            n in 1usize..=6,
            codes_a in proptest::collection::vec(any::<u8>(), 15),
            codes_b in proptest::collection::vec(any::<u8>(), 15),
            p in Just(()).prop_perturb(|_, mut rng| { let mut v: Vec<usize> = (0..6).collect(); for i in (1..6).rev() { let j = (rng.next_u32() as usize) % (i + 1); v.swap(i, j); } v }),
        ) {
            let b = Budget::default();
            let Some(a) = space_from_codes(n, &codes_a) else { return Ok(()); };
            let perm: Vec<usize> = p.into_iter().filter(|&i| i < n).collect();
            let relabelled = permute(&a, &perm);
            let ca = canonical_form(&a, &b).unwrap();
            // isomorphism invariance and correctness of the relabelling
            prop_assert_eq!(&ca.space, &canonical_form(&relabelled, &b).unwrap().space);
            prop_assert!(permute(&a, &ca.perm).same_metric(&ca.space));
            // idempotence
            prop_assert_eq!(&canonical_form(&ca.space, &b).unwrap().space, &ca.space);
            if let Some(other) = space_from_codes(n, &codes_b) {
                let equal = canonical_form(&other, &b).unwrap().space == ca.space;
                prop_assert_eq!(equal, brute_isomorphic(&a, &other));
            }
        }
    }
}
