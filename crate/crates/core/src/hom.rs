//! Backtracking enumeration of non-expansive maps and isometries.
//!
//! Distances of both endpoints are first replaced by their rank in the joint
//! sorted list of values, so the inner loop compares `u32`s instead of big
//! rationals. Points of the domain are assigned in index order and candidate
//! images are tried in increasing order, which makes the enumeration order
//! lexicographic on the image vector.

use std::ops::ControlFlow;
use std::sync::Arc;

use crate::budget::{Budget, BudgetExceeded};
use crate::extrat::ExtRat;
use crate::morphism::MetMap;
use crate::space::Space;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapKind {
    NonExpansive,
    Isometric,
}

/// Replaces each entry of every matrix by its rank among all entries.
pub(crate) fn joint_ranks(spaces: &[&Space]) -> Vec<Vec<u32>> {
    let mut values: Vec<&ExtRat> = spaces.iter().flat_map(|s| s.flat().iter()).collect();
    values.sort();
    values.dedup();
    spaces.iter().map(|s| s.flat().iter().map(|x| values.binary_search(&x).expect("value was collected") as u32).collect()).collect()
}

/// A reusable search problem for maps `dom → cod` of a given kind.
pub struct HomSearch {
    dom: Arc<Space>,
    cod: Arc<Space>,
    dom_rank: Vec<u32>,
    cod_rank: Vec<u32>,
    kind: MapKind,
}

impl HomSearch {
    pub fn new(dom: Arc<Space>, cod: Arc<Space>, kind: MapKind) -> HomSearch {
        let mut ranks = joint_ranks(&[&dom, &cod]);
        let cod_rank = ranks.pop().unwrap();
        let dom_rank = ranks.pop().unwrap();
        HomSearch { dom, cod, dom_rank, cod_rank, kind }
    }

    pub fn dom(&self) -> &Arc<Space> {
        &self.dom
    }

    pub fn cod(&self) -> &Arc<Space> {
        &self.cod
    }

    #[inline]
    fn compatible(&self, i: usize, y: usize, j: usize, z: usize) -> bool {
        let n = self.dom.len();
        let m = self.cod.len();
        let dd = self.dom_rank[i * n + j];
        let dc = self.cod_rank[y * m + z];
        match self.kind {
            MapKind::NonExpansive => dc <= dd,
            MapKind::Isometric => dc == dd,
        }
    }

    /// Calls `visit` on every map agreeing with `pins` (where `Some`), in
    /// lexicographic order, until it breaks.
    pub fn for_each<F>(&self, pins: &[Option<usize>], budget: &Budget, mut visit: F) -> Result<(), BudgetExceeded>
    where
        F: FnMut(&[usize]) -> ControlFlow<()>,
    {
        let n = self.dom.len();
        assert!(pins.is_empty() || pins.len() == n, "pin vector has the wrong length");
        let pin = |i: usize| pins.get(i).copied().flatten();
        // pinned pairs must already be compatible
        for i in 0..n {
            if let Some(y) = pin(i) {
                if y >= self.cod.len() {
                    return Ok(());
                }
                for j in 0..i {
                    if let Some(z) = pin(j) {
                        if !self.compatible(i, y, j, z) {
                            return Ok(());
                        }
                    }
                }
            }
        }
        let mut meter = budget.meter();
        let mut assignment = vec![0usize; n];
        if n == 0 {
            let _ = visit(&assignment);
            return Ok(());
        }
        let m = self.cod.len();
        // next candidate to try at each depth
        let mut next = vec![0usize; n];
        let mut depth = 0usize;
        next[0] = pin(0).unwrap_or(0);
        loop {
            let limit = match pin(depth) {
                Some(y) => y + 1,
                None => m,
            };
            let mut placed = false;
            while next[depth] < limit {
                let y = next[depth];
                next[depth] += 1;
                meter.tick()?;
                if (0..depth).all(|j| self.compatible(depth, y, j, assignment[j])) {
                    assignment[depth] = y;
                    placed = true;
                    break;
                }
            }
            if placed {
                if depth + 1 == n {
                    if visit(&assignment).is_break() {
                        return Ok(());
                    }
                } else {
                    depth += 1;
                    next[depth] = pin(depth).unwrap_or(0);
                }
            } else {
                if depth == 0 {
                    return Ok(());
                }
                depth -= 1;
            }
        }
    }

    pub fn collect(&self, pins: &[Option<usize>], budget: &Budget) -> Result<Vec<MetMap>, BudgetExceeded> {
        let mut out = Vec::new();
        self.for_each(pins, budget, |a| {
            out.push(MetMap::new_unchecked(self.dom.clone(), self.cod.clone(), a.to_vec()));
            ControlFlow::Continue(())
        })?;
        Ok(out)
    }

    /// Raw image vectors instead of [`MetMap`]s.
    pub fn collect_raw(&self, pins: &[Option<usize>], budget: &Budget) -> Result<Vec<Vec<usize>>, BudgetExceeded> {
        let mut out = Vec::new();
        self.for_each(pins, budget, |a| {
            out.push(a.to_vec());
            ControlFlow::Continue(())
        })?;
        Ok(out)
    }

    /// The first map (lexicographically) agreeing with `pins`.
    pub fn first(&self, pins: &[Option<usize>], budget: &Budget) -> Result<Option<Vec<usize>>, BudgetExceeded> {
        let mut found = None;
        self.for_each(pins, budget, |a| {
            found = Some(a.to_vec());
            ControlFlow::Break(())
        })?;
        Ok(found)
    }

    /// Counts solutions, stopping once `cap` have been seen.
    pub fn count_up_to(&self, pins: &[Option<usize>], cap: usize, budget: &Budget) -> Result<usize, BudgetExceeded> {
        let mut count = 0;
        self.for_each(pins, budget, |_| {
            count += 1;
            if count >= cap {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        })?;
        Ok(count)
    }
}

/// All non-expansive maps `a → k` in lexicographic order.
pub fn hom_set(a: &Arc<Space>, k: &Arc<Space>, budget: &Budget) -> Result<Vec<MetMap>, BudgetExceeded> {
    HomSearch::new(a.clone(), k.clone(), MapKind::NonExpansive).collect(&[], budget)
}

/// All isometries `a → k` in lexicographic order.
pub fn isometries(a: &Arc<Space>, k: &Arc<Space>, budget: &Budget) -> Result<Vec<MetMap>, BudgetExceeded> {
    HomSearch::new(a.clone(), k.clone(), MapKind::Isometric).collect(&[], budget)
}

/// The isometry group of `k`, as image vectors, identity first.
pub fn automorphisms(k: &Arc<Space>, budget: &Budget) -> Result<Vec<Vec<usize>>, BudgetExceeded> {
    HomSearch::new(k.clone(), k.clone(), MapKind::Isometric).collect_raw(&[], budget)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arc(s: Space) -> Arc<Space> {
        Arc::new(s)
    }

    fn brute_force(a: &Space, k: &Space) -> Vec<Vec<usize>> {
        let n = a.len();
        let m = k.len();
        let total = m.pow(n as u32);
        let mut out = Vec::new();
        for code in 0..total {
            let mut v = vec![0; n];
            let mut c = code;
            for slot in v.iter_mut().rev() {
                *slot = c % m;
                c /= m;
            }
            if (0..n).all(|i| (0..n).all(|j| k.d(v[i], v[j]) <= a.d(i, j))) {
                out.push(v);
            }
        }
        if n == 0 {
            out = vec![vec![]];
        }
        out
    }

    #[test]
    fn points_of_k() {
        let k = arc(Space::uniform(3, ExtRat::one()));
        let maps = hom_set(&arc(Space::point()), &k, &Budget::default()).unwrap();
        assert_eq!(maps.len(), 3);
    }

    #[test]
    fn only_constants_from_two_one_to_two_two() {
        let maps = hom_set(&arc(Space::two(ExtRat::one())), &arc(Space::two(ExtRat::int(2))), &Budget::default()).unwrap();
        let raw: Vec<_> = maps.iter().map(|m| m.as_slice().to_vec()).collect();
        assert_eq!(raw, vec![vec![0, 0], vec![1, 1]]);
    }

    #[test]
    fn empty_domain_has_one_map() {
        let maps = hom_set(&arc(Space::empty()), &arc(Space::point()), &Budget::default()).unwrap();
        assert_eq!(maps.len(), 1);
        let maps = hom_set(&arc(Space::empty()), &arc(Space::empty()), &Budget::default()).unwrap();
        assert_eq!(maps.len(), 1);
        let maps = hom_set(&arc(Space::point()), &arc(Space::empty()), &Budget::default()).unwrap();
        assert!(maps.is_empty());
    }

    #[test]
    fn matches_brute_force_in_order() {
        let a =
            Space::from_flat(3, ["0", "1", "2", "1", "0", "3/2", "2", "3/2", "0"].iter().map(|s| s.parse().unwrap()).collect()).unwrap();
        let k = Space::from_flat(3, ["0", "1/2", "inf", "1/2", "0", "inf", "inf", "inf", "0"].iter().map(|s| s.parse().unwrap()).collect())
            .unwrap();
        for (x, y) in [(&a, &k), (&k, &a), (&a, &a)] {
            let got: Vec<_> =
                hom_set(&arc(x.clone()), &arc(y.clone()), &Budget::default()).unwrap().iter().map(|m| m.as_slice().to_vec()).collect();
            assert_eq!(got, brute_force(x, y));
        }
    }

    #[test]
    fn budget_is_enforced() {
        let k = arc(Space::uniform(6, ExtRat::one()));
        let d = arc(Space::uniform(6, ExtRat::INF));
        let err = hom_set(&d, &k, &Budget::new(64, 1000)).unwrap_err();
        assert_eq!(err, BudgetExceeded::Nodes { limit: 1000 });
    }

    #[test]
    fn pins_restrict_the_search() {
        let k = arc(Space::uniform(3, ExtRat::one()));
        let search = HomSearch::new(k.clone(), k.clone(), MapKind::Isometric);
        assert_eq!(search.count_up_to(&[], usize::MAX, &Budget::default()).unwrap(), 6);
        assert_eq!(search.count_up_to(&[Some(1), None, None], usize::MAX, &Budget::default()).unwrap(), 2);
        assert_eq!(search.count_up_to(&[Some(1), Some(1), None], usize::MAX, &Budget::default()).unwrap(), 0);
        assert_eq!(automorphisms(&k, &Budget::default()).unwrap()[0], vec![0, 1, 2]);
    }
}
