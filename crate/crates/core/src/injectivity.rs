//! ε-injectivity, ε-splitness and ε-monomorphisms, decided by exhaustive
//! hom-set search. Statements that quantify over "small" test objects take an
//! explicit [`TestFamily`].

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::budget::{Budget, BudgetExceeded};
use crate::canon::canonical_form;
use crate::extrat::ExtRat;
use crate::grid::{enumerate_spaces, DistanceGrid};
use crate::hom::{HomSearch, MapKind};
use crate::morphism::MetMap;
use crate::space::Space;

/// A finite set of test spaces, deduplicated up to isometry and ordered by
/// size, then canonical distance matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestFamily {
    spaces: Vec<Arc<Space>>,
    pub size_cap: usize,
}

impl TestFamily {
    /// Spaces above `size_cap` points are dropped.
    pub fn new<I>(spaces: I, size_cap: usize, budget: &Budget) -> Result<TestFamily, BudgetExceeded>
    where
        I: IntoIterator<Item = Space>,
    {
        let mut set = BTreeSet::new();
        for s in spaces {
            if s.len() <= size_cap {
                set.insert(canonical_form(&s, budget)?.space);
            }
        }
        Ok(TestFamily { spaces: set.into_iter().map(Arc::new).collect(), size_cap })
    }

    /// Every space over `grid` (up to `grid.max_size` points).
    pub fn over_grid(grid: &DistanceGrid, budget: &Budget) -> Result<TestFamily, BudgetExceeded> {
        TestFamily::new(enumerate_spaces(grid, budget)?, grid.max_size, budget)
    }

    /// All subspaces of `k` with at most `cap` points.
    pub fn subspaces_of(k: &Space, cap: usize, budget: &Budget) -> Result<TestFamily, BudgetExceeded> {
        let n = k.len();
        budget.check_points(n.min(20))?;
        let subsets = (0u64..(1u64 << n)).filter(|m| m.count_ones() as usize <= cap).map(|m| {
            let pts: Vec<usize> = (0..n).filter(|i| m >> i & 1 == 1).collect();
            k.subspace(&pts)
        });
        TestFamily::new(subsets, cap, budget)
    }

    pub fn union(&self, other: &TestFamily, budget: &Budget) -> Result<TestFamily, BudgetExceeded> {
        let all = self.spaces.iter().chain(&other.spaces).map(|s| (**s).clone());
        TestFamily::new(all, self.size_cap.max(other.size_cap), budget)
    }

    pub fn spaces(&self) -> &[Arc<Space>] {
        &self.spaces
    }

    pub fn len(&self) -> usize {
        self.spaces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spaces.is_empty()
    }
}

fn raw_homs(a: &Arc<Space>, k: &Arc<Space>, budget: &Budget) -> Result<Vec<Vec<usize>>, BudgetExceeded> {
    HomSearch::new(a.clone(), k.clone(), MapKind::NonExpansive).collect_raw(&[], budget)
}

/// `close[y * n + z]` is whether `d(y, z) <= eps` in `k`.
pub(crate) fn closeness(k: &Space, eps: &ExtRat) -> Vec<bool> {
    let n = k.len();
    (0..n * n).map(|i| k.d(i / n, i % n) <= eps).collect()
}

#[inline]
pub(crate) fn maps_close(close: &[bool], n: usize, f: &[usize], g: &[usize]) -> bool {
    f.iter().zip(g).all(|(&x, &y)| close[x * n + y])
}

pub(crate) fn raw_dist(k: &Space, f: &[usize], g: &[usize]) -> ExtRat {
    f.iter().zip(g).map(|(&x, &y)| k.d(x, y)).max().cloned().unwrap_or_else(ExtRat::zero)
}

/// Two maps `C → dom f` with equal composites with `f` but farther apart than
/// allowed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MonoWitness {
    pub test_space: Space,
    pub g: Vec<usize>,
    pub h: Vec<usize>,
    pub distance: ExtRat,
}

/// `f` is an ε-monomorphism relative to `family`: `f∘g = f∘h` forces
/// `g ∼ε h` for all `g, h: C → dom f` with `C` in the family. Returns the
/// first violation.
pub fn is_eps_mono(f: &MetMap, eps: &ExtRat, family: &TestFamily, budget: &Budget) -> Result<Option<MonoWitness>, BudgetExceeded> {
    let k = f.dom();
    for c in family.spaces() {
        let homs = raw_homs(c, k, budget)?;
        let mut fibres: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
        for (i, g) in homs.iter().enumerate() {
            fibres.entry(g.iter().map(|&x| f.apply(x)).collect()).or_default().push(i);
        }
        let mut worst: Option<MonoWitness> = None;
        for members in fibres.values() {
            for (p, &i) in members.iter().enumerate() {
                for &j in &members[p + 1..] {
                    let d = raw_dist(k, &homs[i], &homs[j]);
                    if &d > eps {
                        let cand = MonoWitness { test_space: (**c).clone(), g: homs[i].clone(), h: homs[j].clone(), distance: d };
                        // keep the lexicographically first pair so the witness is deterministic
                        if worst.as_ref().is_none_or(|w| (&cand.g, &cand.h) < (&w.g, &w.h)) {
                            worst = Some(cand);
                        }
                    }
                }
            }
        }
        if worst.is_some() {
            return Ok(worst);
        }
    }
    Ok(None)
}

/// `f` is an ε-monomorphism against all subspaces of its domain with at most
/// `cap` points.
pub fn is_eps_mono_default(f: &MetMap, eps: &ExtRat, cap: usize, budget: &Budget) -> Result<Option<MonoWitness>, BudgetExceeded> {
    let family = TestFamily::subspaces_of(f.dom(), cap, budget)?;
    is_eps_mono(f, eps, &family, budget)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InjVerdict {
    pub holds: bool,
    /// A map `g: A → K` with no `h` satisfying `h∘f ∼ε g`.
    pub witness: Option<Vec<usize>>,
}

/// The filler data of `K` against `f: A → B`: the maps `A → K` and the
/// distinct composites `h∘f` for `h: B → K`.
struct Fillers {
    gs: Vec<Vec<usize>>,
    hfs: Vec<Vec<usize>>,
}

fn fillers(k: &Arc<Space>, f: &MetMap, budget: &Budget) -> Result<Fillers, BudgetExceeded> {
    let gs = raw_homs(f.dom(), k, budget)?;
    let mut hfs: Vec<Vec<usize>> =
        raw_homs(f.cod(), k, budget)?.into_iter().map(|h| f.as_slice().iter().map(|&x| h[x]).collect()).collect();
    hfs.sort();
    hfs.dedup();
    Ok(Fillers { gs, hfs })
}

/// Is `K` ε-injective to `f: A → B`? On failure the first unfillable `g`
/// (in lexicographic order) is returned.
pub fn is_eps_injective(k: &Arc<Space>, f: &MetMap, eps: &ExtRat, budget: &Budget) -> Result<InjVerdict, BudgetExceeded> {
    let fl = fillers(k, f, budget)?;
    let close = closeness(k, eps);
    let n = k.len();
    for g in fl.gs {
        if !fl.hfs.iter().any(|hf| maps_close(&close, n, hf, &g)) {
            return Ok(InjVerdict { holds: false, witness: Some(g) });
        }
    }
    Ok(InjVerdict { holds: true, witness: None })
}

/// `max_g min_h d(h∘f, g)`: the least ε at which `K` is ε-injective to `f`,
/// or `None` when no ε works (some `g` exists but no `h` at all).
pub fn injectivity_gap(k: &Arc<Space>, f: &MetMap, budget: &Budget) -> Result<Option<ExtRat>, BudgetExceeded> {
    let fl = fillers(k, f, budget)?;
    let mut gap = ExtRat::zero();
    for g in &fl.gs {
        let best = fl.hfs.iter().map(|hf| raw_dist(k, hf, g)).min();
        match best {
            None => return Ok(None),
            Some(d) if d > gap => gap = d,
            _ => {}
        }
    }
    Ok(Some(gap))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ApproxError {
    #[error(transparent)]
    Grid(#[from] GridOrderError),
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GridOrderError {
    #[error("ε-grid must be nonempty")]
    Empty,
    #[error("ε-grid values must be positive")]
    NonPositive,
    #[error("ε-grid must be strictly descending")]
    NotDescending,
}

pub fn check_eps_grid(grid: &[ExtRat]) -> Result<(), GridOrderError> {
    if grid.is_empty() {
        return Err(GridOrderError::Empty);
    }
    if grid.iter().any(ExtRat::is_zero) {
        return Err(GridOrderError::NonPositive);
    }
    if grid.windows(2).any(|w| w[0] <= w[1]) {
        return Err(GridOrderError::NotDescending);
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ApproxReport {
    /// ε-injective at every grid value.
    pub grid_holds: bool,
    pub per_grid: Vec<(ExtRat, bool)>,
    /// ε-injective at every ε > 0, decided exactly: on finite spaces this is
    /// the case iff the injectivity gap is zero.
    pub exact: bool,
    pub gap: Option<ExtRat>,
}

pub fn is_approx_injective(k: &Arc<Space>, f: &MetMap, eps_grid: &[ExtRat], budget: &Budget) -> Result<ApproxReport, ApproxError> {
    check_eps_grid(eps_grid)?;
    let gap = injectivity_gap(k, f, budget)?;
    let per_grid: Vec<(ExtRat, bool)> = eps_grid.iter().map(|e| (e.clone(), gap.as_ref().is_some_and(|g| g <= e))).collect();
    Ok(ApproxReport { grid_holds: per_grid.iter().all(|(_, ok)| *ok), per_grid, exact: gap.as_ref().is_some_and(ExtRat::is_zero), gap })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InjReport {
    pub subject: Space,
    pub eps: ExtRat,
    pub verdicts: Vec<InjVerdict>,
}

impl InjReport {
    pub fn passes(&self) -> bool {
        self.verdicts.iter().all(|v| v.holds)
    }
}

/// One report per candidate, against every map of `maps`.
pub fn inj_class(maps: &[MetMap], eps: &ExtRat, candidates: &[Arc<Space>], budget: &Budget) -> Result<Vec<InjReport>, BudgetExceeded> {
    candidates
        .iter()
        .map(|k| {
            let verdicts = maps.iter().map(|f| is_eps_injective(k, f, eps, budget)).collect::<Result<Vec<_>, _>>()?;
            Ok(InjReport { subject: (**k).clone(), eps: eps.clone(), verdicts })
        })
        .collect()
}

/// A `p: L → K` with `p∘f ∼ε id_K`, the lexicographically first one.
pub fn is_eps_split(f: &MetMap, eps: &ExtRat, budget: &Budget) -> Result<Option<MetMap>, BudgetExceeded> {
    let (k, l) = (f.dom(), f.cod());
    let close = closeness(k, eps);
    let n = k.len();
    let search = HomSearch::new(l.clone(), k.clone(), MapKind::NonExpansive);
    let mut found = None;
    search.for_each(&[], budget, |p| {
        if (0..n).all(|x| close[p[f.apply(x)] * n + x]) {
            found = Some(p.to_vec());
            std::ops::ControlFlow::Break(())
        } else {
            std::ops::ControlFlow::Continue(())
        }
    })?;
    Ok(found.map(|p| MetMap::new_unchecked(l.clone(), k.clone(), p)))
}
