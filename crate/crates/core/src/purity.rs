//! ε-purity of a map `f: K → L` relative to a family of test spaces.
//!
//! A square is `u: A → K`, `g: A → B`, `v: B → L` with `A, B` in the family.
//! The pure and weak variants consider every square with `f∘u ∼ε v∘g`, the
//! bare variant only those with `f∘u = v∘g`. A filler is `t: B → K` with
//! `t∘g ∼ε u`, or `t∘g ∼2ε u` for the weak variant.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::budget::{Budget, BudgetExceeded};
use crate::extrat::ExtRat;
use crate::hom::{HomSearch, MapKind};
use crate::injectivity::{closeness, maps_close, TestFamily};
use crate::morphism::MetMap;
use crate::space::Space;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Pure,
    Weak,
    Bare,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Pure, Variant::Weak, Variant::Bare];

    fn filler_tolerance(self, eps: &ExtRat) -> ExtRat {
        match self {
            Variant::Weak => eps.double(),
            Variant::Pure | Variant::Bare => eps.clone(),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Pure => "pure",
            Variant::Weak => "weak",
            Variant::Bare => "bare",
        })
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pure" => Ok(Variant::Pure),
            "weak" => Ok(Variant::Weak),
            "bare" => Ok(Variant::Bare),
            other => Err(format!("unknown purity variant {other:?} (expected pure, weak or bare)")),
        }
    }
}

/// A square with no filler.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Square {
    pub a: Space,
    pub b: Space,
    pub u: Vec<usize>,
    pub g: Vec<usize>,
    pub v: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PurityVerdict {
    pub holds: bool,
    /// Squares examined before the verdict was reached.
    pub squares: u64,
    pub counterexample: Option<Square>,
}

fn raw_homs(a: &Arc<Space>, k: &Arc<Space>, budget: &Budget) -> Result<Vec<Vec<usize>>, BudgetExceeded> {
    HomSearch::new(a.clone(), k.clone(), MapKind::NonExpansive).collect_raw(&[], budget)
}

fn compose(outer: &[usize], inner: &[usize]) -> Vec<usize> {
    inner.iter().map(|&x| outer[x]).collect()
}

/// Decides purity of `f`; the counterexample, if any, is the first in family
/// order of `(A, B)`, then lexicographic order of `(g, u, v)`.
pub fn purity(f: &MetMap, eps: &ExtRat, variant: Variant, family: &TestFamily, budget: &Budget) -> Result<PurityVerdict, BudgetExceeded> {
    let (k, l) = (f.dom(), f.cod());
    let close_l = closeness(l, eps);
    let close_k = closeness(k, &variant.filler_tolerance(eps));
    let mut squares = 0u64;
    for a in family.spaces() {
        let hom_ak = raw_homs(a, k, budget)?;
        if hom_ak.is_empty() {
            continue;
        }
        let fus: Vec<Vec<usize>> = hom_ak.iter().map(|u| compose(f.as_slice(), u)).collect();
        for b in family.spaces() {
            let hom_ab = raw_homs(a, b, budget)?;
            let hom_bl = raw_homs(b, l, budget)?;
            let hom_bk = raw_homs(b, k, budget)?;
            for g in &hom_ab {
                // distinct v∘g with the first v producing each
                let mut vgs: Vec<(Vec<usize>, usize)> = Vec::new();
                let mut seen: HashMap<Vec<usize>, usize> = HashMap::new();
                for (i, v) in hom_bl.iter().enumerate() {
                    let vg = compose(v, g);
                    if !seen.contains_key(&vg) {
                        seen.insert(vg.clone(), i);
                        vgs.push((vg, i));
                    }
                }
                let mut tgs: Vec<Vec<usize>> = hom_bk.iter().map(|t| compose(t, g)).collect();
                tgs.sort();
                tgs.dedup();
                for (u, fu) in hom_ak.iter().zip(&fus) {
                    let square = match variant {
                        Variant::Bare => seen.get(fu).copied(),
                        _ => vgs.iter().find(|(vg, _)| maps_close(&close_l, l.len(), fu, vg)).map(|(_, i)| *i),
                    };
                    let Some(vi) = square else { continue };
                    squares += 1;
                    if !tgs.iter().any(|tg| maps_close(&close_k, k.len(), tg, u)) {
                        return Ok(PurityVerdict {
                            holds: false,
                            squares,
                            counterexample: Some(Square {
                                a: (**a).clone(),
                                b: (**b).clone(),
                                u: u.clone(),
                                g: g.clone(),
                                v: hom_bl[vi].clone(),
                            }),
                        });
                    }
                }
            }
        }
    }
    Ok(PurityVerdict { holds: true, squares, counterexample: None })
}

/// Purity at every value of a finite ε-grid; returns the first failing value.
pub fn grid_purity(
    f: &MetMap,
    eps_grid: &[ExtRat],
    variant: Variant,
    family: &TestFamily,
    budget: &Budget,
) -> Result<Option<(ExtRat, PurityVerdict)>, BudgetExceeded> {
    for e in eps_grid {
        let v = purity(f, e, variant, family, budget)?;
        if !v.holds {
            return Ok(Some((e.clone(), v)));
        }
    }
    Ok(None)
}
