//! Brute-force checks of the ε-universal property.
//!
//! A cocone shape lists objects `D_0 … D_k` and ε-constraints of the form
//! `c_p ∘ a ∼ε c_q ∘ b` for maps `a: S → D_p`, `b: S → D_q`. A candidate
//! (apex plus one leg per object) is universal against a target `T` when it
//! satisfies the constraints itself and every cocone into `T` factors through
//! it by exactly one map. Cocones into `T` are enumerated exhaustively and
//! mediators are counted by a pinned hom-set search.

use std::ops::ControlFlow;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::budget::{Budget, BudgetExceeded};
use crate::colimit::{EpsCoequalizer, EpsColimit, EpsPushout, FinDiagram};
use crate::extrat::ExtRat;
use crate::hom::{HomSearch, MapKind};
use crate::morphism::{same_space, MetMap, MorphismError};
use crate::space::Space;

/// `legs[left] ∘ a ∼ε legs[right] ∘ b`.
#[derive(Debug, Clone)]
pub struct Constraint {
    pub left: usize,
    pub a: MetMap,
    pub right: usize,
    pub b: MetMap,
}

#[derive(Debug, Clone)]
pub struct CoconeShape {
    pub objects: Vec<Arc<Space>>,
    pub constraints: Vec<Constraint>,
    pub eps: ExtRat,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Counterexample {
    /// The candidate's own legs violate a constraint.
    NotEpsCommutative { constraint: usize, distance: ExtRat },
    /// A cocone into `target` with no mediating map.
    NoMediator { target: Space, legs: Vec<Vec<usize>> },
    /// A cocone into `target` with at least two mediating maps.
    NotUnique { target: Space, legs: Vec<Vec<usize>>, mediators: Vec<Vec<usize>> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UniversalReport {
    pub passed: bool,
    pub targets: usize,
    pub cocones: u64,
    pub counterexample: Option<Counterexample>,
}

impl CoconeShape {
    pub fn new(objects: Vec<Arc<Space>>, constraints: Vec<Constraint>, eps: ExtRat) -> Result<CoconeShape, MorphismError> {
        for c in &constraints {
            let ok = c.left < objects.len()
                && c.right < objects.len()
                && same_space(c.a.dom(), c.b.dom())
                && same_space(c.a.cod(), &objects[c.left])
                && same_space(c.b.cod(), &objects[c.right]);
            if !ok {
                return Err(MorphismError::MismatchedEndpoints);
            }
        }
        Ok(CoconeShape { objects, constraints, eps })
    }

    /// Largest violation of a constraint by `legs`, as `(constraint, distance)`.
    fn violation(&self, legs: &[&[usize]], target: &Space) -> Option<(usize, ExtRat)> {
        for (k, c) in self.constraints.iter().enumerate() {
            let d = (0..c.a.dom().len())
                .map(|s| target.d(legs[c.left][c.a.apply(s)], legs[c.right][c.b.apply(s)]))
                .max()
                .cloned()
                .unwrap_or_else(ExtRat::zero);
            if d > self.eps {
                return Some((k, d));
            }
        }
        None
    }
}

struct TargetCheck<'a> {
    shape: &'a CoconeShape,
    apex: &'a Arc<Space>,
    legs: &'a [MetMap],
    target: Arc<Space>,
    /// `close[y * m + z]`: whether `d(y, z) <= eps` in the target.
    close: Vec<bool>,
    homs: Vec<Vec<Vec<usize>>>,
    /// Constraints to test once object `i` (the larger index) is assigned.
    due: Vec<Vec<usize>>,
}

impl TargetCheck<'_> {
    fn run(&self, budget: &Budget) -> Result<(u64, Option<Counterexample>), BudgetExceeded> {
        let k = self.shape.objects.len();
        let mut choice = vec![0usize; k];
        let mut cocones = 0u64;
        let mediator_search = HomSearch::new(self.apex.clone(), self.target.clone(), MapKind::NonExpansive);
        if self.homs.iter().any(|h| h.is_empty()) {
            return Ok((0, None));
        }
        let mut depth = 0usize;
        // iterative odometer with constraint pruning
        let mut next = vec![0usize; k];
        loop {
            if depth == k {
                cocones += 1;
                let legs: Vec<&[usize]> = (0..k).map(|i| self.homs[i][choice[i]].as_slice()).collect();
                if let Some(cx) = self.mediate(&mediator_search, &legs, budget)? {
                    return Ok((cocones, Some(cx)));
                }
                if k == 0 {
                    return Ok((cocones, None));
                }
                depth -= 1;
                continue;
            }
            if next[depth] >= self.homs[depth].len() {
                next[depth] = 0;
                if depth == 0 {
                    return Ok((cocones, None));
                }
                depth -= 1;
                continue;
            }
            choice[depth] = next[depth];
            next[depth] += 1;
            if self.consistent(depth, &choice) {
                depth += 1;
            }
        }
    }

    fn consistent(&self, depth: usize, choice: &[usize]) -> bool {
        let m = self.target.len();
        self.due[depth].iter().all(|&k| {
            let c = &self.shape.constraints[k];
            let (l, r) = (&self.homs[c.left][choice[c.left]], &self.homs[c.right][choice[c.right]]);
            (0..c.a.dom().len()).all(|s| self.close[l[c.a.apply(s)] * m + r[c.b.apply(s)]])
        })
    }

    fn mediate(&self, search: &HomSearch, legs: &[&[usize]], budget: &Budget) -> Result<Option<Counterexample>, BudgetExceeded> {
        let mut pins: Vec<Option<usize>> = vec![None; self.apex.len()];
        let mut clash = false;
        for (leg, wanted) in self.legs.iter().zip(legs) {
            for (x, &y) in wanted.iter().enumerate() {
                let p = leg.apply(x);
                match pins[p] {
                    Some(prev) if prev != y => clash = true,
                    _ => pins[p] = Some(y),
                }
            }
        }
        let found = if clash {
            Vec::new()
        } else {
            let mut found = Vec::new();
            search.for_each(&pins, budget, |t| {
                found.push(t.to_vec());
                if found.len() >= 2 {
                    ControlFlow::Break(())
                } else {
                    ControlFlow::Continue(())
                }
            })?;
            found
        };
        let legs = legs.iter().map(|l| l.to_vec()).collect();
        let target = (*self.target).clone();
        Ok(match found.len() {
            0 => Some(Counterexample::NoMediator { target, legs }),
            1 => None,
            _ => Some(Counterexample::NotUnique { target, legs, mediators: found }),
        })
    }
}

/// Checks a candidate against every target; the first failure is reported in
/// target order, then lexicographic cocone order, whatever the schedule.
pub fn verify_cocone(
    shape: &CoconeShape,
    apex: &Arc<Space>,
    legs: &[MetMap],
    targets: &[Arc<Space>],
    budget: &Budget,
) -> Result<UniversalReport, BudgetExceeded> {
    assert_eq!(legs.len(), shape.objects.len(), "one leg per object");
    let own: Vec<&[usize]> = legs.iter().map(|l| l.as_slice()).collect();
    if let Some((constraint, distance)) = shape.violation(&own, apex) {
        return Ok(UniversalReport {
            passed: false,
            targets: 0,
            cocones: 0,
            counterexample: Some(Counterexample::NotEpsCommutative { constraint, distance }),
        });
    }
    let mut due = vec![Vec::new(); shape.objects.len()];
    for (k, c) in shape.constraints.iter().enumerate() {
        due[c.left.max(c.right)].push(k);
    }
    let results: Vec<Result<(u64, Option<Counterexample>), BudgetExceeded>> = targets
        .par_iter()
        .map(|t| {
            let m = t.len();
            let close = (0..m * m).map(|i| t.d(i / m, i % m) <= &shape.eps).collect();
            let homs = shape
                .objects
                .iter()
                .map(|o| HomSearch::new(o.clone(), t.clone(), MapKind::NonExpansive).collect_raw(&[], budget))
                .collect::<Result<Vec<_>, _>>()?;
            TargetCheck { shape, apex, legs, target: t.clone(), close, homs, due: due.clone() }.run(budget)
        })
        .collect();
    let mut cocones = 0;
    for (i, r) in results.into_iter().enumerate() {
        let (n, cx) = r?;
        cocones += n;
        if cx.is_some() {
            return Ok(UniversalReport { passed: false, targets: i + 1, cocones, counterexample: cx });
        }
    }
    Ok(UniversalReport { passed: true, targets: targets.len(), cocones, counterexample: None })
}

/// The ε-pushout property of `(leg_g: B → D, leg_f: C → D)` over
/// `f: A → B`, `g: A → C`.
pub fn verify_universal(
    candidate: &EpsPushout,
    f: &MetMap,
    g: &MetMap,
    targets: &[Arc<Space>],
    budget: &Budget,
) -> Result<UniversalReport, VerifyError> {
    let shape = CoconeShape::new(
        vec![f.cod().clone(), g.cod().clone()],
        vec![Constraint { left: 0, a: f.clone(), right: 1, b: g.clone() }],
        candidate.eps.clone(),
    )?;
    check_legs(&[&candidate.leg_g, &candidate.leg_f], &shape.objects, &candidate.apex)?;
    let legs = [candidate.leg_g.clone(), candidate.leg_f.clone()];
    Ok(verify_cocone(&shape, &candidate.apex, &legs, targets, budget)?)
}

pub fn verify_coequalizer(
    candidate: &EpsCoequalizer,
    f: &MetMap,
    g: &MetMap,
    targets: &[Arc<Space>],
    budget: &Budget,
) -> Result<UniversalReport, VerifyError> {
    if !f.parallel_to(g) {
        return Err(MorphismError::MismatchedEndpoints.into());
    }
    let shape =
        CoconeShape::new(vec![f.cod().clone()], vec![Constraint { left: 0, a: f.clone(), right: 0, b: g.clone() }], candidate.eps.clone())?;
    check_legs(&[&candidate.leg], &shape.objects, &candidate.apex)?;
    Ok(verify_cocone(&shape, &candidate.apex, std::slice::from_ref(&candidate.leg), targets, budget)?)
}

/// The ε-colimit property: one constraint `c_dst ∘ D(e) ∼ε c_src` per arrow.
pub fn verify_colimit(
    candidate: &EpsColimit,
    diagram: &FinDiagram,
    targets: &[Arc<Space>],
    budget: &Budget,
) -> Result<UniversalReport, VerifyError> {
    let constraints = diagram
        .arrows()
        .iter()
        .map(|e| Constraint { left: e.src, a: MetMap::identity(diagram.objects()[e.src].clone()), right: e.dst, b: e.map.clone() })
        .collect();
    let shape = CoconeShape::new(diagram.objects().to_vec(), constraints, candidate.eps.clone())?;
    let legs: Vec<&MetMap> = candidate.legs.iter().collect();
    check_legs(&legs, &shape.objects, &candidate.apex)?;
    Ok(verify_cocone(&shape, &candidate.apex, &candidate.legs, targets, budget)?)
}

fn check_legs(legs: &[&MetMap], objects: &[Arc<Space>], apex: &Arc<Space>) -> Result<(), MorphismError> {
    if legs.len() != objects.len() || legs.iter().zip(objects).any(|(l, o)| !same_space(l.dom(), o) || !same_space(l.cod(), apex)) {
        return Err(MorphismError::MismatchedEndpoints);
    }
    Ok(())
}

/// Verification errors that are either malformed input or an exhausted budget.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VerifyError {
    #[error(transparent)]
    Morphism(#[from] MorphismError),
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
}
