//! Randomised checks of the finite-scale laws relating ε-homotopy, purity,
//! splitness, ε-monomorphisms and ε-injectivity.
//!
//! Every law is an implication (or equivalence) checked literally on each
//! generated instance. An instance where the premise fails counts as checked
//! but vacuous. Instances are generated from independent seeded streams and
//! evaluated in parallel; tallies are merged in instance order, so the report
//! does not depend on scheduling.

use std::collections::HashMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::budget::{Budget, BudgetExceeded};
use crate::colimit::eps_pushout;
use crate::construct::product;
use crate::corpus::{default_values, random_arrow, random_map, random_space, random_subset, stream};
use crate::extrat::ExtRat;
use crate::grid::DistanceGrid;
use crate::hom::{hom_set, HomSearch, MapKind};
use crate::injectivity::{is_eps_injective, is_eps_mono, is_eps_split, TestFamily};
use crate::morphism::{hom_dist, MetMap};
use crate::purity::{purity, Variant};
use crate::space::Space;

#[derive(Debug, Clone)]
pub struct LawConfig {
    pub instances: usize,
    /// Largest space used as a domain or codomain.
    pub max_points: usize,
    pub values: Vec<ExtRat>,
    pub eps: Vec<ExtRat>,
    /// Test spaces for purity and ε-monos: every space over `values` with at
    /// most this many points.
    pub family_max_points: usize,
    /// Positive, strictly descending grid standing in for "every ε > 0".
    pub ap_grid: Vec<ExtRat>,
    pub budget: Budget,
}

impl Default for LawConfig {
    fn default() -> Self {
        LawConfig {
            instances: 200,
            max_points: 4,
            values: default_values(),
            eps: vec![ExtRat::zero(), ExtRat::frac(1, 2), ExtRat::one(), ExtRat::INF],
            family_max_points: 2,
            ap_grid: vec![ExtRat::int(2), ExtRat::one(), ExtRat::frac(1, 2), ExtRat::frac(1, 4)],
            budget: Budget::default(),
        }
    }
}

/// Law names and statements, in report order.
pub const LAWS: &[(&str, &str)] = &[
    ("hom_distance_is_a_metric", "d(f,f) = 0, d(f,g) = d(g,f) > 0 for f != g, d(f,h) <= d(f,g) + d(g,h)"),
    ("composition_is_non_expansive", "d(k f, k g) <= d(f, g) and d(f j, g j) <= d(f, g)"),
    ("homotopy_is_transitive", "f ~e g and g ~d h imply f ~(e+d) h"),
    ("composite_of_pure_maps_is_pure", "f1, f2 pure at e imply f2 f1 pure at e"),
    ("first_factor_of_pure_composite_is_pure", "f2 f1 pure (weak, bare) at e implies f1 pure (weak, bare) at e"),
    ("split_mono_is_pure", "p f = id implies f pure at every e"),
    ("pure_is_weak_and_bare", "f pure at e implies f weakly and barely pure at e"),
    ("weak_is_bare_at_double", "f weakly pure at e implies f barely pure at 2e"),
    ("split_mono_is_eps_split", "p f = id implies f e-split"),
    ("eps_split_is_weak_bare_and_double_mono", "f e-split implies f weakly and barely pure at e and a 2e-mono"),
    ("bare_pure_is_double_mono", "f barely pure at e (family with 1 and every 2_d) implies f a 2e-mono"),
    ("close_maps_transport_purity", "f ~e f': f pure at 2e implies f' weak at e; f pure at e implies f' bare at e"),
    ("near_factorisation_transports_purity", "g f ~e h: h pure at 2e implies f weak at e; h pure at e implies f bare at e"),
    ("zero_injectivity_is_strict_injectivity", "0-injective iff every g extends exactly"),
    ("injectivity_is_monotone_in_eps", "e-injective implies e'-injective for e' >= e"),
    ("infinite_injectivity_characterised", "inf-injective to f: A -> B iff hom(B,K) empty only when hom(A,K) empty"),
    ("injectivity_closed_under_products", "K1, K2 e-injective to f imply K1 x K2 e-injective to f"),
    ("injectivity_closed_under_retracts", "K e-injective to f and R a retract of K imply R e-injective to f"),
    ("eps_pushout_leg_inherits_injectivity", "K e-injective to f implies K injective to the opposite e-pushout leg"),
    ("mapping_cylinder_characterises_injectivity", "K e-injective to f iff K injective to the e-pushout leg of (id, f)"),
    ("composite_of_grid_pure_maps_is_grid_pure", "f1, f2 pure on the e-grid imply f2 f1 pure on the grid"),
    ("first_factor_of_grid_pure_composite_is_grid_pure", "f2 f1 pure on the e-grid implies f1 pure on the grid"),
    ("purity_is_monotone_in_family", "pure (weak, bare) for a family implies the same for every subfamily"),
    ("splitness_is_monotone_in_eps", "e-split implies e'-split for e' >= e"),
    ("bare_purity_is_monotone_in_eps", "barely pure at e implies barely pure at e' >= e"),
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LawOutcome {
    pub name: String,
    pub statement: String,
    pub checked: u64,
    /// Checks whose premise held.
    pub non_vacuous: u64,
    pub failures: u64,
    pub counterexample: Option<Value>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LawReport {
    pub seed: u64,
    pub instances: usize,
    /// Instances abandoned because a search budget ran out.
    pub skipped: usize,
    pub laws: Vec<LawOutcome>,
    pub passed: bool,
}

#[derive(Debug, Clone, Default)]
struct Tally {
    checked: u64,
    non_vacuous: u64,
    failures: u64,
    counterexample: Option<Value>,
}

struct Recorder {
    tallies: Vec<Tally>,
}

impl Recorder {
    fn law(&self, name: &str) -> usize {
        LAWS.iter().position(|(n, _)| *n == name).expect("law is listed")
    }

    /// Records one check of `premise ⇒ conclusion`; the conclusion is only
    /// evaluated when the premise holds.
    fn implies(
        &mut self,
        name: &str,
        premise: bool,
        conclusion: impl FnOnce() -> Result<bool, BudgetExceeded>,
        witness: impl FnOnce() -> Value,
    ) -> Result<(), BudgetExceeded> {
        let i = self.law(name);
        self.tallies[i].checked += 1;
        if !premise {
            return Ok(());
        }
        self.tallies[i].non_vacuous += 1;
        if !conclusion()? {
            let t = &mut self.tallies[i];
            t.failures += 1;
            if t.counterexample.is_none() {
                t.counterexample = Some(witness());
            }
        }
        Ok(())
    }

    fn holds(&mut self, name: &str, ok: bool, witness: impl FnOnce() -> Value) -> Result<(), BudgetExceeded> {
        self.implies(name, true, || Ok(ok), witness)
    }
}

/// Maps an instance talks about, by slot.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Slot {
    F1,
    F2,
    Composite,
    Close,
    Near,
}

struct Ctx<'a> {
    family: &'a TestFamily,
    small_family: &'a TestFamily,
    budget: &'a Budget,
    memo: HashMap<(Slot, ExtRat, Variant, bool), bool>,
}

impl Ctx<'_> {
    fn pure(&mut self, slot: Slot, f: &MetMap, eps: &ExtRat, v: Variant) -> Result<bool, BudgetExceeded> {
        self.pure_in(slot, f, eps, v, false)
    }

    fn pure_in(&mut self, slot: Slot, f: &MetMap, eps: &ExtRat, v: Variant, small: bool) -> Result<bool, BudgetExceeded> {
        let key = (slot, eps.clone(), v, small);
        if let Some(&b) = self.memo.get(&key) {
            return Ok(b);
        }
        let fam = if small { self.small_family } else { self.family };
        let b = purity(f, eps, v, fam, self.budget)?.holds;
        self.memo.insert(key, b);
        Ok(b)
    }

    fn grid_pure(&mut self, slot: Slot, f: &MetMap, grid: &[ExtRat]) -> Result<bool, BudgetExceeded> {
        for e in grid {
            if !self.pure(slot, f, e, Variant::Pure)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn strictly_injective(k: &Arc<Space>, f: &MetMap, budget: &Budget) -> Result<bool, BudgetExceeded> {
    let hs = hom_set(f.cod(), k, budget)?;
    let composites: Vec<MetMap> = hs.iter().map(|h| h.after(f)).collect();
    Ok(hom_set(f.dom(), k, budget)?.iter().all(|g| composites.iter().any(|c| c.as_slice() == g.as_slice())))
}

fn has_exact_retraction(f: &MetMap, budget: &Budget) -> Result<bool, BudgetExceeded> {
    Ok(is_eps_split(f, &ExtRat::zero(), budget)?.is_some())
}

fn close_partner<R: Rng>(rng: &mut R, f: &MetMap, eps: &ExtRat, budget: &Budget) -> Result<MetMap, BudgetExceeded> {
    let near: Vec<MetMap> = hom_set(f.dom(), f.cod(), budget)?.into_iter().filter(|g| hom_dist(f, g).expect("parallel") <= *eps).collect();
    Ok(near.choose(rng).cloned().unwrap_or_else(|| f.clone()))
}

fn js(m: &MetMap) -> Value {
    serde_json::to_value(m).expect("maps serialize")
}

fn sp(s: &Space) -> Value {
    serde_json::to_value(s).expect("spaces serialize")
}

fn run_instance(
    cfg: &LawConfig,
    family: &TestFamily,
    small_family: &TestFamily,
    seed: u64,
    index: usize,
) -> Result<Vec<Tally>, BudgetExceeded> {
    let budget = &cfg.budget;
    let mut rng = stream(seed, index as u64);
    let eps = cfg.eps.choose(&mut rng).expect("nonempty eps list").clone();
    let two_eps = eps.double();
    let k_size = rng.gen_range(1..=cfg.max_points);
    let k = Arc::new(random_space(&mut rng, k_size, &cfg.values));
    let f1 = random_arrow(&mut rng, &k, cfg.max_points, &cfg.values, budget)?;
    let f2 = random_arrow(&mut rng, f1.cod(), cfg.max_points, &cfg.values, budget)?;
    let f21 = f2.after(&f1);
    let f_close = close_partner(&mut rng, &f1, &eps, budget)?;
    let h_near = close_partner(&mut rng, &f21, &eps, budget)?;
    let x_size = rng.gen_range(1..=cfg.max_points.min(3));
    let x = Arc::new(random_space(&mut rng, x_size, &cfg.values));
    let x2_size = rng.gen_range(1..=2);
    let x2 = Arc::new(random_space(&mut rng, x2_size, &cfg.values));
    let side = {
        let n = rng.gen_range(1..=cfg.max_points.min(3));
        let c = Arc::new(random_space(&mut rng, n, &cfg.values));
        random_map(&mut rng, &k, &c, budget)?.expect("a nonempty codomain receives constant maps")
    };
    let pre = {
        let n = rng.gen_range(1..=2);
        let j = Arc::new(random_space(&mut rng, n, &cfg.values));
        random_map(&mut rng, &j, &k, budget)?.expect("k is nonempty")
    };
    let retract_points = random_subset(&mut rng, x.len());

    let mut rec = Recorder { tallies: vec![Tally::default(); LAWS.len()] };
    let mut ctx = Ctx { family, small_family, budget, memo: HashMap::new() };
    let eps_up: Vec<ExtRat> = cfg.eps.iter().filter(|e| **e >= eps).cloned().collect();
    let base = || json!({ "instance": index, "eps": eps.to_string(), "f1": js(&f1), "f2": js(&f2) });

    // hom-set metric and composition
    {
        let (a, b) = (&f1, &f_close);
        let c = close_partner(&mut rng, &f1, &ExtRat::INF, budget)?;
        let dab = hom_dist(a, b).expect("parallel");
        let ok = hom_dist(a, a).expect("parallel").is_zero()
            && dab == hom_dist(b, a).expect("parallel")
            && (dab.is_zero() == (a == b))
            && hom_dist(a, &c).expect("parallel") <= &dab + &hom_dist(b, &c).expect("parallel");
        rec.holds("hom_distance_is_a_metric", ok, || json!({ "instance": index, "f": js(a), "g": js(b), "h": js(&c) }))?;
        let post = hom_dist(&f2.after(a), &f2.after(b)).expect("parallel") <= dab;
        let pre_ok = hom_dist(&a.after(&pre), &b.after(&pre)).expect("parallel") <= dab;
        rec.holds(
            "composition_is_non_expansive",
            post && pre_ok,
            || json!({ "instance": index, "f": js(a), "g": js(b), "k": js(&f2), "j": js(&pre) }),
        )?;
        let d1 = hom_dist(&f21, &h_near).expect("parallel");
        let partner = close_partner(&mut rng, &h_near, &ExtRat::one(), budget)?;
        let d2 = hom_dist(&h_near, &partner).expect("parallel");
        let total = &d1 + &d2;
        let ok = hom_dist(&f21, &partner).expect("parallel") <= total;
        rec.holds("homotopy_is_transitive", ok, || json!({ "instance": index, "f": js(&f21), "g": js(&h_near), "h": js(&partner) }))?;
    }

    // purity laws
    let p1 = ctx.pure(Slot::F1, &f1, &eps, Variant::Pure)?;
    let p2 = ctx.pure(Slot::F2, &f2, &eps, Variant::Pure)?;
    rec.implies("composite_of_pure_maps_is_pure", p1 && p2, || ctx.pure(Slot::Composite, &f21, &eps, Variant::Pure), base)?;
    for v in Variant::ALL {
        let comp = ctx.pure(Slot::Composite, &f21, &eps, v)?;
        rec.implies(
            "first_factor_of_pure_composite_is_pure",
            comp,
            || ctx.pure(Slot::F1, &f1, &eps, v),
            || json!({ "instance": index, "variant": v, "eps": eps.to_string(), "f1": js(&f1), "f2": js(&f2) }),
        )?;
    }
    let split_mono = has_exact_retraction(&f1, budget)?;
    rec.implies("split_mono_is_pure", split_mono, || ctx.pure(Slot::F1, &f1, &eps, Variant::Pure), base)?;
    rec.implies("split_mono_is_eps_split", split_mono, || Ok(is_eps_split(&f1, &eps, budget)?.is_some()), base)?;
    rec.implies(
        "pure_is_weak_and_bare",
        p1,
        || Ok(ctx.pure(Slot::F1, &f1, &eps, Variant::Weak)? && ctx.pure(Slot::F1, &f1, &eps, Variant::Bare)?),
        base,
    )?;
    let w1 = ctx.pure(Slot::F1, &f1, &eps, Variant::Weak)?;
    rec.implies("weak_is_bare_at_double", w1, || ctx.pure(Slot::F1, &f1, &two_eps, Variant::Bare), base)?;
    let eps_split = is_eps_split(&f1, &eps, budget)?.is_some();
    rec.implies(
        "eps_split_is_weak_bare_and_double_mono",
        eps_split,
        || {
            Ok(ctx.pure(Slot::F1, &f1, &eps, Variant::Weak)?
                && ctx.pure(Slot::F1, &f1, &eps, Variant::Bare)?
                && is_eps_mono(&f1, &two_eps, family, budget)?.is_none())
        },
        base,
    )?;
    let b1 = ctx.pure(Slot::F1, &f1, &eps, Variant::Bare)?;
    rec.implies("bare_pure_is_double_mono", b1, || Ok(is_eps_mono(&f1, &two_eps, family, budget)?.is_none()), base)?;
    {
        let strong = ctx.pure(Slot::F1, &f1, &two_eps, Variant::Pure)?;
        let wit = || json!({ "instance": index, "eps": eps.to_string(), "f": js(&f1), "f_close": js(&f_close) });
        rec.implies("close_maps_transport_purity", strong, || ctx.pure(Slot::Close, &f_close, &eps, Variant::Weak), wit)?;
        rec.implies("close_maps_transport_purity", p1, || ctx.pure(Slot::Close, &f_close, &eps, Variant::Bare), wit)?;
        let h2 = ctx.pure(Slot::Near, &h_near, &two_eps, Variant::Pure)?;
        let h1 = ctx.pure(Slot::Near, &h_near, &eps, Variant::Pure)?;
        let wit = || json!({ "instance": index, "eps": eps.to_string(), "f": js(&f1), "g": js(&f2), "h": js(&h_near) });
        rec.implies("near_factorisation_transports_purity", h2, || ctx.pure(Slot::F1, &f1, &eps, Variant::Weak), wit)?;
        rec.implies("near_factorisation_transports_purity", h1, || ctx.pure(Slot::F1, &f1, &eps, Variant::Bare), wit)?;
    }
    for v in Variant::ALL {
        let big = ctx.pure(Slot::F1, &f1, &eps, v)?;
        rec.implies("purity_is_monotone_in_family", big, || ctx.pure_in(Slot::F1, &f1, &eps, v, true), base)?;
    }
    for e in &eps_up {
        rec.implies("splitness_is_monotone_in_eps", eps_split, || Ok(is_eps_split(&f1, e, budget)?.is_some()), base)?;
        rec.implies("bare_purity_is_monotone_in_eps", b1, || ctx.pure(Slot::F1, &f1, e, Variant::Bare), base)?;
    }
    {
        let g1 = ctx.grid_pure(Slot::F1, &f1, &cfg.ap_grid)?;
        let g2 = ctx.grid_pure(Slot::F2, &f2, &cfg.ap_grid)?;
        let g21 = ctx.grid_pure(Slot::Composite, &f21, &cfg.ap_grid)?;
        rec.holds("composite_of_grid_pure_maps_is_grid_pure", !(g1 && g2) || g21, base)?;
        rec.implies("first_factor_of_grid_pure_composite_is_grid_pure", g21, || Ok(g1), base)?;
    }

    // injectivity laws
    let inj = |k: &Arc<Space>, f: &MetMap, e: &ExtRat| -> Result<bool, BudgetExceeded> { Ok(is_eps_injective(k, f, e, budget)?.holds) };
    let x_inj = inj(&x, &f1, &eps)?;
    let witness_x = || json!({ "instance": index, "eps": eps.to_string(), "k": sp(&x), "f": js(&f1) });
    rec.holds("zero_injectivity_is_strict_injectivity", inj(&x, &f1, &ExtRat::zero())? == strictly_injective(&x, &f1, budget)?, witness_x)?;
    for e in &eps_up {
        rec.implies("injectivity_is_monotone_in_eps", x_inj, || inj(&x, &f1, e), witness_x)?;
    }
    {
        let b_empty = hom_set(f1.cod(), &x, budget)?.is_empty();
        let a_empty = hom_set(f1.dom(), &x, budget)?.is_empty();
        rec.holds("infinite_injectivity_characterised", inj(&x, &f1, &ExtRat::INF)? == (!b_empty || a_empty), witness_x)?;
    }
    {
        let second = inj(&x2, &f1, &eps)?;
        let prod = product(&[x.clone(), x2.clone()], budget)?;
        rec.implies(
            "injectivity_closed_under_products",
            x_inj && second,
            || inj(&prod.space, &f1, &eps),
            || json!({ "instance": index, "eps": eps.to_string(), "k1": sp(&x), "k2": sp(&x2), "f": js(&f1) }),
        )?;
    }
    if !retract_points.is_empty() {
        let r_space = Arc::new(x.subspace(&retract_points));
        let mut pins = vec![None; x.len()];
        for (i, &p) in retract_points.iter().enumerate() {
            pins[p] = Some(i);
        }
        let retraction = HomSearch::new(x.clone(), r_space.clone(), MapKind::NonExpansive).first(&pins, budget)?;
        rec.implies(
            "injectivity_closed_under_retracts",
            x_inj && retraction.is_some(),
            || inj(&r_space, &f1, &eps),
            || json!({ "instance": index, "eps": eps.to_string(), "k": sp(&x), "retract": retract_points, "f": js(&f1) }),
        )?;
    }
    {
        let po = eps_pushout(&f1, &side, &eps).expect("span shares its domain");
        rec.implies(
            "eps_pushout_leg_inherits_injectivity",
            x_inj,
            || inj(&x, &po.leg_f, &ExtRat::zero()),
            || json!({ "instance": index, "eps": eps.to_string(), "k": sp(&x), "f": js(&f1), "g": js(&side) }),
        )?;
        let id = MetMap::identity(f1.dom().clone());
        let cyl = eps_pushout(&id, &f1, &eps).expect("span shares its domain");
        let via_cylinder = inj(&x, &cyl.leg_g, &ExtRat::zero())?;
        rec.holds("mapping_cylinder_characterises_injectivity", x_inj == via_cylinder, witness_x)?;
    }
    Ok(rec.tallies)
}

/// Runs every law on `config.instances` seeded instances.
pub fn law_harness(config: &LawConfig, seed: u64) -> Result<LawReport, BudgetExceeded> {
    let grid = DistanceGrid::new(config.values.clone(), config.family_max_points).expect("law values form a grid");
    let family = TestFamily::over_grid(&grid, &config.budget)?;
    let small: Vec<Space> = family.spaces().iter().filter(|s| s.len() <= 1).map(|s| (**s).clone()).collect();
    let small_family = TestFamily::new(small, 1, &config.budget)?;
    let runs: Vec<Result<Vec<Tally>, BudgetExceeded>> =
        (0..config.instances).into_par_iter().map(|i| run_instance(config, &family, &small_family, seed, i)).collect();
    let mut totals = vec![Tally::default(); LAWS.len()];
    let mut skipped = 0;
    for run in runs {
        match run {
            Ok(tallies) => {
                for (t, add) in totals.iter_mut().zip(tallies) {
                    t.checked += add.checked;
                    t.non_vacuous += add.non_vacuous;
                    t.failures += add.failures;
                    if t.counterexample.is_none() {
                        t.counterexample = add.counterexample;
                    }
                }
            }
            Err(_) => skipped += 1,
        }
    }
    let laws: Vec<LawOutcome> = LAWS
        .iter()
        .zip(totals)
        .map(|((name, statement), t)| LawOutcome {
            name: name.to_string(),
            statement: statement.to_string(),
            checked: t.checked,
            non_vacuous: t.non_vacuous,
            failures: t.failures,
            counterexample: t.counterexample,
        })
        .collect();
    let passed = laws.iter().all(|l| l.failures == 0);
    Ok(LawReport { seed, instances: config.instances, skipped, laws, passed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_is_green_and_deterministic() {
        let cfg = LawConfig { instances: 24, ..LawConfig::default() };
        let a = law_harness(&cfg, 7).unwrap();
        for law in &a.laws {
            assert_eq!(law.failures, 0, "{}: {:?}", law.name, law.counterexample);
        }
        assert!(a.passed);
        assert_eq!(a.skipped, 0);
        let b = law_harness(&cfg, 7).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
}
