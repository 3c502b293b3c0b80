mod common;

use std::sync::Arc;

use common::{all_functions, eps, map_between, non_expansive, space, sup_dist};
use metricat_core::{
    injectivity_gap, is_eps_injective, is_eps_mono, is_eps_split, law_harness, purity, Budget, DistanceGrid, ExtRat, LawConfig, MetMap,
    Space, TestFamily, Variant,
};
use proptest::prelude::*;

fn homs(a: &Space, b: &Space) -> Vec<Vec<usize>> {
    all_functions(a.len(), b.len()).into_iter().filter(|f| non_expansive(a, b, f)).collect()
}

fn compose(outer: &[usize], inner: &[usize]) -> Vec<usize> {
    inner.iter().map(|&x| outer[x]).collect()
}

fn family() -> TestFamily {
    TestFamily::over_grid(&DistanceGrid::parse("1/2,1,2,inf", 2).unwrap(), &Budget::default()).unwrap()
}

fn injective_oracle(k: &Space, f: &MetMap, e: &ExtRat) -> bool {
    let hs = homs(f.cod(), k);
    homs(f.dom(), k).iter().all(|g| hs.iter().any(|h| &sup_dist(k, &compose(h, f.as_slice()), g) <= e))
}

fn mono_oracle(f: &MetMap, e: &ExtRat, family: &TestFamily) -> bool {
    family.spaces().iter().all(|c| {
        let gs = homs(c, f.dom());
        gs.iter().all(|g| gs.iter().all(|h| compose(f.as_slice(), g) != compose(f.as_slice(), h) || &sup_dist(f.dom(), g, h) <= e))
    })
}

fn split_oracle(f: &MetMap, e: &ExtRat) -> bool {
    let id: Vec<usize> = (0..f.dom().len()).collect();
    homs(f.cod(), f.dom()).iter().any(|p| &sup_dist(f.dom(), &compose(p, f.as_slice()), &id) <= e)
}

fn purity_oracle(f: &MetMap, e: &ExtRat, v: Variant, family: &TestFamily) -> bool {
    let (k, l) = (f.dom(), f.cod());
    let filler = if v == Variant::Weak { e.double() } else { e.clone() };
    for a in family.spaces() {
        for b in family.spaces() {
            for u in homs(a, k) {
                let fu = compose(f.as_slice(), &u);
                for g in homs(a, b) {
                    let square = homs(b, l).iter().any(|w| {
                        let vg = compose(w, &g);
                        if v == Variant::Bare {
                            vg == fu
                        } else {
                            &sup_dist(l, &vg, &fu) <= e
                        }
                    });
                    if square && !homs(b, k).iter().any(|t| sup_dist(k, &compose(t, &g), &u) <= filler) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn injectivity_matches_brute_force(k in space(1, 3), a in space(0, 2), b in space(1, 3), s in any::<u64>(), e in eps()) {
        prop_assume!(map_between(&a, &b, s).is_some());
        let f = map_between(&a, &b, s).unwrap();
        let v = is_eps_injective(&k, &f, &e, &Budget::default()).unwrap();
        prop_assert_eq!(v.holds, injective_oracle(&k, &f, &e));
        if let Some(gap) = injectivity_gap(&k, &f, &Budget::default()).unwrap() {
            prop_assert!(injective_oracle(&k, &f, &gap));
            prop_assert_eq!(v.holds, gap <= e);
        } else {
            prop_assert!(!v.holds);
        }
    }

    #[test]
    fn mono_and_split_match_brute_force(a in space(1, 3), b in space(1, 3), s in any::<u64>(), e in eps()) {
        let f = map_between(&a, &b, s).unwrap();
        let fam = family();
        prop_assert_eq!(is_eps_mono(&f, &e, &fam, &Budget::default()).unwrap().is_none(), mono_oracle(&f, &e, &fam));
        let p = is_eps_split(&f, &e, &Budget::default()).unwrap();
        prop_assert_eq!(p.is_some(), split_oracle(&f, &e));
        if let Some(p) = p {
            let pf = p.compose(&f).unwrap();
            prop_assert!(metricat_core::hom_dist(&pf, &MetMap::identity(a.clone())).unwrap() <= e);
        }
    }

    #[test]
    fn purity_matches_brute_force(a in space(1, 2), b in space(1, 3), s in any::<u64>(), e in eps()) {
        let f = map_between(&a, &b, s).unwrap();
        let fam = family();
        for v in Variant::ALL {
            prop_assert_eq!(purity(&f, &e, v, &fam, &Budget::default()).unwrap().holds, purity_oracle(&f, &e, v, &fam), "{}", v);
        }
    }
}

fn three_point(e: &ExtRat) -> MetMap {
    let z = ExtRat::zero();
    let k = Space::validate(vec![
        vec![z.clone(), e.clone(), e.double()],
        vec![e.clone(), z.clone(), e.clone()],
        vec![e.double(), e.clone(), z],
    ])
    .unwrap();
    MetMap::constant(Arc::new(k), Arc::new(Space::point()), 0).unwrap()
}

#[test]
fn three_point_collapse_is_split_but_only_a_double_mono() {
    let budget = Budget::default();
    for e in [ExtRat::frac(1, 2), ExtRat::one(), ExtRat::int(2)] {
        let f = three_point(&e);
        let fam = TestFamily::subspaces_of(f.dom(), 3, &budget).unwrap();
        assert!(is_eps_split(&f, &e, &budget).unwrap().is_some(), "{e}");
        assert!(is_eps_mono(&f, &e, &fam, &budget).unwrap().is_some(), "{e}");
        assert!(is_eps_mono(&f, &e.double(), &fam, &budget).unwrap().is_none(), "{e}");
        assert!(split_oracle(&f, &e) && !mono_oracle(&f, &e, &fam) && mono_oracle(&f, &e.double(), &fam));
    }
}

#[test]
fn law_harness_is_green_on_another_seed() {
    let report = law_harness(&LawConfig { instances: 60, ..LawConfig::default() }, 2024).unwrap();
    for law in &report.laws {
        assert_eq!(law.failures, 0, "{}: {:?}", law.name, law.counterexample);
        assert!(law.checked > 0, "{}", law.name);
    }
    assert!(report.passed);
}
