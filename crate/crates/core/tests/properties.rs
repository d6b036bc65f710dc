mod common;

use num::{BigRational, One, Zero};
use proptest::prelude::*;
use proptest::sample::select;

use treechar::canonical::chi1;
use treechar::catalog;
use treechar::irs::{EstimateOptions, LevelSetup, Mode};
use treechar::orbit::ORBIT_CAP;
use treechar::sets::{shadow_distance, translate};
use treechar::setspec::parse_setspec;
use treechar::{Group, GroupWord, Vertex};

use common::{set_instances, BINARY_SETS, TERNARY_SETS};

const GROUPS: [&str; 8] = ["basilica", "hanoi", "img-z2-i", "overgroup", "grigorchuk", "autfin2", "autfin3", "nonbranch"];
const RECURSION_GROUPS: [&str; 5] = ["basilica", "hanoi", "img-z2-i", "overgroup", "grigorchuk"];

/// A word over the generators acting above level 3, from raw choices.
fn build(group: &Group, picks: &[(usize, bool)]) -> GroupWord {
    let gens = group.level_generators(3).unwrap();
    GroupWord::from_tokens(picks.iter().map(|&(i, inv)| {
        let t = gens[i % gens.len()].tokens()[0];
        if inv {
            t.inv()
        } else {
            t
        }
    }))
}

fn picks(max: usize) -> impl Strategy<Value = Vec<(usize, bool)>> {
    prop::collection::vec((0usize..64, any::<bool>()), 0..max)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn portrait_is_a_homomorphism(name in select(GROUPS.to_vec()), a in picks(8), b in picks(8), n in 1usize..4) {
        let g = catalog::group(name).unwrap();
        let (x, y) = (build(&g, &a), build(&g, &b));
        let lhs = g.portrait(&x.concat(&y), n).unwrap();
        let rhs = g.portrait(&x, n).unwrap().compose(&g.portrait(&y, n).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn sections_satisfy_the_cocycle_rule(name in select(GROUPS.to_vec()), a in picks(6), b in picks(6), v in 0usize..9) {
        let g = catalog::group(name).unwrap();
        let (x, y) = (build(&g, &a), build(&g, &b));
        let v = Vertex::from_index(v % (g.degree() * g.degree()), 2, g.degree());
        let lhs = g.section(&x.concat(&y), &v);
        let rhs = g.section(&x, &g.act(&y, &v)).concat(&g.section(&y, &v));
        prop_assert!(g.equal(&lhs, &rhs).unwrap());
    }

    #[test]
    fn chi1_is_a_class_function(name in select(RECURSION_GROUPS.to_vec()), a in picks(8), b in picks(5)) {
        let g = catalog::group(name).unwrap();
        let (x, h) = (build(&g, &a), build(&g, &b));
        let v = chi1(&g, &x).unwrap();
        prop_assert!(v >= BigRational::zero() && v <= BigRational::one());
        prop_assert_eq!(&v, &chi1(&g, &x.conjugate_by(&h)).unwrap());
        prop_assert_eq!(&v, &chi1(&g, &x.inverse()).unwrap());
    }

    #[test]
    fn shadows_are_coherent(spec in select(BINARY_SETS.to_vec()), n in 1usize..7) {
        let c = parse_setspec(spec, 2).unwrap();
        let fine = c.shadow(n + 1).unwrap();
        let coarse = c.shadow(n).unwrap();
        prop_assert!(!coarse.is_empty());
        prop_assert_eq!(fine.parents(), coarse);
    }

    #[test]
    fn ternary_shadows_are_coherent(spec in select(TERNARY_SETS.to_vec()), n in 1usize..5) {
        let c = parse_setspec(spec, 3).unwrap();
        prop_assert_eq!(c.shadow(n + 1).unwrap().parents(), c.shadow(n).unwrap());
    }

    #[test]
    fn hausdorff_is_a_metric(a in select(BINARY_SETS.to_vec()), b in select(BINARY_SETS.to_vec()), c in select(BINARY_SETS.to_vec()), n in 1usize..6) {
        let s = |t: &str| parse_setspec(t, 2).unwrap().shadow(n).unwrap();
        let (x, y, z) = (s(a), s(b), s(c));
        let dxy = shadow_distance(&x, &y).unwrap();
        prop_assert_eq!(&dxy, &shadow_distance(&y, &x).unwrap());
        prop_assert_eq!(dxy.is_zero(), x == y);
        prop_assert!(dxy <= shadow_distance(&x, &z).unwrap() + shadow_distance(&z, &y).unwrap());
    }

    #[test]
    fn shadows_are_equivariant(name in select(GROUPS.to_vec()), a in picks(6), i in 0usize..10, n in 1usize..4) {
        let g = catalog::group(name).unwrap();
        let x = build(&g, &a);
        let c = set_instances(&g).swap_remove(i);
        let p = g.portrait(&x, n).unwrap();
        let moved = translate(&c, &p).unwrap();
        prop_assert_eq!(moved, c.shadow(n).unwrap().image(&p.point_action()));
    }

    #[test]
    fn level_values_are_conjugation_invariant(name in select(GROUPS.to_vec()), a in picks(5), b in picks(5), i in 0usize..10, n in 1usize..4) {
        let g = catalog::group(name).unwrap();
        let (x, h) = (build(&g, &a), build(&g, &b));
        let c = set_instances(&g).swap_remove(i);
        let s = LevelSetup::new(&g, &c, n, ORBIT_CAP).unwrap();
        let ex = EstimateOptions::exact();
        let y = x.conjugate_by(&h);
        prop_assert_eq!(s.psi(&g, &x, &ex).unwrap().value, s.psi(&g, &y, &ex).unwrap().value);
        prop_assert_eq!(s.psip(&g, &x, &ex).unwrap().value, s.psip(&g, &y, &ex).unwrap().value);
        let psi = s.psi(&g, &x, &ex).unwrap().value.to_f64();
        let psip = s.psip(&g, &x, &ex).unwrap().value.to_f64();
        prop_assert!((0.0..=1.0).contains(&psip) && psip <= psi && psi <= 1.0);
    }
}

#[test]
fn identity_has_value_one() {
    for name in GROUPS {
        let g = catalog::group(name).unwrap();
        for c in set_instances(&g) {
            for n in 1..=4 {
                let s = LevelSetup::new(&g, &c, n, ORBIT_CAP).unwrap();
                let ex = EstimateOptions::exact();
                let e = GroupWord::identity();
                assert!(s.psi(&g, &e, &ex).unwrap().value.exact().unwrap().is_one());
                assert!(s.psip(&g, &e, &ex).unwrap().value.exact().unwrap().is_one());
            }
        }
    }
}

#[test]
fn monte_carlo_within_radius() {
    let cases = [
        ("autfin2", "thmb(seq=[2,4];stride=2)", "t_00000 t_0001", 6),
        ("autfin3", "spine(2,0)", "h_a", 3),
        ("basilica", "thma(seq=[1];stride=2,x=0~)", "a", 5),
        ("nonbranch", "evenzero", "s h1 s_01", 4),
    ];
    for (i, (name, set, word, n)) in cases.into_iter().enumerate() {
        let g = catalog::group(name).unwrap();
        let c = parse_setspec(set, g.degree()).unwrap();
        let w = g.parse_word(word).unwrap();
        let s = LevelSetup::new(&g, &c, n, ORBIT_CAP).unwrap();
        let ex = EstimateOptions::exact();
        let mc = EstimateOptions::mc(50_000, 1000 + i as u64);
        for pointwise in [false, true] {
            let (exact, est) = if pointwise {
                (s.psip(&g, &w, &ex).unwrap(), s.psip(&g, &w, &mc).unwrap())
            } else {
                (s.psi(&g, &w, &ex).unwrap(), s.psi(&g, &w, &mc).unwrap())
            };
            assert_eq!(est.mode(), Mode::Mc);
            assert!(
                (est.value.to_f64() - exact.value.to_f64()).abs() <= est.radius,
                "{name} {set} {word}: {} vs {}",
                est.value,
                exact.value
            );
        }
    }
}

#[test]
fn strict_gap_on_a_weakly_branch_group() {
    // b^2 fixes both level-1 cylinders and acts nontrivially inside each.
    let g = catalog::group("basilica").unwrap();
    let c = parse_setspec("cyl(0)", 2).unwrap();
    let w = g.parse_word("b^2").unwrap();
    for n in 1..=6 {
        let s = LevelSetup::new(&g, &c, n, ORBIT_CAP).unwrap();
        let ex = EstimateOptions::exact();
        let psi = s.psi(&g, &w, &ex).unwrap().value.to_f64();
        let psip = s.psip(&g, &w, &ex).unwrap().value.to_f64();
        assert!(psi - psip > 0.0, "n={n}: {psi} {psip}");
    }
}
