#![allow(dead_code)]

use rand::Rng;
use treechar::setspec::parse_setspec;
use treechar::sets::ClosedSet;
use treechar::{Group, GroupWord};

/// A product of `len` generators drawn uniformly from `gens`, each inverted
/// with probability 1/2.
pub fn random_word<R: Rng>(gens: &[GroupWord], len: usize, rng: &mut R) -> GroupWord {
    let mut w = GroupWord::identity();
    for _ in 0..len {
        let g = &gens[rng.gen_range(0..gens.len())];
        let g = if rng.gen_bool(0.5) { g.inverse() } else { g.clone() };
        w = w.concat(&g);
    }
    w
}

pub const BINARY_SETS: [&str; 10] = [
    "cyl(0)",
    "cyl(01)",
    "point(0~)",
    "point(01~)",
    "spine(1,0)",
    "thma(seq=[1];stride=2,x=0~)",
    "thmb(seq=[1,3];stride=2)",
    "evenzero",
    "evenzero(base=0)",
    "union(cyl(00),point(1~))",
];

pub const TERNARY_SETS: [&str; 10] = [
    "cyl(0)",
    "cyl(12)",
    "point(0~)",
    "point(2~01)",
    "spine(2,0)",
    "spine(1,2)",
    "thma(seq=[1];stride=2,x=0~)",
    "thmb(seq=[1,3];stride=2)",
    "union(cyl(1),point(0~))",
    "union(cyl(00),cyl(22))",
];

/// Ten set descriptions for the group's degree.
pub fn set_instances(group: &Group) -> Vec<ClosedSet> {
    let specs: &[&str] = if group.degree() == 2 { &BINARY_SETS } else { &TERNARY_SETS };
    specs
        .iter()
        .map(|s| parse_setspec(s, group.degree()).unwrap())
        .collect()
}

/// Generators used for random words: the declared ones, or the family
/// generators acting above `level`.
pub fn word_generators(group: &Group, level: usize) -> Vec<GroupWord> {
    group.level_generators(level).unwrap()
}
