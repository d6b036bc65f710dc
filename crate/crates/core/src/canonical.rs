//! The canonical character `χ₁(g) = μ(Fix(g))`.
//!
//! For `g = (g|_0, …, g|_{d-1})·σ` one has
//! `χ₁(g) = (1/d)·Σ_{σ(x) = x} χ₁(g|_x)`. The words reachable from `g`
//! through sections at fixed letters form a finite dependency graph when the
//! group is contracting; each strongly connected component is a square
//! linear system solved exactly, sinks first.

use std::collections::HashMap;

use num::{BigInt, BigRational, Integer, One, Signed, Zero};
use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use rayon::prelude::*;

use crate::catalog::ValueSet;
use crate::error::{Error, Result};
use crate::group::Group;
use crate::linalg;
use crate::orbit::VertexSet;
use crate::tree::{level_size, Vertex};
use crate::word::{GenId, GroupWord};

/// Default cap on the word ball searched by [`approximate_fixed_set`].
pub const BALL_CAP: usize = 2_000_000;

fn one() -> BigRational {
    BigRational::one()
}

struct Node {
    word: GroupWord,
    /// Sections at fixed letters that are not the identity.
    deps: Vec<GroupWord>,
    /// Fixed letters whose section is the identity.
    trivial: usize,
}

/// `μ(Fix(g))`, exactly.
pub fn chi1(group: &Group, g: &GroupWord) -> Result<BigRational> {
    if let Some(v) = group.chi_memo.get(g) {
        return Ok(v.clone());
    }
    if group.is_identity(g)? {
        return Ok(one());
    }
    let cap = group.caps().closure;
    let mut index: HashMap<GroupWord, usize> = HashMap::new();
    let mut nodes: Vec<Node> = Vec::new();
    let mut known: HashMap<GroupWord, BigRational> = HashMap::new();
    index.insert(g.clone(), 0);
    let mut queue = vec![g.clone()];
    let mut head = 0;
    while head < queue.len() {
        let w = queue[head].clone();
        head += 1;
        let dec = group.decompose(&w);
        let mut deps = Vec::new();
        let mut trivial = 0;
        for (x, s) in dec.sections.into_iter().enumerate() {
            if dec.perm[x] as usize != x {
                continue;
            }
            if s.is_empty() || known.get(&s).is_some_and(|v| v.is_one()) {
                trivial += 1;
                continue;
            }
            if let Some(v) = group.chi_memo.get(&s) {
                known.insert(s.clone(), v.clone());
                deps.push(s);
                continue;
            }
            if !index.contains_key(&s) {
                if group.is_identity(&s)? {
                    known.insert(s, one());
                    trivial += 1;
                    continue;
                }
                if index.len() >= cap {
                    return Err(Error::resource(
                        "canonical character dependency closure (not contracting at this cap)",
                        cap,
                    ));
                }
                index.insert(s.clone(), index.len());
                queue.push(s.clone());
            }
            deps.push(s);
        }
        nodes.push(Node {
            word: w,
            deps,
            trivial,
        });
    }

    let mut graph: DiGraph<usize, ()> = DiGraph::with_capacity(nodes.len(), 0);
    let ids: Vec<NodeIndex> = (0..nodes.len()).map(|i| graph.add_node(i)).collect();
    for (i, n) in nodes.iter().enumerate() {
        for s in &n.deps {
            if let Some(&j) = index.get(s) {
                graph.add_edge(ids[i], ids[j], ());
            }
        }
    }
    let d = BigRational::from_integer(BigInt::from(group.degree()));
    let mut merge_budget = group.caps().merge_pairs;
    let mut solved: Vec<Option<BigRational>> = vec![None; nodes.len()];
    for comp in tarjan_scc(&graph) {
        let members: Vec<usize> = comp.iter().map(|&ix| graph[ix]).collect();
        let reps = merge_equal(group, &nodes, &members, &mut merge_budget)?;
        let distinct: Vec<usize> = {
            let mut v: Vec<usize> = reps.values().copied().collect();
            v.sort_unstable();
            v.dedup();
            v
        };
        let local: HashMap<usize, usize> = distinct.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let m = distinct.len();
        let mut a = vec![vec![BigRational::zero(); m]; m];
        let mut b = vec![BigRational::zero(); m];
        for (row, &i) in distinct.iter().enumerate() {
            a[row][row] += &d;
            b[row] += BigRational::from_integer(BigInt::from(nodes[i].trivial));
            for s in &nodes[i].deps {
                let value = match index.get(s) {
                    Some(&j) => match &solved[j] {
                        Some(v) => Some(v.clone()),
                        None => {
                            let col = local[&reps[&j]];
                            a[row][col] -= one();
                            None
                        }
                    },
                    None => Some(known[s].clone()),
                };
                if let Some(v) = value {
                    b[row] += v;
                }
            }
        }
        let x = linalg::solve(&a, &b).map_err(|e| match e {
            Error::Singular(_) => Error::Singular(format!(
                "the fixed-point system of {}",
                group.format_word(&nodes[members[0]].word)
            )),
            other => other,
        })?;
        for &i in &members {
            solved[i] = Some(x[local[&reps[&i]]].clone());
        }
    }
    for (n, v) in nodes.iter().zip(&solved) {
        group.chi_memo.insert(n.word.clone(), v.clone().expect("every component solved"));
    }
    Ok(solved[0].clone().unwrap())
}

/// Union of component members that are equal in the group, within budget.
fn merge_equal(
    group: &Group,
    nodes: &[Node],
    members: &[usize],
    budget: &mut usize,
) -> Result<HashMap<usize, usize>> {
    let mut reps: HashMap<usize, usize> = members.iter().map(|&i| (i, i)).collect();
    if members.len() < 2 {
        return Ok(reps);
    }
    let mut classes: Vec<usize> = Vec::new();
    for &i in members {
        let mut found = None;
        for &c in &classes {
            if *budget == 0 {
                break;
            }
            *budget -= 1;
            if group.equal(&nodes[i].word, &nodes[c].word)? {
                found = Some(c);
                break;
            }
        }
        match found {
            Some(c) => {
                reps.insert(i, c);
            }
            None => classes.push(i),
        }
    }
    Ok(reps)
}

/// `χ₁(g)^k`.
pub fn chi_k(group: &Group, g: &GroupWord, k: u32) -> Result<BigRational> {
    if k == 0 {
        return Err(Error::input("k must be at least 1"));
    }
    Ok(num::pow(chi1(group, g)?, k as usize))
}

/// `d^{|v|}·μ(Fix(g) ∩ ∂T_v)`: zero when `g` moves `v`, otherwise `χ₁(g|_v)`.
pub fn fix_measure_in_cylinder(group: &Group, g: &GroupWord, v: &Vertex) -> Result<BigRational> {
    if group.act(g, v) != *v {
        return Ok(BigRational::zero());
    }
    chi1(group, &group.section(g, v))
}

/// `μ(Fix(g) Δ A)` for the clopen set `A` given by level-`n` vertices.
pub fn fix_symdiff(group: &Group, g: &GroupWord, a: &VertexSet) -> Result<BigRational> {
    if a.degree() != group.degree() {
        return Err(Error::input("set and group have different degrees"));
    }
    let states = group.level_states(g, a.level())?;
    let mut total = BigRational::zero();
    for (v, (img, sec)) in states.iter().enumerate() {
        let f = if *img == v { chi1(group, sec)? } else { BigRational::zero() };
        if a.contains(v as u32) {
            total += one() - f;
        } else {
            total += f;
        }
    }
    let size = level_size(group.degree(), a.level())?;
    Ok(total / BigRational::from_integer(BigInt::from(size)))
}

/// Generators used for word searches: the declared ones, or for a family the
/// generators acting above `level`.
pub(crate) fn search_generators(group: &Group, level: usize) -> Result<Vec<GenId>> {
    Ok(group
        .level_generators(level)?
        .iter()
        .map(|w| w.tokens()[0].gen)
        .collect())
}

/// The word of length at most `max_len` minimizing `μ(Fix(g) Δ A)`; ties go
/// to the shorter word, then to the smaller token sequence.
pub fn approximate_fixed_set(
    group: &Group,
    a: &VertexSet,
    max_len: usize,
) -> Result<(GroupWord, BigRational)> {
    let gens = search_generators(group, a.level().max(1))?;
    let ball = group.ball(&gens, max_len, BALL_CAP)?;
    let scored: Vec<(BigRational, GroupWord)> = ball
        .par_iter()
        .map(|w| fix_symdiff(group, w, a).map(|v| (v, w.clone())))
        .collect::<Result<_>>()?;
    scored
        .into_iter()
        .min_by(|x, y| {
            x.0.cmp(&y.0)
                .then(x.1.len().cmp(&y.1.len()))
                .then(x.1.cmp(&y.1))
        })
        .map(|(v, w)| (w, v))
        .ok_or_else(|| Error::Internal("empty word ball".into()))
}

/// Whether `q ∈ s·Q_b ∩ [0, 1]`.
pub fn value_set_member(set: &ValueSet, q: &BigRational) -> bool {
    if q.is_negative() || *q > one() {
        return false;
    }
    let mut den = (q / set.scale()).denom().clone();
    let base = BigInt::from(set.base);
    loop {
        let g = den.gcd(&base);
        if g.is_one() {
            break;
        }
        while (&den % &g).is_zero() {
            den /= &g;
        }
    }
    den.is_one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn chi(name: &str, w: &str) -> BigRational {
        let g = catalog::group(name).unwrap();
        let word = g.parse_word(w).unwrap();
        chi1(&g, &word).unwrap()
    }

    #[test]
    fn basilica_values() {
        assert_eq!(chi("basilica", "a"), q(1, 2));
        assert_eq!(chi("basilica", "b"), q(0, 1));
        assert_eq!(chi("basilica", "e"), q(1, 1));
    }

    #[test]
    fn img_values() {
        assert_eq!(chi("img-z2-i", "b"), q(1, 3));
        assert_eq!(chi("img-z2-i", "c"), q(2, 3));
        assert_eq!(chi("img-z2-i", "b c"), q(1, 3));
    }

    #[test]
    fn overgroup_values() {
        for (w, v) in [("b", 3), ("c", 6), ("d", 5), ("b c", 2), ("b d", 1), ("c d", 4), ("b c d", 0)] {
            assert_eq!(chi("overgroup", w), q(v, 7), "{w}");
        }
    }

    #[test]
    fn hanoi_self_loop() {
        assert_eq!(chi("hanoi", "a"), q(0, 1));
    }

    #[test]
    fn powers() {
        let g = catalog::group("img-z2-i").unwrap();
        assert_eq!(chi_k(&g, &g.parse_word("c").unwrap(), 3).unwrap(), q(8, 27));
        assert_eq!(chi_k(&g, &GroupWord::identity(), 5).unwrap(), q(1, 1));
    }

    #[test]
    fn cylinders() {
        let g = catalog::group("basilica").unwrap();
        let a = g.parse_word("a").unwrap();
        assert_eq!(fix_measure_in_cylinder(&g, &a, &Vertex::parse("1", 2).unwrap()).unwrap(), q(0, 1));
        assert_eq!(fix_measure_in_cylinder(&g, &a, &Vertex::parse("0", 2).unwrap()).unwrap(), q(1, 1));
        let h = catalog::group("hanoi").unwrap();
        let ha = h.parse_word("a").unwrap();
        assert_eq!(fix_measure_in_cylinder(&h, &ha, &Vertex::parse("0", 3).unwrap()).unwrap(), q(0, 1));
    }

    #[test]
    fn symmetric_differences() {
        let g = catalog::group("basilica").unwrap();
        let e = GroupWord::identity();
        let empty = VertexSet::new(2, 2, vec![]).unwrap();
        let full = VertexSet::full(2, 2).unwrap();
        assert_eq!(fix_symdiff(&g, &e, &empty).unwrap(), q(1, 1));
        assert_eq!(fix_symdiff(&g, &e, &full).unwrap(), q(0, 1));
        let a = g.parse_word("a").unwrap();
        let zero = VertexSet::new(2, 1, vec![0]).unwrap();
        assert_eq!(fix_symdiff(&g, &a, &zero).unwrap(), q(0, 1));
    }

    #[test]
    fn searches() {
        let g = catalog::group("basilica").unwrap();
        let (w, v) = approximate_fixed_set(&g, &VertexSet::full(2, 2).unwrap(), 2).unwrap();
        assert!(w.is_empty() && v.is_zero());
        let (w, v) = approximate_fixed_set(&g, &VertexSet::new(2, 1, vec![0]).unwrap(), 1).unwrap();
        assert_eq!(g.format_word(&w), "a");
        assert!(v.is_zero());
        let h = catalog::group("hanoi").unwrap();
        let (w, v) = approximate_fixed_set(&h, &VertexSet::new(3, 1, vec![]).unwrap(), 2).unwrap();
        assert!(v.is_zero());
        assert_eq!(h.format_word(&w), "a");
    }

    #[test]
    fn value_sets() {
        let seventh = ValueSet { scale_num: 1, scale_den: 7, base: 2 };
        assert!(value_set_member(&seventh, &q(3, 7)));
        assert!(value_set_member(&seventh, &q(3, 28)));
        assert!(!value_set_member(&seventh, &q(1, 3)));
        let q3 = ValueSet { scale_num: 1, scale_den: 1, base: 3 };
        assert!(!value_set_member(&q3, &q(1, 2)));
        assert!(value_set_member(&q3, &q(2, 9)));
        let third = ValueSet { scale_num: 1, scale_den: 3, base: 2 };
        assert!(value_set_member(&third, &q(1, 3)));
        assert!(!value_set_member(&third, &q(4, 3)));
        let q6 = ValueSet { scale_num: 1, scale_den: 1, base: 6 };
        assert!(value_set_member(&q6, &q(5, 12)));
    }
}
