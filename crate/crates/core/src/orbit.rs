//! Sets of vertices of one level and their orbits under a level quotient.

use std::collections::HashMap;
use std::fmt;

use num::BigUint;

use crate::bsgs::Bsgs;
use crate::error::{Error, Result};
use crate::perm::Perm;
use crate::tree::{level_size, Vertex};

/// Default cap on the number of sets in one orbit.
pub const ORBIT_CAP: usize = 1_000_000;

/// A set of level-`n` vertices, stored as sorted lexicographic ranks.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet {
    degree: usize,
    level: usize,
    members: Vec<u32>,
}

impl VertexSet {
    pub fn new(degree: usize, level: usize, mut members: Vec<u32>) -> Result<Self> {
        let size = level_size(degree, level)?;
        members.sort_unstable();
        members.dedup();
        if members.last().is_some_and(|&m| m as usize >= size) {
            return Err(Error::input("vertex rank out of range"));
        }
        Ok(VertexSet {
            degree,
            level,
            members,
        })
    }

    pub fn from_vertices(degree: usize, level: usize, vertices: &[Vertex]) -> Result<Self> {
        if vertices.iter().any(|v| v.level() != level) {
            return Err(Error::input("all vertices must lie on the same level"));
        }
        Self::new(
            degree,
            level,
            vertices.iter().map(|v| v.index(degree) as u32).collect(),
        )
    }

    /// All of `V_n`.
    pub fn full(degree: usize, level: usize) -> Result<Self> {
        let size = level_size(degree, level)?;
        Ok(VertexSet {
            degree,
            level,
            members: (0..size as u32).collect(),
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn members(&self) -> &[u32] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, rank: u32) -> bool {
        self.members.binary_search(&rank).is_ok()
    }

    pub fn vertices(&self) -> Vec<Vertex> {
        self.members
            .iter()
            .map(|&m| Vertex::from_index(m as usize, self.level, self.degree))
            .collect()
    }

    pub fn image(&self, g: &Perm) -> VertexSet {
        VertexSet {
            degree: self.degree,
            level: self.level,
            members: g.apply_set(&self.members),
        }
    }

    /// Parents of the members, one level up.
    pub fn parents(&self) -> VertexSet {
        assert!(self.level > 0);
        let mut members: Vec<u32> = self.members.iter().map(|&m| m / self.degree as u32).collect();
        members.dedup();
        VertexSet {
            degree: self.degree,
            level: self.level - 1,
            members,
        }
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, v) in self.vertices().iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("}")
    }
}

/// Result of an orbit enumeration.
#[derive(Clone, Debug)]
pub enum Orbit {
    /// All sets of the orbit in sorted order.
    Complete(Vec<VertexSet>),
    /// The orbit has more than `cap` sets.
    Overflow { cap: usize },
}

impl Orbit {
    pub fn sets(&self) -> Option<&[VertexSet]> {
        match self {
            Orbit::Complete(s) => Some(s),
            Orbit::Overflow { .. } => None,
        }
    }
}

/// Orbit of `set` with, for every member, an element mapping `set` to it.
pub(crate) fn orbit_with_transversal(
    group: &Bsgs,
    set: &VertexSet,
    cap: usize,
) -> Result<Option<Vec<(VertexSet, Perm)>>> {
    check_level(group, set)?;
    let mut index: HashMap<Vec<u32>, usize> = HashMap::new();
    let mut out: Vec<(VertexSet, Perm)> = vec![(set.clone(), Perm::identity(group.points()))];
    index.insert(set.members.clone(), 0);
    let mut head = 0;
    while head < out.len() {
        let (current, rep) = out[head].clone();
        head += 1;
        for s in group.generators() {
            let img = current.image(s);
            if !index.contains_key(&img.members) {
                if out.len() >= cap {
                    return Ok(None);
                }
                index.insert(img.members.clone(), out.len());
                out.push((img, s.compose(&rep)));
            }
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(Some(out))
}

fn check_level(group: &Bsgs, set: &VertexSet) -> Result<()> {
    if set.level != group.level() || set.degree != group.degree() {
        return Err(Error::input(format!(
            "set lives on level {} but the group acts on level {}",
            set.level,
            group.level()
        )));
    }
    Ok(())
}

/// Orbit of `set` under the level quotient, by breadth-first closure under
/// the generators.
pub fn orbit_of_set(group: &Bsgs, set: &VertexSet, cap: usize) -> Result<Orbit> {
    check_level(group, set)?;
    let mut seen: std::collections::HashSet<Vec<u32>> = std::collections::HashSet::new();
    seen.insert(set.members.clone());
    let mut queue = vec![set.clone()];
    let mut head = 0;
    while head < queue.len() {
        let current = queue[head].clone();
        head += 1;
        for s in group.generators() {
            let img = current.image(s);
            if seen.insert(img.members.clone()) {
                if queue.len() >= cap {
                    return Ok(Orbit::Overflow { cap });
                }
                queue.push(img);
            }
        }
    }
    queue.sort();
    Ok(Orbit::Complete(queue))
}

/// `|G| / |orbit|`.
pub fn setwise_stabilizer_order(group: &Bsgs, set: &VertexSet, cap: usize) -> Result<BigUint> {
    match orbit_of_set(group, set, cap)? {
        Orbit::Complete(sets) => Ok(group.order() / BigUint::from(sets.len())),
        Orbit::Overflow { cap } => Err(Error::OrbitOverflow { cap }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bsgs::level_quotient;
    use crate::catalog;

    fn set(d: usize, n: usize, vs: &[&str]) -> VertexSet {
        let v: Vec<Vertex> = vs.iter().map(|s| Vertex::parse(s, d).unwrap()).collect();
        VertexSet::from_vertices(d, n, &v).unwrap()
    }

    #[test]
    fn small_orbits() {
        let af2 = level_quotient(&catalog::group("autfin2").unwrap(), 1).unwrap();
        let o = orbit_of_set(&af2, &set(2, 1, &["0"]), ORBIT_CAP).unwrap();
        assert_eq!(o.sets().unwrap().len(), 2);
        assert_eq!(setwise_stabilizer_order(&af2, &set(2, 1, &["0"]), ORBIT_CAP).unwrap(), 1u32.into());

        let af3 = level_quotient(&catalog::group("autfin3").unwrap(), 1).unwrap();
        let s = set(3, 1, &["0", "2"]);
        let o = orbit_of_set(&af3, &s, ORBIT_CAP).unwrap();
        assert_eq!(o.sets().unwrap().len(), 3);
        assert_eq!(setwise_stabilizer_order(&af3, &s, ORBIT_CAP).unwrap(), 2u32.into());

        let bas = level_quotient(&catalog::group("basilica").unwrap(), 1).unwrap();
        assert_eq!(orbit_of_set(&bas, &set(2, 1, &["0"]), ORBIT_CAP).unwrap().sets().unwrap().len(), 2);
    }

    #[test]
    fn full_set_is_fixed() {
        let g = level_quotient(&catalog::group("hanoi").unwrap(), 2).unwrap();
        let full = VertexSet::full(3, 2).unwrap();
        assert_eq!(setwise_stabilizer_order(&g, &full, ORBIT_CAP).unwrap(), g.order());
    }

    #[test]
    fn overflow_is_a_value() {
        let g = level_quotient(&catalog::group("autfin2").unwrap(), 3).unwrap();
        let o = orbit_of_set(&g, &set(2, 3, &["000", "001", "010"]), 3).unwrap();
        assert!(matches!(o, Orbit::Overflow { cap: 3 }));
    }

    #[test]
    fn display_and_parents() {
        let s = set(2, 2, &["01", "11", "10"]);
        assert_eq!(s.to_string(), "{01,10,11}");
        assert_eq!(s.parents().to_string(), "{0,1}");
    }
}
