//! Closed subsets of the boundary, queried through their level shadows.
//!
//! The shadow of `C` at level `n` is the set of level-`n` vertices whose
//! cylinder meets `C`. Every family here is described by finitely many
//! eventually periodic words, so shadows are exact.

use std::fmt;
use std::sync::Arc;

use dashmap::DashMap;
use num::{BigInt, BigRational, One, Zero};

use crate::error::{Error, Result};
use crate::orbit::VertexSet;
use crate::perm::LevelPermutation;
use crate::tree::{common_prefix_len, level_size, BoundaryPoint, Letter, Vertex};

/// A strictly increasing sequence of positive integers: a finite prefix,
/// continued with a fixed stride.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SequenceSpec {
    prefix: Vec<usize>,
    stride: usize,
}

impl SequenceSpec {
    pub fn new(prefix: Vec<usize>, stride: usize) -> Result<Self> {
        if prefix.is_empty() {
            return Err(Error::input("sequence prefix must be nonempty"));
        }
        if prefix[0] == 0 {
            return Err(Error::input("sequence terms must be positive"));
        }
        if prefix.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::input("sequence prefix must be strictly increasing"));
        }
        if stride < 2 {
            return Err(Error::input(
                "stride must be at least 2 so that gaps larger than 1 recur",
            ));
        }
        Ok(SequenceSpec { prefix, stride })
    }

    pub fn prefix(&self) -> &[usize] {
        &self.prefix
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    /// The terms smaller than `bound`, in increasing order.
    pub fn terms_below(&self, bound: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.prefix.iter().copied().filter(|&t| t < bound).collect();
        let mut t = *self.prefix.last().unwrap() + self.stride;
        while t < bound {
            out.push(t);
            t += self.stride;
        }
        out
    }
}

impl fmt::Display for SequenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p: Vec<String> = self.prefix.iter().map(|t| t.to_string()).collect();
        write!(f, "seq=[{}];stride={}", p.join(","), self.stride)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SetKind {
    Cylinder(Vertex),
    Point(BoundaryPoint),
    /// `⋃_k ∂T_{u^k w} ∪ {u^∞}`.
    Spine { u: Vertex, w: Vertex },
    /// `⋃_j (∂T_{v_j} \ ∂T_{w_j}) ∪ {x}` where `v_j`, `w_j` are the prefixes
    /// of `x` of lengths `n_j`, `n_j + 1`.
    Thma { seq: SequenceSpec, x: BoundaryPoint },
    /// `{x} ∪ {x_j}` with `x = 0^∞` and `x_j = 0^{n_j} 1 0^∞`.
    Thmb { seq: SequenceSpec },
    /// Binary words with a zero at every position `base, base + 2, …`
    /// (0-based positions).
    EvenZero { base: usize },
    Union(Vec<ClosedSet>),
}

/// A closed subset of `∂T_d` with memoized shadows.
#[derive(Clone, Debug)]
pub struct ClosedSet {
    degree: usize,
    kind: SetKind,
    shadows: Arc<DashMap<usize, VertexSet>>,
}

impl PartialEq for ClosedSet {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree && self.kind == other.kind
    }
}

impl Eq for ClosedSet {}

impl std::hash::Hash for ClosedSet {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.degree.hash(state);
        self.kind.hash(state);
    }
}

fn check_letters(letters: &[Letter], degree: usize) -> Result<()> {
    match letters.iter().find(|&&l| l as usize >= degree) {
        Some(l) => Err(Error::input(format!("letter {l} out of range for degree {degree}"))),
        None => Ok(()),
    }
}

impl ClosedSet {
    pub fn new(degree: usize, kind: SetKind) -> Result<Self> {
        if degree < 2 {
            return Err(Error::input("degree must be at least 2"));
        }
        match &kind {
            SetKind::Cylinder(v) => check_letters(v.letters(), degree)?,
            SetKind::Point(x) => {
                check_letters(x.preperiod(), degree)?;
                check_letters(x.period(), degree)?;
            }
            SetKind::Spine { u, w } => {
                if u.level() == 0 {
                    return Err(Error::input("spine needs a nonempty repeated word"));
                }
                check_letters(u.letters(), degree)?;
                check_letters(w.letters(), degree)?;
            }
            SetKind::Thma { x, .. } => {
                check_letters(x.preperiod(), degree)?;
                check_letters(x.period(), degree)?;
            }
            SetKind::Thmb { .. } => {}
            SetKind::EvenZero { base } => {
                if degree != 2 {
                    return Err(Error::input("evenzero is defined on the binary tree"));
                }
                if *base > 1 {
                    return Err(Error::input("evenzero base must be 0 or 1"));
                }
            }
            SetKind::Union(parts) => {
                if parts.is_empty() {
                    return Err(Error::input("union needs at least one part"));
                }
                if parts.iter().any(|p| p.degree != degree) {
                    return Err(Error::input("union parts have different degrees"));
                }
            }
        }
        Ok(ClosedSet {
            degree,
            kind,
            shadows: Arc::new(DashMap::new()),
        })
    }

    pub fn cylinder(v: Vertex, degree: usize) -> Result<Self> {
        Self::new(degree, SetKind::Cylinder(v))
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn kind(&self) -> &SetKind {
        &self.kind
    }

    /// Whether the set contains no cylinder.
    pub fn has_empty_interior(&self) -> bool {
        match &self.kind {
            SetKind::Cylinder(_) | SetKind::Spine { .. } | SetKind::Thma { .. } => false,
            SetKind::Point(_) | SetKind::Thmb { .. } | SetKind::EvenZero { .. } => true,
            SetKind::Union(parts) => parts.iter().all(|p| p.has_empty_interior()),
        }
    }

    /// `{v ∈ V_n : ∂T_v ∩ C ≠ ∅}`.
    pub fn shadow(&self, n: usize) -> Result<VertexSet> {
        if let Some(s) = self.shadows.get(&n) {
            return Ok(s.clone());
        }
        let s = VertexSet::new(self.degree, n, self.compute_shadow(n)?)?;
        self.shadows.insert(n, s.clone());
        Ok(s)
    }

    fn compute_shadow(&self, n: usize) -> Result<Vec<u32>> {
        let d = self.degree;
        let size = level_size(d, n)?;
        let rank = |letters: &[Letter]| letters.iter().fold(0usize, |a, &l| a * d + l as usize) as u32;
        // every level-n vertex below (or at) the vertex `p`, or the level-n
        // prefix of `p` when `p` is deeper
        let below = |p: &[Letter], out: &mut Vec<u32>| {
            if p.len() >= n {
                out.push(rank(&p[..n]));
            } else {
                let r = rank(p) as usize;
                let span = size / d.pow(p.len() as u32);
                out.extend((r * span..(r + 1) * span).map(|i| i as u32));
            }
        };
        let mut out = Vec::new();
        match &self.kind {
            SetKind::Cylinder(v) => below(v.letters(), &mut out),
            SetKind::Point(x) => out.push(rank(x.prefix(n).letters())),
            SetKind::Spine { u, w } => {
                let limit = BoundaryPoint::new(Vec::new(), u.letters().to_vec(), d)?;
                out.push(rank(limit.prefix(n).letters()));
                let mut p: Vec<Letter> = Vec::new();
                loop {
                    let mut q = p.clone();
                    q.extend_from_slice(w.letters());
                    below(&q, &mut out);
                    if p.len() > n {
                        break;
                    }
                    p.extend_from_slice(u.letters());
                }
            }
            SetKind::Thma { seq, x } => {
                let xn = x.prefix(n);
                out.push(rank(xn.letters()));
                for nj in seq.terms_below(n) {
                    let v = x.prefix(nj);
                    for y in 0..d as Letter {
                        if y != x.letter(nj) {
                            below(v.child(y).letters(), &mut out);
                        }
                    }
                }
            }
            SetKind::Thmb { seq } => {
                out.push(0);
                for nj in seq.terms_below(n) {
                    let xj = BoundaryPoint::new([vec![0; nj], vec![1]].concat(), vec![0], d)?;
                    out.push(rank(xj.prefix(n).letters()));
                }
            }
            SetKind::EvenZero { base } => {
                for i in 0..size {
                    let v = Vertex::from_index(i, n, 2);
                    if v.letters().iter().enumerate().all(|(k, &l)| k < *base || (k - base) % 2 == 1 || l == 0) {
                        out.push(i as u32);
                    }
                }
            }
            SetKind::Union(parts) => {
                for p in parts {
                    out.extend_from_slice(p.shadow(n)?.members());
                }
            }
        }
        Ok(out)
    }
}

impl fmt::Display for ClosedSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letters = |v: &Vertex| -> String {
            v.letters()
                .iter()
                .map(|&l| std::char::from_digit(l as u32, 36).unwrap())
                .collect()
        };
        match &self.kind {
            SetKind::Cylinder(v) => write!(f, "cyl({})", letters(v)),
            SetKind::Point(x) => write!(f, "point({x})"),
            SetKind::Spine { u, w } => write!(f, "spine({},{})", letters(u), letters(w)),
            SetKind::Thma { seq, x } => write!(f, "thma({seq},x={x})"),
            SetKind::Thmb { seq } => write!(f, "thmb({seq})"),
            SetKind::EvenZero { base } => write!(f, "evenzero(base={base})"),
            SetKind::Union(parts) => {
                f.write_str("union(")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{p}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Hausdorff distance between two level-`n` shadows under the metric
/// `d^{-ℓ}`, `ℓ` the common prefix length (distinct vertices only; a vertex
/// is at distance 0 from itself).
pub fn shadow_distance(a: &VertexSet, b: &VertexSet) -> Result<BigRational> {
    if a.level() != b.level() || a.degree() != b.degree() {
        return Err(Error::input("shadows must live on the same level"));
    }
    if a.is_empty() || b.is_empty() {
        return Err(Error::input("shadows of closed nonempty sets are nonempty"));
    }
    let d = a.degree();
    let n = a.level();
    // directed distance as the largest "closest common prefix" deficit
    let directed = |x: &VertexSet, y: &VertexSet| -> Option<usize> {
        let mut worst: Option<usize> = None;
        for &p in x.members() {
            if y.contains(p) {
                continue;
            }
            let best = y
                .members()
                .iter()
                .map(|&q| common_prefix_len(p as usize, q as usize, n, d))
                .max()
                .unwrap();
            worst = Some(worst.map_or(best, |w: usize| w.min(best)));
        }
        worst
    };
    let l = match (directed(a, b), directed(b, a)) {
        (None, None) => return Ok(BigRational::zero()),
        (Some(x), None) | (None, Some(x)) => x,
        (Some(x), Some(y)) => x.min(y),
    };
    Ok(BigRational::new(BigInt::one(), BigInt::from(d).pow(l as u32)))
}

/// Hausdorff distance of the level-`n` shadows of two sets.
pub fn hausdorff_distance(c1: &ClosedSet, c2: &ClosedSet, n: usize) -> Result<BigRational> {
    shadow_distance(&c1.shadow(n)?, &c2.shadow(n)?)
}

/// `h · shadow(C, n)`.
pub fn translate(c: &ClosedSet, h: &LevelPermutation) -> Result<VertexSet> {
    if h.degree() != c.degree() {
        return Err(Error::input("degrees differ"));
    }
    Ok(c.shadow(h.level())?.image(&h.point_action()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::Perm;

    fn v(s: &str, d: usize) -> Vertex {
        Vertex::parse(s, d).unwrap()
    }

    #[test]
    fn spine_shadow() {
        let c = ClosedSet::new(3, SetKind::Spine { u: v("2", 3), w: v("0", 3) }).unwrap();
        assert_eq!(c.shadow(2).unwrap().to_string(), "{00,01,02,20,22}");
        assert_eq!(c.shadow(1).unwrap().to_string(), "{0,2}");
    }

    #[test]
    fn point_and_evenzero() {
        let p = ClosedSet::new(2, SetKind::Point(BoundaryPoint::constant(0))).unwrap();
        assert_eq!(p.shadow(2).unwrap().to_string(), "{00}");
        let ez = ClosedSet::new(2, SetKind::EvenZero { base: 1 }).unwrap();
        assert_eq!(ez.shadow(2).unwrap().to_string(), "{00,10}");
        let ez0 = ClosedSet::new(2, SetKind::EvenZero { base: 0 }).unwrap();
        assert_eq!(ez0.shadow(2).unwrap().to_string(), "{00,01}");
    }

    #[test]
    fn thmb_shadow() {
        let c = ClosedSet::new(2, SetKind::Thmb { seq: SequenceSpec::new(vec![2, 4], 2).unwrap() }).unwrap();
        assert_eq!(c.shadow(6).unwrap().to_string(), "{000000,000010,001000}");
    }

    #[test]
    fn thma_shadow() {
        let x = BoundaryPoint::constant(0);
        let c = ClosedSet::new(2, SetKind::Thma { seq: SequenceSpec::new(vec![1], 2).unwrap(), x }).unwrap();
        // n̄ = 1, 3, 5, …: at level 3, 01* plus 000 (and 0001… is deeper)
        assert_eq!(c.shadow(3).unwrap().to_string(), "{000,010,011}");
    }

    #[test]
    fn distances() {
        let c0 = ClosedSet::cylinder(v("0", 2), 2).unwrap();
        let c1 = ClosedSet::cylinder(v("1", 2), 2).unwrap();
        let c00 = ClosedSet::cylinder(v("00", 2), 2).unwrap();
        assert_eq!(hausdorff_distance(&c0, &c1, 3).unwrap(), BigRational::one());
        assert!(hausdorff_distance(&c0, &c0, 3).unwrap().is_zero());
        assert_eq!(hausdorff_distance(&c00, &c0, 3).unwrap(), BigRational::new(1.into(), 2.into()));
    }

    #[test]
    fn translation() {
        let p = ClosedSet::new(2, SetKind::Point(BoundaryPoint::constant(0))).unwrap();
        let swap = LevelPermutation::from_point_action(2, 1, &Perm::from_images(vec![1, 0])).unwrap();
        assert_eq!(translate(&p, &swap).unwrap().to_string(), "{1}");
    }

    #[test]
    fn stride_one_rejected() {
        assert!(SequenceSpec::new(vec![2, 5], 1).is_err());
        assert!(SequenceSpec::new(vec![5, 2], 3).is_err());
    }
}
