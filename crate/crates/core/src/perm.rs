//! Permutations of a finite point set and of a tree level.

use std::fmt;

use crate::tree::{level_size, Letter, Vertex};
use crate::error::Result;

/// A permutation of `0..n`, stored as the image table. Composition is
/// functional: `a.compose(&b)` applies `b` first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<u32>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n as u32).collect())
    }

    /// Wraps an image table; the caller guarantees it is a bijection.
    pub fn from_images(images: Vec<u32>) -> Self {
        debug_assert!({
            let mut seen = vec![false; images.len()];
            images.iter().all(|&i| {
                let fresh = !seen[i as usize];
                seen[i as usize] = true;
                fresh
            })
        });
        Perm(images)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[u32] {
        &self.0
    }

    #[inline]
    pub fn apply(&self, point: u32) -> u32 {
        self.0[point as usize]
    }

    pub fn compose(&self, first: &Perm) -> Perm {
        Perm(first.0.iter().map(|&p| self.0[p as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.0.len()];
        for (i, &p) in self.0.iter().enumerate() {
            inv[p as usize] = i as u32;
        }
        Perm(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &p)| i as u32 == p)
    }

    pub fn first_moved(&self) -> Option<u32> {
        self.0
            .iter()
            .enumerate()
            .find(|&(i, &p)| i as u32 != p)
            .map(|(i, _)| i as u32)
    }

    pub fn fixed_points(&self) -> usize {
        self.0
            .iter()
            .enumerate()
            .filter(|&(i, &p)| i as u32 == p)
            .count()
    }

    /// Image of a sorted point set, returned sorted.
    pub fn apply_set(&self, set: &[u32]) -> Vec<u32> {
        let mut out: Vec<u32> = set.iter().map(|&p| self.apply(p)).collect();
        out.sort_unstable();
        out
    }
}

impl fmt::Display for Perm {
    /// Cycle notation with 0-based points; `()` for the identity.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut seen = vec![false; self.0.len()];
        let mut any = false;
        for start in 0..self.0.len() {
            if seen[start] || self.0[start] as usize == start {
                continue;
            }
            any = true;
            f.write_str("(")?;
            let mut p = start;
            let mut first = true;
            while !seen[p] {
                seen[p] = true;
                if !first {
                    f.write_str(" ")?;
                }
                write!(f, "{p}")?;
                first = false;
                p = self.0[p] as usize;
            }
            f.write_str(")")?;
        }
        if !any {
            f.write_str("()")?;
        }
        Ok(())
    }
}

/// An element of `Aut(T_d)/St(n)`: for every vertex above level `n` the
/// permutation of the letters below it (indexed by the input vertex).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LevelPermutation {
    degree: usize,
    level: usize,
    decoration: Vec<Letter>,
}

fn level_offset(degree: usize, level: usize) -> usize {
    // number of vertices strictly above `level`
    let mut total = 0;
    let mut size = 1;
    for _ in 0..level {
        total += size;
        size *= degree;
    }
    total
}

impl LevelPermutation {
    pub fn identity(degree: usize, level: usize) -> Result<Self> {
        level_size(degree, level)?;
        let vertices = level_offset(degree, level);
        let mut decoration = Vec::with_capacity(vertices * degree);
        for _ in 0..vertices {
            decoration.extend((0..degree).map(|x| x as Letter));
        }
        Ok(LevelPermutation {
            degree,
            level,
            decoration,
        })
    }

    /// Builds from per-level vertex permutations; `levels[k][i]` is the
    /// letter permutation at the `i`-th vertex of level `k`.
    pub(crate) fn from_levels(degree: usize, levels: Vec<Vec<Vec<Letter>>>) -> Self {
        let level = levels.len();
        let decoration = levels.into_iter().flatten().flatten().collect();
        LevelPermutation {
            degree,
            level,
            decoration,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn level(&self) -> usize {
        self.level
    }

    /// Letter permutation at vertex `v` (`|v| < level`).
    pub fn at(&self, v: &Vertex) -> &[Letter] {
        let start = (level_offset(self.degree, v.level()) + v.index(self.degree)) * self.degree;
        &self.decoration[start..start + self.degree]
    }

    fn at_index(&self, level: usize, index: usize) -> &[Letter] {
        let start = (level_offset(self.degree, level) + index) * self.degree;
        &self.decoration[start..start + self.degree]
    }

    /// Image of a vertex of level at most `self.level()`.
    pub fn apply(&self, v: &Vertex) -> Vertex {
        let mut out = Vec::with_capacity(v.level());
        let mut index = 0usize;
        for (k, &x) in v.letters().iter().enumerate() {
            out.push(self.at_index(k, index)[x as usize]);
            index = index * self.degree + x as usize;
        }
        Vertex::from(out)
    }

    /// Induced permutation of `V_n` in lexicographic rank.
    pub fn point_action(&self) -> Perm {
        let d = self.degree;
        let mut images = vec![0u32];
        let mut sources = vec![0usize];
        for k in 0..self.level {
            let mut next_img = Vec::with_capacity(images.len() * d);
            let mut next_src = Vec::with_capacity(images.len() * d);
            for (&src, &img) in sources.iter().zip(&images) {
                let perm = self.at_index(k, src);
                for x in 0..d {
                    next_src.push(src * d + x);
                    next_img.push(img * d as u32 + perm[x] as u32);
                }
            }
            images = next_img;
            sources = next_src;
        }
        // `sources` enumerates V_n in rank order
        Perm::from_images(images)
    }

    /// Inverse of [`point_action`](Self::point_action).
    pub fn from_point_action(degree: usize, level: usize, perm: &Perm) -> Result<Self> {
        let size = level_size(degree, level)?;
        assert_eq!(perm.degree(), size, "point permutation has wrong degree");
        let mut levels = Vec::with_capacity(level);
        let mut block = size;
        for _k in 0..level {
            let child_block = block / degree;
            let count = size / block;
            let mut this_level = Vec::with_capacity(count);
            for i in 0..count {
                let mut letters = Vec::with_capacity(degree);
                for x in 0..degree {
                    let leaf = i * block + x * child_block;
                    let img = perm.apply(leaf as u32) as usize;
                    letters.push(((img / child_block) % degree) as Letter);
                }
                this_level.push(letters);
            }
            levels.push(this_level);
            block = child_block;
        }
        Ok(Self::from_levels(degree, levels))
    }

    pub fn compose(&self, first: &LevelPermutation) -> LevelPermutation {
        assert_eq!(self.level, first.level);
        let p = self.point_action().compose(&first.point_action());
        Self::from_point_action(self.degree, self.level, &p).expect("level already validated")
    }

    pub fn inverse(&self) -> LevelPermutation {
        let p = self.point_action().inverse();
        Self::from_point_action(self.degree, self.level, &p).expect("level already validated")
    }

    pub fn is_identity(&self) -> bool {
        self.decoration
            .chunks(self.degree)
            .all(|c| c.iter().enumerate().all(|(i, &l)| i == l as usize))
    }

    /// Restriction to a shallower level.
    pub fn truncate(&self, level: usize) -> LevelPermutation {
        assert!(level <= self.level);
        let end = level_offset(self.degree, level) * self.degree;
        LevelPermutation {
            degree: self.degree,
            level,
            decoration: self.decoration[..end].to_vec(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_applies_right_first() {
        let a = Perm::from_images(vec![1, 0, 2]);
        let b = Perm::from_images(vec![0, 2, 1]);
        // b first: 0->0->1
        assert_eq!(a.compose(&b).images(), &[1, 2, 0]);
        assert!(a.compose(&a).is_identity());
        assert_eq!(a.compose(&b).inverse().compose(&a.compose(&b)), Perm::identity(3));
    }

    #[test]
    fn cycle_display() {
        assert_eq!(Perm::from_images(vec![1, 2, 0, 3]).to_string(), "(0 1 2)");
        assert_eq!(Perm::identity(2).to_string(), "()");
    }

    #[test]
    fn decoration_roundtrip() {
        // swap below the root, then swap below vertex "1"
        let levels = vec![vec![vec![1, 0]], vec![vec![0, 1], vec![1, 0]]];
        let lp = LevelPermutation::from_levels(2, levels);
        let p = lp.point_action();
        // 00->10, 01->11, 10->01, 11->00
        assert_eq!(p.images(), &[2, 3, 1, 0]);
        let back = LevelPermutation::from_point_action(2, 2, &p).unwrap();
        assert_eq!(back, lp);
        assert_eq!(lp.apply(&Vertex::from(vec![1, 0])), Vertex::from(vec![0, 1]));
        assert!(lp.compose(&lp.inverse()).is_identity());
    }
}
