//! Vertices and boundary points of the d-regular rooted tree.
//!
//! Letters are `0..d`. A vertex of level `n` is a word of length `n`; the
//! lexicographic rank of a level-`n` vertex is its base-`d` value, which is
//! the point label used by every permutation of `V_n` in this crate.

use std::fmt;

use crate::error::{Error, Result};

pub type Letter = u8;

/// Largest number of vertices on a single level that the crate will index.
pub const MAX_LEVEL_SIZE: usize = 1 << 24;

/// A finite word over the alphabet; the empty word is the root.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Vertex(Vec<Letter>);

impl Vertex {
    pub fn root() -> Self {
        Vertex(Vec::new())
    }

    pub fn new(letters: Vec<Letter>, degree: usize) -> Result<Self> {
        if let Some(&bad) = letters.iter().find(|&&l| l as usize >= degree) {
            return Err(Error::input(format!(
                "letter {bad} out of range for degree {degree}"
            )));
        }
        Ok(Vertex(letters))
    }

    /// Parses a digit string such as `"012"`; `""` and `"e"` denote the root.
    pub fn parse(text: &str, degree: usize) -> Result<Self> {
        let text = text.trim();
        if text.is_empty() || text == "e" {
            return Ok(Vertex::root());
        }
        let mut letters = Vec::with_capacity(text.len());
        for (i, c) in text.chars().enumerate() {
            let digit = c
                .to_digit(36)
                .ok_or_else(|| Error::parse(i, format!("`{c}` is not a letter")))?;
            if digit as usize >= degree {
                return Err(Error::parse(
                    i,
                    format!("letter {digit} out of range for degree {degree}"),
                ));
            }
            letters.push(digit as Letter);
        }
        Ok(Vertex(letters))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn level(&self) -> usize {
        self.0.len()
    }

    pub fn child(&self, letter: Letter) -> Vertex {
        let mut v = self.0.clone();
        v.push(letter);
        Vertex(v)
    }

    pub fn prefix(&self, len: usize) -> Vertex {
        Vertex(self.0[..len.min(self.0.len())].to_vec())
    }

    pub fn is_prefix_of(&self, other: &Vertex) -> bool {
        other.0.starts_with(&self.0)
    }

    /// Lexicographic rank among the vertices of the same level.
    pub fn index(&self, degree: usize) -> usize {
        self.0
            .iter()
            .fold(0usize, |acc, &l| acc * degree + l as usize)
    }

    pub fn from_index(mut index: usize, level: usize, degree: usize) -> Vertex {
        let mut letters = vec![0; level];
        for slot in letters.iter_mut().rev() {
            *slot = (index % degree) as Letter;
            index /= degree;
        }
        Vertex(letters)
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("e");
        }
        for &l in &self.0 {
            write!(f, "{}", std::char::from_digit(l as u32, 36).unwrap_or('?'))?;
        }
        Ok(())
    }
}

impl From<Vec<Letter>> for Vertex {
    fn from(v: Vec<Letter>) -> Self {
        Vertex(v)
    }
}

/// `d^n`, failing when the level is too large to index.
pub fn level_size(degree: usize, level: usize) -> Result<usize> {
    let mut size = 1usize;
    for _ in 0..level {
        size = size
            .checked_mul(degree)
            .filter(|&s| s <= MAX_LEVEL_SIZE)
            .ok_or_else(|| Error::resource(format!("level {level} of the {degree}-ary tree"), MAX_LEVEL_SIZE))?;
    }
    Ok(size)
}

/// Length of the longest common prefix of two level-`n` vertices given by rank.
pub fn common_prefix_len(a: usize, b: usize, level: usize, degree: usize) -> usize {
    let mut pa = a;
    let mut pb = b;
    let mut depth = level;
    while pa != pb {
        pa /= degree;
        pb /= degree;
        depth -= 1;
    }
    depth
}

/// An eventually periodic infinite word `pre · period^∞`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BoundaryPoint {
    pre: Vec<Letter>,
    period: Vec<Letter>,
}

impl BoundaryPoint {
    pub fn new(pre: Vec<Letter>, period: Vec<Letter>, degree: usize) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::input("boundary point needs a nonempty period"));
        }
        if let Some(&bad) = pre.iter().chain(&period).find(|&&l| l as usize >= degree) {
            return Err(Error::input(format!(
                "letter {bad} out of range for degree {degree}"
            )));
        }
        Ok(BoundaryPoint { pre, period })
    }

    /// The constant word `letter^∞`.
    pub fn constant(letter: Letter) -> Self {
        BoundaryPoint {
            pre: Vec::new(),
            period: vec![letter],
        }
    }

    pub fn preperiod(&self) -> &[Letter] {
        &self.pre
    }

    pub fn period(&self) -> &[Letter] {
        &self.period
    }

    pub fn letter(&self, i: usize) -> Letter {
        if i < self.pre.len() {
            self.pre[i]
        } else {
            self.period[(i - self.pre.len()) % self.period.len()]
        }
    }

    /// The level-`n` vertex lying on this point.
    pub fn prefix(&self, n: usize) -> Vertex {
        Vertex((0..n).map(|i| self.letter(i)).collect())
    }
}

impl fmt::Display for BoundaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &l in &self.pre {
            write!(f, "{l}")?;
        }
        f.write_str("~")?;
        for &l in &self.period {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_roundtrip() {
        let v = Vertex::parse("2101", 3).unwrap();
        let i = v.index(3);
        assert_eq!(i, 2 * 27 + 9 + 1);
        assert_eq!(Vertex::from_index(i, 4, 3), v);
    }

    #[test]
    fn parse_rejects_large_letters() {
        assert!(Vertex::parse("02", 2).is_err());
        assert_eq!(Vertex::parse("e", 2).unwrap(), Vertex::root());
    }

    #[test]
    fn common_prefix() {
        // 010 and 011 share "01"
        assert_eq!(common_prefix_len(2, 3, 3, 2), 2);
        assert_eq!(common_prefix_len(0, 4, 3, 2), 0);
        assert_eq!(common_prefix_len(5, 5, 3, 2), 3);
    }

    #[test]
    fn boundary_point_prefix() {
        let x = BoundaryPoint::new(vec![1], vec![0, 2], 3).unwrap();
        assert_eq!(x.prefix(4).to_string(), "1020");
        assert!(BoundaryPoint::new(vec![], vec![], 2).is_err());
    }
}
