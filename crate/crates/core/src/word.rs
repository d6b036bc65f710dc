//! Words in generators and their inverses.

use std::ops::Mul;

/// Index of a generator in a group's generator table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GenId(pub u32);

/// One generator or its inverse. The derived order (generator index, then
/// positive before inverse) is the lexicographic token order used for ties.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Token {
    pub gen: GenId,
    pub inverse: bool,
}

impl Token {
    pub fn new(gen: GenId, inverse: bool) -> Self {
        Token { gen, inverse }
    }

    pub fn inv(self) -> Token {
        Token {
            gen: self.gen,
            inverse: !self.inverse,
        }
    }

    fn cancels(self, other: Token) -> bool {
        self.gen == other.gen && self.inverse != other.inverse
    }
}

/// A freely reduced word. The rightmost token acts first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GroupWord(Vec<Token>);

impl GroupWord {
    pub fn identity() -> Self {
        GroupWord(Vec::new())
    }

    /// Builds a word from arbitrary tokens, freely reducing them.
    pub fn from_tokens<I: IntoIterator<Item = Token>>(tokens: I) -> Self {
        let mut out: Vec<Token> = Vec::new();
        for t in tokens {
            match out.last() {
                Some(&last) if last.cancels(t) => {
                    out.pop();
                }
                _ => out.push(t),
            }
        }
        GroupWord(out)
    }

    pub fn generator(gen: GenId) -> Self {
        GroupWord(vec![Token::new(gen, false)])
    }

    pub fn tokens(&self) -> &[Token] {
        &self.0
    }

    /// Length after free reduction.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> GroupWord {
        GroupWord(self.0.iter().rev().map(|t| t.inv()).collect())
    }

    /// `self · other`, i.e. `other` acts first.
    pub fn concat(&self, other: &GroupWord) -> GroupWord {
        GroupWord::from_tokens(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn pow(&self, k: i64) -> GroupWord {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = GroupWord::identity();
        for _ in 0..k.unsigned_abs() {
            out = out.concat(&base);
        }
        out
    }

    /// `self⁻¹ · other⁻¹ · self · other`.
    pub fn commutator(&self, other: &GroupWord) -> GroupWord {
        self.inverse()
            .concat(&other.inverse())
            .concat(self)
            .concat(other)
    }

    /// `other · self · other⁻¹`.
    pub fn conjugate_by(&self, other: &GroupWord) -> GroupWord {
        other.concat(self).concat(&other.inverse())
    }
}

impl Mul for &GroupWord {
    type Output = GroupWord;
    fn mul(self, rhs: &GroupWord) -> GroupWord {
        self.concat(rhs)
    }
}
