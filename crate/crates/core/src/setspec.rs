//! Text syntax for closed sets.
//!
//! ```text
//! spec  := cyl(<letters>) | point(<point>) | spine(<letters>,<letters>)
//!        | thma(seq=[n1,…];stride=k, x=<point>) | thmb(seq=[n1,…];stride=k)
//!        | evenzero | evenzero(base=b) | union(spec, spec, …)
//! point := <letters>~<letters>      preperiod~period; "0~" is 0^∞
//! ```
//!
//! Whitespace is ignored. Letters are base-36 digits below the degree.

use crate::error::{Error, Result};
use crate::sets::{ClosedSet, SequenceSpec, SetKind};
use crate::tree::{BoundaryPoint, Letter, Vertex};

struct Parser<'a> {
    src: &'a str,
    chars: Vec<(usize, char)>,
    pos: usize,
    degree: usize,
}

/// Parses a set description for the `degree`-ary tree.
pub fn parse_setspec(text: &str, degree: usize) -> Result<ClosedSet> {
    let chars: Vec<(usize, char)> = text.char_indices().filter(|(_, c)| !c.is_whitespace()).collect();
    let mut p = Parser {
        src: text,
        chars,
        pos: 0,
        degree,
    };
    let set = p.spec()?;
    if p.pos < p.chars.len() {
        return Err(Error::parse(p.offset(), "trailing input"));
    }
    Ok(set)
}

impl Parser<'_> {
    fn offset(&self) -> usize {
        self.chars.get(self.pos).map(|&(o, _)| o).unwrap_or(self.src.len())
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::parse(self.offset(), format!("expected `{c}`")))
        }
    }

    fn ident(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek().filter(|c| c.is_ascii_alphabetic()) {
            s.push(c);
            self.pos += 1;
        }
        s
    }

    fn keyword(&mut self, word: &str) -> Result<()> {
        let at = self.offset();
        if self.ident() != word {
            return Err(Error::parse(at, format!("expected `{word}`")));
        }
        self.expect('=')
    }

    fn letters(&mut self) -> Result<Vec<Letter>> {
        let mut out = Vec::new();
        while let Some(c) = self.peek().filter(|c| c.is_ascii_alphanumeric()) {
            let digit = c.to_digit(36).unwrap() as usize;
            if digit >= self.degree {
                return Err(Error::parse(
                    self.offset(),
                    format!("letter `{c}` out of range for degree {}", self.degree),
                ));
            }
            out.push(digit as Letter);
            self.pos += 1;
        }
        Ok(out)
    }

    fn number(&mut self) -> Result<usize> {
        let at = self.offset();
        let mut s = String::new();
        while let Some(c) = self.peek().filter(|c| c.is_ascii_digit()) {
            s.push(c);
            self.pos += 1;
        }
        s.parse().map_err(|_| Error::parse(at, "expected a number"))
    }

    fn point(&mut self) -> Result<BoundaryPoint> {
        let at = self.offset();
        let pre = self.letters()?;
        self.expect('~')?;
        let period = self.letters()?;
        let (pre, period) = if period.is_empty() { (Vec::new(), pre) } else { (pre, period) };
        BoundaryPoint::new(pre, period, self.degree).map_err(|e| Error::parse(at, e.to_string()))
    }

    fn sequence(&mut self) -> Result<SequenceSpec> {
        let at = self.offset();
        self.keyword("seq")?;
        self.expect('[')?;
        let mut prefix = vec![self.number()?];
        while self.peek() == Some(',') {
            self.pos += 1;
            prefix.push(self.number()?);
        }
        self.expect(']')?;
        self.expect(';')?;
        self.keyword("stride")?;
        let stride = self.number()?;
        SequenceSpec::new(prefix, stride).map_err(|e| Error::parse(at, e.to_string()))
    }

    fn spec(&mut self) -> Result<ClosedSet> {
        let at = self.offset();
        let name = self.ident();
        let d = self.degree;
        let wrap = |r: Result<ClosedSet>| r.map_err(|e| if e.is_input() { Error::parse(at, e.to_string()) } else { e });
        match name.as_str() {
            "cyl" => {
                self.expect('(')?;
                let v = self.letters()?;
                self.expect(')')?;
                wrap(ClosedSet::new(d, SetKind::Cylinder(Vertex::from(v))))
            }
            "point" => {
                self.expect('(')?;
                let x = self.point()?;
                self.expect(')')?;
                wrap(ClosedSet::new(d, SetKind::Point(x)))
            }
            "spine" => {
                self.expect('(')?;
                let u = self.letters()?;
                self.expect(',')?;
                let w = self.letters()?;
                self.expect(')')?;
                wrap(ClosedSet::new(
                    d,
                    SetKind::Spine {
                        u: Vertex::from(u),
                        w: Vertex::from(w),
                    },
                ))
            }
            "thma" => {
                self.expect('(')?;
                let seq = self.sequence()?;
                self.expect(',')?;
                self.keyword("x")?;
                let x = self.point()?;
                self.expect(')')?;
                wrap(ClosedSet::new(d, SetKind::Thma { seq, x }))
            }
            "thmb" => {
                self.expect('(')?;
                let seq = self.sequence()?;
                self.expect(')')?;
                wrap(ClosedSet::new(d, SetKind::Thmb { seq }))
            }
            "evenzero" => {
                let mut base = 1;
                if self.peek() == Some('(') {
                    self.pos += 1;
                    if self.peek() != Some(')') {
                        self.keyword("base")?;
                        base = self.number()?;
                    }
                    self.expect(')')?;
                }
                wrap(ClosedSet::new(d, SetKind::EvenZero { base }))
            }
            "union" => {
                self.expect('(')?;
                let mut parts = vec![self.spec()?];
                while self.peek() == Some(',') {
                    self.pos += 1;
                    parts.push(self.spec()?);
                }
                self.expect(')')?;
                wrap(ClosedSet::new(d, SetKind::Union(parts)))
            }
            "" => Err(Error::parse(at, "expected a set")),
            other => Err(Error::parse(at, format!("unknown set kind `{other}`"))),
        }
    }
}
