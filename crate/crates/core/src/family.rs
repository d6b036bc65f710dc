//! Level-indexed generator families.
//!
//! These groups have infinitely many generators, each a finitary
//! automorphism. Generators are materialized on demand from their names:
//!
//! * `autfin` (all finitary automorphisms of `T_d`): `t_<v>` swaps the
//!   first two children of `v`, `r_<v>` cycles the children of `v`
//!   (`i -> i+1 mod d`); the root vertex is written without suffix (`t`, `r`).
//!   Aliases: for `d = 3`, `g = t` and `h_a, h_b, h_c = r_0, r_1, r_2`;
//!   for `d = 2`, `a = t` and `b = t_0`.
//! * `nonbranch` (binary, weakly branch but not branch): `s_<v>` is the
//!   swap below `v`; `h<k>` is the product of the swaps below every vertex
//!   of level `k`. The generating set is `s_<v>` with `|v|` even and `h<k>`
//!   with `k` odd; other names are valid auxiliary elements.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::tree::{Letter, Vertex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    AutFin,
    NonBranch,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::AutFin => "autfin",
            Family::NonBranch => "nonbranch",
        })
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "autfin" => Ok(Family::AutFin),
            "nonbranch" => Ok(Family::NonBranch),
            other => Err(Error::input(format!("unknown generator family `{other}`"))),
        }
    }
}

/// A generator definition with sections referenced by name (`None` = identity).
pub(crate) struct NamedDef {
    pub perm: Vec<Letter>,
    pub sections: Vec<Option<String>>,
}

fn vertex_name(prefix: &str, v: &[Letter]) -> String {
    if v.is_empty() {
        prefix.to_string()
    } else {
        let digits: String = v
            .iter()
            .map(|&l| std::char::from_digit(l as u32, 36).unwrap())
            .collect();
        format!("{prefix}_{digits}")
    }
}

/// Parses `p` or `p_<digits>` into the vertex.
fn vertex_suffix(name: &str, prefix: &str, degree: usize) -> Option<Vertex> {
    if name == prefix {
        return Some(Vertex::root());
    }
    let digits = name.strip_prefix(prefix)?.strip_prefix('_')?;
    if digits.is_empty() {
        return None;
    }
    Vertex::parse(digits, degree).ok()
}

/// Finitary generator acting by `perm` at vertex `v`, trivially elsewhere.
fn at_vertex(prefix: &str, v: &Vertex, perm: Vec<Letter>, degree: usize) -> NamedDef {
    match v.letters().split_first() {
        None => NamedDef {
            perm,
            sections: vec![None; degree],
        },
        Some((&x, rest)) => {
            let mut sections = vec![None; degree];
            sections[x as usize] = Some(vertex_name(prefix, rest));
            NamedDef {
                perm: (0..degree as Letter).collect(),
                sections,
            }
        }
    }
}

impl Family {
    pub fn validate_degree(&self, degree: usize) -> Result<()> {
        match self {
            Family::AutFin if degree >= 2 => Ok(()),
            Family::NonBranch if degree == 2 => Ok(()),
            _ => Err(Error::input(format!(
                "family {self} is not defined for degree {degree}"
            ))),
        }
    }

    fn alias(&self, name: &str, degree: usize) -> Option<&'static str> {
        match (self, degree, name) {
            (Family::AutFin, 3, "g") => Some("t"),
            (Family::AutFin, 3, "h_a") => Some("r_0"),
            (Family::AutFin, 3, "h_b") => Some("r_1"),
            (Family::AutFin, 3, "h_c") => Some("r_2"),
            (Family::AutFin, 2, "a") => Some("t"),
            (Family::AutFin, 2, "b") => Some("t_0"),
            _ => None,
        }
    }

    /// Canonical name for a (possibly aliased) generator name.
    pub fn canonical_name(&self, name: &str, degree: usize) -> String {
        self.alias(name, degree).map(str::to_string).unwrap_or_else(|| name.to_string())
    }

    pub(crate) fn resolve(&self, name: &str, degree: usize) -> Option<NamedDef> {
        let name = self.alias(name, degree).unwrap_or(name);
        match self {
            Family::AutFin => {
                if let Some(v) = vertex_suffix(name, "t", degree) {
                    let mut perm: Vec<Letter> = (0..degree as Letter).collect();
                    perm.swap(0, 1);
                    return Some(at_vertex("t", &v, perm, degree));
                }
                if let Some(v) = vertex_suffix(name, "r", degree) {
                    let perm = (0..degree).map(|i| ((i + 1) % degree) as Letter).collect();
                    return Some(at_vertex("r", &v, perm, degree));
                }
                None
            }
            Family::NonBranch => {
                if let Some(v) = vertex_suffix(name, "s", degree) {
                    return Some(at_vertex("s", &v, vec![1, 0], degree));
                }
                let k: usize = name.strip_prefix('h')?.parse().ok()?;
                if k == 0 {
                    Some(NamedDef {
                        perm: vec![1, 0],
                        sections: vec![None, None],
                    })
                } else {
                    let below = format!("h{}", k - 1);
                    Some(NamedDef {
                        perm: vec![0, 1],
                        sections: vec![Some(below.clone()), Some(below)],
                    })
                }
            }
        }
    }

    /// Whether `name` belongs to the family's generating set (as opposed to
    /// an auxiliary element used only in sections).
    pub fn is_generator(&self, name: &str, degree: usize) -> bool {
        let name = self.alias(name, degree).unwrap_or(name);
        match self {
            Family::AutFin => self.resolve(name, degree).is_some(),
            Family::NonBranch => {
                if let Some(v) = vertex_suffix(name, "s", degree) {
                    return v.level() % 2 == 0;
                }
                matches!(name.strip_prefix('h').and_then(|k| k.parse::<usize>().ok()), Some(k) if k % 2 == 1)
            }
        }
    }

    /// Depth of the deepest vertex at which the generator acts nontrivially,
    /// plus one: the generator is invisible in quotients of smaller level.
    pub fn generator_depth(&self, name: &str, degree: usize) -> Option<usize> {
        let name = self.alias(name, degree).unwrap_or(name);
        for prefix in ["t", "r", "s"] {
            if let Some(v) = vertex_suffix(name, prefix, degree) {
                return Some(v.level() + 1);
            }
        }
        name.strip_prefix('h')?.parse::<usize>().ok().map(|k| k + 1)
    }

    /// All generators acting above level `n`, in a fixed order.
    pub fn level_generators(&self, degree: usize, n: usize) -> Vec<String> {
        let mut out = Vec::new();
        match self {
            Family::AutFin => {
                for k in 0..n {
                    let count = degree.pow(k as u32);
                    for i in 0..count {
                        let v = Vertex::from_index(i, k, degree);
                        out.push(vertex_name("t", v.letters()));
                        if degree > 2 {
                            out.push(vertex_name("r", v.letters()));
                        }
                    }
                }
            }
            Family::NonBranch => {
                for k in 0..n {
                    if k % 2 == 0 {
                        for i in 0..(1usize << k) {
                            out.push(vertex_name("s", Vertex::from_index(i, k, 2).letters()));
                        }
                    } else {
                        out.push(format!("h{k}"));
                    }
                }
            }
        }
        out
    }
}
