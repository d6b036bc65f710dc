//! Composite characters and the checks built on them.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use num::{BigRational, One, Zero};
use rayon::prelude::*;

use crate::canonical::{chi1, chi_k, search_generators, BALL_CAP};
use crate::error::{Error, Result};
use crate::group::Group;
use crate::irs::{EstimateOptions, IntervalEstimate, LevelSetup};
use crate::linalg::{ldl_psd, PsdResult};
use crate::orbit::VertexSet;
use crate::sets::ClosedSet;
use crate::tree::Vertex;
use crate::word::GroupWord;

/// A character that can be evaluated exactly on words.
#[derive(Clone)]
pub enum CharacterHandle {
    Trivial,
    Chi1,
    ChiK(u32),
    /// `ψ_n` for a prepared set and level.
    Psi(Arc<LevelSetup>),
    Psip(Arc<LevelSetup>),
    Product(Box<CharacterHandle>, Box<CharacterHandle>),
    Power(Box<CharacterHandle>, u32),
}

impl fmt::Debug for CharacterHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CharacterHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CharacterHandle::Trivial => f.write_str("1"),
            CharacterHandle::Chi1 => f.write_str("chi1"),
            CharacterHandle::ChiK(k) => write!(f, "chi{k}"),
            CharacterHandle::Psi(s) => write!(f, "psi[{};n={}]", s.set, s.level()),
            CharacterHandle::Psip(s) => write!(f, "psip[{};n={}]", s.set, s.level()),
            CharacterHandle::Product(a, b) => write!(f, "({a})*({b})"),
            CharacterHandle::Power(a, k) => write!(f, "({a})^{k}"),
        }
    }
}

impl CharacterHandle {
    pub fn psi(group: &Group, set: &ClosedSet, n: usize) -> Result<Self> {
        Ok(CharacterHandle::Psi(Arc::new(LevelSetup::new(group, set, n, crate::orbit::ORBIT_CAP)?)))
    }

    pub fn psip(group: &Group, set: &ClosedSet, n: usize) -> Result<Self> {
        Ok(CharacterHandle::Psip(Arc::new(LevelSetup::new(group, set, n, crate::orbit::ORBIT_CAP)?)))
    }

    pub fn product(self, other: CharacterHandle) -> Self {
        CharacterHandle::Product(Box::new(self), Box::new(other))
    }

    pub fn power(self, k: u32) -> Self {
        CharacterHandle::Power(Box::new(self), k)
    }

    /// Exact value at `g`. Level characters need their orbit to fit.
    pub fn eval(&self, group: &Group, g: &GroupWord) -> Result<BigRational> {
        let exact = |e: IntervalEstimate| {
            e.value
                .exact()
                .cloned()
                .ok_or_else(|| Error::Internal("expected an exact value".into()))
        };
        match self {
            CharacterHandle::Trivial => Ok(BigRational::one()),
            CharacterHandle::Chi1 => chi1(group, g),
            CharacterHandle::ChiK(k) => chi_k(group, g, *k),
            CharacterHandle::Psi(s) => exact(s.psi(group, g, &EstimateOptions::exact())?),
            CharacterHandle::Psip(s) => exact(s.psip(group, g, &EstimateOptions::exact())?),
            CharacterHandle::Product(a, b) => Ok(a.eval(group, g)? * b.eval(group, g)?),
            CharacterHandle::Power(a, k) => {
                let v = a.eval(group, g)?;
                Ok(num::pow(v, *k as usize))
            }
        }
    }
}

/// Parses `chi1`, `chi<k>`, `psi`, `psip`, and products/powers of them
/// joined by `*` and `^k`. `psi` and `psip` use `set` at level `n`.
pub fn parse_character(
    text: &str,
    group: &Group,
    set: Option<&ClosedSet>,
    n: Option<usize>,
) -> Result<CharacterHandle> {
    let mut out: Option<CharacterHandle> = None;
    for factor in text.split('*') {
        let factor = factor.trim();
        let (base, exp) = match factor.split_once('^') {
            Some((b, e)) => (
                b.trim(),
                e.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::input(format!("bad exponent in `{factor}`")))?,
            ),
            None => (factor, 1),
        };
        let level_args = || -> Result<(&ClosedSet, usize)> {
            Ok((
                set.ok_or_else(|| Error::input(format!("`{base}` needs a set")))?,
                n.ok_or_else(|| Error::input(format!("`{base}` needs a level")))?,
            ))
        };
        let mut h = match base {
            "1" => CharacterHandle::Trivial,
            "chi1" => CharacterHandle::Chi1,
            "psi" => {
                let (c, n) = level_args()?;
                CharacterHandle::psi(group, c, n)?
            }
            "psip" => {
                let (c, n) = level_args()?;
                CharacterHandle::psip(group, c, n)?
            }
            other => match other.strip_prefix("chi").and_then(|k| k.parse::<u32>().ok()) {
                Some(k) if k >= 1 => CharacterHandle::ChiK(k),
                _ => return Err(Error::input(format!("unknown character `{other}`"))),
            },
        };
        if exp != 1 {
            h = h.power(exp);
        }
        out = Some(match out {
            None => h,
            Some(prev) => prev.product(h),
        });
    }
    out.ok_or_else(|| Error::input("empty character expression"))
}

/// Gram matrix `M_ij = χ(g_i g_j⁻¹)`.
pub fn gram_matrix(group: &Group, chi: &CharacterHandle, words: &[GroupWord]) -> Result<Vec<Vec<BigRational>>> {
    let k = words.len();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i..k).map(move |j| (i, j))).collect();
    let vals: Vec<BigRational> = pairs
        .par_iter()
        .map(|&(i, j)| chi.eval(group, &words[i].concat(&words[j].inverse())))
        .collect::<Result<_>>()?;
    let mut m = vec![vec![BigRational::zero(); k]; k];
    for (&(i, j), v) in pairs.iter().zip(vals) {
        m[i][j] = v.clone();
        m[j][i] = v;
    }
    Ok(m)
}

/// Exact PSD certificate (or violating vector) for the Gram matrix.
pub fn gram_psd_certify(group: &Group, chi: &CharacterHandle, words: &[GroupWord]) -> Result<PsdResult> {
    ldl_psd(&gram_matrix(group, chi, words)?)
}

/// The first pair `(g, h)` with `χ(gh) ≠ χ(hg)`, if any.
pub fn centrality_check(
    group: &Group,
    chi: &CharacterHandle,
    pairs: &[(GroupWord, GroupWord)],
) -> Result<Option<(GroupWord, GroupWord)>> {
    for (g, h) in pairs {
        if chi.eval(group, &g.concat(h))? != chi.eval(group, &h.concat(g))? {
            return Ok(Some((g.clone(), h.clone())));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug)]
pub struct Witness {
    pub word: GroupWord,
    pub first: IntervalEstimate,
    pub second: IntervalEstimate,
    pub gap: f64,
    /// Gap minus both error radii.
    pub score: f64,
}

/// Searches words of length at most `max_len` for one whose `ψ^p_n` values
/// on the two sets differ by more than `margin` plus both error radii.
/// Returns the best-scoring word (ties go to the shorter word, then the
/// smaller token sequence) when it clears the margin.
pub fn distinguish_psip(
    group: &Group,
    first: &ClosedSet,
    second: &ClosedSet,
    n: usize,
    max_len: usize,
    margin: f64,
    opts: &EstimateOptions,
) -> Result<Option<Witness>> {
    let s1 = LevelSetup::new(group, first, n, opts.setup_cap())?;
    let s2 = LevelSetup::with_bsgs(group, s1.bsgs.clone(), second, opts.setup_cap())?;
    let gens = search_generators(group, n)?;
    let words = group.ball(&gens, max_len, BALL_CAP)?;
    let scored: Vec<Witness> = words
        .par_iter()
        .map(|w| {
            let a = s1.psip(group, w, opts)?;
            let b = s2.psip(group, w, opts)?;
            let gap = (a.value.to_f64() - b.value.to_f64()).abs();
            let score = gap - a.radius - b.radius;
            Ok(Witness {
                word: w.clone(),
                first: a,
                second: b,
                gap,
                score,
            })
        })
        .collect::<Result<_>>()?;
    let best = scored.into_iter().min_by(|x, y| {
        y.score
            .total_cmp(&x.score)
            .then(x.word.len().cmp(&y.word.len()))
            .then(x.word.cmp(&y.word))
    });
    Ok(best.filter(|w| w.score > margin))
}

/// Number of distinct level-`n` shadows `h·C` over `h ∈ rist(v)` given by
/// words of length at most `L`, for `L = 1..=max_len`.
pub fn rist_orbit_growth(
    group: &Group,
    v: &Vertex,
    set: &ClosedSet,
    n: usize,
    max_len: usize,
) -> Result<Vec<usize>> {
    if v.level() > n {
        return Err(Error::input("vertex lies below the working level"));
    }
    let shadow = set.shadow(n)?;
    let gens = search_generators(group, n)?;
    let words = group.ball(&gens, max_len, BALL_CAP)?;
    let images: Vec<Option<(usize, VertexSet)>> = words
        .par_iter()
        .map(|w| {
            if !group.in_rigid_stabilizer(w, v)? {
                return Ok(None);
            }
            let p = group.portrait(w, n)?.point_action();
            Ok(Some((w.len(), shadow.image(&p))))
        })
        .collect::<Result<_>>()?;
    let mut seen: HashSet<VertexSet> = HashSet::new();
    let mut counts = Vec::with_capacity(max_len);
    let mut it = images.into_iter().flatten().peekable();
    for len in 1..=max_len {
        while let Some((_, b)) = it.next_if(|(l, _)| *l <= len) {
            seen.insert(b);
        }
        counts.push(seen.len());
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::setspec::parse_setspec;

    #[test]
    fn parses_expressions() {
        let g = catalog::group("basilica").unwrap();
        let c = parse_setspec("cyl(0)", 2).unwrap();
        let h = parse_character("chi1 * psi^2", &g, Some(&c), Some(2)).unwrap();
        assert_eq!(h.to_string(), "(chi1)*((psi[cyl(0);n=2])^2)");
        assert!(parse_character("psi", &g, None, Some(2)).is_err());
        assert!(parse_character("chi0", &g, None, None).is_err());
        let a = g.parse_word("a").unwrap();
        assert_eq!(parse_character("chi2", &g, None, None).unwrap().eval(&g, &a).unwrap(), chi_k(&g, &a, 2).unwrap());
    }

    #[test]
    fn gram_of_psi_is_psd() {
        let g = catalog::group("autfin3").unwrap();
        let c = parse_setspec("spine(2,0)", 3).unwrap();
        let chi = CharacterHandle::psi(&g, &c, 2).unwrap();
        let words: Vec<GroupWord> = ["e", "t", "h_a", "r t_1", "h_b h_c"]
            .iter()
            .map(|w| g.parse_word(w).unwrap())
            .collect();
        assert!(gram_psd_certify(&g, &chi, &words).unwrap().is_psd());
    }

    #[test]
    fn level_characters_are_central() {
        let g = catalog::group("autfin2").unwrap();
        let c = parse_setspec("thmb(seq=[2,4];stride=2)", 2).unwrap();
        let chi = CharacterHandle::psip(&g, &c, 5).unwrap();
        let words = g.ball(&search_generators(&g, 3).unwrap(), 2, 10_000).unwrap();
        let pairs: Vec<_> = words.iter().zip(words.iter().rev()).map(|(a, b)| (a.clone(), b.clone())).collect();
        assert!(centrality_check(&g, &chi, &pairs).unwrap().is_none());
    }

    #[test]
    fn distinguishes_thmb_sets() {
        let g = catalog::group("autfin2").unwrap();
        let c1 = parse_setspec("thmb(seq=[2,4];stride=2)", 2).unwrap();
        let c2 = parse_setspec("thmb(seq=[2,5];stride=3)", 2).unwrap();
        let w = distinguish_psip(&g, &c1, &c2, 6, 2, 0.05, &EstimateOptions::exact())
            .unwrap()
            .expect("witness");
        assert!(w.gap >= 0.0625, "{w:?}");
        assert!(distinguish_psip(&g, &c1, &c1, 6, 2, 0.05, &EstimateOptions::exact())
            .unwrap()
            .is_none());
    }

    #[test]
    fn rist_growth() {
        let g = catalog::group("nonbranch").unwrap();
        let c = parse_setspec("evenzero", 2).unwrap();
        for v in ["0", "1"] {
            let v = Vertex::parse(v, 2).unwrap();
            assert_eq!(rist_orbit_growth(&g, &v, &c, 4, 4).unwrap(), vec![1; 4]);
        }
        let g = catalog::group("grigorchuk").unwrap();
        let c = parse_setspec("thmb(seq=[2,4];stride=2)", 2).unwrap();
        let counts = rist_orbit_growth(&g, &Vertex::parse("0", 2).unwrap(), &c, 6, 8).unwrap();
                assert!(counts.windows(2).all(|w| w[0] <= w[1]));
        assert!(counts[7] > counts[0]);
        let outside = parse_setspec("cyl(1)", 2).unwrap();
        let counts = rist_orbit_growth(&g, &Vertex::parse("0", 2).unwrap(), &outside, 6, 6).unwrap();
        assert_eq!(counts, vec![1; 6]);
    }
}
