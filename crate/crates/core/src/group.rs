//! Self-similar groups given by wreath recursions, and the word problem.
//!
//! A generator `s` is a root permutation `p` of the letters together with one
//! section word per input letter: `s(x·w) = p(x)·s|_x(w)`. Words act right to
//! left. Level-indexed families (see [`crate::family`]) use the same machinery
//! with generators materialized on demand.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use dashmap::DashMap;
use num::BigRational;
use parking_lot::RwLock;
use sha2::{Digest, Sha256};

use crate::catalog::BranchKind;
use crate::error::{Error, Result};
use crate::family::Family;
use crate::perm::LevelPermutation;
use crate::tree::{level_size, Letter, Vertex};
use crate::word::{GenId, GroupWord, Token};

/// Resource caps; every cap overflow is reported as [`Error::Resource`].
#[derive(Clone, Debug)]
pub struct Caps {
    /// Distinct words visited by one word-problem check.
    pub word_problem: usize,
    /// Nodes in one dependency closure of the canonical character.
    pub closure: usize,
    /// `is_identity` checks spent merging closure nodes.
    pub merge_pairs: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            word_problem: 100_000,
            closure: 10_000,
            merge_pairs: 10_000,
        }
    }
}

/// A generator as written in a definition: root permutation and sections.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorDef {
    pub name: String,
    pub perm: Vec<Letter>,
    pub sections: Vec<GroupWord>,
}

struct Compiled {
    name: String,
    perm: Vec<Letter>,
    inv_perm: Vec<Letter>,
    sections: Vec<GroupWord>,
    inv_sections: Vec<GroupWord>,
}

impl Compiled {
    fn new(name: String, perm: Vec<Letter>, sections: Vec<GroupWord>) -> Self {
        let mut inv_perm = vec![0; perm.len()];
        for (x, &y) in perm.iter().enumerate() {
            inv_perm[y as usize] = x as Letter;
        }
        let inv_sections = (0..perm.len())
            .map(|y| sections[inv_perm[y] as usize].inverse())
            .collect();
        Compiled {
            name,
            perm,
            inv_perm,
            sections,
            inv_sections,
        }
    }

    #[inline]
    fn step(&self, inverse: bool, x: Letter) -> (Letter, &GroupWord) {
        if inverse {
            (self.inv_perm[x as usize], &self.inv_sections[x as usize])
        } else {
            (self.perm[x as usize], &self.sections[x as usize])
        }
    }
}

#[derive(Default)]
struct GenTable {
    defs: Vec<Arc<Compiled>>,
    by_name: HashMap<String, GenId>,
}

/// First-level decomposition `g = (g|_0, …, g|_{d-1})·σ` of a word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub perm: Vec<Letter>,
    pub sections: Vec<GroupWord>,
}

impl Decomposition {
    pub fn root_is_trivial(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p as usize)
    }
}

/// A group acting on the `d`-regular rooted tree.
pub struct Group {
    name: String,
    degree: usize,
    family: Option<Family>,
    declared: Vec<GenId>,
    table: RwLock<GenTable>,
    identity_memo: DashMap<GroupWord, bool>,
    pub(crate) chi_memo: DashMap<GroupWord, BigRational>,
    caps: Caps,
    branch: Option<BranchKind>,
}

impl std::fmt::Debug for Group {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Group")
            .field("name", &self.name)
            .field("degree", &self.degree)
            .field("family", &self.family)
            .finish()
    }
}

pub(crate) fn is_valid_name(name: &str) -> bool {
    !name.is_empty()
        && name != "e"
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.' || c == '\'')
}

impl Group {
    /// A group given by a finite generator table. Section words must
    /// reference generators of the same table, which is why they are passed
    /// as text and resolved after every name is known.
    pub fn from_recursion(
        name: impl Into<String>,
        degree: usize,
        generators: &[(String, Vec<Letter>, Vec<String>)],
    ) -> Result<Self> {
        if degree < 2 {
            return Err(Error::input("degree must be at least 2"));
        }
        let mut by_name = HashMap::new();
        for (i, (gname, perm, sections)) in generators.iter().enumerate() {
            if !is_valid_name(gname) {
                return Err(Error::input(format!("invalid generator name `{gname}`")));
            }
            if by_name.insert(gname.clone(), GenId(i as u32)).is_some() {
                return Err(Error::input(format!("duplicate generator `{gname}`")));
            }
            check_perm(perm, degree).map_err(|e| Error::input(format!("generator {gname}: {e}")))?;
            if sections.len() != degree {
                return Err(Error::input(format!(
                    "generator {gname} has {} sections, expected {degree}",
                    sections.len()
                )));
            }
        }
        let mut group = Group::empty(name.into(), degree, None);
        group.table.write().by_name = by_name;
        let mut defs = Vec::with_capacity(generators.len());
        for (gname, perm, sections) in generators {
            let words = sections
                .iter()
                .map(|s| group.parse_word(s))
                .collect::<Result<Vec<_>>>()?;
            defs.push(Arc::new(Compiled::new(gname.clone(), perm.clone(), words)));
        }
        group.declared = (0..defs.len() as u32).map(GenId).collect();
        group.table.write().defs = defs;
        Ok(group)
    }

    /// A level-indexed generator family.
    pub fn from_family(name: impl Into<String>, family: Family, degree: usize) -> Result<Self> {
        family.validate_degree(degree)?;
        Ok(Group::empty(name.into(), degree, Some(family)))
    }

    fn empty(name: String, degree: usize, family: Option<Family>) -> Self {
        Group {
            name,
            degree,
            family,
            declared: Vec::new(),
            table: RwLock::new(GenTable::default()),
            identity_memo: DashMap::new(),
            chi_memo: DashMap::new(),
            caps: Caps::default(),
            branch: None,
        }
    }

    pub fn with_caps(mut self, caps: Caps) -> Self {
        self.caps = caps;
        self
    }

    /// Records the branching type (metadata used by shortcuts that are only
    /// valid for branch groups).
    pub fn with_branch(mut self, branch: BranchKind) -> Self {
        self.branch = Some(branch);
        self
    }

    pub fn branch(&self) -> Option<BranchKind> {
        self.branch
    }

    pub fn caps(&self) -> &Caps {
        &self.caps
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn family(&self) -> Option<Family> {
        self.family
    }

    /// Declared generators of a recursion-defined group (empty for families).
    pub fn declared_generators(&self) -> Vec<GroupWord> {
        self.declared.iter().map(|&g| GroupWord::generator(g)).collect()
    }

    pub fn generator_defs(&self) -> Vec<GeneratorDef> {
        let table = self.table.read();
        self.declared
            .iter()
            .map(|g| {
                let c = &table.defs[g.0 as usize];
                GeneratorDef {
                    name: c.name.clone(),
                    perm: c.perm.clone(),
                    sections: c.sections.clone(),
                }
            })
            .collect()
    }

    pub fn generator_name(&self, gen: GenId) -> String {
        self.table.read().defs[gen.0 as usize].name.clone()
    }

    /// Looks up a generator, materializing family generators on demand.
    pub fn resolve(&self, name: &str) -> Result<GenId> {
        let name = match self.family {
            Some(f) => f.canonical_name(name, self.degree),
            None => name.to_string(),
        };
        if let Some(&id) = self.table.read().by_name.get(&name) {
            return Ok(id);
        }
        let family = self
            .family
            .ok_or_else(|| Error::UnknownGenerator(name.clone()))?;
        let mut table = self.table.write();
        intern_family(&mut table, family, self.degree, &name)
    }

    /// Generators whose level-`n` images generate the level-`n` quotient.
    pub fn level_generators(&self, n: usize) -> Result<Vec<GroupWord>> {
        match self.family {
            None => Ok(self.declared_generators()),
            Some(f) => f
                .level_generators(self.degree, n)
                .iter()
                .map(|name| self.resolve(name).map(GroupWord::generator))
                .collect(),
        }
    }

    /// Parses a word: whitespace-separated tokens `name`, `name^k`, `(…)^k`;
    /// `e` is the identity. The result is freely reduced.
    pub fn parse_word(&self, text: &str) -> Result<GroupWord> {
        let mut parser = WordParser {
            group: self,
            chars: text.char_indices().collect(),
            pos: 0,
        };
        let tokens = parser.sequence(0)?;
        if parser.pos < parser.chars.len() {
            return Err(Error::parse(parser.offset(), "unexpected `)`"));
        }
        Ok(GroupWord::from_tokens(tokens))
    }

    pub fn format_word(&self, word: &GroupWord) -> String {
        if word.is_empty() {
            return "e".to_string();
        }
        let table = self.table.read();
        word.tokens()
            .iter()
            .map(|t| {
                let name = &table.defs[t.gen.0 as usize].name;
                if t.inverse {
                    format!("{name}^-1")
                } else {
                    name.clone()
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn compiled(&self) -> Vec<Arc<Compiled>> {
        self.table.read().defs.clone()
    }

    /// First-level decomposition of a word.
    pub fn decompose(&self, word: &GroupWord) -> Decomposition {
        let defs = self.table.read();
        decompose_with(&defs.defs, self.degree, word)
    }

    /// Image of a vertex; the rightmost token acts first.
    pub fn act(&self, g: &GroupWord, v: &Vertex) -> Vertex {
        let defs = self.compiled();
        let mut current = g.clone();
        let mut out = Vec::with_capacity(v.level());
        for &x in v.letters() {
            let (y, section) = step_with(&defs, &current, x);
            out.push(y);
            current = section;
        }
        Vertex::from(out)
    }

    /// The section `g|_v`, freely reduced.
    pub fn section(&self, g: &GroupWord, v: &Vertex) -> GroupWord {
        let defs = self.compiled();
        let mut current = g.clone();
        for &x in v.letters() {
            current = step_with(&defs, &current, x).1;
        }
        current
    }

    /// Decides whether `g` acts trivially on the whole tree.
    ///
    /// Coinductive check: the set of words reached through first-level
    /// sections is explored; if every reached word has a trivial root
    /// permutation the whole portrait is trivial.
    pub fn is_identity(&self, g: &GroupWord) -> Result<bool> {
        if g.is_empty() {
            return Ok(true);
        }
        if let Some(v) = self.identity_memo.get(g) {
            return Ok(*v);
        }
        let defs = self.compiled();
        let mut visited: HashSet<GroupWord> = HashSet::new();
        let mut stack = vec![g.clone()];
        visited.insert(g.clone());
        while let Some(w) = stack.pop() {
            let dec = decompose_with(&defs, self.degree, &w);
            if !dec.root_is_trivial() {
                self.identity_memo.insert(g.clone(), false);
                self.identity_memo.insert(w, false);
                return Ok(false);
            }
            for s in dec.sections {
                if s.is_empty() || visited.contains(&s) {
                    continue;
                }
                match self.identity_memo.get(&s).map(|r| *r) {
                    Some(true) => continue,
                    Some(false) => {
                        self.identity_memo.insert(g.clone(), false);
                        return Ok(false);
                    }
                    None => {}
                }
                if visited.len() >= self.caps.word_problem {
                    return Err(Error::resource(
                        "word problem visited set (group may not be contracting)",
                        self.caps.word_problem,
                    ));
                }
                visited.insert(s.clone());
                stack.push(s);
            }
        }
        for w in visited {
            self.identity_memo.insert(w, true);
        }
        Ok(true)
    }

    /// Equality in the group, decided as `is_identity(g·h⁻¹)`.
    pub fn equal(&self, g: &GroupWord, h: &GroupWord) -> Result<bool> {
        self.is_identity(&g.concat(&h.inverse()))
    }

    /// Per-vertex images and sections over the whole level `n`, in rank order.
    pub fn level_states(&self, g: &GroupWord, n: usize) -> Result<Vec<(usize, GroupWord)>> {
        let (_, states) = self.descend(g, n)?;
        Ok(states)
    }

    /// Walks the portrait down to level `n`, returning the decoration above
    /// level `n` and the (image, section) pair at each level-`n` vertex.
    fn descend(
        &self,
        g: &GroupWord,
        n: usize,
    ) -> Result<(Vec<Vec<Vec<Letter>>>, Vec<(usize, GroupWord)>)> {
        level_size(self.degree, n)?;
        let d = self.degree;
        let defs = self.compiled();
        let mut cache: HashMap<GroupWord, Decomposition> = HashMap::new();
        let identity_perm: Vec<Letter> = (0..d as Letter).collect();
        let mut states = vec![(0usize, g.clone())];
        let mut levels = Vec::with_capacity(n);
        for _ in 0..n {
            let mut perms = Vec::with_capacity(states.len());
            let mut next = Vec::with_capacity(states.len() * d);
            for (img, sec) in &states {
                if sec.is_empty() {
                    perms.push(identity_perm.clone());
                    for x in 0..d {
                        next.push((img * d + x, GroupWord::identity()));
                    }
                    continue;
                }
                let dec = cache
                    .entry(sec.clone())
                    .or_insert_with(|| decompose_with(&defs, d, sec));
                for x in 0..d {
                    next.push((img * d + dec.perm[x] as usize, dec.sections[x].clone()));
                }
                perms.push(dec.perm.clone());
            }
            levels.push(perms);
            states = next;
        }
        Ok((levels, states))
    }

    /// Image of `g` in `Aut(T_d)/St(n)` with its full decoration.
    pub fn portrait(&self, g: &GroupWord, n: usize) -> Result<LevelPermutation> {
        let (levels, _) = self.descend(g, n)?;
        Ok(LevelPermutation::from_levels(self.degree, levels))
    }

    /// Whether `g` lies in the rigid stabilizer of `v`: it fixes the level of
    /// `v` and its section at every other vertex of that level is trivial.
    pub fn in_rigid_stabilizer(&self, g: &GroupWord, v: &Vertex) -> Result<bool> {
        let states = self.level_states(g, v.level())?;
        let target = v.index(self.degree);
        for (i, (img, sec)) in states.iter().enumerate() {
            if *img != i {
                return Ok(false);
            }
            if i != target && !self.is_identity(sec)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Freely reduced words of length at most `max_len` over `gens` and
    /// their inverses, in order of length and then token order. Inverses of
    /// involutions are skipped, as are squares of involutions.
    pub fn ball(&self, gens: &[GenId], max_len: usize, cap: usize) -> Result<Vec<GroupWord>> {
        let mut letters: Vec<(Token, bool)> = Vec::new();
        for &g in gens {
            let w = GroupWord::generator(g);
            let involution = self.is_identity(&w.concat(&w))?;
            letters.push((Token::new(g, false), involution));
            if !involution {
                letters.push((Token::new(g, true), false));
            }
        }
        letters.sort();
        let mut out = vec![GroupWord::identity()];
        let mut frontier = vec![GroupWord::identity()];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for w in &frontier {
                let last = w.tokens().last().copied();
                for &(t, involution) in &letters {
                    if let Some(l) = last {
                        if l == t.inv() || (involution && l == t) {
                            continue;
                        }
                    }
                    let mut tokens = w.tokens().to_vec();
                    tokens.push(t);
                    next.push(GroupWord::from_tokens(tokens));
                    if out.len() + next.len() > cap {
                        return Err(Error::resource("word ball", cap));
                    }
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        Ok(out)
    }

    /// Plain-text definition (see [`crate::groupfile`]).
    pub fn definition_text(&self) -> String {
        crate::groupfile::export(self)
    }

    /// Content hash of the definition text, hex encoded.
    pub fn content_hash(&self) -> String {
        hex::encode(Sha256::digest(self.definition_text().as_bytes()))
    }

    /// Drops memoized word-problem and character results.
    pub fn clear_memo(&self) {
        self.identity_memo.clear();
        self.chi_memo.clear();
    }
}

fn check_perm(perm: &[Letter], degree: usize) -> Result<()> {
    if perm.len() != degree {
        return Err(Error::input(format!(
            "permutation has {} entries, expected {degree}",
            perm.len()
        )));
    }
    let mut seen = vec![false; degree];
    for &p in perm {
        if p as usize >= degree || seen[p as usize] {
            return Err(Error::input(format!("{perm:?} is not a permutation")));
        }
        seen[p as usize] = true;
    }
    Ok(())
}

fn intern_family(table: &mut GenTable, family: Family, degree: usize, name: &str) -> Result<GenId> {
    if let Some(&id) = table.by_name.get(name) {
        return Ok(id);
    }
    let def = family
        .resolve(name, degree)
        .ok_or_else(|| Error::UnknownGenerator(name.to_string()))?;
    let mut sections = Vec::with_capacity(degree);
    for s in &def.sections {
        sections.push(match s {
            None => GroupWord::identity(),
            Some(sname) => GroupWord::generator(intern_family(table, family, degree, sname)?),
        });
    }
    let id = GenId(table.defs.len() as u32);
    table
        .defs
        .push(Arc::new(Compiled::new(name.to_string(), def.perm, sections)));
    table.by_name.insert(name.to_string(), id);
    Ok(id)
}

fn step_with(defs: &[Arc<Compiled>], word: &GroupWord, x: Letter) -> (Letter, GroupWord) {
    let mut y = x;
    let mut parts: Vec<&GroupWord> = Vec::with_capacity(word.len());
    for t in word.tokens().iter().rev() {
        let (next, sec) = defs[t.gen.0 as usize].step(t.inverse, y);
        parts.push(sec);
        y = next;
    }
    let section = GroupWord::from_tokens(parts.iter().rev().flat_map(|w| w.tokens().iter().copied()));
    (y, section)
}

fn decompose_with(defs: &[Arc<Compiled>], degree: usize, word: &GroupWord) -> Decomposition {
    let mut perm = Vec::with_capacity(degree);
    let mut sections = Vec::with_capacity(degree);
    for x in 0..degree as Letter {
        let (y, s) = step_with(defs, word, x);
        perm.push(y);
        sections.push(s);
    }
    Decomposition { perm, sections }
}

struct WordParser<'a> {
    group: &'a Group,
    chars: Vec<(usize, char)>,
    pos: usize,
}

impl WordParser<'_> {
    fn offset(&self) -> usize {
        self.chars
            .get(self.pos)
            .map(|&(o, _)| o)
            .unwrap_or_else(|| self.chars.last().map(|&(o, c)| o + c.len_utf8()).unwrap_or(0))
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn sequence(&mut self, depth: usize) -> Result<Vec<Token>> {
        let mut out = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                None => {
                    if depth > 0 {
                        return Err(Error::parse(self.offset(), "unclosed `(`"));
                    }
                    return Ok(out);
                }
                Some(')') => {
                    if depth == 0 {
                        return Ok(out);
                    }
                    self.pos += 1;
                    return Ok(out);
                }
                Some('(') => {
                    self.pos += 1;
                    let inner = GroupWord::from_tokens(self.sequence(depth + 1)?);
                    let k = self.exponent()?;
                    out.extend_from_slice(inner.pow(k).tokens());
                }
                Some(c) if c.is_ascii_alphanumeric() || c == '_' => {
                    let start = self.offset();
                    let mut name = String::new();
                    while let Some(c) = self.peek() {
                        if c.is_ascii_alphanumeric() || c == '_' || c == '.' || c == '\'' {
                            name.push(c);
                            self.pos += 1;
                        } else {
                            break;
                        }
                    }
                    let k = self.exponent()?;
                    if name == "e" {
                        continue;
                    }
                    let gen = self.group.resolve(&name).map_err(|e| match e {
                        Error::UnknownGenerator(n) => {
                            Error::parse(start, format!("unknown generator `{n}`"))
                        }
                        other => other,
                    })?;
                    let tok = Token::new(gen, k < 0);
                    for _ in 0..k.unsigned_abs() {
                        out.push(tok);
                    }
                }
                Some(c) => {
                    return Err(Error::parse(self.offset(), format!("unexpected `{c}`")));
                }
            }
        }
    }

    fn exponent(&mut self) -> Result<i64> {
        if self.peek() != Some('^') {
            return Ok(1);
        }
        self.pos += 1;
        let start = self.offset();
        let mut text = String::new();
        if matches!(self.peek(), Some('-') | Some('+')) {
            text.push(self.peek().unwrap());
            self.pos += 1;
        }
        while let Some(c) = self.peek().filter(|c| c.is_ascii_digit()) {
            text.push(c);
            self.pos += 1;
        }
        let k: i64 = text
            .parse()
            .map_err(|_| Error::parse(start, "malformed exponent"))?;
        if k.unsigned_abs() > 1_000_000 {
            return Err(Error::parse(start, "exponent too large"));
        }
        Ok(k)
    }
}
