//! Plain-text group definitions.
//!
//! ```text
//! # comment
//! degree = 2
//! a = perm[0 1] (e, b)
//! b = perm[1 0] (e, a)
//! ```
//!
//! Sections are listed by input letter. A file may instead declare a
//! level-indexed family with `family = autfin` or `family = nonbranch`.
//! An optional `branch = branch|weakly-branch` line records branching
//! metadata.

use crate::catalog::BranchKind;
use crate::error::{Error, Result};
use crate::family::Family;
use crate::group::Group;
use crate::tree::Letter;

/// Parses a definition. Error positions are byte offsets into `text`.
pub fn parse(name: &str, text: &str) -> Result<Group> {
    let mut degree: Option<usize> = None;
    let mut family: Option<Family> = None;
    let mut branch: Option<BranchKind> = None;
    let mut gens: Vec<(String, Vec<Letter>, Vec<String>)> = Vec::new();
    let mut offset = 0usize;
    for raw in text.split_inclusive('\n') {
        let line_start = offset;
        offset += raw.len();
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        let lead = line.len() - line.trim_start().len();
        let at = |rel: usize| line_start + lead + rel;
        let body = line.trim();
        let (key, value) = body
            .split_once('=')
            .ok_or_else(|| Error::parse(at(0), "expected `name = …`"))?;
        let key = key.trim();
        let value_off = body.len() - body[key.len()..].trim_start_matches(|c: char| c.is_whitespace() || c == '=').len();
        let value = value.trim();
        match key {
            "degree" => {
                let d: usize = value
                    .parse()
                    .map_err(|_| Error::parse(at(value_off), "degree must be an integer"))?;
                if d < 2 || d > 36 {
                    return Err(Error::parse(at(value_off), "degree must be between 2 and 36"));
                }
                degree = Some(d);
            }
            "branch" => {
                branch = Some(match value {
                    "branch" => BranchKind::Branch,
                    "weakly-branch" => BranchKind::WeaklyBranch,
                    _ => return Err(Error::parse(at(value_off), "expected `branch` or `weakly-branch`")),
                });
            }
            "family" => {
                family = Some(value.parse().map_err(|e: Error| Error::parse(at(value_off), e.to_string()))?);
            }
            _ => {
                let d = degree.ok_or_else(|| Error::parse(at(0), "`degree = d` must come first"))?;
                let (perm, sections) =
                    parse_generator(value, d).map_err(|(rel, msg)| Error::parse(at(value_off + rel), msg))?;
                gens.push((key.to_string(), perm, sections));
            }
        }
    }
    let degree = degree.ok_or_else(|| Error::parse(0, "missing `degree = d`"))?;
    let group = match family {
        Some(f) => {
            if !gens.is_empty() {
                return Err(Error::input("a family definition cannot list generators"));
            }
            Group::from_family(name, f, degree)
        }
        None => {
            if gens.is_empty() {
                return Err(Error::input("no generators defined"));
            }
            Group::from_recursion(name, degree, &gens)
        }
    }?;
    Ok(match branch {
        Some(b) => group.with_branch(b),
        None => group,
    })
}

fn parse_generator(value: &str, degree: usize) -> std::result::Result<(Vec<Letter>, Vec<String>), (usize, String)> {
    let rest = value
        .strip_prefix("perm")
        .ok_or((0, "expected `perm[…]`".to_string()))?;
    let open = rest.find('[').ok_or((4, "expected `[`".to_string()))?;
    let close = rest.find(']').ok_or((4, "unclosed `[`".to_string()))?;
    let mut perm = Vec::new();
    for tok in rest[open + 1..close].split_whitespace() {
        let p: usize = tok
            .parse()
            .map_err(|_| (4 + open + 1, format!("`{tok}` is not a letter")))?;
        if p >= degree {
            return Err((4 + open + 1, format!("letter {p} out of range for degree {degree}")));
        }
        perm.push(p as Letter);
    }
    let after = &rest[close + 1..];
    let base = 4 + close + 1;
    let trimmed = after.trim_start();
    let sec_off = base + after.len() - trimmed.len();
    let inner = trimmed
        .strip_prefix('(')
        .and_then(|s| s.trim_end().strip_suffix(')'))
        .ok_or((sec_off, "expected `(w0, …, w(d-1))`".to_string()))?;
    let sections: Vec<String> = inner.split(',').map(|s| s.trim().to_string()).collect();
    if sections.len() != degree {
        return Err((sec_off, format!("expected {degree} sections, found {}", sections.len())));
    }
    Ok((perm, sections))
}

/// Canonical text for a group; re-parsing it yields the same group.
pub fn export(group: &Group) -> String {
    let mut out = format!("degree = {}\n", group.degree());
    match group.branch() {
        Some(BranchKind::Branch) => out.push_str("branch = branch\n"),
        Some(BranchKind::WeaklyBranch) => out.push_str("branch = weakly-branch\n"),
        None => {}
    }
    if let Some(f) = group.family() {
        out.push_str(&format!("family = {f}\n"));
        return out;
    }
    for def in group.generator_defs() {
        let perm: Vec<String> = def.perm.iter().map(|p| p.to_string()).collect();
        let sections: Vec<String> = def.sections.iter().map(|w| group.format_word(w)).collect();
        out.push_str(&format!(
            "{} = perm[{}] ({})\n",
            def.name,
            perm.join(" "),
            sections.join(", ")
        ));
    }
    out
}
