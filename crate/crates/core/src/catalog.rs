//! Built-in groups.

use num::{BigInt, BigRational};

use crate::error::{Error, Result};
use crate::group::Group;
use crate::groupfile;

/// Branching type, recorded as metadata.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BranchKind {
    Branch,
    WeaklyBranch,
}

impl BranchKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            BranchKind::Branch => "branch",
            BranchKind::WeaklyBranch => "weakly branch",
        }
    }
}

/// `scale · Q_base ∩ [0, 1]`, where `Q_b` is the set of rationals whose
/// denominator is a power of `b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ValueSet {
    pub scale_num: u64,
    pub scale_den: u64,
    pub base: u64,
}

impl ValueSet {
    pub fn scale(&self) -> BigRational {
        BigRational::new(BigInt::from(self.scale_num), BigInt::from(self.scale_den))
    }
}

impl std::fmt::Display for ValueSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.scale_num == 1 && self.scale_den == 1 {
            write!(f, "Q_{} ∩ [0,1]", self.base)
        } else {
            write!(f, "({}/{})·Q_{} ∩ [0,1]", self.scale_num, self.scale_den, self.base)
        }
    }
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub description: &'static str,
    pub definition: &'static str,
    pub value_set: Option<ValueSet>,
    pub branch: BranchKind,
    /// Subgroup over which the group branches (documentation only).
    pub branching_subgroup: Option<&'static str>,
    /// The recursion comes from the standard literature rather than being
    /// derived here.
    pub externally_sourced: bool,
}

const fn vs(scale_num: u64, scale_den: u64, base: u64) -> Option<ValueSet> {
    Some(ValueSet {
        scale_num,
        scale_den,
        base,
    })
}

static ENTRIES: &[CatalogEntry] = &[
    CatalogEntry {
        name: "basilica",
        description: "Basilica group",
        definition: include_str!("../groups/basilica.group"),
        value_set: vs(1, 1, 2),
        branch: BranchKind::WeaklyBranch,
        branching_subgroup: Some("commutator subgroup"),
        externally_sourced: false,
    },
    CatalogEntry {
        name: "hanoi",
        description: "Hanoi towers group on three pegs",
        definition: include_str!("../groups/hanoi.group"),
        value_set: vs(1, 1, 3),
        branch: BranchKind::Branch,
        branching_subgroup: Some("commutator subgroup"),
        externally_sourced: false,
    },
    CatalogEntry {
        name: "img-z2-i",
        description: "iterated monodromy group of z^2 + i",
        definition: include_str!("../groups/img-z2-i.group"),
        value_set: vs(1, 3, 2),
        branch: BranchKind::Branch,
        branching_subgroup: Some("normal closure of [a,b], [b,c]"),
        externally_sourced: false,
    },
    CatalogEntry {
        name: "overgroup",
        description: "Grigorchuk overgroup",
        definition: include_str!("../groups/overgroup.group"),
        value_set: vs(1, 7, 2),
        branch: BranchKind::Branch,
        branching_subgroup: Some("normal closure of (ab)^2, (ad)^2"),
        externally_sourced: false,
    },
    CatalogEntry {
        name: "grigorchuk",
        description: "first Grigorchuk group",
        definition: include_str!("../groups/grigorchuk.group"),
        value_set: vs(1, 7, 2),
        branch: BranchKind::Branch,
        branching_subgroup: Some("normal closure of (ab)^2"),
        externally_sourced: true,
    },
    CatalogEntry {
        name: "autfin2",
        description: "finitary automorphisms of the binary tree",
        definition: include_str!("../groups/autfin2.group"),
        value_set: None,
        branch: BranchKind::Branch,
        branching_subgroup: None,
        externally_sourced: false,
    },
    CatalogEntry {
        name: "autfin3",
        description: "finitary automorphisms of the ternary tree",
        definition: include_str!("../groups/autfin3.group"),
        value_set: None,
        branch: BranchKind::Branch,
        branching_subgroup: None,
        externally_sourced: false,
    },
    CatalogEntry {
        name: "nonbranch",
        description: "weakly branch, non-branch group generated by swaps at even levels and level-wide swaps at odd levels",
        definition: include_str!("../groups/nonbranch.group"),
        value_set: None,
        branch: BranchKind::WeaklyBranch,
        branching_subgroup: None,
        externally_sourced: false,
    },
];

pub fn entries() -> &'static [CatalogEntry] {
    ENTRIES
}

pub fn entry(name: &str) -> Option<&'static CatalogEntry> {
    ENTRIES.iter().find(|e| e.name == name)
}

/// Names of the recursion-defined groups with a known value set.
pub fn recursion_groups() -> impl Iterator<Item = &'static CatalogEntry> {
    ENTRIES.iter().filter(|e| e.value_set.is_some())
}

pub fn group(name: &str) -> Result<Group> {
    let e = entry(name).ok_or_else(|| Error::input(format!("unknown catalog group `{name}`")))?;
    Ok(groupfile::parse(e.name, e.definition)?.with_branch(e.branch))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_entry_loads() {
        for e in entries() {
            let g = group(e.name).unwrap();
            assert_eq!(g.name(), e.name);
        }
        assert!(group("nope").is_err());
    }

    #[test]
    fn hanoi_definition() {
        let g = group("hanoi").unwrap();
        assert_eq!(g.degree(), 3);
        assert_eq!(g.declared_generators().len(), 3);
    }
}
