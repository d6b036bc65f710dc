//! Characters of self-similar groups acting on regular rooted trees.
//!
//! The canonical character `χ₁(g) = μ(Fix(g))` is computed exactly over the
//! rationals; the characters `ψ_C` and `ψ_C^p` attached to orbits of closed
//! boundary sets are approximated at finite tree levels, where they give
//! monotone upper and lower brackets.

pub mod bsgs;
pub mod cache;
pub mod canonical;
pub mod catalog;
pub mod cli;
pub mod character;
pub mod error;
pub mod family;
pub mod group;
pub mod groupfile;
pub mod irs;
pub mod linalg;
pub mod orbit;
pub mod perm;
pub mod record;
pub mod sets;
pub mod setspec;
pub mod tree;
pub mod word;

pub use error::{Error, Result};
pub use group::Group;
pub use perm::{LevelPermutation, Perm};
pub use tree::{BoundaryPoint, Letter, Vertex};
pub use word::GroupWord;
