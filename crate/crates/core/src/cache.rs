//! On-disk caches keyed by the content hash of a group definition.
//!
//! The directory is `$TREECHAR_CACHE` when set, otherwise `treechar` under
//! the platform cache directory. Two kinds of file live there:
//! `chi1-<hash>.tsv` with one `word<TAB>value` line per solved word, and
//! `bsgs-<hash>-<n>.tch1` holding level-quotient BSGS data.

use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num::BigRational;
use sha2::{Digest, Sha256};

use crate::bsgs::{level_quotient, Bsgs};
use crate::error::Result;
use crate::group::Group;

pub const CACHE_ENV: &str = "TREECHAR_CACHE";

/// The cache directory, created if missing. `None` when it cannot be
/// determined or created.
pub fn cache_dir() -> Option<PathBuf> {
    let dir = match std::env::var_os(CACHE_ENV) {
        Some(d) if !d.is_empty() => PathBuf::from(d),
        _ => dirs::cache_dir()?.join("treechar"),
    };
    fs::create_dir_all(&dir).ok()?;
    Some(dir)
}

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into() }
    }

    pub fn from_env() -> Option<Self> {
        cache_dir().map(Cache::new)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn chi1_path(&self, group: &Group) -> PathBuf {
        self.dir.join(format!("chi1-{}.tsv", group.content_hash()))
    }

    /// Cached χ₁ value for the canonical text of a word.
    pub fn chi1_lookup(&self, group: &Group, word: &str) -> Option<BigRational> {
        let text = fs::read_to_string(self.chi1_path(group)).ok()?;
        text.lines().rev().find_map(|line| {
            let (w, v) = line.split_once('\t')?;
            if w == word {
                v.parse().ok()
            } else {
                None
            }
        })
    }

    pub fn chi1_store(&self, group: &Group, word: &str, value: &BigRational) -> Result<()> {
        let mut f = OpenOptions::new().create(true).append(true).open(self.chi1_path(group))?;
        f.write_all(format!("{word}\t{value}\n").as_bytes())?;
        Ok(())
    }

    fn bsgs_key(group: &Group, n: usize) -> [u8; 32] {
        let mut h = Sha256::new();
        h.update(group.definition_text().as_bytes());
        h.update((n as u64).to_le_bytes());
        h.finalize().into()
    }

    /// The level quotient, read from the cache when a matching file exists
    /// and written to it otherwise.
    pub fn level_quotient(&self, group: &Group, n: usize) -> Result<Arc<Bsgs>> {
        let path = self.dir.join(format!("bsgs-{}-{n}.tch1", group.content_hash()));
        let key = Self::bsgs_key(group, n);
        if let Some(b) = Bsgs::read_cache(&path, &key) {
            return Ok(Arc::new(b));
        }
        let b = level_quotient(group, n)?;
        // A failed write only costs a recomputation next time.
        let _ = b.write_cache(&path, &key);
        Ok(Arc::new(b))
    }
}

/// The level quotient through `cache` when given.
pub fn level_quotient_cached(group: &Group, n: usize, cache: Option<&Cache>) -> Result<Arc<Bsgs>> {
    match cache {
        Some(c) => c.level_quotient(group, n),
        None => Ok(Arc::new(level_quotient(group, n)?)),
    }
}
