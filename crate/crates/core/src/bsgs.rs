//! Level quotients of a group closure as permutation groups on `V_n`.
//!
//! The base is all of `V_n` in lexicographic order; levels of the stabilizer
//! chain whose basic orbit is trivial store nothing. Construction is a
//! seeded randomized Schreier–Sims pass followed by a deterministic sift of
//! every Schreier generator, which extends the strong generating set until
//! the chain is complete.

use std::collections::HashSet;
use std::io::{Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use num::{BigUint, One};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::group::Group;
use crate::perm::{LevelPermutation, Perm};
use crate::tree::level_size;

/// Seed of the randomized Schreier–Sims phase.
pub const SCHREIER_SIMS_SEED: u64 = 0x7472_6565_6368_6172;

/// Default cap on stored transversal images (points × orbit entries).
pub const TRANSVERSAL_CAP: usize = 1 << 27;

const CACHE_MAGIC: &[u8; 4] = b"TCH1";
const CACHE_VERSION: u32 = 1;

#[derive(Clone, Debug, Default)]
struct Level {
    /// Indices into `strong` of the generators fixing every earlier base point.
    gens: Vec<usize>,
    orbit: Vec<u32>,
    /// `reps[β]` maps the base point to `β`; dense over the points, empty
    /// when the orbit is trivial.
    reps: Vec<Option<Perm>>,
}

/// Base and strong generating set of a level quotient.
#[derive(Clone, Debug)]
pub struct Bsgs {
    degree: usize,
    level: usize,
    points: usize,
    generators: Vec<Perm>,
    strong: Vec<Perm>,
    levels: Vec<Level>,
    stored: usize,
    cap: usize,
}

impl Bsgs {
    /// Builds the group on `points` points generated by `generators`.
    pub fn new(degree: usize, level: usize, generators: Vec<Perm>) -> Result<Self> {
        Self::with_cap(degree, level, generators, TRANSVERSAL_CAP)
    }

    pub fn with_cap(degree: usize, level: usize, generators: Vec<Perm>, cap: usize) -> Result<Self> {
        let points = level_size(degree, level)?;
        let mut gens: Vec<Perm> = Vec::new();
        for g in generators {
            assert_eq!(g.degree(), points, "generator acts on the wrong level");
            if !g.is_identity() && !gens.contains(&g) {
                gens.push(g);
            }
        }
        let mut b = Bsgs {
            degree,
            level,
            points,
            generators: gens.clone(),
            strong: Vec::new(),
            levels: vec![Level::default(); points],
            stored: 0,
            cap,
        };
        for g in gens {
            let (depth, residue) = b.sift(&g, 0);
            if depth < points {
                b.add_strong(residue, depth)?;
            }
        }
        b.randomized_phase()?;
        b.verify()?;
        Ok(b)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn points(&self) -> usize {
        self.points
    }

    /// The generators the group was built from (identities removed).
    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    pub fn strong_generators(&self) -> &[Perm] {
        &self.strong
    }

    /// Base points with a nontrivial basic orbit, in base order.
    pub fn base(&self) -> Vec<u32> {
        (0..self.points)
            .filter(|&i| self.levels[i].orbit.len() > 1)
            .map(|i| i as u32)
            .collect()
    }

    pub fn orbit_sizes(&self) -> Vec<usize> {
        self.levels
            .iter()
            .map(|l| l.orbit.len().max(1))
            .collect()
    }

    pub fn order(&self) -> BigUint {
        self.levels
            .iter()
            .fold(BigUint::one(), |acc, l| acc * BigUint::from(l.orbit.len().max(1)))
    }

    /// Order as `u64`, if it fits.
    pub fn order_u64(&self) -> Option<u64> {
        let mut acc: u64 = 1;
        for l in &self.levels {
            acc = acc.checked_mul(l.orbit.len().max(1) as u64)?;
        }
        Some(acc)
    }

    fn sift(&self, g: &Perm, start: usize) -> (usize, Perm) {
        let mut h = g.clone();
        for i in start..self.points {
            let beta = h.apply(i as u32);
            if beta == i as u32 {
                continue;
            }
            match self.levels[i].reps.get(beta as usize).and_then(|r| r.as_ref()) {
                Some(u) => h = u.inverse().compose(&h),
                None => return (i, h),
            }
        }
        (self.points, h)
    }

    pub fn contains(&self, g: &Perm) -> bool {
        g.degree() == self.points && self.sift(g, 0).0 == self.points
    }

    fn add_strong(&mut self, h: Perm, depth: usize) -> Result<()> {
        let idx = self.strong.len();
        self.strong.push(h);
        for i in 0..=depth {
            self.levels[i].gens.push(idx);
        }
        for i in 0..=depth {
            self.rebuild_orbit(i)?;
        }
        Ok(())
    }

    fn rebuild_orbit(&mut self, i: usize) -> Result<()> {
        let base = i as u32;
        let gens: Vec<&Perm> = self.levels[i].gens.iter().map(|&g| &self.strong[g]).collect();
        let mut reps: Vec<Option<Perm>> = vec![None; self.points];
        reps[i] = Some(Perm::identity(self.points));
        let mut orbit = vec![base];
        let mut head = 0;
        while head < orbit.len() {
            let beta = orbit[head];
            head += 1;
            for s in &gens {
                let gamma = s.apply(beta);
                if reps[gamma as usize].is_none() {
                    let u = s.compose(reps[beta as usize].as_ref().unwrap());
                    reps[gamma as usize] = Some(u);
                    orbit.push(gamma);
                }
            }
        }
        let old = self.levels[i].orbit.len();
        let level = &mut self.levels[i];
        if orbit.len() > 1 {
            self.stored = self.stored + orbit.len() * self.points - old.min(orbit.len()) * self.points;
            if self.stored > self.cap {
                return Err(Error::resource("transversal storage", self.cap));
            }
            level.orbit = orbit;
            level.reps = reps;
        } else {
            level.orbit = orbit;
            level.reps = Vec::new();
        }
        Ok(())
    }

    fn randomized_phase(&mut self) -> Result<()> {
        if self.generators.is_empty() {
            return Ok(());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(SCHREIER_SIMS_SEED);
        // product replacement
        let mut slots: Vec<Perm> = (0..10)
            .map(|i| self.generators[i % self.generators.len()].clone())
            .collect();
        let mut acc = Perm::identity(self.points);
        let step = |slots: &mut Vec<Perm>, acc: &mut Perm, rng: &mut ChaCha8Rng| {
            let i = rng.gen_range(0..slots.len());
            let mut j = rng.gen_range(0..slots.len() - 1);
            if j >= i {
                j += 1;
            }
            slots[i] = if rng.gen_bool(0.5) {
                slots[i].compose(&slots[j])
            } else {
                slots[j].compose(&slots[i])
            };
            *acc = acc.compose(&slots[i]);
            acc.clone()
        };
        for _ in 0..50 {
            step(&mut slots, &mut acc, &mut rng);
        }
        let mut quiet = 0;
        while quiet < 25 {
            let g = step(&mut slots, &mut acc, &mut rng);
            let (depth, residue) = self.sift(&g, 0);
            if depth < self.points {
                self.add_strong(residue, depth)?;
                quiet = 0;
            } else {
                quiet += 1;
            }
        }
        Ok(())
    }

    /// Sifts every Schreier generator; nontrivial residues become new strong
    /// generators and the affected levels are rechecked.
    fn verify(&mut self) -> Result<()> {
        let mut i = self.points;
        while i > 0 {
            i -= 1;
            if self.levels[i].orbit.len() <= 1 {
                continue;
            }
            let mut added = None;
            'scan: for bi in 0..self.levels[i].orbit.len() {
                let beta = self.levels[i].orbit[bi];
                for gi in 0..self.levels[i].gens.len() {
                    let s = &self.strong[self.levels[i].gens[gi]];
                    let u_beta = self.levels[i].reps[beta as usize].as_ref().unwrap();
                    let gamma = s.apply(beta);
                    let u_gamma = self.levels[i].reps[gamma as usize].as_ref().unwrap();
                    let schreier = u_gamma.inverse().compose(&s.compose(u_beta));
                    let (depth, residue) = self.sift(&schreier, i + 1);
                    if depth < self.points {
                        added = Some((residue, depth));
                        break 'scan;
                    }
                }
            }
            if let Some((residue, depth)) = added {
                self.add_strong(residue, depth)?;
                i = depth + 1;
            }
        }
        Ok(())
    }

    /// A uniformly random element: the product of one uniformly chosen
    /// transversal representative per base level.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Perm {
        let mut g = Perm::identity(self.points);
        for l in &self.levels {
            if l.orbit.len() > 1 {
                let beta = l.orbit[rng.gen_range(0..l.orbit.len())];
                g = g.compose(l.reps[beta as usize].as_ref().unwrap());
            }
        }
        g
    }

    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<LevelPermutation> {
        LevelPermutation::from_point_action(self.degree, self.level, &self.sample(rng))
    }

    /// Every element, as products of transversal representatives. Fails with
    /// a resource error beyond `cap` elements.
    pub fn elements(&self, cap: usize) -> Result<Vec<Perm>> {
        match self.order_u64() {
            Some(n) if n as usize <= cap => {}
            _ => return Err(Error::resource("group enumeration", cap)),
        }
        let mut out = vec![Perm::identity(self.points)];
        for l in self.levels.iter().rev() {
            if l.orbit.len() <= 1 {
                continue;
            }
            let mut next = Vec::with_capacity(out.len() * l.orbit.len());
            for &beta in &l.orbit {
                let u = l.reps[beta as usize].as_ref().unwrap();
                for g in &out {
                    next.push(u.compose(g));
                }
            }
            out = next;
        }
        Ok(out)
    }

    /// Writes the structure to a versioned binary file tagged with `key`.
    pub fn write_cache(&self, path: &Path, key: &[u8; 32]) -> Result<()> {
        let mut buf: Vec<u8> = Vec::new();
        buf.extend_from_slice(CACHE_MAGIC);
        buf.write_u32::<LittleEndian>(CACHE_VERSION)?;
        buf.extend_from_slice(key);
        buf.write_u32::<LittleEndian>(self.degree as u32)?;
        buf.write_u32::<LittleEndian>(self.level as u32)?;
        let write_perm = |buf: &mut Vec<u8>, p: &Perm| -> std::io::Result<()> {
            for &x in p.images() {
                buf.write_u32::<LittleEndian>(x)?;
            }
            Ok(())
        };
        buf.write_u32::<LittleEndian>(self.generators.len() as u32)?;
        for g in &self.generators {
            write_perm(&mut buf, g)?;
        }
        buf.write_u32::<LittleEndian>(self.strong.len() as u32)?;
        for g in &self.strong {
            write_perm(&mut buf, g)?;
        }
        for l in &self.levels {
            buf.write_u32::<LittleEndian>(l.gens.len() as u32)?;
            for &g in &l.gens {
                buf.write_u32::<LittleEndian>(g as u32)?;
            }
            buf.write_u32::<LittleEndian>(if l.orbit.len() > 1 { l.orbit.len() as u32 } else { 0 })?;
            if l.orbit.len() > 1 {
                for &beta in &l.orbit {
                    buf.write_u32::<LittleEndian>(beta)?;
                    write_perm(&mut buf, l.reps[beta as usize].as_ref().unwrap())?;
                }
            }
        }
        let tmp = path.with_extension("tmp");
        std::fs::File::create(&tmp)?.write_all(&buf)?;
        std::fs::rename(tmp, path)?;
        Ok(())
    }

    /// Reads a cache file; `None` if it is missing, malformed, or tagged with
    /// a different key.
    pub fn read_cache(path: &Path, key: &[u8; 32]) -> Option<Bsgs> {
        let mut data = Vec::new();
        std::fs::File::open(path).ok()?.read_to_end(&mut data).ok()?;
        Self::decode(&data, key)
    }

    fn decode(data: &[u8], key: &[u8; 32]) -> Option<Bsgs> {
        let mut r = data;
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic).ok()?;
        if &magic != CACHE_MAGIC || r.read_u32::<LittleEndian>().ok()? != CACHE_VERSION {
            return None;
        }
        let mut stored_key = [0u8; 32];
        r.read_exact(&mut stored_key).ok()?;
        if &stored_key != key {
            return None;
        }
        let degree = r.read_u32::<LittleEndian>().ok()? as usize;
        let level = r.read_u32::<LittleEndian>().ok()? as usize;
        let points = level_size(degree, level).ok()?;
        let read_perm = |r: &mut &[u8]| -> Option<Perm> {
            let mut images = Vec::with_capacity(points);
            let mut seen = vec![false; points];
            for _ in 0..points {
                let x = r.read_u32::<LittleEndian>().ok()?;
                if x as usize >= points || seen[x as usize] {
                    return None;
                }
                seen[x as usize] = true;
                images.push(x);
            }
            Some(Perm::from_images(images))
        };
        let ngen = r.read_u32::<LittleEndian>().ok()? as usize;
        let generators = (0..ngen).map(|_| read_perm(&mut r)).collect::<Option<Vec<_>>>()?;
        let nstrong = r.read_u32::<LittleEndian>().ok()? as usize;
        let strong = (0..nstrong).map(|_| read_perm(&mut r)).collect::<Option<Vec<_>>>()?;
        let mut levels = Vec::with_capacity(points);
        let mut stored = 0;
        for i in 0..points {
            let ng = r.read_u32::<LittleEndian>().ok()? as usize;
            let mut gens = Vec::with_capacity(ng);
            for _ in 0..ng {
                let g = r.read_u32::<LittleEndian>().ok()? as usize;
                if g >= strong.len() {
                    return None;
                }
                gens.push(g);
            }
            let norb = r.read_u32::<LittleEndian>().ok()? as usize;
            let mut level = Level {
                gens,
                orbit: vec![i as u32],
                reps: Vec::new(),
            };
            if norb > 0 {
                level.orbit.clear();
                level.reps = vec![None; points];
                for _ in 0..norb {
                    let beta = r.read_u32::<LittleEndian>().ok()?;
                    let u = read_perm(&mut r)?;
                    if beta as usize >= points || u.apply(i as u32) != beta {
                        return None;
                    }
                    level.orbit.push(beta);
                    level.reps[beta as usize] = Some(u);
                }
                stored += norb * points;
            }
            levels.push(level);
        }
        if !r.is_empty() {
            return None;
        }
        Some(Bsgs {
            degree,
            level,
            points,
            generators,
            strong,
            levels,
            stored,
            cap: TRANSVERSAL_CAP,
        })
    }
}

/// The level-`n` quotient of the closure of `group`.
pub fn level_quotient(group: &Group, n: usize) -> Result<Bsgs> {
    if n == 0 {
        return Err(Error::input("level must be at least 1"));
    }
    level_size(group.degree(), n)?;
    let gens = group
        .level_generators(n)?
        .iter()
        .map(|w| group.portrait(w, n).map(|p| p.point_action()))
        .collect::<Result<Vec<_>>>()?;
    Bsgs::new(group.degree(), n, gens)
}

/// Brute-force closure of a generating set, for cross-checks. Returns
/// `None` past `cap` elements.
pub fn brute_force_elements(points: usize, generators: &[Perm], cap: usize) -> Option<Vec<Perm>> {
    let id = Perm::identity(points);
    let mut seen: HashSet<Perm> = HashSet::new();
    seen.insert(id.clone());
    let mut queue = vec![id];
    let mut head = 0;
    while head < queue.len() {
        let g = queue[head].clone();
        head += 1;
        for s in generators {
            let h = s.compose(&g);
            if seen.insert(h.clone()) {
                if seen.len() > cap {
                    return None;
                }
                queue.push(h);
            }
        }
    }
    Some(queue)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn order(name: &str, n: usize) -> u64 {
        let g = catalog::group(name).unwrap();
        level_quotient(&g, n).unwrap().order_u64().unwrap()
    }

    #[test]
    fn family_orders() {
        assert_eq!(order("autfin2", 1), 2);
        assert_eq!(order("autfin2", 3), 128);
        assert_eq!(order("autfin3", 2), 1296);
        assert_eq!(order("nonbranch", 2), 4);
    }

    #[test]
    fn recursion_orders() {
        assert_eq!(order("basilica", 1), 2);
        assert_eq!(order("grigorchuk", 3), 128);
    }

    #[test]
    fn matches_brute_force() {
        for name in ["basilica", "hanoi", "img-z2-i", "grigorchuk", "overgroup"] {
            let g = catalog::group(name).unwrap();
            for n in 1..=3 {
                let b = level_quotient(&g, n).unwrap();
                let Some(brute) = brute_force_elements(b.points(), b.generators(), 100_000) else {
                    assert!(b.order_u64().unwrap() > 100_000, "{name} level {n}");
                    continue;
                };
                assert_eq!(b.order_u64().unwrap(), brute.len() as u64, "{name} level {n}");
                for e in brute.iter().take(200) {
                    assert!(b.contains(e));
                }
            }
        }
    }

    #[test]
    fn elements_are_distinct() {
        let g = catalog::group("autfin3").unwrap();
        let b = level_quotient(&g, 1).unwrap();
        let els: HashSet<Perm> = b.elements(10).unwrap().into_iter().collect();
        assert_eq!(els.len(), 6);
    }

    #[test]
    fn sampling_stays_in_group() {
        let g = catalog::group("hanoi").unwrap();
        let b = level_quotient(&g, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            assert!(b.contains(&b.sample(&mut rng)));
        }
    }

    #[test]
    fn trivial_group_samples_identity() {
        let b = Bsgs::new(2, 2, vec![Perm::identity(4)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(b.sample(&mut rng).is_identity());
        assert_eq!(b.order_u64(), Some(1));
    }

    #[test]
    fn cache_roundtrip() {
        let g = catalog::group("grigorchuk").unwrap();
        let b = level_quotient(&g, 3).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.tch");
        let key = [7u8; 32];
        b.write_cache(&path, &key).unwrap();
        let back = Bsgs::read_cache(&path, &key).unwrap();
        assert_eq!(back.order(), b.order());
        assert!(Bsgs::read_cache(&path, &[0u8; 32]).is_none());
    }
}
