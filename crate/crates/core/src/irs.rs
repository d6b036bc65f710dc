//! Characters coming from the action on orbits of closed sets: the level
//! quantities `ψ_n`, `ψ^p_n` and `χ_n` with their bracket tags.

use std::collections::HashMap;
use std::sync::Arc;

use num::{BigInt, BigRational, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bsgs::{level_quotient, Bsgs};
use crate::catalog::BranchKind;
use crate::error::{Error, Result};
use crate::family::Family;
use crate::group::Group;
use crate::orbit::{orbit_of_set, orbit_with_transversal, Orbit, VertexSet, ORBIT_CAP};
use crate::perm::Perm;
use crate::sets::{ClosedSet, SetKind};
use crate::word::GroupWord;

/// Seed used by `Mode::Auto` when no seed is given.
pub const DEFAULT_MC_SEED: u64 = 0x5eed_0f_7c;
/// Confidence parameter of the Hoeffding radius.
pub const MC_DELTA: f64 = 0.01;
pub const DEFAULT_SAMPLES: u64 = 100_000;
/// Samples per random stream.
const CHUNK: u64 = 4096;
/// Largest level quotient enumerated by `chi_level`.
pub const CHI_LEVEL_GROUP_CAP: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Mc,
    /// Exact when the orbit fits under the cap, otherwise Monte Carlo.
    Auto,
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Mode::Exact),
            "mc" => Ok(Mode::Mc),
            "auto" => Ok(Mode::Auto),
            other => Err(Error::input(format!("unknown mode `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Bracket {
    /// Upper bound for the limiting value (decreases with the level).
    Upper,
    /// Lower bound for the limiting value (increases with the level).
    Lower,
    /// Equal to the limiting value's level approximation by a proven identity.
    ExactIdentity,
    /// No monotonicity guarantee.
    Heuristic,
}

impl Bracket {
    pub fn as_str(&self) -> &'static str {
        match self {
            Bracket::Upper => "upper",
            Bracket::Lower => "lower",
            Bracket::ExactIdentity => "exact-identity",
            Bracket::Heuristic => "heuristic",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Exact(BigRational),
    Approx(f64),
}

impl Value {
    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(q) => q.to_f64().unwrap_or(f64::NAN),
            Value::Approx(x) => *x,
        }
    }

    pub fn exact(&self) -> Option<&BigRational> {
        match self {
            Value::Exact(q) => Some(q),
            Value::Approx(_) => None,
        }
    }
}

impl std::fmt::Display for Value {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Value::Exact(q) => write!(f, "{q}"),
            Value::Approx(x) => write!(f, "{x}"),
        }
    }
}

/// A level value together with its error radius and bracket tag. Exact
/// values have radius zero.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalEstimate {
    pub value: Value,
    pub radius: f64,
    pub bracket: Bracket,
    pub level: usize,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
}

impl IntervalEstimate {
    pub fn mode(&self) -> Mode {
        match self.value {
            Value::Exact(_) => Mode::Exact,
            Value::Approx(_) => Mode::Mc,
        }
    }

    pub fn lo(&self) -> f64 {
        (self.value.to_f64() - self.radius).max(0.0)
    }

    pub fn hi(&self) -> f64 {
        (self.value.to_f64() + self.radius).min(1.0)
    }
}

#[derive(Clone, Debug)]
pub struct EstimateOptions {
    pub mode: Mode,
    pub samples: u64,
    pub seed: Option<u64>,
    pub orbit_cap: usize,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        EstimateOptions {
            mode: Mode::Auto,
            samples: DEFAULT_SAMPLES,
            seed: None,
            orbit_cap: ORBIT_CAP,
        }
    }
}

impl EstimateOptions {
    pub fn exact() -> Self {
        EstimateOptions {
            mode: Mode::Exact,
            ..Default::default()
        }
    }

    pub fn mc(samples: u64, seed: u64) -> Self {
        EstimateOptions {
            mode: Mode::Mc,
            samples,
            seed: Some(seed),
            ..Default::default()
        }
    }
}

impl EstimateOptions {
    /// Orbit cap to use when preparing a `LevelSetup`; pure sampling never
    /// needs the orbit.
    pub fn setup_cap(&self) -> usize {
        if self.mode == Mode::Mc {
            1
        } else {
            self.orbit_cap
        }
    }
}

/// Hoeffding radius at confidence `1 - MC_DELTA`.
pub fn hoeffding_radius(samples: u64) -> f64 {
    ((2.0 / MC_DELTA).ln() / (2.0 * samples as f64)).sqrt()
}

/// The level quotient, the shadow of the set and (when it fits) its orbit.
/// Reusable across many group elements.
#[derive(Clone, Debug)]
pub struct LevelSetup {
    pub bsgs: Arc<Bsgs>,
    pub set: ClosedSet,
    pub shadow: VertexSet,
    pub orbit: Orbit,
}

impl LevelSetup {
    pub fn new(group: &Group, set: &ClosedSet, n: usize, orbit_cap: usize) -> Result<Self> {
        let bsgs = Arc::new(level_quotient(group, n)?);
        Self::with_bsgs(group, bsgs, set, orbit_cap)
    }

    pub fn with_bsgs(group: &Group, bsgs: Arc<Bsgs>, set: &ClosedSet, orbit_cap: usize) -> Result<Self> {
        if set.degree() != group.degree() {
            return Err(Error::input(format!(
                "set is for degree {} but the group has degree {}",
                set.degree(),
                group.degree()
            )));
        }
        let shadow = set.shadow(bsgs.level())?;
        let orbit = orbit_of_set(&bsgs, &shadow, orbit_cap)?;
        Ok(LevelSetup {
            bsgs,
            set: set.clone(),
            shadow,
            orbit,
        })
    }

    pub fn level(&self) -> usize {
        self.bsgs.level()
    }

    fn resolve_mode(&self, opts: &EstimateOptions) -> Result<(bool, u64)> {
        match opts.mode {
            Mode::Exact => match self.orbit {
                Orbit::Complete(_) => Ok((true, 0)),
                Orbit::Overflow { cap } => Err(Error::OrbitOverflow { cap }),
            },
            Mode::Mc => {
                let seed = opts
                    .seed
                    .ok_or_else(|| Error::input("Monte Carlo mode needs an explicit seed"))?;
                Ok((false, seed))
            }
            Mode::Auto => Ok((
                matches!(self.orbit, Orbit::Complete(_)),
                opts.seed.unwrap_or(DEFAULT_MC_SEED),
            )),
        }
    }

    /// Fraction of orbit members satisfying `pred`, exactly or by sampling.
    fn measure<F>(&self, opts: &EstimateOptions, bracket: Bracket, pred: F) -> Result<IntervalEstimate>
    where
        F: Fn(&VertexSet) -> bool + Sync,
    {
        let (exact, seed) = self.resolve_mode(opts)?;
        let level = self.level();
        if exact {
            let sets = self.orbit.sets().unwrap();
            let hits = sets.par_iter().filter(|b| pred(b)).count();
            return Ok(IntervalEstimate {
                value: Value::Exact(BigRational::new(BigInt::from(hits), BigInt::from(sets.len()))),
                radius: 0.0,
                bracket,
                level,
                samples: None,
                seed: None,
            });
        }
        if opts.samples == 0 {
            return Err(Error::input("sample count must be positive"));
        }
        let n = opts.samples;
        let chunks = n.div_ceil(CHUNK);
        let hits: u64 = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(c);
                let len = CHUNK.min(n - c * CHUNK);
                (0..len)
                    .filter(|_| pred(&self.shadow.image(&self.bsgs.sample(&mut rng))))
                    .count() as u64
            })
            .sum();
        Ok(IntervalEstimate {
            value: Value::Approx(hits as f64 / n as f64),
            radius: hoeffding_radius(n),
            bracket,
            level,
            samples: Some(n),
            seed: Some(seed),
        })
    }

    /// `ψ_n(g)`: the fraction of the orbit fixed setwise by `g`.
    pub fn psi(&self, group: &Group, g: &GroupWord, opts: &EstimateOptions) -> Result<IntervalEstimate> {
        let p = group.portrait(g, self.level())?.point_action();
        self.measure(opts, Bracket::Upper, |b| p.apply_set(b.members()) == b.members())
    }

    /// `ψ^p_n(g)`: the fraction of the orbit fixed pointwise by `g` with
    /// trivial sections at every member.
    pub fn psip(&self, group: &Group, g: &GroupWord, opts: &EstimateOptions) -> Result<IntervalEstimate> {
        let good = good_vertices(group, g, self.level())?;
        self.measure(opts, Bracket::Lower, |b| b.members().iter().all(|&v| good[v as usize]))
    }
}

/// Per-vertex flag: `g` fixes the vertex and its section there is trivial.
fn good_vertices(group: &Group, g: &GroupWord, n: usize) -> Result<Vec<bool>> {
    group
        .level_states(g, n)?
        .into_iter()
        .enumerate()
        .map(|(i, (img, sec))| Ok(img == i && group.is_identity(&sec)?))
        .collect()
}

pub fn psi_level(
    group: &Group,
    set: &ClosedSet,
    g: &GroupWord,
    n: usize,
    opts: &EstimateOptions,
) -> Result<IntervalEstimate> {
    LevelSetup::new(group, set, n, opts.setup_cap())?.psi(group, g, opts)
}

pub fn psip_level(
    group: &Group,
    set: &ClosedSet,
    g: &GroupWord,
    n: usize,
    opts: &EstimateOptions,
) -> Result<IntervalEstimate> {
    LevelSetup::new(group, set, n, opts.setup_cap())?.psip(group, g, opts)
}

/// `χ_n(g)`.
///
/// For a branch group and a set with empty interior the value coincides with
/// `ψ_n(g)` and is tagged `exact-identity`. Otherwise the level quotient is
/// enumerated (at most `CHI_LEVEL_GROUP_CAP` elements): an orbit member
/// `B = h·S` counts when `h⁻¹gh` normalizes the setwise stabilizer of the
/// shadow `S`. That finite-level test carries no monotonicity guarantee and
/// is tagged `heuristic`.
pub fn chi_level(
    group: &Group,
    set: &ClosedSet,
    g: &GroupWord,
    n: usize,
    opts: &EstimateOptions,
) -> Result<IntervalEstimate> {
    let setup = LevelSetup::new(group, set, n, opts.orbit_cap)?;
    setup.chi(group, g, opts)
}

impl LevelSetup {
    pub fn chi(&self, group: &Group, g: &GroupWord, opts: &EstimateOptions) -> Result<IntervalEstimate> {
        if group.branch() == Some(BranchKind::Branch) && self.set.has_empty_interior() {
            let mut est = self.psi(group, g, opts)?;
            est.bracket = Bracket::ExactIdentity;
            return Ok(est);
        }
        let fits = self
            .bsgs
            .order_u64()
            .is_some_and(|o| o <= CHI_LEVEL_GROUP_CAP as u64);
        if !fits {
            return Err(Error::Unsupported(format!(
                "level quotient of order {} exceeds {} elements",
                self.bsgs.order(),
                CHI_LEVEL_GROUP_CAP
            )));
        }
        if opts.mode == Mode::Mc {
            return Err(Error::Unsupported("chi-level is computed exactly only".into()));
        }
        let members = orbit_with_transversal(&self.bsgs, &self.shadow, CHI_LEVEL_GROUP_CAP)?
            .ok_or(Error::OrbitOverflow { cap: CHI_LEVEL_GROUP_CAP })?;
        let stab = stabilizer_generators(&self.bsgs, &members)?;
        let p = group.portrait(g, self.level())?.point_action();
        let s = self.shadow.members();
        let hits = members
            .par_iter()
            .filter(|(_, h)| {
                let k = h.inverse().compose(&p).compose(h);
                let k_inv = k.inverse();
                stab.iter().all(|t| k.compose(t).compose(&k_inv).apply_set(s) == s)
            })
            .count();
        Ok(IntervalEstimate {
            value: Value::Exact(BigRational::new(BigInt::from(hits), BigInt::from(members.len()))),
            radius: 0.0,
            bracket: Bracket::Heuristic,
            level: self.level(),
            samples: None,
            seed: None,
        })
    }
}

/// Strong generators of the setwise stabilizer of the base set of
/// `members`, from Schreier generators.
fn stabilizer_generators(group: &Bsgs, members: &[(VertexSet, Perm)]) -> Result<Vec<Perm>> {
    let index: HashMap<&[u32], usize> = members
        .iter()
        .enumerate()
        .map(|(i, (b, _))| (b.members(), i))
        .collect();
    let mut gens: Vec<Perm> = Vec::new();
    for (b, h) in members {
        for s in group.generators() {
            let img = b.image(s);
            let j = index[img.members()];
            let u = members[j].1.inverse().compose(s).compose(h);
            if !u.is_identity() && !gens.contains(&u) {
                gens.push(u);
            }
        }
    }
    let stab = Bsgs::new(group.degree(), group.level(), gens)?;
    Ok(stab.strong_generators().to_vec())
}

/// Outcome of the rule for the non-branch family with the even-zero set.
#[derive(Clone, Debug, PartialEq)]
pub struct DecomposableCheck {
    /// Value predicted from the parity of the level-wide swaps.
    pub predicted: BigRational,
    pub computed: IntervalEstimate,
    pub agrees: bool,
}

/// For the non-branch family: `ψ_n(g)` for the even-zero set is 1 exactly
/// when every level-wide swap `h<k>` with odd `k` occurs an even number of
/// times in `g`, and 0 otherwise. All generators of `g` must act above
/// level `n`.
pub fn psi_decomposable_check(group: &Group, g: &GroupWord, n: usize) -> Result<DecomposableCheck> {
    if group.family() != Some(Family::NonBranch) {
        return Err(Error::input("the decomposition rule applies to the nonbranch family only"));
    }
    let family = Family::NonBranch;
    let mut parity: HashMap<usize, bool> = HashMap::new();
    for t in g.tokens() {
        let name = group.generator_name(t.gen);
        let depth = family
            .generator_depth(&name, group.degree())
            .filter(|_| family.is_generator(&name, group.degree()))
            .ok_or_else(|| Error::input(format!("`{name}` is not a family generator")))?;
        if depth > n {
            return Err(Error::input(format!("`{name}` acts below level {n}")));
        }
        if let Some(k) = name.strip_prefix('h').and_then(|k| k.parse::<usize>().ok()) {
            if k % 2 == 1 {
                *parity.entry(k).or_default() ^= true;
            }
        }
    }
    let trivial = parity.values().all(|odd| !odd);
    let predicted = if trivial { BigRational::from_integer(1.into()) } else { BigRational::zero() };
    let set = ClosedSet::new(2, SetKind::EvenZero { base: 1 })?;
    let computed = psi_level(group, &set, g, n, &EstimateOptions::exact())?;
    let agrees = computed.value.exact() == Some(&predicted);
    Ok(DecomposableCheck {
        predicted,
        computed,
        agrees,
    })
}
