//! The `treechar` command-line tool.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num::BigRational;
use serde_json::json;

use crate::cache::{level_quotient_cached, Cache};
use crate::canonical::{approximate_fixed_set, chi1, chi_k, fix_symdiff};
use crate::catalog;
use crate::character::{centrality_check, distinguish_psip, gram_psd_certify, parse_character, rist_orbit_growth};
use crate::error::{Error, Result};
use crate::group::Group;
use crate::groupfile;
use crate::irs::{psi_decomposable_check, EstimateOptions, LevelSetup, Mode, DEFAULT_SAMPLES};
use crate::linalg::PsdResult;
use crate::orbit::{VertexSet, ORBIT_CAP};
use crate::record::{csv_row, Record, CSV_HEADER};
use crate::sets::{hausdorff_distance, ClosedSet};
use crate::setspec::parse_setspec;
use crate::tree::Vertex;
use crate::word::GroupWord;

#[derive(Parser, Debug)]
#[command(name = "treechar", version, about = "Characters of self-similar groups acting on rooted trees")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct GlobalArgs {
    /// Catalog group name (see `group list`).
    #[arg(long, global = true)]
    pub group: Option<String>,
    /// Group definition file.
    #[arg(long, global = true, value_name = "PATH", conflicts_with = "group")]
    pub group_file: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Do not read or write the on-disk cache.
    #[arg(long, global = true)]
    pub no_cache: bool,
    /// Worker thread cap.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    /// Bare values, one per line.
    Plain,
}

#[derive(Args, Debug, Clone)]
pub struct EstimateArgs {
    /// exact, mc or auto (exact when the orbit fits under the cap).
    #[arg(long, default_value = "auto")]
    pub mode: Mode,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub samples: u64,
    /// Sampler seed; required with --mode mc.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Largest orbit enumerated exactly.
    #[arg(long, default_value_t = ORBIT_CAP)]
    pub orbit_cap: usize,
}

#[derive(Args, Debug, Clone)]
pub struct LevelArgs {
    /// Closed set, e.g. `cyl(01)` or `thmb(seq=[2,4];stride=2)`.
    #[arg(long)]
    pub set: String,
    /// Group word; repeat for several.
    #[arg(long, required = true)]
    pub word: Vec<String>,
    /// Tree level, at least 1.
    #[arg(long)]
    pub level: usize,
    #[command(flatten)]
    pub estimate: EstimateArgs,
}

#[derive(Subcommand, Debug)]
pub enum GroupCommand {
    /// Catalog entries.
    List,
    /// Degree, generators and metadata of the selected group.
    Info,
    /// Canonical definition text, loadable with --group-file.
    Export,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Catalog listing, group details and export.
    #[command(subcommand)]
    Group(GroupCommand),
    /// Exact fixed-point measure.
    Chi1 {
        #[arg(long, required = true)]
        word: Vec<String>,
    },
    /// Exact fixed-point measure of g^k.
    Chik {
        #[arg(long, required = true)]
        word: Vec<String>,
        #[arg(long)]
        k: u32,
    },
    /// μ(Fix(g) Δ A) for a clopen set given by level vertices.
    FixSymdiff {
        #[arg(long, required = true)]
        word: Vec<String>,
        /// Comma-separated vertices of one level, e.g. `00,01`.
        #[arg(long)]
        vertices: String,
    },
    /// Best word of bounded length for `fix-symdiff`.
    ApproxFix {
        #[arg(long)]
        vertices: String,
        #[arg(long, default_value_t = 3)]
        max_len: usize,
    },
    /// Level shadow of a set.
    Shadow {
        #[arg(long)]
        set: String,
        #[arg(long)]
        level: usize,
    },
    /// Hausdorff distance of two sets at a level.
    Dh {
        #[arg(long)]
        set: String,
        #[arg(long)]
        other: String,
        #[arg(long)]
        level: usize,
    },
    /// Setwise-fixed fraction of the level orbit (upper bracket).
    Psi(LevelArgs),
    /// Pointwise-trivial fraction of the level orbit (lower bracket).
    Psip(LevelArgs),
    /// Level value of the stabilizer-conjugation character.
    ChiLevel(LevelArgs),
    /// Exact PSD certificate of a Gram matrix.
    Gram {
        /// Character expression, e.g. `chi1`, `psi`, `chi1*psip^2`.
        #[arg(long)]
        character: String,
        #[arg(long, required = true)]
        word: Vec<String>,
        #[arg(long)]
        set: Option<String>,
        #[arg(long)]
        level: Option<usize>,
    },
    /// Checks χ(gh) = χ(hg) on the given pairs.
    Central {
        #[arg(long)]
        character: String,
        /// `g,h` pairs.
        #[arg(long, required = true)]
        pair: Vec<String>,
        #[arg(long)]
        set: Option<String>,
        #[arg(long)]
        level: Option<usize>,
    },
    /// Searches for a word separating the pointwise characters of two sets.
    Distinguish {
        #[arg(long)]
        set: String,
        #[arg(long)]
        other: String,
        #[arg(long)]
        level: usize,
        #[arg(long, default_value_t = 2)]
        max_len: usize,
        #[arg(long, default_value_t = 0.05)]
        margin: f64,
        #[command(flatten)]
        estimate: EstimateArgs,
    },
    /// Orbit growth of a set under rigid-stabilizer words.
    RistGrowth {
        #[arg(long)]
        vertex: String,
        #[arg(long)]
        set: String,
        #[arg(long)]
        level: usize,
        #[arg(long, default_value_t = 6)]
        max_len: usize,
    },
    /// Compares the non-branch family's closed-form rule with the level value.
    Decomposable {
        #[arg(long, required = true)]
        word: Vec<String>,
        #[arg(long)]
        level: usize,
    },
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return e.exit_code();
        }
    };
    if let Some(n) = cli.global.threads {
        // Fails only when the global pool already exists.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    match execute(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

struct Ctx<'a> {
    cli: &'a Cli,
    cache: Option<Cache>,
}

impl Ctx<'_> {
    fn group(&self) -> Result<Group> {
        load_group(&self.cli.global)
    }
}

fn load_group(g: &GlobalArgs) -> Result<Group> {
    match (&g.group, &g.group_file) {
        (Some(name), None) => catalog::group(name),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::input(format!("cannot read {}: {e}", path.display())))?;
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "group".into());
            groupfile::parse(&name, &text)
        }
        _ => Err(Error::input("exactly one of --group or --group-file is required")),
    }
}

fn estimate_options(e: &EstimateArgs) -> Result<EstimateOptions> {
    if e.mode == Mode::Mc && e.seed.is_none() {
        return Err(Error::input("--mode mc requires --seed"));
    }
    Ok(EstimateOptions {
        mode: e.mode,
        samples: e.samples,
        seed: e.seed,
        orbit_cap: e.orbit_cap,
    })
}

fn check_level(level: usize) -> Result<()> {
    if level == 0 {
        return Err(Error::input("--level must be at least 1"));
    }
    Ok(())
}

fn parse_vertices(text: &str, degree: usize) -> Result<VertexSet> {
    let vs: Vec<Vertex> = text
        .split(',')
        .map(|t| Vertex::parse(t.trim(), degree))
        .collect::<Result<_>>()?;
    let level = vs.first().map(Vertex::level).unwrap_or(0);
    if vs.iter().any(|v| v.level() != level) {
        return Err(Error::input("all vertices must lie on one level"));
    }
    VertexSet::from_vertices(degree, level, &vs)
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    let cache = if cli.global.no_cache { None } else { Cache::from_env() };
    let ctx = Ctx { cli, cache };
    let mut records: Vec<Record> = Vec::new();
    match &cli.command {
        Command::Group(GroupCommand::List) => {
            for e in catalog::entries() {
                records.push(Record::info("group", e.name, e.description).with_detail(json!({
                    "branch": e.branch.as_str(),
                    "value_set": e.value_set.map(|v| v.to_string()),
                    "externally_sourced": e.externally_sourced,
                })));
            }
        }
        Command::Group(GroupCommand::Info) => {
            let g = ctx.group()?;
            let entry = catalog::entry(g.name());
            let gens: Vec<String> = g.declared_generators().iter().map(|w| g.format_word(w)).collect();
            records.push(
                Record::info("group", g.name(), entry.map(|e| e.description).unwrap_or("user-defined group"))
                    .with_detail(json!({
                        "degree": g.degree(),
                        "family": g.family().map(|f| f.to_string()),
                        "generators": gens,
                        "branch": g.branch().map(|b| b.as_str()),
                        "value_set": entry.and_then(|e| e.value_set).map(|v| v.to_string()),
                        "content_hash": g.content_hash(),
                    })),
            );
        }
        Command::Group(GroupCommand::Export) => {
            let g = ctx.group()?;
            out.write_all(g.definition_text().as_bytes())?;
            return Ok(());
        }
        Command::Chi1 { word } => {
            let g = ctx.group()?;
            for w in word {
                let gw = g.parse_word(w)?;
                let key = g.format_word(&gw);
                let v = match ctx.cache.as_ref().and_then(|c| c.chi1_lookup(&g, &key)) {
                    Some(v) => v,
                    None => {
                        let v = chi1(&g, &gw)?;
                        if let Some(c) = &ctx.cache {
                            let _ = c.chi1_store(&g, &key, &v);
                        }
                        v
                    }
                };
                records.push(Record::exact("chi1", g.name(), &v).with_word(w.as_str()));
            }
        }
        Command::Chik { word, k } => {
            if *k == 0 {
                return Err(Error::input("--k must be at least 1"));
            }
            let g = ctx.group()?;
            for w in word {
                let v = chi_k(&g, &g.parse_word(w)?, *k)?;
                records.push(Record::exact(&format!("chi{k}"), g.name(), &v).with_word(w.as_str()));
            }
        }
        Command::FixSymdiff { word, vertices } => {
            let g = ctx.group()?;
            let a = parse_vertices(vertices, g.degree())?;
            for w in word {
                let v = fix_symdiff(&g, &g.parse_word(w)?, &a)?;
                records.push(
                    Record::exact("fix-symdiff", g.name(), &v)
                        .with_word(w.as_str())
                        .with_set(&a)
                        .with_level(a.level()),
                );
            }
        }
        Command::ApproxFix { vertices, max_len } => {
            let g = ctx.group()?;
            let a = parse_vertices(vertices, g.degree())?;
            let (w, v) = approximate_fixed_set(&g, &a, *max_len)?;
            records.push(
                Record::exact("fix-symdiff", g.name(), &v)
                    .with_word(g.format_word(&w))
                    .with_set(&a)
                    .with_level(a.level()),
            );
        }
        Command::Shadow { set, level } => {
            let g = ctx.group()?;
            let c = parse_setspec(set, g.degree())?;
            let s = c.shadow(*level)?;
            records.push(
                Record::info("shadow", g.name(), s.to_string())
                    .with_set(&c)
                    .with_level(*level)
                    .with_detail(json!({ "size": s.len() })),
            );
        }
        Command::Dh { set, other, level } => {
            let g = ctx.group()?;
            let c1 = parse_setspec(set, g.degree())?;
            let c2 = parse_setspec(other, g.degree())?;
            let d = hausdorff_distance(&c1, &c2, *level)?;
            records.push(
                Record::exact("dh", g.name(), &d)
                    .with_set(format!("{c1} | {c2}"))
                    .with_level(*level),
            );
        }
        Command::Psi(a) | Command::Psip(a) | Command::ChiLevel(a) => {
            check_level(a.level)?;
            let opts = estimate_options(&a.estimate)?;
            let g = ctx.group()?;
            let c = parse_setspec(&a.set, g.degree())?;
            let setup = level_setup(&ctx, &g, &c, a.level, opts.setup_cap())?;
            let name = match &cli.command {
                Command::Psi(_) => "psi",
                Command::Psip(_) => "psip",
                _ => "chi-level",
            };
            for w in &a.word {
                let gw = g.parse_word(w)?;
                let est = match name {
                    "psi" => setup.psi(&g, &gw, &opts)?,
                    "psip" => setup.psip(&g, &gw, &opts)?,
                    _ => setup.chi(&g, &gw, &opts)?,
                };
                records.push(Record::estimate(name, g.name(), &est).with_set(&c).with_word(w.as_str()));
            }
        }
        Command::Gram { character, word, set, level } => {
            let g = ctx.group()?;
            let (c, n) = optional_set(&g, set, *level)?;
            let chi = parse_character(character, &g, c.as_ref(), n)?;
            let words: Vec<GroupWord> = word.iter().map(|w| g.parse_word(w)).collect::<Result<_>>()?;
            let detail = match gram_psd_certify(&g, &chi, &words)? {
                PsdResult::Psd { order, d, .. } => json!({
                    "psd": true,
                    "pivot_order": order,
                    "pivots": d.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                }),
                PsdResult::Violation { vector, value } => json!({
                    "psd": false,
                    "vector": vector.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                    "form_value": value.to_string(),
                }),
            };
            let psd = detail["psd"].as_bool().unwrap_or(false);
            let mut r = Record::info("gram", g.name(), if psd { "psd" } else { "not-psd" })
                .with_word(word.join("; "))
                .with_detail(detail);
            r.character = format!("gram[{chi}]");
            records.push(r);
        }
        Command::Central { character, pair, set, level } => {
            let g = ctx.group()?;
            let (c, n) = optional_set(&g, set, *level)?;
            let chi = parse_character(character, &g, c.as_ref(), n)?;
            let pairs: Vec<(GroupWord, GroupWord)> = pair
                .iter()
                .map(|p| {
                    let (a, b) = p
                        .split_once(',')
                        .ok_or_else(|| Error::input(format!("pair `{p}` needs the form g,h")))?;
                    Ok((g.parse_word(a)?, g.parse_word(b)?))
                })
                .collect::<Result<_>>()?;
            let failure = centrality_check(&g, &chi, &pairs)?;
            let mut r = Record::info("central", g.name(), if failure.is_none() { "true" } else { "false" })
                .with_detail(json!({
                    "pairs": pairs.len(),
                    "counterexample": failure.map(|(a, b)| [g.format_word(&a), g.format_word(&b)]),
                }));
            r.character = format!("central[{chi}]");
            records.push(r);
        }
        Command::Distinguish { set, other, level, max_len, margin, estimate } => {
            check_level(*level)?;
            let opts = estimate_options(estimate)?;
            let g = ctx.group()?;
            let c1 = parse_setspec(set, g.degree())?;
            let c2 = parse_setspec(other, g.degree())?;
            let found = distinguish_psip(&g, &c1, &c2, *level, *max_len, *margin, &opts)?;
            let r = match found {
                Some(w) => Record::info("distinguish", g.name(), w.gap.to_string())
                    .with_word(g.format_word(&w.word))
                    .with_detail(json!({
                        "found": true,
                        "first": w.first.value.to_string(),
                        "second": w.second.value.to_string(),
                        "first_radius": w.first.radius,
                        "second_radius": w.second.radius,
                        "score": w.score,
                        "margin": margin,
                    })),
                None => Record::info("distinguish", g.name(), "none-found")
                    .with_detail(json!({ "found": false, "margin": margin })),
            };
            let mut r = r.with_set(format!("{c1} | {c2}")).with_level(*level);
            if opts.mode != Mode::Exact {
                r.seed = opts.seed;
                r.samples = Some(opts.samples);
            }
            records.push(r);
        }
        Command::RistGrowth { vertex, set, level, max_len } => {
            let g = ctx.group()?;
            let v = Vertex::parse(vertex, g.degree())?;
            let c = parse_setspec(set, g.degree())?;
            let counts = rist_orbit_growth(&g, &v, &c, *level, *max_len)?;
            records.push(
                Record::info(
                    "rist-growth",
                    g.name(),
                    counts.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","),
                )
                .with_set(&c)
                .with_level(*level)
                .with_detail(json!({ "vertex": v.to_string(), "counts": counts })),
            );
        }
        Command::Decomposable { word, level } => {
            check_level(*level)?;
            let g = ctx.group()?;
            for w in word {
                let r = psi_decomposable_check(&g, &g.parse_word(w)?, *level)?;
                records.push(
                    Record::estimate("psi", g.name(), &r.computed)
                        .with_word(w.as_str())
                        .with_set("evenzero(base=1)")
                        .with_detail(json!({ "predicted": r.predicted.to_string(), "agrees": r.agrees })),
                );
            }
        }
    }
    emit(&records, cli.global.format, out)
}

fn level_setup(ctx: &Ctx, g: &Group, c: &ClosedSet, n: usize, cap: usize) -> Result<LevelSetup> {
    let bsgs = level_quotient_cached(g, n, ctx.cache.as_ref())?;
    LevelSetup::with_bsgs(g, Arc::clone(&bsgs), c, cap)
}

fn optional_set(g: &Group, set: &Option<String>, level: Option<usize>) -> Result<(Option<ClosedSet>, Option<usize>)> {
    if let Some(n) = level {
        check_level(n)?;
    }
    Ok((set.as_deref().map(|s| parse_setspec(s, g.degree())).transpose()?, level))
}

fn emit(records: &[Record], format: Format, out: &mut dyn Write) -> Result<()> {
    match format {
        Format::Json => {
            for r in records {
                writeln!(out, "{}", r.to_json())?;
            }
        }
        Format::Plain => {
            for r in records {
                writeln!(out, "{}", r.value)?;
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(CSV_HEADER).map_err(csv_err)?;
            for r in records {
                w.write_record(csv_row(r)).map_err(csv_err)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Parses an exact value printed by the tool.
pub fn parse_value(text: &str) -> Option<BigRational> {
    text.parse().ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["treechar", "--no-cache"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn chi1_plain() {
        let (code, out, _) = run_capture(&["chi1", "--group", "basilica", "--word", "a", "--word", "e", "--format", "plain"]);
        assert_eq!(code, 0);
        assert_eq!(out, "1/2\n1\n");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_capture(&["chi1", "--group", "basilica", "--word", "z"]).0, 2);
        assert_eq!(run_capture(&["chi1", "--word", "a"]).0, 2);
        let mc = ["psi", "--group", "autfin2", "--set", "cyl(0)", "--word", "a", "--level", "1", "--mode", "mc"];
        assert_eq!(run_capture(&mc).0, 2);
        let zero = ["psi", "--group", "autfin2", "--set", "cyl(0)", "--word", "a", "--level", "0"];
        assert_eq!(run_capture(&zero).0, 2);
        let big = ["chi-level", "--group", "autfin2", "--set", "cyl(0)", "--word", "a", "--level", "5"];
        assert_eq!(run_capture(&big).0, 2);
        let overflow = [
            "psi", "--group", "autfin2", "--set", "thmb(seq=[2,4];stride=2)", "--word", "a", "--level", "8",
            "--mode", "exact", "--orbit-cap", "1000",
        ];
        assert_eq!(run_capture(&overflow).0, 3);
    }

    #[test]
    fn psi_record() {
        let (code, out, err) = run_capture(&[
            "psi", "--group", "autfin3", "--set", "spine(2,0)", "--word", "h_a", "--level", "2", "--mode", "exact",
        ]);
        assert_eq!(code, 0, "{err}");
        let r: Record = serde_json::from_str(out.trim()).unwrap();
        assert_eq!(r.value, "2/3");
        assert_eq!(r.bracket.as_deref(), Some("upper"));
        assert_eq!(r.set.as_deref(), Some("spine(2,0)"));
    }

    #[test]
    fn csv_output() {
        let (code, out, _) = run_capture(&["shadow", "--group", "autfin3", "--set", "spine(2,0)", "--level", "2", "--format", "csv"]);
        assert_eq!(code, 0);
        let mut lines = out.lines();
        assert!(lines.next().unwrap().starts_with("character,group,set"));
        assert!(lines.next().unwrap().contains("\"{00,01,02,20,22}\""));
    }
}
