//! The `foamtft` command line: verify, eval, build, oracle and axioms.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0  | success |
//! | 1  | a verification or axiom check failed |
//! | 2  | parse error in an input file |
//! | 3  | I/O error |
//! | 4  | a class outside the working set was needed |
//! | 5  | a vertex-graph sequence is not composable |
//! | 6  | invalid input (surface, graph, labels, tables, boundary) |
//! | 7  | degenerate algebraic data (singular pairing, no unit) |
//! | 64 | bad command-line usage |
//! | 70 | internal error |

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::evaluate::{check_axioms, label_with, Evaluator, LabeledFoam};
use crate::frobenius::{verify_graph_cardy, GraphCardyBundle};
use crate::graphs::{GraphClass, Palette};
use crate::groupcover::{build_bundle, build_bundle_unverified, film_phi, EquipmentBasis, GroupCover};
use crate::rational::{format_q, q, Q};
use crate::report::Report;
use crate::text::{
    oracle_boundary, parse_cover, parse_labels, parse_surfaces, parse_theory, resolve_labels, write_theory, CoverSpec,
    LabelEntry, NamedFoam,
};

/// Environment variable naming the default cache directory for `build`.
pub const CACHE_ENV: &str = "FOAMTFT_CACHE_DIR";

pub const EXIT_OK: u8 = 0;
pub const EXIT_VERIFY: u8 = 1;
pub const EXIT_PARSE: u8 = 2;
pub const EXIT_IO: u8 = 3;
pub const EXIT_MISSING_CLASS: u8 = 4;
pub const EXIT_NOT_COMPOSABLE: u8 = 5;
pub const EXIT_INVALID: u8 = 6;
pub const EXIT_DEGENERATE: u8 = 7;
pub const EXIT_USAGE: u8 = 64;
pub const EXIT_INTERNAL: u8 = 70;

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. } => EXIT_PARSE,
        Error::Io(_) => EXIT_IO,
        Error::MissingClass(_) | Error::MissingCutClass(_) => EXIT_MISSING_CLASS,
        Error::NotComposable(_) | Error::Incompatible => EXIT_NOT_COMPOSABLE,
        Error::BundleVerificationFailed(_) => EXIT_VERIFY,
        Error::SingularPairing(_) | Error::NoUnit(_) => EXIT_DEGENERATE,
        Error::NonUniqueInternal(_) | Error::NoCut(_) | Error::InvalidCut(_) => EXIT_INTERNAL,
        Error::InvalidGraph(_)
        | Error::UnknownColor(_)
        | Error::UnknownVertex(_)
        | Error::InvalidSurface(_)
        | Error::DimensionMismatch(_)
        | Error::MixedColors(_)
        | Error::UnlabeledPoint(_)
        | Error::InvalidTables(_)
        | Error::MismatchedBoundary(_) => EXIT_INVALID,
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Human-readable lines.
    #[default]
    Text,
    /// Tab-separated `name<TAB>value` rows.
    Table,
}

#[derive(Debug, Parser)]
#[command(name = "foamtft", version, about = "Cyclic foam TFTs over exact rationals")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Print the cut decomposition tree of each evaluation.
    #[arg(long, global = true)]
    pub trace: bool,
    /// Cache directory for built theories.
    #[arg(long, env = CACHE_ENV, global = true)]
    pub cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check every axiom of a theory file.
    Verify { theory: PathBuf },
    /// Evaluate the foams of a surface file.
    Eval {
        theory: PathBuf,
        surface: PathBuf,
        labels: Option<PathBuf>,
    },
    /// Build a theory from group, action and cover files.
    Build {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Comma-separated palette, overriding the files.
        #[arg(long, value_delimiter = ',')]
        palette: Option<Vec<String>>,
        /// Write the theory here instead of standard output.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Emit the theory even when a crosscap element does not exist.
        #[arg(long)]
        unverified: bool,
    },
    /// Count equipped maps on the films of a surface file directly.
    Oracle {
        /// Group, action and cover files.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        surface: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        #[arg(long, value_delimiter = ',')]
        palette: Option<Vec<String>>,
    },
    /// Run the invariance checks over a corpus directory of `.surface` files.
    Axioms { theory: PathBuf, corpus: PathBuf },
}

/// What a command printed and the code it exits with.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }

    fn error(e: &Error) -> Self {
        Outcome {
            code: exit_code(e),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        }
    }
}

/// Parses arguments and runs; never panics on bad input.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            Outcome {
                code,
                stdout: if code == EXIT_OK { text.clone() } else { String::new() },
                stderr: if code == EXIT_OK { String::new() } else { text },
            }
        }
    }
}

pub fn run(cli: &Cli) -> Outcome {
    let r = match &cli.command {
        Command::Verify { theory } => cmd_verify(cli, theory),
        Command::Eval { theory, surface, labels } => cmd_eval(cli, theory, surface, labels.as_deref()),
        Command::Build {
            inputs,
            palette,
            output,
            unverified,
        } => cmd_build(cli, inputs, palette.as_deref(), output.as_deref(), *unverified),
        Command::Oracle {
            inputs,
            surface,
            labels,
            palette,
        } => cmd_oracle(cli, inputs, surface, labels, palette.as_deref()),
        Command::Axioms { theory, corpus } => cmd_axioms(cli, theory, corpus),
    };
    r.unwrap_or_else(|e| Outcome::error(&e))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

/// Parse errors gain the file name.
fn in_file<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse { line, message } => Error::Parse {
            line,
            message: format!("{}: {message}", path.display()),
        },
        e => e,
    })
}

fn load_theory(path: &Path) -> Result<GraphCardyBundle> {
    in_file(path, parse_theory(&read(path)?))
}

fn report_outcome(cli: &Cli, r: &Report) -> Outcome {
    let stdout = match cli.format {
        Format::Text => r.to_string(),
        Format::Table => r.to_table(),
    };
    Outcome {
        code: if r.is_ok() { EXIT_OK } else { EXIT_VERIFY },
        stdout,
        stderr: String::new(),
    }
}

pub fn cmd_verify(cli: &Cli, theory: &Path) -> Result<Outcome> {
    let b = load_theory(theory)?;
    Ok(report_outcome(cli, &verify_graph_cardy(&b)?))
}

fn values_outcome(cli: &Cli, values: &[(String, Q)], notes: String) -> Outcome {
    let mut out = notes;
    for (name, v) in values {
        match cli.format {
            Format::Table => out.push_str(&format!("{name}\t{}\n", format_q(v))),
            Format::Text if values.len() == 1 => out.push_str(&format!("{}\n", format_q(v))),
            Format::Text => out.push_str(&format!("{name} {}\n", format_q(v))),
        }
    }
    Outcome::ok(out)
}

pub fn cmd_eval(cli: &Cli, theory: &Path, surface: &Path, labels: Option<&Path>) -> Result<Outcome> {
    let b = load_theory(theory)?;
    let foams = in_file(surface, parse_surfaces(&read(surface)?))?;
    let entries: Vec<LabelEntry> = match labels {
        Some(p) => in_file(p, parse_labels(&read(p)?))?,
        None => Vec::new(),
    };
    let ev = if cli.trace {
        Evaluator::new(&b)?.with_trace()
    } else {
        Evaluator::new(&b)?
    };
    let mut values = Vec::new();
    let mut notes = String::new();
    for nf in &foams {
        let own: Vec<LabelEntry> = entries.iter().filter(|e| names_of(nf).contains(&e.name)).cloned().collect();
        let lf = resolve_labels(&b, &nf.foam, &own)?;
        let v = ev.eval_foam(&lf)?;
        if cli.trace {
            notes.push_str(&format!("# {}\n", nf.name));
            for t in ev.take_trace() {
                notes.push_str(&format!("# {t}\n"));
            }
        }
        values.push((nf.name.clone(), v));
    }
    Ok(values_outcome(cli, &values, notes))
}

fn names_of(nf: &NamedFoam) -> Vec<String> {
    let mut out = nf.foam.mark_names();
    out.extend(nf.foam.film.names().iter().cloned());
    out
}

fn load_cover(inputs: &[PathBuf], palette: Option<&[String]>) -> Result<(CoverSpec, String)> {
    let mut text = String::new();
    // first line of each file within the concatenation
    let mut starts = Vec::new();
    for p in inputs {
        starts.push(text.lines().count() + 1);
        text.push_str(&read(p)?);
        if !text.ends_with('\n') {
            text.push('\n');
        }
    }
    let mut spec = parse_cover(&text).map_err(|e| match e {
        Error::Parse { line, message } => {
            let i = starts.iter().rposition(|&s| s <= line).unwrap_or(0);
            Error::Parse {
                line: line + 1 - starts[i],
                message: format!("{}: {message}", inputs[i].display()),
            }
        }
        e => e,
    })?;
    if let Some(cs) = palette {
        let palette = Palette::new(cs.iter().cloned())?;
        let mut actions = BTreeMap::new();
        for c in palette.colors() {
            let a = match spec.cover.actions.get(c) {
                Some(a) => a.clone(),
                None => spec
                    .cover
                    .actions
                    .values()
                    .next()
                    .cloned()
                    .ok_or_else(|| Error::UnknownColor(c.to_string()))?,
            };
            actions.insert(c.clone(), a);
        }
        let convention = spec.cover.convention;
        spec.cover = GroupCover::new(palette, actions)?.with_convention(convention);
        spec.working.retain(|w| w.colors().iter().all(|c| spec.cover.palette.contains(c)));
        if spec.working.is_empty() {
            spec.working = spec.cover.palette.colors().iter().map(|c| GraphClass::segment(c.clone())).collect();
        }
    }
    Ok((spec, text))
}

fn atomic_write(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let tmp = dir.join(format!(
        ".{}.{}.tmp",
        path.file_name().and_then(|n| n.to_str()).unwrap_or("out"),
        std::process::id()
    ));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Content hash of everything that determines a build.
pub fn build_key(text: &str, palette: Option<&[String]>, unverified: bool) -> String {
    let mut h = Sha256::new();
    h.update(b"foamtft-build-1\0");
    h.update(text.as_bytes());
    h.update(b"\0");
    if let Some(p) = palette {
        h.update(p.join(",").as_bytes());
    }
    h.update([unverified as u8]);
    hex::encode(h.finalize())
}

pub fn cmd_build(
    cli: &Cli,
    inputs: &[PathBuf],
    palette: Option<&[String]>,
    output: Option<&Path>,
    unverified: bool,
) -> Result<Outcome> {
    let (spec, text) = load_cover(inputs, palette)?;
    let key = build_key(&text, palette, unverified);
    let cached = cli.cache_dir.as_ref().map(|d| d.join(format!("{key}.theory")));
    let mut stderr = String::new();
    let theory = match cached.as_ref().filter(|p| p.is_file()) {
        Some(p) => {
            stderr.push_str(&format!("cache hit {key}\n"));
            read(p)?
        }
        None => {
            let b = if unverified {
                build_bundle_unverified(&spec.cover, &spec.working)?
            } else {
                build_bundle(&spec.cover, &spec.working)?
            };
            let t = write_theory(&b);
            if let Some(p) = &cached {
                atomic_write(p, &t)?;
                stderr.push_str(&format!("cache miss {key}\n"));
            }
            t
        }
    };
    let stdout = match output {
        Some(p) => {
            atomic_write(p, &theory)?;
            String::new()
        }
        None => theory,
    };
    Ok(Outcome {
        code: EXIT_OK,
        stdout,
        stderr,
    })
}

pub fn cmd_oracle(
    cli: &Cli,
    inputs: &[PathBuf],
    surface: &Path,
    labels: &Path,
    palette: Option<&[String]>,
) -> Result<Outcome> {
    let (spec, _) = load_cover(inputs, palette)?;
    let foams = in_file(surface, parse_surfaces(&read(surface)?))?;
    let entries = in_file(labels, parse_labels(&read(labels)?))?;
    let mut values = Vec::new();
    for nf in &foams {
        if !nf.foam.patches.iter().all(|p| p.is_plain() && p.points.is_empty()) {
            return Err(Error::InvalidSurface(format!("{}: the oracle counts film surfaces only", nf.name)));
        }
        let film = &nf.foam.film;
        let own: Vec<LabelEntry> = entries
            .iter()
            .filter(|e| film.vertex_index(&e.name).is_some())
            .cloned()
            .collect();
        let ks = oracle_boundary(film, &own)?;
        let mut bases: Vec<EquipmentBasis> = Vec::new();
        for v in 0..film.vertex_count() {
            let (class, _, _) = film.vertex_graph_at(v)?;
            bases.push(spec.cover.enumerate_equipments(&class)?);
        }
        let boundary: Vec<(&EquipmentBasis, usize)> = bases.iter().zip(ks).collect();
        values.push((nf.name.clone(), film_phi(&spec.cover, film, &boundary)?));
    }
    Ok(values_outcome(cli, &values, String::new()))
}

/// Labels from `<stem>.labels` when present, else seeded small integers.
fn corpus_foam(b: &GraphCardyBundle, nf: &NamedFoam, labels: Option<&[LabelEntry]>, seed: u64) -> Result<LabeledFoam> {
    match labels {
        Some(e) => {
            let own: Vec<LabelEntry> = e.iter().filter(|x| names_of(nf).contains(&x.name)).cloned().collect();
            resolve_labels(b, &nf.foam, &own)
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            label_with(b, &nf.foam, |n| (0..n).map(|_| q(rng.gen_range(-2..=2))).collect())
        }
    }
}

pub fn cmd_axioms(cli: &Cli, theory: &Path, corpus: &Path) -> Result<Outcome> {
    let b = load_theory(theory)?;
    let mut files: Vec<PathBuf> = fs::read_dir(corpus)?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    files.retain(|p| p.extension().is_some_and(|x| x == "surface"));
    files.sort();
    let mut foams = Vec::new();
    for (i, p) in files.iter().enumerate() {
        let lp = p.with_extension("labels");
        let labels = if lp.is_file() {
            Some(in_file(&lp, parse_labels(&read(&lp)?))?)
        } else {
            None
        };
        for (j, nf) in in_file(p, parse_surfaces(&read(p)?))?.iter().enumerate() {
            foams.push(corpus_foam(&b, nf, labels.as_deref(), (i * 1000 + j) as u64)?);
        }
    }
    let mut r = check_axioms(&b, &foams)?;
    if foams.is_empty() {
        r.fail("Corpus.", format!("no .surface files in {}", corpus.display()));
    }
    Ok(report_outcome(cli, &r))
}

/// Entry point for the binary.
pub fn main_with_args() -> std::process::ExitCode {
    let o = run_args(std::env::args_os());
    print!("{}", o.stdout);
    eprint!("{}", o.stderr);
    std::process::ExitCode::from(o.code)
}
