use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use foamtft::cli::{run_args, Outcome as CliOutcome, EXIT_OK};
use foamtft::graphs::{involute, GraphClass};
use foamtft::text::{write_film, write_graph, write_group};
use rand::Rng;

use crate::fixtures::{film_corpus, rng, theories, Theory};
use crate::{within, Outcome};

const ROUNDS: usize = 4;

fn run(args: &[&Path], head: &[&str]) -> CliOutcome {
    let mut v: Vec<String> = vec!["foamtft".into()];
    v.extend(head.iter().map(|s| s.to_string()));
    v.extend(args.iter().map(|p| p.display().to_string()));
    run_args(v)
}

/// A cover file naming the working set through graph blocks.
fn cover_text(t: &Theory) -> String {
    let group = &t.cover.actions.values().next().unwrap().group;
    let colors: Vec<&str> = t.cover.palette.colors().iter().map(|c| c.as_str()).collect();
    let mut out = format!("palette: {}\n{}", colors.join(" "), write_group(group));
    let mut names = Vec::new();
    for (k, c) in t.working.iter().enumerate() {
        if c.is_segment() {
            names.push(format!("I_{}", c.colors()[0]));
        } else if c != &involute(c) && t.working[..k].contains(&involute(c)) {
            continue;
        } else {
            let name = format!("g{k}");
            out.push_str(&write_graph(&name, c));
            names.push(name.clone());
            if c != &involute(c) {
                names.push(format!("{name}*"));
            }
        }
    }
    writeln!(out, "working: {}", names.join(" ")).unwrap();
    out
}

fn one_theory(t: &Theory, dir: &Path, seed: u64) -> Result<(usize, usize), String> {
    let cover = dir.join(format!("{}.cover", t.name));
    let theory = dir.join(format!("{}.theory", t.name));
    fs::write(&cover, cover_text(t)).unwrap();
    let mut head = vec!["build"];
    if !t.built {
        head.push("--unverified");
    }
    let o = run(&[&cover, Path::new("-o"), &theory], &head);
    if o.code != EXIT_OK {
        return Err(format!("{}: build exited {}: {}", t.name, o.code, o.stderr));
    }

    let films = film_corpus(&t.working, 4);
    let mut surface = String::new();
    let mut vertices: Vec<(String, GraphClass)> = Vec::new();
    for (k, (_, film)) in films.iter().enumerate() {
        let mut f = film.clone();
        for v in 0..f.vertex_count() {
            let name = format!("f{k}v{v}");
            vertices.push((name.clone(), f.vertex_graph_at(v).unwrap().0));
            f.rename_vertex(v, name);
        }
        surface.push_str(&write_film(&format!("film{k}"), &f));
    }
    let surface_path = dir.join(format!("{}.surface", t.name));
    fs::write(&surface_path, surface).unwrap();

    let mut r = rng(seed);
    let mut nonzero = 0;
    for round in 0..ROUNDS {
        let mut labels = String::new();
        for (name, class) in &vertices {
            let n = t.bundle.graph.dim(class).unwrap();
            let k = if round == 0 { 0 } else { r.gen_range(0..n) };
            writeln!(labels, "label vertex {name} = #{k}").unwrap();
        }
        let labels_path = dir.join(format!("{}.{round}.labels", t.name));
        fs::write(&labels_path, labels).unwrap();
        let e = run(&[&theory, &surface_path, &labels_path], &["eval"]);
        let o = run(&[&cover, Path::new("--surface"), &surface_path, Path::new("--labels"), &labels_path], &["oracle"]);
        if e.code != EXIT_OK || o.code != EXIT_OK {
            return Err(format!("{}: eval exited {} ({}), oracle exited {} ({})", t.name, e.code, e.stderr, o.code, o.stderr));
        }
        for (a, b) in e.stdout.lines().zip(o.stdout.lines()) {
            if a != b {
                return Err(format!("{} round {round}: eval `{a}` but oracle `{b}`", t.name));
            }
            if !a.ends_with(" 0/1") {
                nonzero += 1;
            }
        }
        if e.stdout.lines().count() != films.len() || o.stdout.lines().count() != films.len() {
            return Err(format!("{}: expected {} values", t.name, films.len()));
        }
    }
    Ok((films.len(), nonzero))
}

pub fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut notes = Vec::new();
    for (k, t) in theories().iter().enumerate() {
        let (films, nonzero) = one_theory(t, dir.path(), 100 + k as u64)?;
        notes.push(format!("{} {films} films/{nonzero} nonzero", t.name));
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!("{} labelings each: {}", ROUNDS, notes.join(", ")))
}
