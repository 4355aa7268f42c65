//! Film and foam blocks, and label files.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::evaluate::LabeledFoam;
use crate::foams::{compose, CyclicFoam, Disk, FilmSurface, GluedCircle, Mark, Patch, Sign};
use crate::frobenius::GraphCardyBundle;
use crate::graphs::{Color, GraphClass};
use crate::linalg::basis_vector;
use crate::rational::Q;

use super::{join_q, lines, take_graphs, GraphTable, Line};

/// A parsed `film` or `foam` block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedFoam {
    pub name: String,
    pub foam: CyclicFoam,
    /// True for `film` blocks: every patch is a plain disk.
    pub is_film: bool,
}

struct Block<'a> {
    at: Line<'a>,
    name: String,
    is_film: bool,
    body: Vec<Line<'a>>,
}

pub fn parse_surfaces(text: &str) -> Result<Vec<NamedFoam>> {
    let all = lines(text);
    let (graphs, rest) = take_graphs(&all)?;
    let mut blocks: Vec<Block> = Vec::new();
    for l in rest {
        match l.keyword() {
            "film" | "foam" => {
                let t: Vec<&str> = l.text.split_whitespace().collect();
                if t.len() != 2 {
                    return Err(l.err(format!("expected `{} <name>`", t[0])));
                }
                blocks.push(Block {
                    at: l,
                    name: t[1].to_string(),
                    is_film: t[0] == "film",
                    body: Vec::new(),
                });
            }
            _ => match blocks.last_mut() {
                Some(b) => b.body.push(l),
                None => return Err(l.err("expected a `film` or `foam` block")),
            },
        }
    }
    blocks.iter().map(|b| parse_block(&graphs, b)).collect()
}

fn sign_of<'s>(l: &Line, tok: &'s str) -> Result<(&'s str, Sign)> {
    if let Some(n) = tok.strip_suffix('+') {
        Ok((n, Sign::Plus))
    } else if let Some(n) = tok.strip_suffix('-') {
        Ok((n, Sign::Minus))
    } else {
        Err(l.err(format!("`{tok}` needs a `+` or `-` suffix")))
    }
}

fn parse_block(graphs: &GraphTable, b: &Block) -> Result<NamedFoam> {
    if b.body.is_empty() {
        return Err(b.at.err(format!("{} is empty", b.name)));
    }
    let mut comps: Vec<Vec<String>> = Vec::new();
    let mut seam: Vec<(Line, String, [String; 2])> = Vec::new();
    let mut disks: Vec<(Line, Color, Vec<String>, Option<Vec<String>>)> = Vec::new();
    let mut composed: Option<(Line, Vec<GraphClass>)> = None;
    let mut patches: Vec<Line> = Vec::new();
    for l in &b.body {
        match l.keyword() {
            "vertices:" | "vertices" => {
                comps.push(l.after_colon("vertices")?.split_whitespace().map(String::from).collect());
            }
            "seam" => {
                let h = l.head();
                let ends: Vec<&str> = l.after_colon("seam")?.split_whitespace().collect();
                if h.len() != 2 || ends.len() != 2 {
                    return Err(l.err("expected `seam <edge> : <u> <v>`"));
                }
                seam.push((*l, h[1].to_string(), [ends[0].to_string(), ends[1].to_string()]));
            }
            "disk" => {
                let h = l.head();
                if h.len() != 2 {
                    return Err(l.err("expected `disk <color> : <vertices> [/ <edges>]`"));
                }
                let body = l.after_colon("disk")?;
                let (vs, es) = match body.split_once('/') {
                    Some((v, e)) => (v, Some(e.split_whitespace().map(String::from).collect())),
                    None => (body, None),
                };
                disks.push((*l, Color::new(h[1]), vs.split_whitespace().map(String::from).collect(), es));
            }
            "compose:" | "compose" => {
                let seq = l
                    .after_colon("compose")?
                    .split_whitespace()
                    .map(|n| graphs.get(l, n))
                    .collect::<Result<_>>()?;
                composed = Some((*l, seq));
            }
            "patch" if !b.is_film => patches.push(*l),
            other => return Err(l.err(format!("unexpected `{other}` in {} {}", if b.is_film { "film" } else { "foam" }, b.name))),
        }
    }
    let film = match composed {
        Some((l, seq)) => {
            if !comps.is_empty() || !seam.is_empty() || !disks.is_empty() {
                return Err(l.err("`compose:` cannot be mixed with explicit vertices"));
            }
            compose(&seq).map_err(|e| match e {
                Error::Incompatible => {
                    let names: Vec<String> = seq.iter().map(|c| c.key()).collect();
                    Error::NotComposable(format!("line {}: {}", l.no, names.join(", ")))
                }
                e => e,
            })?
        }
        None => explicit_film(b, comps, seam, disks)?,
    };
    let foam = if patches.is_empty() {
        CyclicFoam::from_film(film)
    } else {
        let ps = patches.iter().map(|l| parse_patch(l, film.disks().len())).collect::<Result<_>>()?;
        CyclicFoam::new(film, ps).map_err(|e| prefix(e, &b.name))?
    };
    Ok(NamedFoam {
        name: b.name.clone(),
        foam,
        is_film: b.is_film,
    })
}

fn prefix(e: Error, name: &str) -> Error {
    match e {
        Error::InvalidSurface(m) => Error::InvalidSurface(format!("{name}: {m}")),
        e => e,
    }
}

type DiskLine<'a> = (Line<'a>, Color, Vec<String>, Option<Vec<String>>);

fn explicit_film(
    b: &Block,
    comps: Vec<Vec<String>>,
    seam: Vec<(Line, String, [String; 2])>,
    disks: Vec<DiskLine>,
) -> Result<FilmSurface> {
    let names: Vec<String> = comps.iter().flatten().cloned().collect();
    let index: HashMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let vertex = |l: &Line, n: &str| -> Result<usize> {
        index
            .get(n)
            .copied()
            .ok_or_else(|| l.err(format!("unknown vertex `{n}`")))
    };
    let mut components = Vec::new();
    let mut k = 0;
    for c in &comps {
        components.push((k..k + c.len()).collect());
        k += c.len();
    }
    let mut edges: Vec<[usize; 2]> = Vec::new();
    let mut edge_index: HashMap<String, usize> = HashMap::new();
    for (l, name, [u, v]) in &seam {
        if edge_index.insert(name.clone(), edges.len()).is_some() {
            return Err(l.err(format!("seam edge `{name}` declared twice")));
        }
        edges.push([vertex(l, u)?, vertex(l, v)?]);
    }
    let explicit = !seam.is_empty();
    // without `seam` lines, a seam edge is a directed step u -> v along some disk
    let mut steps: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut out = Vec::new();
    for (l, color, vs, es) in disks {
        let vs: Vec<usize> = vs.iter().map(|n| vertex(&l, n)).collect::<Result<_>>()?;
        let es: Vec<usize> = match es {
            Some(es) => {
                if !explicit {
                    return Err(l.err("edge names need `seam` lines"));
                }
                es.iter()
                    .map(|n| {
                        edge_index
                            .get(n)
                            .copied()
                            .ok_or_else(|| l.err(format!("unknown seam edge `{n}`")))
                    })
                    .collect::<Result<_>>()?
            }
            None if explicit => return Err(l.err("give the disk's seam edges after `/`")),
            None => (0..vs.len())
                .map(|i| {
                    let step = (vs[i], vs[(i + 1) % vs.len()]);
                    *steps.entry(step).or_insert_with(|| {
                        edges.push([step.0, step.1]);
                        edges.len() - 1
                    })
                })
                .collect(),
        };
        out.push(Disk {
            color,
            vertices: vs,
            edges: es,
        });
    }
    FilmSurface::new(names, components, edges, out).map_err(|e| prefix(e, &b.name))
}

fn parse_patch(l: &Line, disk_count: usize) -> Result<Patch> {
    let spaced = l.text.replace('(', " ( ").replace(')', " ) ");
    let toks: Vec<&str> = spaced.split_whitespace().collect();
    if toks.len() < 2 {
        return Err(l.err("expected `patch <color> ...`"));
    }
    let mut p = Patch::closed(Color::new(toks[1]));
    let mut section = "";
    let mut group: Option<Vec<Mark>> = None;
    let mut i = 2;
    while i < toks.len() {
        let t = toks[i];
        match t {
            "orientable" => p.orientable = true,
            "nonorientable" => p.orientable = false,
            "genus" | "crosscaps" => {
                let v = toks.get(i + 1).ok_or_else(|| l.err(format!("`{t}` needs a count")))?;
                let n = u32::try_from(l.usize(v)?).map_err(|_| l.err("count too large"))?;
                if t == "genus" {
                    p.genus = n;
                } else {
                    p.crosscaps = n;
                }
                i += 1;
            }
            "glued:" | "free:" | "points:" => section = t,
            "(" => {
                if group.is_some() {
                    return Err(l.err("nested `(`"));
                }
                group = Some(Vec::new());
            }
            ")" => {
                let g = group.take().ok_or_else(|| l.err("unbalanced `)`"))?;
                if section == "free:" {
                    p.free.push(g);
                } else {
                    p.points.extend(g);
                }
            }
            _ => {
                let (name, sign) = sign_of(l, t)?;
                match section {
                    "glued:" => {
                        let disk = l.usize(name)?;
                        if disk >= disk_count {
                            return Err(l.err(format!("disk {disk} does not exist")));
                        }
                        p.glued.push(GluedCircle { disk, sign });
                    }
                    "free:" | "points:" => {
                        let m = Mark::new(name, sign);
                        match group.as_mut() {
                            Some(g) => g.push(m),
                            None if section == "points:" => p.points.push(m),
                            None => return Err(l.err("free circles are written `( v1+ v2- )`")),
                        }
                    }
                    _ => return Err(l.err(format!("unexpected `{t}`"))),
                }
            }
        }
        i += 1;
    }
    if group.is_some() {
        return Err(l.err("unbalanced `(`"));
    }
    Ok(p)
}

fn film_lines(f: &FilmSurface) -> String {
    let mut out = String::new();
    for c in f.components() {
        let ns: Vec<&str> = c.iter().map(|&v| f.name(v)).collect();
        out.push_str(&format!("vertices: {}\n", ns.join(" ")));
    }
    for (i, [u, v]) in f.seam_edges().iter().enumerate() {
        out.push_str(&format!("seam e{} : {} {}\n", i + 1, f.name(*u), f.name(*v)));
    }
    for d in f.disks() {
        let vs: Vec<&str> = d.vertices.iter().map(|&v| f.name(v)).collect();
        let es: Vec<String> = d.edges.iter().map(|e| format!("e{}", e + 1)).collect();
        out.push_str(&format!("disk {} : {} / {}\n", d.color, vs.join(" "), es.join(" ")));
    }
    out
}

pub fn write_film(name: &str, f: &FilmSurface) -> String {
    format!("film {name}\n{}", film_lines(f))
}

fn marks(ms: &[Mark]) -> String {
    let v: Vec<String> = ms.iter().map(|m| format!("{}{}", m.name, m.sign.symbol())).collect();
    format!("({})", v.join(" "))
}

pub fn write_foam(name: &str, f: &CyclicFoam) -> String {
    let mut out = format!("foam {name}\n{}", film_lines(&f.film));
    for p in &f.patches {
        out.push_str(&format!(
            "patch {} {} genus {} crosscaps {}",
            p.color,
            if p.orientable { "orientable" } else { "nonorientable" },
            p.genus,
            p.crosscaps
        ));
        if !p.glued.is_empty() {
            let g: Vec<String> = p.glued.iter().map(|g| format!("{}{}", g.disk, g.sign.symbol())).collect();
            out.push_str(&format!(" glued: {}", g.join(" ")));
        }
        if !p.free.is_empty() {
            let fs: Vec<String> = p.free.iter().map(|c| marks(c)).collect();
            out.push_str(&format!(" free: {}", fs.join(" ")));
        }
        if !p.points.is_empty() {
            out.push_str(&format!(" points: {}", marks(&p.points)));
        }
        out.push('\n');
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LabelKind {
    /// An interior marked point, labeled in `A^s`.
    Point,
    /// A film vertex or a vertex on a free circle, labeled in `B_σ`.
    Vertex,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LabelValue {
    /// `#k`: the k-th basis vector.
    Basis(usize),
    Vector(Vec<Q>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelEntry {
    pub line: usize,
    pub kind: LabelKind,
    pub name: String,
    pub value: LabelValue,
}

/// `label point <id> = <p/q ...>` and `label vertex <id> = <p/q ...>`;
/// `#k` in place of coordinates names the k-th basis vector.
pub fn parse_labels(text: &str) -> Result<Vec<LabelEntry>> {
    let mut out: Vec<LabelEntry> = Vec::new();
    for l in lines(text) {
        let (lhs, rhs) = l
            .text
            .split_once('=')
            .ok_or_else(|| l.err("expected `label point|vertex <id> = <value>`"))?;
        let t: Vec<&str> = lhs.split_whitespace().collect();
        if t.len() != 3 || t[0] != "label" {
            return Err(l.err("expected `label point|vertex <id> = <value>`"));
        }
        let kind = match t[1] {
            "point" => LabelKind::Point,
            "vertex" => LabelKind::Vertex,
            other => return Err(l.err(format!("unknown label kind `{other}`"))),
        };
        let rhs = rhs.trim();
        let value = match rhs.strip_prefix('#') {
            Some(k) => LabelValue::Basis(l.usize(k)?),
            None => LabelValue::Vector(l.qs(rhs)?),
        };
        if out.iter().any(|e| e.name == t[2]) {
            return Err(l.err(format!("`{}` labeled twice", t[2])));
        }
        out.push(LabelEntry {
            line: l.no,
            kind,
            name: t[2].to_string(),
            value,
        });
    }
    Ok(out)
}

/// Turns label entries into coordinates for `foam`, checking kinds and
/// dimensions against the bundle. Every label must be used.
pub fn resolve_labels(bundle: &GraphCardyBundle, foam: &CyclicFoam, entries: &[LabelEntry]) -> Result<LabeledFoam> {
    let mut slots: BTreeMap<String, (LabelKind, usize)> = BTreeMap::new();
    for v in 0..foam.film.vertex_count() {
        let (class, _, _) = foam.film.vertex_graph_at(v)?;
        slots.insert(foam.film.name(v).to_string(), (LabelKind::Vertex, bundle.graph.dim(&class)?));
    }
    for p in &foam.patches {
        for m in &p.points {
            slots.insert(m.name.clone(), (LabelKind::Point, bundle.closed_algebra(&p.color)?.dim()));
        }
        for m in p.free.iter().flatten() {
            let n = bundle.graph.dim(&GraphClass::segment(p.color.clone()))?;
            slots.insert(m.name.clone(), (LabelKind::Vertex, n));
        }
    }
    let mut labels = BTreeMap::new();
    for e in entries {
        let Some(&(kind, n)) = slots.get(&e.name) else {
            return Err(Error::UnknownVertex(e.name.clone()));
        };
        if kind != e.kind {
            return Err(Error::parse(e.line, format!("`{}` is not a {:?} label", e.name, e.kind).to_lowercase()));
        }
        let x = match &e.value {
            LabelValue::Basis(k) if *k < n => basis_vector(n, *k),
            LabelValue::Vector(v) if v.len() == n => v.clone(),
            _ => {
                return Err(Error::parse(
                    e.line,
                    format!("label for `{}` must lie in a space of dimension {n}", e.name),
                ))
            }
        };
        labels.insert(e.name.clone(), x);
    }
    if let Some(name) = slots.keys().find(|k| !labels.contains_key(*k)) {
        return Err(Error::UnlabeledPoint(name.clone()));
    }
    Ok(LabeledFoam::new(foam.clone(), labels))
}

/// Basis indices of the film vertices, by vertex id, for the counting oracle.
pub fn oracle_boundary(film: &FilmSurface, entries: &[LabelEntry]) -> Result<Vec<usize>> {
    let mut out = vec![None; film.vertex_count()];
    for e in entries {
        let v = film
            .vertex_index(&e.name)
            .ok_or_else(|| Error::UnknownVertex(e.name.clone()))?;
        match e.value {
            LabelValue::Basis(k) if e.kind == LabelKind::Vertex => out[v] = Some(k),
            _ => return Err(Error::parse(e.line, "oracle labels must be `label vertex <id> = #k`")),
        }
    }
    out.into_iter()
        .enumerate()
        .map(|(v, k)| k.ok_or_else(|| Error::UnlabeledPoint(film.name(v).to_string())))
        .collect()
}

/// A labels file for `lf`, one `label` line per name, coordinates written out.
pub fn write_labels(lf: &LabeledFoam) -> String {
    let points: Vec<&String> = lf.foam.patches.iter().flat_map(|p| p.points.iter().map(|m| &m.name)).collect();
    let mut out = String::new();
    for (name, x) in &lf.labels {
        let kind = if points.contains(&name) { "point" } else { "vertex" };
        out.push_str(&format!("label {kind} {name} = {}\n", join_q(x)));
    }
    out
}
