//! Line-oriented text formats for graphs, theories, surfaces, labels and
//! group covers. Blank lines and `#` comments are ignored everywhere;
//! every parse error carries the 1-based line it was found on.

mod cover;
mod surface;
mod theory;

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graphs::{canonical_class, involute, Color, ColoredGraph, Edge, GraphClass};
use crate::rational::{format_q, parse_q, Q};

pub use cover::{parse_cover, write_action, write_group, CoverSpec};
pub use surface::{
    oracle_boundary, parse_labels, parse_surfaces, resolve_labels, write_film, write_foam, write_labels, LabelEntry, LabelKind,
    LabelValue, NamedFoam,
};
pub use theory::{parse_theory, write_theory};

/// A non-empty, non-comment line with its 1-based number.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Line<'a> {
    pub no: usize,
    pub text: &'a str,
}

impl<'a> Line<'a> {
    pub fn err(&self, message: impl Into<String>) -> Error {
        Error::parse(self.no, message)
    }

    pub fn keyword(&self) -> &'a str {
        self.text.split_whitespace().next().unwrap_or("")
    }

    /// The part after the first `:`, or an error naming `what`.
    pub fn after_colon(&self, what: &str) -> Result<&'a str> {
        self.text
            .split_once(':')
            .map(|(_, r)| r.trim())
            .ok_or_else(|| self.err(format!("expected `:` in {what}")))
    }

    /// Whitespace tokens before the first `:` (or of the whole line).
    pub fn head(&self) -> Vec<&'a str> {
        self.text.split(':').next().unwrap_or("").split_whitespace().collect()
    }

    pub fn q(&self, s: &str) -> Result<Q> {
        parse_q(s).map_err(|_| self.err(format!("not a rational: `{s}`")))
    }

    pub fn qs(&self, s: &str) -> Result<Vec<Q>> {
        s.split_whitespace().map(|t| self.q(t)).collect()
    }

    pub fn usize(&self, s: &str) -> Result<usize> {
        s.parse().map_err(|_| self.err(format!("not a non-negative integer: `{s}`")))
    }

    /// Rows separated by `;`, each of `cols` rationals.
    pub fn matrix(&self, s: &str, rows: usize, cols: usize) -> Result<Vec<Vec<Q>>> {
        if rows == 0 && s.trim().is_empty() {
            return Ok(Vec::new());
        }
        let out: Vec<Vec<Q>> = s.split(';').map(|r| self.qs(r)).collect::<Result<_>>()?;
        if out.len() != rows || out.iter().any(|r| r.len() != cols) {
            return Err(self.err(format!("expected a {rows} x {cols} matrix")));
        }
        Ok(out)
    }
}

pub(crate) fn lines(text: &str) -> Vec<Line<'_>> {
    text.lines()
        .enumerate()
        .map(|(i, l)| Line {
            no: i + 1,
            text: strip_comment(l).trim(),
        })
        .filter(|l| !l.text.is_empty())
        .collect()
}

/// A `#` starts a comment unless it is glued to a following token, as in `#3`.
fn strip_comment(l: &str) -> &str {
    let b = l.as_bytes();
    for (i, &c) in b.iter().enumerate() {
        if c == b'#' && (i == 0 || b.get(i + 1).is_none_or(|n| n.is_ascii_whitespace())) {
            return &l[..i];
        }
    }
    l
}

pub(crate) fn join_q(v: &[Q]) -> String {
    v.iter().map(format_q).collect::<Vec<_>>().join(" ")
}

pub(crate) fn join_rows(rows: impl Iterator<Item = Vec<Q>>) -> String {
    rows.map(|r| join_q(&r)).collect::<Vec<_>>().join(" ; ")
}

/// Named graph classes declared by `graph` blocks. Unknown names of the
/// form `I_<color>` resolve to segments and a trailing `*` takes the
/// involute.
#[derive(Clone, Debug, Default)]
pub struct GraphTable {
    pub named: BTreeMap<String, GraphClass>,
}

impl GraphTable {
    pub fn resolve(&self, name: &str) -> Option<GraphClass> {
        if let Some(base) = name.strip_suffix('*') {
            return self.resolve(base).map(|c| involute(&c));
        }
        if let Some(c) = self.named.get(name) {
            return Some(c.clone());
        }
        name.strip_prefix("I_")
            .filter(|s| !s.is_empty())
            .map(|s| GraphClass::segment(Color::new(s)))
    }

    pub(crate) fn get(&self, line: &Line, name: &str) -> Result<GraphClass> {
        self.resolve(name)
            .ok_or_else(|| line.err(format!("unknown graph `{name}`")))
    }
}

/// Consumes every `graph`, `nodes:` and `edge` line; returns the table and
/// the remaining lines.
pub(crate) fn take_graphs<'a>(all: &[Line<'a>]) -> Result<(GraphTable, Vec<Line<'a>>)> {
    let mut table = GraphTable::default();
    let mut rest = Vec::new();
    let mut cur: Option<(Line, String, Vec<String>, Vec<(Line, Vec<&str>)>)> = None;
    let finish = |table: &mut GraphTable, cur: Option<(Line, String, Vec<String>, Vec<(Line, Vec<&str>)>)>| -> Result<()> {
        let Some((at, name, nodes, edges)) = cur else { return Ok(()) };
        let index = |l: &Line, n: &str| {
            nodes
                .iter()
                .position(|x| x == n)
                .ok_or_else(|| l.err(format!("unknown node `{n}` in graph {name}")))
        };
        let mut es = Vec::new();
        for (l, toks) in &edges {
            es.push(Edge::new(toks[0], index(l, toks[1])?, index(l, toks[2])?));
        }
        let class = canonical_class(&ColoredGraph::new(nodes.len(), es)).map_err(|e| at.err(e.to_string()))?;
        if table.named.insert(name.clone(), class).is_some() {
            return Err(at.err(format!("graph `{name}` defined twice")));
        }
        Ok(())
    };
    for l in all {
        match l.keyword() {
            "graph" => {
                finish(&mut table, cur.take())?;
                let t: Vec<&str> = l.text.split_whitespace().collect();
                if t.len() != 2 {
                    return Err(l.err("expected `graph <name>`"));
                }
                cur = Some((*l, t[1].to_string(), Vec::new(), Vec::new()));
            }
            "nodes:" | "edge" => {
                let Some(c) = cur.as_mut() else {
                    return Err(l.err(format!("`{}` outside a graph block", l.keyword())));
                };
                if l.keyword() == "nodes:" {
                    c.2 = l.after_colon("nodes")?.split_whitespace().map(String::from).collect();
                } else {
                    let h = l.head();
                    let ends: Vec<&str> = l.after_colon("edge")?.split_whitespace().collect();
                    if h.len() != 2 || ends.len() != 2 {
                        return Err(l.err("expected `edge <color> : <tail> <head>`"));
                    }
                    c.3.push((*l, vec![h[1], ends[0], ends[1]]));
                }
            }
            _ => {
                finish(&mut table, cur.take())?;
                rest.push(*l);
            }
        }
    }
    finish(&mut table, cur)?;
    Ok((table, rest))
}

/// A `graph` block for `class`.
pub fn write_graph(name: &str, class: &GraphClass) -> String {
    let nodes: Vec<String> = (0..class.node_count()).map(|i| format!("v{i}")).collect();
    let mut out = format!("graph {name}\nnodes: {}\n", nodes.join(" "));
    for e in class.edges() {
        out.push_str(&format!("edge {} : v{} v{}\n", e.color, e.tail, e.head));
    }
    out
}

/// Canonical names: `I_<color>` for segments, `G1, G2, ..` for the rest in
/// class order.
pub(crate) fn class_names<'a>(classes: impl Iterator<Item = &'a GraphClass>) -> BTreeMap<GraphClass, String> {
    let mut out = BTreeMap::new();
    let mut k = 0;
    for c in classes {
        if out.contains_key(c) {
            continue;
        }
        let name = if c.is_segment() {
            format!("I_{}", c.edges()[0].color)
        } else {
            k += 1;
            format!("G{k}")
        };
        out.insert(c.clone(), name);
    }
    out
}

/// Replaces whitespace so a label stays one token.
pub(crate) fn token(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join("_")
}
