//! The theory format: closed algebras, graded spaces, forms, `φ` maps,
//! open involutions and crosscap elements.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::frobenius::{least_rotation, EquippedFrobenius, Form3, GraphCardyBundle, GraphFrobeniusData};
use crate::graphs::{involute, Color, GraphClass, Palette};
use crate::linalg::Matrix;
use crate::rational::{format_q, Q};

use super::{class_names, join_q, join_rows, lines, take_graphs, token, write_graph, Line};

enum Current {
    None,
    Algebra(Color),
    Space(GraphClass),
}

struct AlgebraDraft<'a> {
    at: Line<'a>,
    labels: Option<Vec<String>>,
    unit: Option<Vec<Q>>,
    functional: Vec<(usize, Q)>,
    mul: Vec<([usize; 3], Q)>,
    involution: Vec<(usize, usize, Q)>,
}

fn labels_of(l: &Line, n: usize) -> Result<Vec<String>> {
    let v: Vec<String> = l.after_colon("basis")?.split_whitespace().map(String::from).collect();
    if v.len() != n {
        return Err(l.err(format!("expected {n} basis labels, found {}", v.len())));
    }
    Ok(v)
}

pub fn parse_theory(text: &str) -> Result<GraphCardyBundle> {
    let all = lines(text);
    let (graphs, rest) = take_graphs(&all)?;
    let mut palette: Option<(Line, Vec<String>)> = None;
    let mut algebras: BTreeMap<Color, AlgebraDraft> = BTreeMap::new();
    let mut spaces: BTreeMap<GraphClass, (Line, Vec<String>)> = BTreeMap::new();
    let mut later = Vec::new();
    let mut cur = Current::None;

    for l in &rest {
        let h = l.head();
        match l.keyword() {
            "palette:" | "palette" => {
                palette = Some((*l, l.after_colon("palette")?.split_whitespace().map(String::from).collect()));
            }
            "algebra" => {
                if h.len() != 3 || h[1] != "A" {
                    return Err(l.err("expected `algebra A <color>`"));
                }
                let s = Color::new(h[2]);
                let draft = AlgebraDraft {
                    at: *l,
                    labels: None,
                    unit: None,
                    functional: Vec::new(),
                    mul: Vec::new(),
                    involution: Vec::new(),
                };
                if algebras.insert(s.clone(), draft).is_some() {
                    return Err(l.err(format!("algebra for {s} given twice")));
                }
                cur = Current::Algebra(s);
            }
            "space" => {
                if h.len() != 5 || h[1] != "B" || h[3] != "dim" {
                    return Err(l.err("expected `space B <graph> dim <n>`"));
                }
                let c = graphs.get(l, h[2])?;
                let n = l.usize(h[4])?;
                let labels = (0..n).map(|i| format!("e{i}")).collect();
                if spaces.insert(c.clone(), (*l, labels)).is_some() {
                    return Err(l.err(format!("space for {} given twice", h[2])));
                }
                cur = Current::Space(c);
            }
            "basis:" | "basis" => match &cur {
                Current::Space(c) => {
                    let n = spaces[c].1.len();
                    spaces.get_mut(c).unwrap().1 = labels_of(l, n)?;
                }
                Current::Algebra(s) => {
                    let a = algebras.get_mut(s).unwrap();
                    a.labels = Some(l.after_colon("basis")?.split_whitespace().map(String::from).collect());
                }
                Current::None => return Err(l.err("`basis:` outside an algebra or space")),
            },
            "unit:" | "unit" | "functional:" | "functional" | "mul" | "involution:" | "involution" => {
                let Current::Algebra(s) = &cur else {
                    return Err(l.err(format!("`{}` outside an algebra block", l.keyword())));
                };
                let a = algebras.get_mut(s).unwrap();
                let n = a
                    .labels
                    .as_ref()
                    .map(Vec::len)
                    .ok_or_else(|| l.err("`basis:` must come first in an algebra block"))?;
                let kw = l.keyword().trim_end_matches(':');
                match kw {
                    "unit" => {
                        let v = l.qs(l.after_colon("unit")?)?;
                        if v.len() != n {
                            return Err(l.err(format!("unit needs {n} coordinates")));
                        }
                        a.unit = Some(v);
                    }
                    "functional" => {
                        let t: Vec<&str> = l.after_colon("functional")?.split_whitespace().collect();
                        if t.len() != 2 {
                            return Err(l.err("expected `functional: <i> <p/q>`"));
                        }
                        let i = l.usize(t[0])?;
                        if i >= n {
                            return Err(l.err(format!("index {i} out of range")));
                        }
                        a.functional.push((i, l.q(t[1])?));
                    }
                    "mul" => {
                        let t: Vec<&str> = l.text.split_whitespace().collect();
                        if t.len() != 6 || t[3] != "->" {
                            return Err(l.err("expected `mul <i> <j> -> <k> <p/q>`"));
                        }
                        let idx = [l.usize(t[1])?, l.usize(t[2])?, l.usize(t[4])?];
                        if idx.iter().any(|&x| x >= n) {
                            return Err(l.err("index out of range"));
                        }
                        a.mul.push((idx, l.q(t[5])?));
                    }
                    _ => {
                        let t: Vec<&str> = l.after_colon("involution")?.split_whitespace().collect();
                        if !(t.len() == 3 || t.len() == 4) || t[1] != "->" {
                            return Err(l.err("expected `involution: <i> -> <j> [p/q]`"));
                        }
                        let (i, j) = (l.usize(t[0])?, l.usize(t[2])?);
                        if i >= n || j >= n {
                            return Err(l.err("index out of range"));
                        }
                        let c = if t.len() == 4 { l.q(t[3])? } else { Q::one() };
                        a.involution.push((i, j, c));
                    }
                }
            }
            "form2" | "form3" | "phi" | "open-involution" | "crosscap" => later.push(*l),
            other => return Err(l.err(format!("unknown keyword `{other}`"))),
        }
    }

    let mut closed = BTreeMap::new();
    for (s, d) in algebras {
        let labels = d.labels.ok_or_else(|| d.at.err(format!("algebra {s} has no `basis:`")))?;
        let n = labels.len();
        let unit = d.unit.ok_or_else(|| d.at.err(format!("algebra {s} has no `unit:`")))?;
        let mut functional = vec![Q::zero(); n];
        for (i, c) in d.functional {
            functional[i] += c;
        }
        let mut mult = vec![Q::zero(); n * n * n];
        for ([i, j, k], c) in d.mul {
            mult[(i * n + j) * n + k] += c;
        }
        if d.involution.is_empty() {
            return Err(d.at.err(format!("algebra {s} has no `involution:` lines")));
        }
        let mut inv = Matrix::zeros(n, n);
        for (i, j, c) in d.involution {
            inv[(j, i)] += c;
        }
        let a = EquippedFrobenius::new(labels, mult, unit, functional, inv).map_err(|e| d.at.err(e.to_string()))?;
        closed.insert(s, a);
    }

    let dims: BTreeMap<GraphClass, usize> = spaces.iter().map(|(c, (_, v))| (c.clone(), v.len())).collect();
    let dim = |l: &Line, c: &GraphClass| -> Result<usize> {
        dims.get(c)
            .copied()
            .ok_or_else(|| l.err(format!("no `space` declared for {c}")))
    };
    let mut form2 = BTreeMap::new();
    let mut form3 = BTreeMap::new();
    let mut phi = BTreeMap::new();
    let mut open_involution = BTreeMap::new();
    let mut crosscap = BTreeMap::new();
    for l in &later {
        let h = l.head();
        let body = l.after_colon(l.keyword())?;
        match l.keyword() {
            "form2" => {
                if h.len() != 3 {
                    return Err(l.err("expected `form2 <g> <g*> : rows`"));
                }
                let (c, cs) = (graphs.get(l, h[1])?, graphs.get(l, h[2])?);
                if cs != involute(&c) {
                    return Err(l.err(format!("{} is not the involute of {}", h[2], h[1])));
                }
                let m = l.matrix(body, dim(l, &c)?, dim(l, &cs)?)?;
                if form2.insert(c, Matrix::from_rows(m)).is_some() {
                    return Err(l.err(format!("form2 for {} given twice", h[1])));
                }
            }
            "form3" => {
                if h.len() != 4 {
                    return Err(l.err("expected `form3 <g1> <g2> <g3> : entries`"));
                }
                let seq: Vec<GraphClass> = h[1..].iter().map(|n| graphs.get(l, n)).collect::<Result<_>>()?;
                let ds = [dim(l, &seq[0])?, dim(l, &seq[1])?, dim(l, &seq[2])?];
                let v = l.qs(body)?;
                if v.len() != ds[0] * ds[1] * ds[2] {
                    return Err(l.err(format!("expected {} entries", ds[0] * ds[1] * ds[2])));
                }
                let mut f = Form3::zero(ds);
                for (k, x) in v.into_iter().enumerate() {
                    f.set([k / (ds[1] * ds[2]), (k / ds[2]) % ds[1], k % ds[2]], x);
                }
                let (key, r) = least_rotation(&seq);
                if form3.insert(key, f.rotate(r)).is_some() {
                    return Err(l.err("form3 for this cyclic triple given twice"));
                }
            }
            "phi" => {
                if h.len() != 3 {
                    return Err(l.err("expected `phi <color> <graph> : matrices`"));
                }
                let s = Color::new(h[1]);
                let c = graphs.get(l, h[2])?;
                let a = closed
                    .get(&s)
                    .ok_or_else(|| l.err(format!("no algebra for color {s}")))?;
                let n = dim(l, &c)?;
                let ms: Vec<Matrix> = body
                    .split('|')
                    .map(|m| l.matrix(m, n, n).map(Matrix::from_rows))
                    .collect::<Result<_>>()?;
                if ms.len() != a.dim() {
                    return Err(l.err(format!("expected {} matrices, one per basis element of A^{s}", a.dim())));
                }
                if phi.insert((s, c), ms).is_some() {
                    return Err(l.err("phi given twice"));
                }
            }
            "open-involution" => {
                if h.len() != 2 {
                    return Err(l.err("expected `open-involution <color> : rows`"));
                }
                let s = Color::new(h[1]);
                let n = dim(l, &GraphClass::segment(s.clone()))?;
                open_involution.insert(s, Matrix::from_rows(l.matrix(body, n, n)?));
            }
            _ => {
                if h.len() != 2 {
                    return Err(l.err("expected `crosscap <color> : vector`"));
                }
                let s = Color::new(h[1]);
                let a = closed
                    .get(&s)
                    .ok_or_else(|| l.err(format!("no algebra for color {s}")))?;
                let v = l.qs(body)?;
                if v.len() != a.dim() {
                    return Err(l.err(format!("crosscap needs {} coordinates", a.dim())));
                }
                crosscap.insert(s, v);
            }
        }
    }
    for (c, (at, _)) in &spaces {
        if !form2.contains_key(c) {
            return Err(at.err(format!("missing `form2` for {c}")));
        }
    }

    let palette = match palette {
        Some((l, cs)) => Palette::new(cs).map_err(|e| l.err(e.to_string()))?,
        None => {
            let mut cs: Vec<Color> = closed.keys().cloned().collect();
            cs.extend(spaces.keys().flat_map(|c| c.colors()));
            cs.sort();
            cs.dedup();
            Palette::new(cs.into_iter().map(|c| c.0)).map_err(|e| Error::parse(1, e.to_string()))?
        }
    };
    Ok(GraphCardyBundle {
        graph: GraphFrobeniusData {
            palette,
            spaces: spaces.into_iter().map(|(c, (_, v))| (c, v)).collect(),
            form2,
            form3,
        },
        closed,
        open_involution,
        phi,
        crosscap,
    })
}

fn rows(m: &Matrix) -> String {
    join_rows((0..m.rows()).map(|i| m.row(i).to_vec()))
}

/// Canonical serialization; `parse_theory` reads it back exactly.
pub fn write_theory(b: &GraphCardyBundle) -> String {
    let g = &b.graph;
    let names = class_names(g.spaces.keys());
    let mut out = String::new();
    let colors: Vec<&str> = g.palette.colors().iter().map(|c| c.as_str()).collect();
    out.push_str(&format!("palette: {}\n", colors.join(" ")));
    for (c, n) in &names {
        if !c.is_segment() {
            out.push('\n');
            out.push_str(&write_graph(n, c));
        }
    }
    for (c, labels) in &g.spaces {
        let ls: Vec<String> = labels.iter().map(|s| token(s)).collect();
        out.push_str(&format!("\nspace B {} dim {}\nbasis: {}\n", names[c], labels.len(), ls.join(" ")));
    }
    out.push('\n');
    for (c, m) in &g.form2 {
        let star = involute(c);
        let sn = names.get(&star).cloned().unwrap_or_else(|| format!("{}*", names[c]));
        out.push_str(&format!("form2 {} {} : {}\n", names[c], sn, rows(m)));
    }
    for (key, f) in &g.form3 {
        let [d0, d1, d2] = f.dims;
        let mut v = Vec::with_capacity(d0 * d1 * d2);
        for i in 0..d0 {
            for j in 0..d1 {
                for k in 0..d2 {
                    v.push(f.get([i, j, k]));
                }
            }
        }
        let ns: Vec<&str> = key.iter().map(|c| names[c].as_str()).collect();
        out.push_str(&format!("form3 {} : {}\n", ns.join(" "), join_q(&v)));
    }
    for (s, a) in &b.closed {
        let n = a.dim();
        let ls: Vec<String> = a.labels.iter().map(|l| token(l)).collect();
        out.push_str(&format!("\nalgebra A {s}\nbasis: {}\nunit: {}\n", ls.join(" "), join_q(&a.unit)));
        for (i, c) in a.functional.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            out.push_str(&format!("functional: {i} {}\n", format_q(c)));
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let c = a.structure_constant(i, j, k);
                    if !c.is_zero() {
                        out.push_str(&format!("mul {i} {j} -> {k} {}\n", format_q(c)));
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                let c = &a.involution[(j, i)];
                if c.is_one() {
                    out.push_str(&format!("involution: {i} -> {j}\n"));
                } else if !c.is_zero() {
                    out.push_str(&format!("involution: {i} -> {j} {}\n", format_q(c)));
                }
            }
        }
    }
    out.push('\n');
    for (s, m) in &b.open_involution {
        out.push_str(&format!("open-involution {s} : {}\n", rows(m)));
    }
    for ((s, c), ms) in &b.phi {
        let ms: Vec<String> = ms.iter().map(rows).collect();
        out.push_str(&format!("phi {s} {} : {}\n", names[c], ms.join(" | ")));
    }
    for (s, u) in &b.crosscap {
        out.push_str(&format!("crosscap {s} : {}\n", join_q(u)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::named::theta;
    use crate::groupcover::{build_bundle, build_bundle_unverified, regular_cover, FiniteGroup};

    fn working() -> Vec<GraphClass> {
        let t = theta("a", "b", "c");
        let mut w: Vec<GraphClass> = ["a", "b", "c"].iter().map(|s| GraphClass::segment(Color::new(*s))).collect();
        w.push(involute(&t));
        w.push(t);
        w
    }

    #[test]
    fn built_theories_round_trip() {
        for g in [FiniteGroup::trivial(), FiniteGroup::cyclic(2)] {
            let cover = regular_cover(&["a", "b", "c"], g).unwrap();
            let b = build_bundle(&cover, &working()).unwrap();
            let text = write_theory(&b);
            let back = parse_theory(&text).unwrap();
            assert_eq!(back, b);
            assert_eq!(write_theory(&back), text);
        }
    }

    #[test]
    fn unverified_theory_round_trips() {
        let cover = regular_cover(&["a", "b", "c"], FiniteGroup::cyclic(3)).unwrap();
        let b = build_bundle_unverified(&cover, &working()).unwrap();
        assert_eq!(parse_theory(&write_theory(&b)).unwrap(), b);
    }

    fn error_line(text: &str) -> usize {
        match parse_theory(text) {
            Err(Error::Parse { line, .. }) => line,
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn missing_form2_names_the_space_line() {
        let cover = regular_cover(&["a", "b", "c"], FiniteGroup::trivial()).unwrap();
        let text = write_theory(&build_bundle(&cover, &working()).unwrap());
        let cut: Vec<&str> = text.lines().filter(|l| !l.starts_with("form2 I_b")).collect();
        let at = cut.iter().position(|l| l.starts_with("space B I_b")).unwrap() + 1;
        assert_eq!(error_line(&cut.join("\n")), at);
    }

    #[test]
    fn malformed_lines_are_located() {
        assert_eq!(error_line("palette: a\n\nalgebra A a\nbasis: x\nunit: 1/0\n"), 5);
        assert_eq!(error_line("algebra A a\nbasis: x\nunit: 1\nmul 0 0 -> 1 1\n"), 4);
        assert_eq!(error_line("space B I_a dim 1\nform2 I_a I_a : 1 2\n"), 2);
        assert_eq!(error_line("bogus line\n"), 1);
    }

    #[test]
    fn rotated_form3_is_canonicalized() {
        let cover = regular_cover(&["a", "b", "c"], FiniteGroup::cyclic(2)).unwrap();
        let b = build_bundle(&cover, &working()).unwrap();
        let (key, f) = b.graph.form3.iter().next().unwrap();
        let names = class_names(b.graph.spaces.keys());
        let g = f.rotate(1);
        let [d0, d1, d2] = g.dims;
        let mut v = Vec::new();
        for i in 0..d0 {
            for j in 0..d1 {
                for k in 0..d2 {
                    v.push(g.get([i, j, k]));
                }
            }
        }
        let line = format!(
            "form3 {} {} {} : {}",
            names[&key[1]],
            names[&key[2]],
            names[&key[0]],
            join_q(&v)
        );
        let text: String = write_theory(&b)
            .lines()
            .map(|l| if l.starts_with("form3") && l.contains(&format!("form3 {} {} {}", names[&key[0]], names[&key[1]], names[&key[2]])) { line.clone() } else { l.to_string() })
            .collect::<Vec<_>>()
            .join("\n");
        assert_eq!(parse_theory(&text).unwrap(), b);
    }
}
