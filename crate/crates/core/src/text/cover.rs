//! Group, action and cover files for the finite-group construction.

use std::collections::BTreeMap;

use crate::error::Result;
use crate::graphs::{Color, GraphClass, Palette};
use crate::groupcover::{AutConvention, FiniteGroup, GroupAction, GroupCover};

use super::{lines, take_graphs, Line};

/// A cover together with the working set it should be built on.
#[derive(Clone, Debug)]
pub struct CoverSpec {
    pub cover: GroupCover,
    pub working: Vec<GraphClass>,
}

enum Pending<'a> {
    None,
    Group(Line<'a>, String, usize, Vec<Vec<usize>>),
    Action(Line<'a>, String, String, usize, Vec<Vec<usize>>),
}

fn builtin(l: &Line, name: &str, spec: &[&str]) -> Result<FiniteGroup> {
    let mut g = match spec {
        ["trivial"] => FiniteGroup::trivial(),
        ["cyclic", n] => {
            let n = l.usize(n)?;
            if n == 0 {
                return Err(l.err("cyclic group of order 0"));
            }
            FiniteGroup::cyclic(n)
        }
        ["symmetric3"] => FiniteGroup::symmetric3(),
        ["klein4"] => FiniteGroup::klein4(),
        _ => return Err(l.err("builtin groups: trivial, cyclic <n>, symmetric3, klein4")),
    };
    g.name = name.to_string();
    Ok(g)
}

/// Parses `group`, `action`, `color`, `palette:`, `convention:`, `working:`
/// and `graph` blocks. Without `color` lines every palette color gets the
/// regular action of the only group.
pub fn parse_cover(text: &str) -> Result<CoverSpec> {
    let all = lines(text);
    let (graphs, rest) = take_graphs(&all)?;
    let mut groups: BTreeMap<String, FiniteGroup> = BTreeMap::new();
    let mut actions: BTreeMap<String, GroupAction> = BTreeMap::new();
    let mut colors: Vec<(Line, String, Vec<String>)> = Vec::new();
    let mut palette: Option<(Line, Vec<String>)> = None;
    let mut convention = AutConvention::PerObject;
    let mut working: Vec<GraphClass> = Vec::new();
    let mut pending = Pending::None;

    let close = |p: Pending, groups: &mut BTreeMap<String, FiniteGroup>, actions: &mut BTreeMap<String, GroupAction>| -> Result<()> {
        match p {
            Pending::None => {}
            Pending::Group(l, name, n, rows) => {
                if rows.len() != n {
                    return Err(l.err(format!("group {name} needs {n} table rows, found {}", rows.len())));
                }
                let g = FiniteGroup::from_table(name.clone(), rows).map_err(|e| l.err(e.to_string()))?;
                groups.insert(name, g);
            }
            Pending::Action(l, name, group, points, rows) => {
                let g = groups[&group].clone();
                if rows.len() != g.order() {
                    return Err(l.err(format!("action needs {} rows, found {}", g.order(), rows.len())));
                }
                let a = GroupAction::new(g, points, rows).map_err(|e| l.err(e.to_string()))?;
                actions.insert(name, a);
            }
        }
        Ok(())
    };

    for l in &rest {
        if l.keyword().chars().all(|c| c.is_ascii_digit()) {
            let row: Vec<usize> = l.text.split_whitespace().map(|t| l.usize(t)).collect::<Result<_>>()?;
            match &mut pending {
                Pending::Group(_, _, _, rows) | Pending::Action(_, _, _, _, rows) => rows.push(row),
                Pending::None => return Err(l.err("table row outside a `group` or `action` block")),
            }
            continue;
        }
        close(std::mem::replace(&mut pending, Pending::None), &mut groups, &mut actions)?;
        let t: Vec<&str> = l.text.split_whitespace().collect();
        match t[0] {
            "group" => {
                if t.len() < 3 {
                    return Err(l.err("expected `group <name> order <n>` or `group <name> builtin <kind>`"));
                }
                if groups.contains_key(t[1]) {
                    return Err(l.err(format!("group {} defined twice", t[1])));
                }
                match t[2] {
                    "order" if t.len() == 4 => pending = Pending::Group(*l, t[1].to_string(), l.usize(t[3])?, Vec::new()),
                    "builtin" => {
                        groups.insert(t[1].to_string(), builtin(l, t[1], &t[3..])?);
                    }
                    _ => return Err(l.err("expected `group <name> order <n>` or `group <name> builtin <kind>`")),
                }
            }
            "action" => {
                // action <group> on <n> [as <name>]
                let ok = (t.len() == 4 || (t.len() == 6 && t[4] == "as")) && t[2] == "on";
                if !ok {
                    return Err(l.err("expected `action <group> on <n> [as <name>]`"));
                }
                if !groups.contains_key(t[1]) {
                    return Err(l.err(format!("unknown group `{}`", t[1])));
                }
                let name = if t.len() == 6 { t[5] } else { t[1] };
                if actions.contains_key(name) {
                    return Err(l.err(format!("action {name} defined twice")));
                }
                pending = Pending::Action(*l, name.to_string(), t[1].to_string(), l.usize(t[3])?, Vec::new());
            }
            "color" => {
                let h = l.head();
                let rhs: Vec<String> = l.after_colon("color")?.split_whitespace().map(String::from).collect();
                if h.len() != 2 || rhs.is_empty() {
                    return Err(l.err("expected `color <c> : <action>` or `color <c> : regular <group>`"));
                }
                colors.push((*l, h[1].to_string(), rhs));
            }
            "palette:" | "palette" => {
                palette = Some((*l, l.after_colon("palette")?.split_whitespace().map(String::from).collect()));
            }
            "convention:" | "convention" => {
                convention = match l.after_colon("convention")? {
                    "per-object" => AutConvention::PerObject,
                    "full-palette" => AutConvention::FullPalette,
                    other => return Err(l.err(format!("unknown convention `{other}`"))),
                };
            }
            "working:" | "working" => {
                for n in l.after_colon("working")?.split_whitespace() {
                    working.push(graphs.get(l, n)?);
                }
            }
            other => return Err(l.err(format!("unknown keyword `{other}`"))),
        }
    }
    close(pending, &mut groups, &mut actions)?;

    let mut bound: BTreeMap<Color, GroupAction> = BTreeMap::new();
    for (l, c, rhs) in &colors {
        let a = match rhs.as_slice() {
            [kw, g] if kw == "regular" => GroupAction::regular(
                groups
                    .get(g)
                    .cloned()
                    .ok_or_else(|| l.err(format!("unknown group `{g}`")))?,
            ),
            [a] => actions
                .get(a)
                .cloned()
                .ok_or_else(|| l.err(format!("unknown action `{a}`")))?,
            _ => return Err(l.err("expected `color <c> : <action>` or `color <c> : regular <group>`")),
        };
        if bound.insert(Color::new(c.as_str()), a).is_some() {
            return Err(l.err(format!("color {c} bound twice")));
        }
    }
    let palette = match palette {
        Some((l, cs)) => Palette::new(cs).map_err(|e| l.err(e.to_string()))?,
        None => Palette::new(bound.keys().map(|c| c.0.clone())).map_err(|_| crate::Error::parse(1, "no `palette:` and no `color` lines"))?,
    };
    if palette.is_empty() {
        return Err(crate::Error::parse(1, "the palette is empty"));
    }
    if bound.is_empty() {
        let action = match (actions.len(), groups.len()) {
            (1, _) => actions.values().next().unwrap().clone(),
            (0, 1) => GroupAction::regular(groups.values().next().unwrap().clone()),
            _ => return Err(crate::Error::parse(1, "bind colors with `color` lines when several groups or actions are given")),
        };
        bound = palette.colors().iter().map(|c| (c.clone(), action.clone())).collect();
    }
    let cover = GroupCover::new(palette, bound)?.with_convention(convention);
    if working.is_empty() {
        working = cover.palette.colors().iter().map(|c| GraphClass::segment(c.clone())).collect();
    }
    working.sort();
    working.dedup();
    Ok(CoverSpec { cover, working })
}

pub fn write_group(g: &FiniteGroup) -> String {
    let mut out = format!("group {} order {}\n", g.name, g.order());
    for row in g.table() {
        let r: Vec<String> = row.iter().map(usize::to_string).collect();
        out.push_str(&r.join(" "));
        out.push('\n');
    }
    out
}

pub fn write_action(name: &str, a: &GroupAction) -> String {
    let mut out = format!("action {} on {} as {name}\n", a.group.name, a.points);
    for row in a.table() {
        let r: Vec<String> = row.iter().map(usize::to_string).collect();
        out.push_str(&r.join(" "));
        out.push('\n');
    }
    out
}
