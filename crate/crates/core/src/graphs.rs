//! Colored oriented regular multigraphs and their isomorphism classes.
//!
//! Within a connected component every edge color occurs at most once, so a
//! breadth-first labeling that explores incident edges in color order is
//! determined entirely by its root. The canonical form is the least such
//! labeling over all roots.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Color(pub String);

impl Color {
    pub fn new(s: impl Into<String>) -> Self {
        Color(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// The finite color set S of a theory.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Palette {
    colors: Vec<Color>,
}

impl Palette {
    pub fn new<I, C>(colors: I) -> Result<Self>
    where
        I: IntoIterator<Item = C>,
        C: Into<String>,
    {
        let colors: Vec<Color> = colors.into_iter().map(|c| Color(c.into())).collect();
        let set: BTreeSet<&Color> = colors.iter().collect();
        if set.len() != colors.len() {
            return Err(Error::InvalidGraph("duplicate color in palette".into()));
        }
        let mut colors = colors;
        colors.sort();
        Ok(Palette { colors })
    }

    pub fn colors(&self) -> &[Color] {
        &self.colors
    }

    pub fn contains(&self, c: &Color) -> bool {
        self.colors.binary_search(c).is_ok()
    }

    pub fn index_of(&self, c: &Color) -> Option<usize> {
        self.colors.binary_search(c).ok()
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    /// The class `I_s` of a single oriented segment of color `s`.
    pub fn segment_class(&self, s: &Color) -> Result<GraphClass> {
        if !self.contains(s) {
            return Err(Error::UnknownColor(s.0.clone()));
        }
        Ok(GraphClass::segment(s.clone()))
    }

    pub fn admits(&self, class: &GraphClass) -> bool {
        class.edges().iter().all(|e| self.contains(&e.color))
    }
}

/// An oriented edge `tail -> head`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub color: Color,
    pub tail: usize,
    pub head: usize,
}

impl Edge {
    pub fn new(color: impl Into<String>, tail: usize, head: usize) -> Self {
        Edge {
            color: Color(color.into()),
            tail,
            head,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoredGraph {
    pub node_count: usize,
    pub edges: Vec<Edge>,
}

impl ColoredGraph {
    pub fn new(node_count: usize, edges: Vec<Edge>) -> Self {
        ColoredGraph { node_count, edges }
    }

    /// Rejects loops, dangling endpoints and repeated colors inside a component.
    pub fn validate(&self) -> Result<()> {
        for e in &self.edges {
            if e.tail >= self.node_count || e.head >= self.node_count {
                return Err(Error::InvalidGraph(format!(
                    "edge {} references a missing node",
                    e.color
                )));
            }
            if e.tail == e.head {
                return Err(Error::InvalidGraph(format!("loop edge of color {}", e.color)));
            }
        }
        for comp in self.components() {
            let mut seen = BTreeSet::new();
            for &ei in &comp.1 {
                if !seen.insert(&self.edges[ei].color) {
                    return Err(Error::InvalidGraph(format!(
                        "color {} repeats within a connected component",
                        self.edges[ei].color
                    )));
                }
            }
        }
        Ok(())
    }

    /// Connected components as (nodes, edge indices), nodes in ascending order.
    pub fn components(&self) -> Vec<(Vec<usize>, Vec<usize>)> {
        let mut parent: Vec<usize> = (0..self.node_count).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let next = p[y];
                p[y] = r;
                y = next;
            }
            r
        }
        for e in &self.edges {
            let (a, b) = (find(&mut parent, e.tail), find(&mut parent, e.head));
            if a != b {
                parent[a] = b;
            }
        }
        let mut roots: Vec<usize> = Vec::new();
        let mut comps: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
        for v in 0..self.node_count {
            let r = find(&mut parent, v);
            let idx = match roots.iter().position(|&x| x == r) {
                Some(i) => i,
                None => {
                    roots.push(r);
                    comps.push((Vec::new(), Vec::new()));
                    roots.len() - 1
                }
            };
            comps[idx].0.push(v);
        }
        for (ei, e) in self.edges.iter().enumerate() {
            let r = find(&mut parent, e.tail);
            let idx = roots.iter().position(|&x| x == r).unwrap();
            comps[idx].1.push(ei);
        }
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.node_count > 0 && self.components().len() == 1
    }

    pub fn reversed(&self) -> ColoredGraph {
        ColoredGraph {
            node_count: self.node_count,
            edges: self
                .edges
                .iter()
                .map(|e| Edge {
                    color: e.color.clone(),
                    tail: e.head,
                    head: e.tail,
                })
                .collect(),
        }
    }
}

/// An element of Σ: the canonical representative of an isomorphism class.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GraphClass {
    node_count: usize,
    edges: Vec<Edge>,
    connected: bool,
}

impl GraphClass {
    pub fn segment(color: Color) -> Self {
        GraphClass {
            node_count: 2,
            edges: vec![Edge {
                color,
                tail: 0,
                head: 1,
            }],
            connected: true,
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn is_connected(&self) -> bool {
        self.connected
    }

    pub fn colors(&self) -> Vec<Color> {
        let mut c: Vec<Color> = self.edges.iter().map(|e| e.color.clone()).collect();
        c.sort();
        c.dedup();
        c
    }

    pub fn has_color(&self, s: &Color) -> bool {
        self.edges.iter().any(|e| &e.color == s)
    }

    /// The unique edge of color `s` (classes used as vertex graphs are connected).
    pub fn edge_of_color(&self, s: &Color) -> Option<&Edge> {
        self.edges.iter().find(|e| &e.color == s)
    }

    pub fn is_segment(&self) -> bool {
        self.node_count == 2 && self.edges.len() == 1
    }

    pub fn representative(&self) -> ColoredGraph {
        ColoredGraph {
            node_count: self.node_count,
            edges: self.edges.clone(),
        }
    }

    /// Compact, stable textual key, e.g. `2[a:0>1 b:0>1]`.
    pub fn key(&self) -> String {
        let edges: Vec<String> = self
            .edges
            .iter()
            .map(|e| format!("{}:{}>{}", e.color, e.tail, e.head))
            .collect();
        format!("{}[{}]", self.node_count, edges.join(" "))
    }
}

impl fmt::Display for GraphClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

pub fn canonical_class(g: &ColoredGraph) -> Result<GraphClass> {
    canonical_with_map(g).map(|(c, _)| c)
}

/// Canonical class plus the map from `g`'s nodes to the representative's nodes.
pub fn canonical_with_map(g: &ColoredGraph) -> Result<(GraphClass, Vec<usize>)> {
    g.validate()?;
    let comps = g.components();
    let mut labeled: Vec<(usize, Vec<Edge>, Vec<(usize, usize)>)> = comps
        .iter()
        .map(|(nodes, edge_ids)| canonical_component(g, nodes, edge_ids))
        .collect();
    labeled.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));

    let mut map = vec![usize::MAX; g.node_count];
    let mut edges = Vec::new();
    let mut offset = 0;
    for (n, code, assignment) in &labeled {
        for &(orig, lab) in assignment {
            map[orig] = offset + lab;
        }
        edges.extend(code.iter().map(|e| Edge {
            color: e.color.clone(),
            tail: e.tail + offset,
            head: e.head + offset,
        }));
        offset += n;
    }
    let class = GraphClass {
        node_count: g.node_count,
        edges,
        connected: labeled.len() == 1,
    };
    Ok((class, map))
}

type Labeling = (usize, Vec<Edge>, Vec<(usize, usize)>);

fn canonical_component(g: &ColoredGraph, nodes: &[usize], edge_ids: &[usize]) -> Labeling {
    let mut best: Option<Labeling> = None;
    for &root in nodes {
        let mut label = vec![usize::MAX; g.node_count];
        let mut order = Vec::new();
        let mut queue = VecDeque::new();
        label[root] = 0;
        order.push(root);
        queue.push_back(root);
        while let Some(u) = queue.pop_front() {
            let mut incident: Vec<&Edge> = edge_ids
                .iter()
                .map(|&i| &g.edges[i])
                .filter(|e| e.tail == u || e.head == u)
                .collect();
            incident.sort_by(|a, b| a.color.cmp(&b.color));
            for e in incident {
                let other = if e.tail == u { e.head } else { e.tail };
                if label[other] == usize::MAX {
                    label[other] = order.len();
                    order.push(other);
                    queue.push_back(other);
                }
            }
        }
        let mut code: Vec<Edge> = edge_ids
            .iter()
            .map(|&i| {
                let e = &g.edges[i];
                Edge {
                    color: e.color.clone(),
                    tail: label[e.tail],
                    head: label[e.head],
                }
            })
            .collect();
        code.sort();
        let assignment: Vec<(usize, usize)> = order.iter().map(|&v| (v, label[v])).collect();
        let candidate = (order.len(), code, assignment);
        if best.as_ref().is_none_or(|b| candidate.1 < b.1) {
            best = Some(candidate);
        }
    }
    best.expect("component has at least one node")
}

/// σ ↦ σ*: reverse every edge and re-canonicalize.
pub fn involute(c: &GraphClass) -> GraphClass {
    involute_with_map(c).0
}

/// σ* together with the map from σ's representative nodes to σ*'s
/// representative nodes (edges keep their colors, tail and head swap).
pub fn involute_with_map(c: &GraphClass) -> (GraphClass, Vec<usize>) {
    canonical_with_map(&c.representative().reversed()).expect("reversal preserves validity")
}

/// Brute-force isomorphism test over all node bijections. Test oracle only;
/// exponential in the node count.
pub fn isomorphic_brute_force(a: &ColoredGraph, b: &ColoredGraph) -> bool {
    if a.node_count != b.node_count || a.edges.len() != b.edges.len() {
        return false;
    }
    let mut target: Vec<Edge> = b.edges.clone();
    target.sort();
    let mut perm: Vec<usize> = (0..a.node_count).collect();
    loop {
        let mut mapped: Vec<Edge> = a
            .edges
            .iter()
            .map(|e| Edge {
                color: e.color.clone(),
                tail: perm[e.tail],
                head: perm[e.head],
            })
            .collect();
        mapped.sort();
        if mapped == target {
            return true;
        }
        if !next_permutation(&mut perm) {
            return false;
        }
    }
}

pub(crate) fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Frequently used classes.
pub mod named {
    use super::*;

    /// Two nodes joined by one edge per color, orientations given per color.
    pub fn multi_edge(colors: &[(&str, bool)]) -> GraphClass {
        let edges = colors
            .iter()
            .map(|&(c, forward)| {
                if forward {
                    Edge::new(c, 0, 1)
                } else {
                    Edge::new(c, 1, 0)
                }
            })
            .collect();
        canonical_class(&ColoredGraph::new(2, edges)).expect("valid multi-edge graph")
    }

    /// θ: two nodes, three parallel edges a, b, c all oriented the same way.
    pub fn theta(a: &str, b: &str, c: &str) -> GraphClass {
        multi_edge(&[(a, true), (b, true), (c, true)])
    }

    /// Directed path `0 -a-> 1 -b-> 2`.
    pub fn path(a: &str, b: &str) -> GraphClass {
        canonical_class(&ColoredGraph::new(3, vec![Edge::new(a, 0, 1), Edge::new(b, 1, 2)]))
            .expect("valid path graph")
    }

    pub fn segment(c: &str) -> GraphClass {
        GraphClass::segment(Color::new(c))
    }
}
