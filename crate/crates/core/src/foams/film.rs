//! Film surfaces: oriented colored disks glued along a regular seam graph,
//! with a cyclic order on the vertices of each connected component.
//!
//! A disk boundary is stored as a vertex cycle `v_0 .. v_{k-1}` together
//! with the seam edges `e_i` joining `v_i` to `v_{i+1}`. At a vertex `v_i`
//! the disk contributes one corner to the vertex graph, oriented from the
//! incoming seam edge `e_{i-1}` to the outgoing one `e_i`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::graphs::{canonical_with_map, ColoredGraph, Color, Edge, GraphClass};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Disk {
    pub color: Color,
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

impl Disk {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    fn position_of(&self, v: usize) -> Option<usize> {
        self.vertices.iter().position(|&x| x == v)
    }

    /// (incoming, outgoing) seam edges at `v`, if the disk passes `v`.
    pub fn corner_at(&self, v: usize) -> Option<(usize, usize)> {
        let i = self.position_of(v)?;
        let k = self.len();
        Some((self.edges[(i + k - 1) % k], self.edges[i]))
    }
}

/// A contiguous arc `start, start+1, .., start+len-1` (mod n) of a component's cyclic order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Split {
    pub start: usize,
    pub len: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilmSurface {
    names: Vec<String>,
    components: Vec<Vec<usize>>,
    seam: Vec<[usize; 2]>,
    disks: Vec<Disk>,
}

impl FilmSurface {
    /// Builds and checks every structural invariant except the graph-cut
    /// condition, which [`validate_cyclic`] reports separately.
    pub fn new(
        names: Vec<String>,
        components: Vec<Vec<usize>>,
        seam: Vec<[usize; 2]>,
        disks: Vec<Disk>,
    ) -> Result<Self> {
        let f = FilmSurface {
            names,
            components,
            seam,
            disks,
        };
        f.check_structure()?;
        Ok(f)
    }

    pub fn empty() -> Self {
        FilmSurface {
            names: Vec::new(),
            components: Vec::new(),
            seam: Vec::new(),
            disks: Vec::new(),
        }
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn seam_edges(&self) -> &[[usize; 2]] {
        &self.seam
    }

    pub fn disks(&self) -> &[Disk] {
        &self.disks
    }

    pub fn is_connected(&self) -> bool {
        self.components.len() == 1
    }

    pub fn component_of_vertex(&self, v: usize) -> usize {
        self.components
            .iter()
            .position(|c| c.contains(&v))
            .expect("vertex belongs to a component")
    }

    pub fn component_of_disk(&self, d: usize) -> usize {
        self.component_of_vertex(self.disks[d].vertices[0])
    }

    /// Vertex graph classes of one component, in its cyclic order.
    pub fn class_sequence(&self, component: usize) -> Vec<GraphClass> {
        self.components[component]
            .iter()
            .map(|&v| self.vertex_graph_at(v).expect("validated surface").0)
            .collect()
    }

    fn check_structure(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSurface(m));
        let n = self.names.len();
        let mut seen = vec![false; n];
        for comp in &self.components {
            if comp.len() < 2 {
                return bad("every connected component needs at least two vertices".into());
            }
            for &v in comp {
                if v >= n || seen[v] {
                    return bad(format!("vertex {v} listed twice or out of range"));
                }
                seen[v] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return bad("a vertex is missing from the cyclic order".into());
        }
        let names: BTreeSet<&String> = self.names.iter().collect();
        if names.len() != n {
            return bad("duplicate vertex name".into());
        }
        let comp_of: Vec<usize> = {
            let mut c = vec![0; n];
            for (ci, comp) in self.components.iter().enumerate() {
                for &v in comp {
                    c[v] = ci;
                }
            }
            c
        };
        for (ei, &[a, b]) in self.seam.iter().enumerate() {
            if a >= n || b >= n {
                return bad(format!("seam edge {ei} out of range"));
            }
            if a == b {
                return bad(format!("seam edge {ei} is a loop"));
            }
            if comp_of[a] != comp_of[b] {
                return bad(format!("seam edge {ei} joins two components"));
            }
        }
        let mut used = vec![false; self.seam.len()];
        let mut colors_by_comp: Vec<BTreeSet<&Color>> = vec![BTreeSet::new(); self.components.len()];
        for (di, d) in self.disks.iter().enumerate() {
            let k = d.vertices.len();
            if k < 2 || d.edges.len() != k {
                return bad(format!("disk {di} needs a boundary with at least two vertices"));
            }
            let vs: BTreeSet<usize> = d.vertices.iter().copied().collect();
            let es: BTreeSet<usize> = d.edges.iter().copied().collect();
            if vs.len() != k || es.len() != k {
                return bad(format!("disk {di} boundary repeats a vertex or edge"));
            }
            for i in 0..k {
                let (u, v) = (d.vertices[i], d.vertices[(i + 1) % k]);
                let e = d.edges[i];
                let Some(&[a, b]) = self.seam.get(e) else {
                    return bad(format!("disk {di} uses a missing seam edge"));
                };
                if !((a == u && b == v) || (a == v && b == u)) {
                    return bad(format!("disk {di}: seam edge {e} does not join its vertices"));
                }
                used[e] = true;
            }
            let ci = comp_of[d.vertices[0]];
            if !colors_by_comp[ci].insert(&d.color) {
                return bad(format!("color {} repeats in a component", d.color));
            }
            // boundary must follow the cyclic order of its component
            let comp = &self.components[ci];
            let pos: Vec<usize> = d
                .vertices
                .iter()
                .map(|v| comp.iter().position(|x| x == v).unwrap())
                .collect();
            let descents = (0..k).filter(|&i| pos[(i + 1) % k] < pos[i]).count();
            if descents != 1 {
                return bad(format!(
                    "disk {di} ({}) does not traverse its vertices in the cyclic order",
                    d.color
                ));
            }
        }
        if let Some(e) = used.iter().position(|u| !u) {
            return bad(format!("seam edge {e} lies on no disk"));
        }
        for (ci, comp) in self.components.iter().enumerate() {
            // connectivity through seam edges
            let mut reach: BTreeSet<usize> = BTreeSet::from([comp[0]]);
            let mut grew = true;
            while grew {
                grew = false;
                for &[a, b] in &self.seam {
                    if reach.contains(&a) != reach.contains(&b) {
                        reach.insert(a);
                        reach.insert(b);
                        grew = true;
                    }
                }
            }
            if reach.len() != comp.len() {
                return bad(format!("component {ci} is not connected by its seam"));
            }
        }
        for v in 0..n {
            let (class, _, _) = self.vertex_graph_at(v)?;
            if !class.is_connected() {
                return bad(format!("vertex graph at {} is disconnected", self.names[v]));
            }
        }
        Ok(())
    }

    /// The raw link at `v`: nodes are incident seam edges (ascending id),
    /// one edge per disk corner. Returns the class, the seam edge of each
    /// local node, and the map from local nodes to canonical nodes.
    pub fn vertex_graph_at(&self, v: usize) -> Result<(GraphClass, Vec<usize>, Vec<usize>)> {
        let half: Vec<usize> = (0..self.seam.len())
            .filter(|&e| self.seam[e].contains(&v))
            .collect();
        let local = |e: usize| half.iter().position(|&x| x == e).unwrap();
        let mut edges = Vec::new();
        for d in &self.disks {
            if let Some((inc, out)) = d.corner_at(v) {
                edges.push(Edge {
                    color: d.color.clone(),
                    tail: local(inc),
                    head: local(out),
                });
            }
        }
        let g = ColoredGraph::new(half.len(), edges);
        let (class, map) = canonical_with_map(&g)?;
        Ok((class, half, map))
    }

    /// Extracts one connected component as its own surface; also returns the
    /// original vertex ids and disk ids in the new numbering order.
    pub fn component_surface(&self, ci: usize) -> (FilmSurface, Vec<usize>, Vec<usize>) {
        let verts = self.components[ci].clone();
        let vmap: HashMap<usize, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let edge_ids: Vec<usize> = (0..self.seam.len())
            .filter(|&e| vmap.contains_key(&self.seam[e][0]))
            .collect();
        let emap: HashMap<usize, usize> = edge_ids.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let disk_ids: Vec<usize> = (0..self.disks.len())
            .filter(|&d| vmap.contains_key(&self.disks[d].vertices[0]))
            .collect();
        let f = FilmSurface {
            names: verts.iter().map(|&v| self.names[v].clone()).collect(),
            components: vec![(0..verts.len()).collect()],
            seam: edge_ids
                .iter()
                .map(|&e| [vmap[&self.seam[e][0]], vmap[&self.seam[e][1]]])
                .collect(),
            disks: disk_ids
                .iter()
                .map(|&d| {
                    let disk = &self.disks[d];
                    Disk {
                        color: disk.color.clone(),
                        vertices: disk.vertices.iter().map(|v| vmap[v]).collect(),
                        edges: disk.edges.iter().map(|e| emap[e]).collect(),
                    }
                })
                .collect(),
        };
        (f, verts, disk_ids)
    }

    /// Disjoint union; returns the disk-index offset of each part.
    pub fn disjoint_union(parts: &[FilmSurface]) -> Result<(FilmSurface, Vec<usize>)> {
        let mut out = FilmSurface::empty();
        let mut offsets = Vec::new();
        for p in parts {
            let (vo, eo) = (out.names.len(), out.seam.len());
            offsets.push(out.disks.len());
            out.names.extend(p.names.iter().cloned());
            out.components
                .extend(p.components.iter().map(|c| c.iter().map(|v| v + vo).collect()));
            out.seam.extend(p.seam.iter().map(|[a, b]| [a + vo, b + vo]));
            out.disks.extend(p.disks.iter().map(|d| Disk {
                color: d.color.clone(),
                vertices: d.vertices.iter().map(|v| v + vo).collect(),
                edges: d.edges.iter().map(|e| e + eo).collect(),
            }));
        }
        out.check_structure()?;
        Ok((out, offsets))
    }

    /// Renames vertex `v`.
    pub fn rename_vertex(&mut self, v: usize, name: String) {
        self.names[v] = name;
    }

    /// Rotates the cyclic order of a component so that it starts at position `shift`.
    pub fn rotated(&self, component: usize, shift: usize) -> FilmSurface {
        let mut f = self.clone();
        let c = &mut f.components[component];
        let n = c.len();
        c.rotate_left(shift % n);
        f
    }

    /// Isomorphism invariant: equal keys iff there is a homeomorphism
    /// preserving cyclic orders, disk orientations and colors.
    pub fn iso_key(&self) -> FilmKey {
        let mut comps: Vec<ComponentKey> = (0..self.components.len())
            .map(|ci| self.component_key(ci))
            .collect();
        comps.sort();
        FilmKey(comps)
    }

    fn component_key(&self, ci: usize) -> ComponentKey {
        let comp = &self.components[ci];
        let n = comp.len();
        let links: Vec<(GraphClass, Vec<usize>, Vec<usize>)> = comp
            .iter()
            .map(|&v| self.vertex_graph_at(v).expect("validated surface"))
            .collect();
        let mut best: Option<ComponentKey> = None;
        for r in 0..n {
            let classes: Vec<GraphClass> = (0..n).map(|i| links[(i + r) % n].0.clone()).collect();
            if let Some(b) = &best {
                if classes > b.0 {
                    continue;
                }
            }
            // half-edge (position, canonical node) for each seam edge end
            let mut ends: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
            for i in 0..n {
                let (_, half, map) = &links[(i + r) % n];
                for (local, &e) in half.iter().enumerate() {
                    ends.entry(e).or_default().push((i, map[local]));
                }
            }
            let mut pairs: Vec<[(usize, usize); 2]> = ends
                .into_values()
                .map(|mut v| {
                    v.sort();
                    [v[0], v[1]]
                })
                .collect();
            pairs.sort();
            let key = ComponentKey(classes, pairs);
            if best.as_ref().is_none_or(|b| key < *b) {
                best = Some(key);
            }
        }
        best.expect("component is non-empty")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ComponentKey(Vec<GraphClass>, Vec<[(usize, usize); 2]>);

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FilmKey(Vec<ComponentKey>);

/// The vertex graph of `q` (by name).
pub fn vertex_graph(f: &FilmSurface, q: &str) -> Result<GraphClass> {
    let v = f
        .vertex_index(q)
        .ok_or_else(|| Error::UnknownVertex(q.to_string()))?;
    Ok(f.vertex_graph_at(v)?.0)
}

fn default_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("q{i}")).collect()
}

/// The unique connected film surface whose vertex graphs, in cyclic order,
/// are `seq`.
///
/// Each color `s` must be carried by one disk visiting exactly the positions
/// whose class has an `s`-edge, in cyclic order. The disk leaves position `i`
/// through the head node of its corner and enters the next position through
/// the tail node, which pins every seam edge.
pub fn compose(seq: &[GraphClass]) -> Result<FilmSurface> {
    check_sequence(seq)?;
    let n = seq.len();
    let colors: BTreeSet<Color> = seq.iter().flat_map(|c| c.colors()).collect();
    let mut partner: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
    let mut bind = |a: (usize, usize), b: (usize, usize)| -> bool {
        for (x, y) in [(a, b), (b, a)] {
            match partner.get(&x) {
                Some(&p) if p != y => return false,
                _ => {
                    partner.insert(x, y);
                }
            }
        }
        true
    };
    let mut disk_positions: Vec<(Color, Vec<usize>)> = Vec::new();
    for s in &colors {
        let pos: Vec<usize> = (0..n).filter(|&i| seq[i].has_color(s)).collect();
        if pos.len() < 2 {
            return Err(Error::Incompatible);
        }
        for (t, &i) in pos.iter().enumerate() {
            let j = pos[(t + 1) % pos.len()];
            let head = seq[i].edge_of_color(s).unwrap().head;
            let tail = seq[j].edge_of_color(s).unwrap().tail;
            if !bind((i, head), (j, tail)) {
                return Err(Error::Incompatible);
            }
        }
        disk_positions.push((s.clone(), pos));
    }
    // every half-edge must be matched (guaranteed for connected classes, but checked)
    for (i, c) in seq.iter().enumerate() {
        for node in 0..c.node_count() {
            if !partner.contains_key(&(i, node)) {
                return Err(Error::Incompatible);
            }
        }
    }
    let mut halves: Vec<(usize, usize)> = partner.keys().copied().collect();
    halves.sort();
    let mut edge_of: HashMap<(usize, usize), usize> = HashMap::new();
    let mut seam = Vec::new();
    for h in halves {
        if edge_of.contains_key(&h) {
            continue;
        }
        let p = partner[&h];
        edge_of.insert(h, seam.len());
        edge_of.insert(p, seam.len());
        seam.push([h.0, p.0]);
    }
    let disks = disk_positions
        .into_iter()
        .map(|(s, pos)| {
            let edges = pos
                .iter()
                .map(|&i| edge_of[&(i, seq[i].edge_of_color(&s).unwrap().head)])
                .collect();
            Disk {
                color: s,
                vertices: pos,
                edges,
            }
        })
        .collect();
    let f = FilmSurface::new(default_names(n), vec![(0..n).collect()], seam, disks)
        .map_err(|_| Error::Incompatible)?;
    if !validate_cyclic(&f).is_ok() {
        return Err(Error::Incompatible);
    }
    Ok(f)
}

pub fn try_compose(seq: &[GraphClass]) -> Option<FilmSurface> {
    compose(seq).ok()
}

fn check_sequence(seq: &[GraphClass]) -> Result<()> {
    if seq.len() < 2 {
        return Err(Error::NotComposable(
            "a connected film surface needs at least two vertices".into(),
        ));
    }
    if let Some(c) = seq.iter().find(|c| !c.is_connected()) {
        return Err(Error::NotComposable(format!("vertex graph {c} is disconnected")));
    }
    Ok(())
}

/// Exhaustive search over every perfect matching of half-edges: returns all
/// pairwise non-isomorphic compatible surfaces. Exponential; used to check
/// that [`compose`] is the only solution.
pub fn compose_exhaustive(seq: &[GraphClass]) -> Result<Vec<FilmSurface>> {
    check_sequence(seq)?;
    let n = seq.len();
    let halves: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..seq[i].node_count()).map(move |k| (i, k)))
        .collect();
    let mut found: BTreeMap<FilmKey, FilmSurface> = BTreeMap::new();
    let mut matching: Vec<Option<usize>> = vec![None; halves.len()];
    search_matchings(seq, &halves, &mut matching, &mut found);
    Ok(found.into_values().collect())
}

fn search_matchings(
    seq: &[GraphClass],
    halves: &[(usize, usize)],
    matching: &mut Vec<Option<usize>>,
    found: &mut BTreeMap<FilmKey, FilmSurface>,
) {
    let Some(first) = matching.iter().position(Option::is_none) else {
        if let Some(f) = surface_from_matching(seq, halves, matching) {
            found.entry(f.iso_key()).or_insert(f);
        }
        return;
    };
    for other in first + 1..halves.len() {
        if matching[other].is_some() || halves[other].0 == halves[first].0 {
            continue;
        }
        matching[first] = Some(other);
        matching[other] = Some(first);
        search_matchings(seq, halves, matching, found);
        matching[first] = None;
        matching[other] = None;
    }
}

fn surface_from_matching(
    seq: &[GraphClass],
    halves: &[(usize, usize)],
    matching: &[Option<usize>],
) -> Option<FilmSurface> {
    let n = seq.len();
    let idx = |h: (usize, usize)| halves.iter().position(|&x| x == h).unwrap();
    // seam edges indexed by their smaller half-edge index
    let mut edge_id = vec![usize::MAX; halves.len()];
    let mut seam = Vec::new();
    for (a, m) in matching.iter().enumerate() {
        let b = m.unwrap();
        if a < b {
            edge_id[a] = seam.len();
            edge_id[b] = seam.len();
            seam.push([halves[a].0, halves[b].0]);
        }
    }
    let colors: BTreeSet<Color> = seq.iter().flat_map(|c| c.colors()).collect();
    let mut disks = Vec::new();
    for s in colors {
        let pos: Vec<usize> = (0..n).filter(|&i| seq[i].has_color(&s)).collect();
        let mut vertices = Vec::new();
        let mut edges = Vec::new();
        let mut cur = pos[0];
        loop {
            vertices.push(cur);
            let head = idx((cur, seq[cur].edge_of_color(&s)?.head));
            let next_half = halves[matching[head].unwrap()];
            edges.push(edge_id[head]);
            let (j, node) = next_half;
            let e = seq[j].edge_of_color(&s)?;
            if e.tail != node {
                return None;
            }
            cur = j;
            if cur == pos[0] {
                break;
            }
            if vertices.len() > pos.len() {
                return None;
            }
        }
        let mut sorted = vertices.clone();
        sorted.sort();
        if sorted != pos {
            return None;
        }
        disks.push(Disk {
            color: s,
            vertices,
            edges,
        });
    }
    let f = FilmSurface::new(default_names(n), vec![(0..n).collect()], seam, disks).ok()?;
    // the vertex graphs must be exactly the requested classes
    if f.class_sequence(0) != seq {
        return None;
    }
    validate_cyclic(&f).is_ok().then_some(f)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CyclicReport {
    pub checked: Vec<(usize, Split)>,
    pub failures: Vec<(usize, Split, String)>,
}

impl CyclicReport {
    pub fn is_ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Every contiguous bipartition of a component of `n` vertices, each once.
pub fn bipartitions(n: usize) -> Vec<Split> {
    let mut out = Vec::new();
    for len in 1..n {
        for start in 0..n {
            // {L, R} and {R, L} are the same bipartition: keep the one whose
            // arc contains position 0 when |L| = |R| or the shorter arc otherwise
            let other_len = n - len;
            if len > other_len {
                continue;
            }
            if len == other_len && start >= len {
                continue;
            }
            out.push(Split { start, len });
        }
    }
    out
}

pub fn validate_cyclic(f: &FilmSurface) -> CyclicReport {
    let mut report = CyclicReport::default();
    for ci in 0..f.components.len() {
        let (comp, _, _) = f.component_surface(ci);
        for split in bipartitions(comp.vertex_count()) {
            report.checked.push((ci, split));
            if let Err(e) = graph_cut(&comp, split) {
                report.failures.push((ci, split, e.to_string()));
            }
        }
    }
    report
}

#[derive(Clone, Debug)]
pub struct GraphCut {
    /// σ, the class at the new vertex q₊ of the left piece.
    pub class: GraphClass,
    pub left: FilmSurface,
    pub right: FilmSurface,
    /// Vertex index of q₊ in `left` and of q₋ in `right`.
    pub plus: usize,
    pub minus: usize,
    /// Original vertex ids, in the order they appear in each piece.
    pub left_vertices: Vec<usize>,
    pub right_vertices: Vec<usize>,
    /// Original disk → (disk in left, disk in right).
    pub disk_map: Vec<(Option<usize>, Option<usize>)>,
}

/// Cuts a connected surface along the graph-cut realizing `split`.
///
/// γ has one node per seam edge joining the two sides and one edge per disk
/// meeting both sides. The left piece is the arc followed by q₊, the right
/// piece the complementary arc followed by q₋.
pub fn graph_cut(f: &FilmSurface, split: Split) -> Result<GraphCut> {
    graph_cut_named(f, split, "q+", "q-")
}

pub fn graph_cut_named(f: &FilmSurface, split: Split, plus: &str, minus: &str) -> Result<GraphCut> {
    if !f.is_connected() {
        return Err(Error::NoCut("graph-cuts apply to connected surfaces".into()));
    }
    let comp = &f.components[0];
    let n = comp.len();
    if split.len == 0 || split.len >= n || split.start >= n {
        return Err(Error::NoCut(format!("{split:?} is not a proper bipartition")));
    }
    let lverts: Vec<usize> = (0..split.len).map(|t| comp[(split.start + t) % n]).collect();
    let rverts: Vec<usize> = (0..n - split.len)
        .map(|t| comp[(split.start + split.len + t) % n])
        .collect();
    let in_left: Vec<bool> = {
        let mut v = vec![false; f.vertex_count()];
        for &x in &lverts {
            v[x] = true;
        }
        v
    };
    let lmap: HashMap<usize, usize> = lverts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let rmap: HashMap<usize, usize> = rverts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let (qp, qm) = (lverts.len(), rverts.len());

    let mut lseam = Vec::new();
    let mut rseam = Vec::new();
    let mut le: HashMap<usize, usize> = HashMap::new();
    let mut re: HashMap<usize, usize> = HashMap::new();
    for (e, &[a, b]) in f.seam.iter().enumerate() {
        match (in_left[a], in_left[b]) {
            (true, true) => {
                le.insert(e, lseam.len());
                lseam.push([lmap[&a], lmap[&b]]);
            }
            (false, false) => {
                re.insert(e, rseam.len());
                rseam.push([rmap[&a], rmap[&b]]);
            }
            _ => {
                let (l, r) = if in_left[a] { (a, b) } else { (b, a) };
                le.insert(e, lseam.len());
                lseam.push([lmap[&l], qp]);
                re.insert(e, rseam.len());
                rseam.push([rmap[&r], qm]);
            }
        }
    }

    let mut ldisks = Vec::new();
    let mut rdisks = Vec::new();
    let mut disk_map = Vec::new();
    let mut crossing = 0;
    for d in &f.disks {
        let k = d.len();
        let inl: Vec<bool> = d.vertices.iter().map(|&v| in_left[v]).collect();
        if inl.iter().all(|&x| x) {
            disk_map.push((Some(ldisks.len()), None));
            ldisks.push(Disk {
                color: d.color.clone(),
                vertices: d.vertices.iter().map(|v| lmap[v]).collect(),
                edges: d.edges.iter().map(|e| le[e]).collect(),
            });
            continue;
        }
        if inl.iter().all(|&x| !x) {
            disk_map.push((None, Some(rdisks.len())));
            rdisks.push(Disk {
                color: d.color.clone(),
                vertices: d.vertices.iter().map(|v| rmap[v]).collect(),
                edges: d.edges.iter().map(|e| re[e]).collect(),
            });
            continue;
        }
        crossing += 1;
        let i0 = (0..k).find(|&i| inl[i] && !inl[(i + k - 1) % k]).unwrap();
        let mut lv = Vec::new();
        let mut lids = Vec::new();
        let mut i = i0;
        while inl[i] {
            lv.push(lmap[&d.vertices[i]]);
            lids.push(le[&d.edges[i]]);
            i = (i + 1) % k;
        }
        // lids ends with the exit edge (now ending at q+)
        let mut rv = Vec::new();
        let mut re_ids = Vec::new();
        let r0 = i;
        while !inl[i] {
            rv.push(rmap[&d.vertices[i]]);
            re_ids.push(re[&d.edges[i]]);
            i = (i + 1) % k;
        }
        let exit = d.edges[(r0 + k - 1) % k];
        let entry = d.edges[(i0 + k - 1) % k];
        if i != i0 {
            return Err(Error::NoCut(format!(
                "disk {} crosses the split more than twice",
                d.color
            )));
        }
        lv.push(qp);
        lids.push(le[&entry]);
        rv.push(qm);
        re_ids.push(re[&exit]);
        disk_map.push((Some(ldisks.len()), Some(rdisks.len())));
        ldisks.push(Disk {
            color: d.color.clone(),
            vertices: lv,
            edges: lids,
        });
        rdisks.push(Disk {
            color: d.color.clone(),
            vertices: rv,
            edges: re_ids,
        });
    }
    if crossing == 0 {
        return Err(Error::NoCut(format!("{split:?}: no disk meets both sides")));
    }
    let mut lnames: Vec<String> = lverts.iter().map(|&v| f.names[v].clone()).collect();
    lnames.push(plus.to_string());
    let mut rnames: Vec<String> = rverts.iter().map(|&v| f.names[v].clone()).collect();
    rnames.push(minus.to_string());
    let wrap = |e: Error| Error::NoCut(format!("{split:?}: {e}"));
    let left = FilmSurface::new(lnames, vec![(0..=qp).collect()], lseam, ldisks).map_err(wrap)?;
    let right = FilmSurface::new(rnames, vec![(0..=qm).collect()], rseam, rdisks).map_err(wrap)?;
    let class = left.vertex_graph_at(qp)?.0;
    Ok(GraphCut {
        class,
        left,
        right,
        plus: qp,
        minus: qm,
        left_vertices: lverts,
        right_vertices: rverts,
        disk_map,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::involute;
    use crate::graphs::named::*;

    fn bigon() -> FilmSurface {
        compose(&[segment("a"), segment("a")]).unwrap()
    }

    #[test]
    fn bigon_shape() {
        let f = bigon();
        assert_eq!(f.vertex_count(), 2);
        assert_eq!(f.seam_edges().len(), 2);
        assert_eq!(f.disks().len(), 1);
        assert_eq!(vertex_graph(&f, "q1").unwrap(), segment("a"));
        assert_eq!(vertex_graph(&f, "q2").unwrap(), segment("a"));
    }

    #[test]
    fn theta_surface_shape() {
        let t = theta("a", "b", "c");
        let f = compose(&[t.clone(), involute(&t)]).unwrap();
        assert_eq!(f.seam_edges().len(), 2);
        assert_eq!(f.disks().len(), 3);
        assert_eq!(vertex_graph(&f, "q1").unwrap(), t);
        let report = validate_cyclic(&f);
        assert!(report.is_ok());
        assert_eq!(report.checked.len(), 1);
    }

    #[test]
    fn different_colors_do_not_compose() {
        assert!(matches!(
            compose(&[segment("a"), segment("b")]),
            Err(Error::Incompatible)
        ));
        assert!(matches!(compose(&[segment("a")]), Err(Error::NotComposable(_))));
    }

    #[test]
    fn path_pairs_with_its_involution_only() {
        let p = path("a", "b");
        assert!(compose(&[p.clone(), involute(&p)]).is_ok());
        assert!(compose(&[p.clone(), p.clone()]).is_err());
    }

    #[test]
    fn mixed_theta_composes_only_in_pairs() {
        let m = multi_edge(&[("a", true), ("b", false), ("c", true)]);
        assert!(compose(&[m.clone(), m.clone()]).is_ok());
        assert!(compose(&[m.clone(), m.clone(), m.clone()]).is_err());
    }

    #[test]
    fn bigon_cut() {
        let f = bigon();
        let cut = graph_cut(&f, Split { start: 0, len: 1 }).unwrap();
        assert_eq!(cut.class, segment("a"));
        assert_eq!(cut.left.iso_key(), f.iso_key());
        assert_eq!(cut.right.iso_key(), f.iso_key());
    }

    #[test]
    fn theta_cut_pieces() {
        let t = theta("a", "b", "c");
        let f = compose(&[t.clone(), t.clone()]).unwrap();
        let cut = graph_cut(&f, Split { start: 0, len: 1 }).unwrap();
        assert_eq!(cut.class, t);
        assert_eq!(cut.left.iso_key(), f.iso_key());
        assert_eq!(cut.right.iso_key(), f.iso_key());
        assert_eq!(cut.right.vertex_graph_at(cut.minus).unwrap().0, involute(&cut.class));
    }

    #[test]
    fn three_vertex_surface_checks_three_bipartitions() {
        let f = compose(&[segment("a"), segment("a"), segment("a")]).unwrap();
        let r = validate_cyclic(&f);
        assert_eq!(r.checked.len(), 3);
        assert!(r.is_ok());
    }

    #[test]
    fn four_vertex_cuts_are_consistent() {
        let t = theta("a", "b", "c");
        let f = compose(&[t.clone(), t.clone(), t.clone(), t.clone()]).unwrap();
        for split in bipartitions(4) {
            let cut = graph_cut(&f, split).unwrap();
            // the pieces keep the original links on their side
            for (i, &v) in cut.left_vertices.iter().enumerate() {
                assert_eq!(cut.left.vertex_graph_at(i).unwrap().0, f.vertex_graph_at(v).unwrap().0);
            }
            assert_eq!(
                cut.right.vertex_graph_at(cut.minus).unwrap().0,
                involute(&cut.class)
            );
        }
    }

    #[test]
    fn exhaustive_agrees_with_compose() {
        let t = theta("a", "b", "c");
        for seq in [
            vec![segment("a"), segment("a")],
            vec![t.clone(), t.clone(), t.clone()],
            vec![path("a", "b"), involute(&path("a", "b"))],
        ] {
            let all = compose_exhaustive(&seq).unwrap();
            assert_eq!(all.len(), 1);
            assert_eq!(all[0].iso_key(), compose(&seq).unwrap().iso_key());
        }
        assert!(compose_exhaustive(&[segment("a"), segment("b")]).unwrap().is_empty());
    }

    #[test]
    fn rotation_preserves_iso_key() {
        let f = compose(&[segment("a"), segment("a"), segment("a"), segment("a")]).unwrap();
        assert_eq!(f.rotated(0, 1).iso_key(), f.iso_key());
    }

    #[test]
    fn reversed_disk_is_rejected() {
        // disk a runs q1 -> q3 -> q2, against the cyclic order
        let r = FilmSurface::new(
            vec!["q1".into(), "q2".into(), "q3".into()],
            vec![vec![0, 1, 2]],
            vec![[0, 2], [2, 1], [1, 0]],
            vec![Disk {
                color: Color::new("a"),
                vertices: vec![0, 2, 1],
                edges: vec![0, 1, 2],
            }],
        );
        assert!(matches!(r, Err(Error::InvalidSurface(_))));
    }
}
