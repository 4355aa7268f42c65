use std::collections::{BTreeMap, HashMap, HashSet};

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::foams::FilmSurface;
use crate::graphs::{involute_with_map, Color, GraphClass, Palette};
use crate::rational::Q;

use super::group::GroupAction;

/// How stabilizers are counted for objects that miss some palette colors.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum AutConvention {
    /// `G` is the product over the colors the object carries.
    #[default]
    PerObject,
    /// `G` is the product over the whole palette.
    FullPalette,
}

/// One action per palette color.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupCover {
    pub palette: Palette,
    pub actions: BTreeMap<Color, GroupAction>,
    pub convention: AutConvention,
}

/// A `G`-orbit of maps from the edges of a class to pairs of points, stored
/// as its least member (pairs listed in the class's edge order).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Equipment {
    pub pairs: Vec<(usize, usize)>,
    /// Order of the stabilizer of any member.
    pub aut: u64,
}

/// The basis `E_σ` of `B_σ`.
#[derive(Clone, Debug)]
pub struct EquipmentBasis {
    pub class: GraphClass,
    pub colors: Vec<Color>,
    pub equipments: Vec<Equipment>,
    index: HashMap<Vec<(usize, usize)>, usize>,
}

impl EquipmentBasis {
    pub fn len(&self) -> usize {
        self.equipments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equipments.is_empty()
    }

    /// Index of the orbit containing `pairs`.
    pub fn orbit_of(&self, pairs: &[(usize, usize)]) -> Option<usize> {
        self.index.get(pairs).copied()
    }

    /// All members of each orbit, in basis order.
    pub fn members(&self) -> Vec<Vec<Vec<(usize, usize)>>> {
        let mut out = vec![Vec::new(); self.len()];
        for (p, &k) in &self.index {
            out[k].push(p.clone());
        }
        for m in &mut out {
            m.sort();
        }
        out
    }

    pub fn labels(&self) -> Vec<String> {
        self.equipments
            .iter()
            .map(|e| {
                e.pairs
                    .iter()
                    .zip(&self.colors)
                    .map(|((x, y), c)| format!("{c}:{x},{y}"))
                    .collect::<Vec<_>>()
                    .join("|")
            })
            .collect()
    }
}

impl GroupCover {
    pub fn new(palette: Palette, actions: BTreeMap<Color, GroupAction>) -> Result<Self> {
        for c in palette.colors() {
            if !actions.contains_key(c) {
                return Err(Error::InvalidTables(format!("no action for color {c}")));
            }
        }
        if let Some(c) = actions.keys().find(|c| !palette.contains(c)) {
            return Err(Error::UnknownColor(c.to_string()));
        }
        Ok(GroupCover {
            palette,
            actions,
            convention: AutConvention::PerObject,
        })
    }

    /// The same action on every palette color.
    pub fn uniform(palette: Palette, action: &GroupAction) -> Self {
        let actions = palette
            .colors()
            .iter()
            .map(|c| (c.clone(), action.clone()))
            .collect();
        GroupCover {
            palette,
            actions,
            convention: AutConvention::PerObject,
        }
    }

    pub fn with_convention(mut self, convention: AutConvention) -> Self {
        self.convention = convention;
        self
    }

    pub fn action(&self, s: &Color) -> Result<&GroupAction> {
        self.actions
            .get(s)
            .ok_or_else(|| Error::UnknownColor(s.to_string()))
    }

    /// `|G|` for an object carrying `colors`.
    pub fn group_order(&self, colors: &[Color]) -> Result<u64> {
        let all = self.palette.colors().to_vec();
        let used = match self.convention {
            AutConvention::PerObject => colors,
            AutConvention::FullPalette => &all[..],
        };
        used.iter()
            .map(|c| Ok(self.action(c)?.group.order() as u64))
            .product()
    }

    /// All `G`-orbits of equipments of `σ`, ordered by least member.
    pub fn enumerate_equipments(&self, sigma: &GraphClass) -> Result<EquipmentBasis> {
        let colors: Vec<Color> = sigma.edges().iter().map(|e| e.color.clone()).collect();
        let actions: Vec<&GroupAction> = colors.iter().map(|c| self.action(c)).collect::<Result<_>>()?;
        let orders: Vec<usize> = actions.iter().map(|a| a.group.order()).collect();
        let sizes: Vec<usize> = actions.iter().map(|a| a.points * a.points).collect();
        let full = self.group_order(&colors)?;
        let local: u64 = orders.iter().map(|&o| o as u64).product();

        let mut index = HashMap::new();
        let mut equipments = Vec::new();
        for code in Odometer::new(&sizes) {
            let pairs: Vec<(usize, usize)> = code
                .iter()
                .zip(&actions)
                .map(|(&p, a)| (p / a.points, p % a.points))
                .collect();
            if index.contains_key(&pairs) {
                continue;
            }
            let k = equipments.len();
            let mut orbit = HashSet::new();
            for g in Odometer::new(&orders) {
                let moved: Vec<(usize, usize)> = pairs
                    .iter()
                    .zip(&actions)
                    .zip(&g)
                    .map(|((&(x, y), a), &gi)| (a.act(gi, x), a.act(gi, y)))
                    .collect();
                orbit.insert(moved);
            }
            let aut = local / orbit.len() as u64 * (full / local);
            for m in orbit {
                index.insert(m, k);
            }
            equipments.push(Equipment { pairs, aut });
        }
        Ok(EquipmentBasis {
            class: sigma.clone(),
            colors,
            equipments,
            index,
        })
    }
}

/// `ς ↦ ς*` from `E_σ` to `E_σ*`: reverse every edge and swap each pair.
pub fn involution_map(e: &EquipmentBasis, e_star: &EquipmentBasis) -> Result<Vec<usize>> {
    let (star, map) = involute_with_map(&e.class);
    if star != e_star.class {
        return Err(Error::MismatchedBoundary(format!(
            "{} is not the involute of {}",
            e_star.class, e.class
        )));
    }
    // edge of color c in σ* is the image of the edge of color c in σ
    let position: Vec<usize> = star
        .edges()
        .iter()
        .map(|se| e.class.edges().iter().position(|ed| ed.color == se.color).unwrap())
        .collect();
    debug_assert!(star.edges().iter().zip(&position).all(|(se, &i)| {
        let ed = &e.class.edges()[i];
        map[ed.head] == se.tail && map[ed.tail] == se.head
    }));
    e.equipments
        .iter()
        .map(|eq| {
            let pairs: Vec<(usize, usize)> = position
                .iter()
                .map(|&i| (eq.pairs[i].1, eq.pairs[i].0))
                .collect();
            e_star
                .orbit_of(&pairs)
                .ok_or_else(|| Error::MismatchedBoundary("involute equipment not found".into()))
        })
        .collect()
}

/// Mixed-radix counter over `0..sizes[0] × 0..sizes[1] × ...`, first digit slowest.
pub(crate) struct Odometer {
    sizes: Vec<usize>,
    cur: Option<Vec<usize>>,
}

impl Odometer {
    pub(crate) fn new(sizes: &[usize]) -> Self {
        let cur = (!sizes.contains(&0)).then(|| vec![0; sizes.len()]);
        Odometer {
            sizes: sizes.to_vec(),
            cur,
        }
    }
}

impl Iterator for Odometer {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.cur.clone()?;
        let cur = self.cur.as_mut().unwrap();
        let mut i = cur.len();
        loop {
            if i == 0 {
                self.cur = None;
                break;
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < self.sizes[i] {
                break;
            }
            cur[i] = 0;
        }
        Some(out)
    }
}

/// For each vertex of a film: its class and, for each disk corner at it,
/// the index of the corresponding edge of the canonical class.
pub(crate) fn corner_edges(film: &FilmSurface) -> Result<Vec<(GraphClass, BTreeMap<usize, usize>)>> {
    let mut out = Vec::with_capacity(film.vertex_count());
    for v in 0..film.vertex_count() {
        let (class, half, map) = film.vertex_graph_at(v)?;
        let local = |e: usize| half.iter().position(|&x| x == e).unwrap();
        let mut corners = BTreeMap::new();
        for (d, disk) in film.disks().iter().enumerate() {
            if let Some((inc, out)) = disk.corner_at(v) {
                let (t, h) = (map[local(inc)], map[local(out)]);
                let idx = class
                    .edges()
                    .iter()
                    .position(|e| e.color == disk.color && e.tail == t && e.head == h)
                    .ok_or_else(|| Error::InvalidSurface(format!("corner of disk {d} not in class")))?;
                corners.insert(d, idx);
            }
        }
        out.push((class, corners));
    }
    Ok(out)
}

fn check_boundary(
    film: &FilmSurface,
    classes: &[(GraphClass, BTreeMap<usize, usize>)],
    boundary: &[(&EquipmentBasis, usize)],
) -> Result<()> {
    if !film.is_connected() {
        return Err(Error::MismatchedBoundary("film surface is not connected".into()));
    }
    if boundary.len() != film.vertex_count() {
        return Err(Error::MismatchedBoundary(format!(
            "{} boundary equipments for {} vertices",
            boundary.len(),
            film.vertex_count()
        )));
    }
    for (v, ((class, _), (basis, i))) in classes.iter().zip(boundary).enumerate() {
        if &basis.class != class || *i >= basis.len() {
            return Err(Error::MismatchedBoundary(format!(
                "vertex {} has class {class}, boundary gives {} #{i}",
                film.name(v),
                basis.class
            )));
        }
    }
    Ok(())
}

fn film_colors(film: &FilmSurface) -> Vec<Color> {
    let mut c: Vec<Color> = film.disks().iter().map(|d| d.color.clone()).collect();
    c.sort();
    c.dedup();
    c
}

/// `Σ_Ψ 1/|Aut(Ψ)|` over equipped films with the given vertex orbits,
/// computed disk by disk as traces of orbit incidence matrices.
pub fn film_phi(cover: &GroupCover, film: &FilmSurface, boundary: &[(&EquipmentBasis, usize)]) -> Result<Q> {
    PreparedFilm::new(cover, film)?.value(film, boundary)
}

struct PreparedDisk {
    n: usize,
    orbit_id: Vec<usize>,
    /// (vertex, edge index of the vertex class) along the boundary.
    corners: Vec<(usize, usize)>,
}

/// A film with its per-disk counting data precomputed, for evaluating many
/// boundary labelings.
pub struct PreparedFilm {
    classes: Vec<(GraphClass, BTreeMap<usize, usize>)>,
    disks: Vec<PreparedDisk>,
    order: u64,
}

impl PreparedFilm {
    pub fn new(cover: &GroupCover, film: &FilmSurface) -> Result<Self> {
        let classes = corner_edges(film)?;
        let mut disks = Vec::new();
        for (d, disk) in film.disks().iter().enumerate() {
            let a = cover.action(&disk.color)?;
            if disk.is_empty() {
                return Err(Error::InvalidSurface("empty disk".into()));
            }
            disks.push(PreparedDisk {
                n: a.points,
                orbit_id: a.pair_orbits().0,
                corners: disk.vertices.iter().map(|&v| (v, classes[v].1[&d])).collect(),
            });
        }
        let order = cover.group_order(&film_colors(film))?;
        Ok(PreparedFilm { classes, disks, order })
    }

    pub fn value(&self, film: &FilmSurface, boundary: &[(&EquipmentBasis, usize)]) -> Result<Q> {
        check_boundary(film, &self.classes, boundary)?;
        let mut count = BigInt::from(1);
        for d in &self.disks {
            let n = d.n;
            let mut prod: Vec<u128> = Vec::new();
            for (step, &(v, edge)) in d.corners.iter().enumerate() {
                let (basis, i) = boundary[v];
                let (x, y) = basis.equipments[i].pairs[edge];
                let target = d.orbit_id[x * n + y];
                let hit = |x: usize, y: usize| d.orbit_id[x * n + y] == target;
                if step == 0 {
                    prod = (0..n * n).map(|p| hit(p / n, p % n) as u128).collect();
                    continue;
                }
                let mut next = vec![0u128; n * n];
                for r in 0..n {
                    for k in 0..n {
                        let pk = prod[r * n + k];
                        if pk == 0 {
                            continue;
                        }
                        for c in 0..n {
                            if hit(k, c) {
                                next[r * n + c] = next[r * n + c]
                                    .checked_add(pk)
                                    .ok_or_else(|| Error::InvalidSurface("count overflow".into()))?;
                            }
                        }
                    }
                }
                prod = next;
            }
            count *= (0..n).map(|i| BigInt::from(prod[i * n + i])).sum::<BigInt>();
        }
        Ok(Q::new(count, BigInt::from(self.order)))
    }
}

/// The unknowns of a film: one point of `X_s` per (seam edge, disk color).
struct FilmMaps<'a> {
    cover: &'a GroupCover,
    vars: Vec<(usize, Color)>,
    /// Per vertex: for each edge of its class, the (incoming, outgoing) variable ids.
    vertex_vars: Vec<Vec<(usize, usize)>>,
    /// Per vertex: the set of all members of the prescribed orbit.
    allowed: Vec<HashSet<Vec<(usize, usize)>>>,
    /// Vertices whose variables are all assigned once variable `i` is.
    ready_at: Vec<Vec<usize>>,
}

impl<'a> FilmMaps<'a> {
    fn new(cover: &'a GroupCover, film: &FilmSurface, boundary: &[(&EquipmentBasis, usize)]) -> Result<Self> {
        let corners = corner_edges(film)?;
        check_boundary(film, &corners, boundary)?;
        let mut var_index: BTreeMap<(usize, Color), usize> = BTreeMap::new();
        for d in film.disks() {
            for &e in &d.edges {
                let k = var_index.len();
                var_index.entry((e, d.color.clone())).or_insert(k);
            }
        }
        let mut vars = vec![(0, Color::new("")); var_index.len()];
        for (k, &i) in &var_index {
            vars[i] = k.clone();
        }
        let mut vertex_vars = Vec::new();
        let mut allowed = Vec::new();
        for (v, (class, cs)) in corners.iter().enumerate() {
            let mut vv = vec![(0, 0); class.edges().len()];
            for (&d, &edge) in cs {
                let disk = &film.disks()[d];
                let (inc, out) = disk.corner_at(v).unwrap();
                vv[edge] = (
                    var_index[&(inc, disk.color.clone())],
                    var_index[&(out, disk.color.clone())],
                );
            }
            vertex_vars.push(vv);
            let (basis, i) = boundary[v];
            let target = i;
            let members: HashSet<Vec<(usize, usize)>> = basis
                .index
                .iter()
                .filter(|(_, &k)| k == target)
                .map(|(p, _)| p.clone())
                .collect();
            allowed.push(members);
        }
        let mut ready_at = vec![Vec::new(); vars.len()];
        for (v, vv) in vertex_vars.iter().enumerate() {
            let last = vv.iter().flat_map(|&(a, b)| [a, b]).max().unwrap_or(0);
            ready_at[last].push(v);
        }
        Ok(FilmMaps {
            cover,
            vars,
            vertex_vars,
            allowed,
            ready_at,
        })
    }

    fn sizes(&self) -> Result<Vec<usize>> {
        self.vars
            .iter()
            .map(|(_, c)| Ok(self.cover.action(c)?.points))
            .collect()
    }

    fn matches(&self, v: usize, x: &[usize]) -> bool {
        let pairs: Vec<(usize, usize)> = self.vertex_vars[v].iter().map(|&(a, b)| (x[a], x[b])).collect();
        self.allowed[v].contains(&pairs)
    }

    /// Every complete assignment satisfying all vertex conditions.
    fn solutions(&self) -> Result<Vec<Vec<usize>>> {
        let sizes = self.sizes()?;
        let mut out = Vec::new();
        let mut x = vec![0; sizes.len()];
        self.search(0, &sizes, &mut x, &mut out);
        Ok(out)
    }

    fn search(&self, i: usize, sizes: &[usize], x: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == sizes.len() {
            out.push(x.clone());
            return;
        }
        for val in 0..sizes[i] {
            x[i] = val;
            if self.ready_at[i].iter().all(|&v| self.matches(v, x)) {
                self.search(i + 1, sizes, x, out);
            }
        }
    }
}

/// Independent oracle: the number of equipped films with the given vertex
/// orbits divided by `|G|`, by exhaustive backtracking over seam points.
pub fn film_phi_count(cover: &GroupCover, film: &FilmSurface, boundary: &[(&EquipmentBasis, usize)]) -> Result<Q> {
    let maps = FilmMaps::new(cover, film, boundary)?;
    let n = maps.solutions()?.len();
    let order = cover.group_order(&film_colors(film))?;
    Ok(Q::new(BigInt::from(n), BigInt::from(order)))
}

/// The orbit form of the same sum: group the matching films into `G`-orbits
/// and add `1/|Aut|` per orbit.
pub fn film_phi_orbit_sum(cover: &GroupCover, film: &FilmSurface, boundary: &[(&EquipmentBasis, usize)]) -> Result<Q> {
    let maps = FilmMaps::new(cover, film, boundary)?;
    let sols = maps.solutions()?;
    let colors = film_colors(film);
    let actions: Vec<&GroupAction> = colors.iter().map(|c| cover.action(c)).collect::<Result<_>>()?;
    let orders: Vec<usize> = actions.iter().map(|a| a.group.order()).collect();
    let slot: Vec<usize> = maps
        .vars
        .iter()
        .map(|(_, c)| colors.iter().position(|x| x == c).unwrap())
        .collect();
    let full = cover.group_order(&colors)?;
    let local: u64 = orders.iter().map(|&o| o as u64).product();
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut total = Q::from_integer(0.into());
    for s in &sols {
        if seen.contains(s) {
            continue;
        }
        let mut stab = 0u64;
        for g in Odometer::new(&orders) {
            let moved: Vec<usize> = s
                .iter()
                .zip(&slot)
                .map(|(&x, &k)| actions[k].act(g[k], x))
                .collect();
            if &moved == s {
                stab += 1;
            }
            seen.insert(moved);
        }
        total += Q::new(1.into(), BigInt::from(stab * (full / local)));
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foams::compose;
    use crate::graphs::named;
    use crate::groupcover::group::FiniteGroup;
    use crate::rational::{frac, q};

    fn cover(g: FiniteGroup, colors: &[&str]) -> GroupCover {
        GroupCover::uniform(Palette::new(colors.iter().copied()).unwrap(), &GroupAction::regular(g))
    }

    #[test]
    fn segment_over_z2() {
        let c = cover(FiniteGroup::cyclic(2), &["a"]);
        let e = c.enumerate_equipments(&named::segment("a")).unwrap();
        assert_eq!(e.len(), 2);
        assert!(e.equipments.iter().all(|q| q.aut == 1));
        assert_eq!(e.equipments[0].pairs, vec![(0, 0)]);
        assert_eq!(e.equipments[1].pairs, vec![(0, 1)]);
        assert_eq!(involution_map(&e, &e).unwrap(), vec![0, 1]);
    }

    #[test]
    fn theta_over_z2_cubed() {
        let c = cover(FiniteGroup::cyclic(2), &["a", "b", "c"]);
        let e = c.enumerate_equipments(&named::theta("a", "b", "c")).unwrap();
        assert_eq!(e.len(), 8);
        assert!(e.equipments.iter().all(|q| q.aut == 1));
    }

    #[test]
    fn trivial_group_single_equipment() {
        let c = cover(FiniteGroup::trivial(), &["a", "b", "c"]);
        let e = c.enumerate_equipments(&named::theta("a", "b", "c")).unwrap();
        assert_eq!(e.len(), 1);
        assert_eq!(e.equipments[0].aut, 1);
    }

    #[test]
    fn non_regular_stabilizers() {
        // Z/2 acting trivially on one point: one orbit, stabilizer 2
        let z2 = FiniteGroup::cyclic(2);
        let a = GroupAction::new(z2, 1, vec![vec![0], vec![0]]).unwrap();
        let c = GroupCover::uniform(Palette::new(["a"]).unwrap(), &a);
        let e = c.enumerate_equipments(&named::segment("a")).unwrap();
        assert_eq!(e.equipments[0].aut, 2);
        let f = compose(&[named::segment("a"), named::segment("a")]).unwrap();
        let b = [(&e, 0), (&e, 0)];
        assert_eq!(film_phi(&c, &f, &b).unwrap(), frac(1, 2));
        assert_eq!(film_phi_count(&c, &f, &b).unwrap(), frac(1, 2));
        assert_eq!(film_phi_orbit_sum(&c, &f, &b).unwrap(), frac(1, 2));
    }

    #[test]
    fn bigon_pairing_is_delta_over_aut() {
        for g in [FiniteGroup::cyclic(2), FiniteGroup::cyclic(3), FiniteGroup::symmetric3()] {
            let c = cover(g, &["a"]);
            let s = named::segment("a");
            let e = c.enumerate_equipments(&s).unwrap();
            let star = involution_map(&e, &e).unwrap();
            let f = compose(&[s.clone(), s.clone()]).unwrap();
            for i in 0..e.len() {
                for j in 0..e.len() {
                    let b = [(&e, i), (&e, j)];
                    let want = if star[i] == j { Q::new(1.into(), e.equipments[i].aut.into()) } else { q(0) };
                    assert_eq!(film_phi(&c, &f, &b).unwrap(), want);
                    assert_eq!(film_phi_count(&c, &f, &b).unwrap(), want);
                }
            }
        }
    }

    #[test]
    fn theta_triple_three_ways() {
        let c = cover(FiniteGroup::cyclic(2), &["a", "b", "c"]);
        let t = named::theta("a", "b", "c");
        let ts = crate::graphs::involute(&t);
        let seq = [t.clone(), ts.clone(), t.clone(), ts.clone()];
        let f = compose(&seq).unwrap();
        let e = c.enumerate_equipments(&t).unwrap();
        let es = c.enumerate_equipments(&ts).unwrap();
        for i in 0..e.len() {
            for j in [0, 3, 5] {
                let b = [(&e, i), (&es, j), (&e, 1), (&es, 2)];
                let fast = film_phi(&c, &f, &b).unwrap();
                assert_eq!(fast, film_phi_count(&c, &f, &b).unwrap());
                assert_eq!(fast, film_phi_orbit_sum(&c, &f, &b).unwrap());
            }
        }
    }

    #[test]
    fn mismatched_boundary() {
        let c = cover(FiniteGroup::cyclic(2), &["a"]);
        let s = named::segment("a");
        let e = c.enumerate_equipments(&s).unwrap();
        let f = compose(&[s.clone(), s]).unwrap();
        assert!(matches!(film_phi(&c, &f, &[(&e, 0)]), Err(Error::MismatchedBoundary(_))));
        assert!(matches!(film_phi(&c, &f, &[(&e, 0), (&e, 7)]), Err(Error::MismatchedBoundary(_))));
    }
}
