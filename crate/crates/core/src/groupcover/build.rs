use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::foams::compose;
use crate::frobenius::{
    casimir, twisted_casimir, verify_graph_cardy, EquippedFrobenius, Form3, GraphCardyBundle,
    GraphFrobeniusData, composable_sequences,
};
use crate::graphs::{involute, Color, GraphClass};
use crate::linalg::Matrix;
use crate::rational::Q;

use super::equip::{film_phi, involution_map, EquipmentBasis, GroupCover, PreparedFilm};
use super::group::{FiniteGroup, GroupAction};

/// The center of the group algebra in the basis of class sums, with
/// `l(Σ λ_g g) = λ_e / |G|` and `g* = g⁻¹`.
pub fn build_center_algebra(group: &FiniteGroup) -> EquippedFrobenius {
    let classes = group.conjugacy_classes();
    let n = classes.len();
    let mut class_of = vec![0; group.order()];
    for (k, c) in classes.iter().enumerate() {
        for &g in c {
            class_of[g] = k;
        }
    }
    let mut mult = vec![Q::zero(); n * n * n];
    for i in 0..n {
        for j in 0..n {
            let mut counts = vec![0i64; group.order()];
            for &x in &classes[i] {
                for &y in &classes[j] {
                    counts[group.mul(x, y)] += 1;
                }
            }
            // coefficient of C_k is the count at any one member of C_k
            for (k, c) in classes.iter().enumerate() {
                mult[(i * n + j) * n + k] = Q::from_integer(counts[c[0]].into());
            }
        }
    }
    let mut unit = vec![Q::zero(); n];
    unit[0] = Q::one();
    let mut functional = vec![Q::zero(); n];
    functional[0] = Q::new(BigInt::one(), BigInt::from(group.order()));
    let involution = Matrix::from_fn(n, n, |i, j| {
        if class_of[group.inv(classes[j][0])] == i {
            Q::one()
        } else {
            Q::zero()
        }
    });
    let labels = classes.iter().map(|c| format!("C{}", c[0])).collect();
    EquippedFrobenius::new(labels, mult, unit, functional, involution).expect("consistent tables")
}

/// Equipment bases for every class of a working set.
#[derive(Clone, Debug)]
pub struct CoverSpaces {
    pub cover: GroupCover,
    pub bases: BTreeMap<GraphClass, EquipmentBasis>,
}

impl CoverSpaces {
    /// Requires every class to be connected, palette-colored and to have its
    /// involute in the set.
    pub fn new(cover: &GroupCover, working: &[GraphClass]) -> Result<Self> {
        let mut bases = BTreeMap::new();
        for c in working {
            if !c.is_connected() {
                return Err(Error::InvalidGraph(format!("{c} is not connected")));
            }
            if !cover.palette.admits(c) {
                return Err(Error::UnknownColor(format!("{c} uses colors outside the palette")));
            }
            if !working.contains(&involute(c)) {
                return Err(Error::MissingClass(format!("{} (involute of {c})", involute(c))));
            }
            bases.insert(c.clone(), cover.enumerate_equipments(c)?);
        }
        Ok(CoverSpaces {
            cover: cover.clone(),
            bases,
        })
    }

    pub fn basis(&self, c: &GraphClass) -> Result<&EquipmentBasis> {
        self.bases.get(c).ok_or_else(|| Error::MissingClass(c.key()))
    }

    pub fn classes(&self) -> Vec<GraphClass> {
        self.bases.keys().cloned().collect()
    }

    /// `Φ` of the composed film with basis equipments at its vertices.
    pub fn film_value(&self, seq: &[GraphClass], labels: &[usize]) -> Result<Q> {
        let film = compose(seq)?;
        let boundary: Vec<(&EquipmentBasis, usize)> = seq
            .iter()
            .zip(labels)
            .map(|(c, &i)| Ok((self.basis(c)?, i)))
            .collect::<Result<_>>()?;
        film_phi(&self.cover, &film, &boundary)
    }
}

/// All bilinear and trilinear forms from equipped-film counts.
pub fn build_graph_frobenius(spaces: &CoverSpaces) -> Result<GraphFrobeniusData> {
    let classes = spaces.classes();
    let mut data = GraphFrobeniusData {
        palette: spaces.cover.palette.clone(),
        spaces: BTreeMap::new(),
        form2: BTreeMap::new(),
        form3: BTreeMap::new(),
    };
    for c in &classes {
        let e = spaces.basis(c)?;
        data.spaces.insert(c.clone(), e.labels());
        let star = involute(c);
        let es = spaces.basis(&star)?;
        let film = compose(&[c.clone(), star.clone()])?;
        let prepared = PreparedFilm::new(&spaces.cover, &film)?;
        let mut g = Matrix::zeros(e.len(), es.len());
        for i in 0..e.len() {
            for j in 0..es.len() {
                g[(i, j)] = prepared.value(&film, &[(e, i), (es, j)])?;
            }
        }
        data.form2.insert(c.clone(), g);
    }
    for (seq, film) in composable_sequences(&classes, 3) {
        let e: Vec<&EquipmentBasis> = seq.iter().map(|c| spaces.basis(c)).collect::<Result<_>>()?;
        let prepared = PreparedFilm::new(&spaces.cover, &film)?;
        let mut t = Form3::zero([e[0].len(), e[1].len(), e[2].len()]);
        for i in 0..e[0].len() {
            for j in 0..e[1].len() {
                for k in 0..e[2].len() {
                    let v = prepared.value(&film, &[(e[0], i), (e[1], j), (e[2], k)])?;
                    t.set([i, j, k], v);
                }
            }
        }
        data.form3.insert(seq, t);
    }
    Ok(data)
}

/// `φ_σ^s` of each class sum of `G_s`, as matrices in the equipment basis:
/// `g` moves the first point of the `s`-edge. Fails if the result depends on
/// the chosen member of an orbit.
pub fn phi_action(spaces: &CoverSpaces, sigma: &GraphClass, s: &Color) -> Result<Vec<Matrix>> {
    let e = spaces.basis(sigma)?;
    let action = spaces.cover.action(s)?;
    let classes = action.group.conjugacy_classes();
    let n = e.len();
    let Some(k) = e.colors.iter().position(|c| c == s) else {
        // the group acts trivially: a class sum acts as its size
        return Ok(classes
            .iter()
            .map(|c| Matrix::identity(n).scale(&Q::from_integer((c.len() as i64).into())))
            .collect());
    };
    let members = e.members();
    classes
        .iter()
        .map(|class| {
            let image = |pairs: &[(usize, usize)]| -> Result<Vec<i64>> {
                let mut col = vec![0i64; n];
                for &g in class {
                    let mut moved = pairs.to_vec();
                    moved[k].0 = action.act(g, moved[k].0);
                    let j = e
                        .orbit_of(&moved)
                        .ok_or_else(|| Error::MissingClass("moved equipment".into()))?;
                    col[j] += 1;
                }
                Ok(col)
            };
            let mut m = Matrix::zeros(n, n);
            for (i, orbit) in members.iter().enumerate() {
                let col = image(&e.equipments[i].pairs)?;
                for other in orbit {
                    if image(other)? != col {
                        return Err(Error::BundleVerificationFailed(format!(
                            "φ on {sigma} depends on the orbit member of equipment {i}"
                        )));
                    }
                }
                for (j, c) in col.into_iter().enumerate() {
                    m[(j, i)] = Q::from_integer(c.into());
                }
            }
            Ok(m)
        })
        .collect()
}

/// `Σ_{g² = e} g` in the class-sum basis.
pub fn crosscap_candidate(group: &FiniteGroup) -> Vec<Q> {
    group
        .conjugacy_classes()
        .iter()
        .map(|c| {
            if group.mul(c[0], c[0]) == 0 {
                Q::one()
            } else {
                Q::zero()
            }
        })
        .collect()
}

/// Assembles the full bundle without verifying it. The crosscap element is
/// the candidate `Σ_{g² = e} g` if it satisfies both crosscap conditions,
/// else the solution of `φ(U) = K_B` when that solution also squares to
/// `K_A*`, else the candidate.
pub fn build_bundle_unverified(cover: &GroupCover, working: &[GraphClass]) -> Result<GraphCardyBundle> {
    let spaces = CoverSpaces::new(cover, working)?;
    let graph = build_graph_frobenius(&spaces)?;
    let mut bundle = GraphCardyBundle {
        graph,
        closed: BTreeMap::new(),
        open_involution: BTreeMap::new(),
        phi: BTreeMap::new(),
        crosscap: BTreeMap::new(),
    };
    let colors: Vec<Color> = cover
        .palette
        .colors()
        .iter()
        .filter(|s| spaces.bases.contains_key(&GraphClass::segment((*s).clone())))
        .cloned()
        .collect();
    for s in &colors {
        let group = &cover.action(s)?.group;
        let a = build_center_algebra(group);
        let seg = GraphClass::segment(s.clone());
        let e = spaces.basis(&seg)?;
        let star = involution_map(e, e)?;
        let inv = Matrix::from_fn(e.len(), e.len(), |i, j| if star[j] == i { Q::one() } else { Q::zero() });
        bundle.open_involution.insert(s.clone(), inv);
        for c in spaces.classes().iter().filter(|c| c.has_color(s)) {
            bundle.phi.insert((s.clone(), c.clone()), phi_action(&spaces, c, s)?);
        }
        bundle.crosscap.insert(s.clone(), vec![Q::zero(); a.dim()]);
        bundle.closed.insert(s.clone(), a);
    }
    for s in &colors {
        let u = choose_crosscap(&bundle, s, &cover.action(s)?.group)?;
        bundle.crosscap.insert(s.clone(), u);
    }
    Ok(bundle)
}

/// Outcome of the search for a crosscap element `U^s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CrosscapSearch {
    Found(Vec<Q>),
    /// No element of `A^s` satisfies both conditions; the reason says why.
    Absent(String),
    /// The candidate and the particular solution fail, and `φ(U) = K_B`
    /// leaves a family of this dimension unexplored.
    Undecided(usize),
}

/// Looks for `U` with `φ(U) = K_B` and `U² = K_A*`: first the candidate
/// `Σ_{g² = e} g`, then the solutions of the linear condition. When `φ` is
/// injective the linear condition pins `U` down, so a failure of the
/// quadratic one proves that no `U` exists.
pub fn search_crosscap(bundle: &GraphCardyBundle, s: &Color, group: &FiniteGroup) -> Result<CrosscapSearch> {
    let cd = bundle.cardy(s)?;
    let kb = casimir(&cd.b)?;
    let ka = twisted_casimir(&cd.a)?;
    let ok = |u: &[Q]| cd.phi.apply(u) == kb && cd.a.mul(u, u) == ka;
    let candidate = crosscap_candidate(group);
    if ok(&candidate) {
        return Ok(CrosscapSearch::Found(candidate));
    }
    Ok(match cd.phi.solve_affine(&kb) {
        None => CrosscapSearch::Absent(format!("φ(U) = K_B has no solution in A^{s}")),
        Some((u, _)) if ok(&u) => CrosscapSearch::Found(u),
        Some((_, 0)) => CrosscapSearch::Absent(format!(
            "φ is injective on A^{s} and the only solution of φ(U) = K_B has U² ≠ K_A*"
        )),
        Some((_, d)) => CrosscapSearch::Undecided(d),
    })
}

fn choose_crosscap(bundle: &GraphCardyBundle, s: &Color, group: &FiniteGroup) -> Result<Vec<Q>> {
    Ok(match search_crosscap(bundle, s, group)? {
        CrosscapSearch::Found(u) => u,
        _ => crosscap_candidate(group),
    })
}

/// The bundle of a group cover, checked against every axiom; failures are
/// reported by name.
pub fn build_bundle(cover: &GroupCover, working: &[GraphClass]) -> Result<GraphCardyBundle> {
    let bundle = build_bundle_unverified(cover, working)?;
    let report = verify_graph_cardy(&bundle)?;
    if !report.is_ok() {
        let mut names: Vec<String> = report
            .failures()
            .map(|c| match &c.witness {
                Some(w) => format!("{} ({w})", c.name),
                None => c.name.clone(),
            })
            .collect();
        for (s, a) in &cover.actions {
            if !bundle.closed.contains_key(s) {
                continue;
            }
            match search_crosscap(&bundle, s, &a.group)? {
                CrosscapSearch::Absent(why) => names.push(format!("no crosscap element exists: {why}")),
                CrosscapSearch::Undecided(d) => {
                    names.push(format!("no crosscap element found for color {s}; a {d}-dimensional family is unexplored"))
                }
                CrosscapSearch::Found(_) => {}
            }
        }
        return Err(Error::BundleVerificationFailed(names.join("; ")));
    }
    Ok(bundle)
}

/// The regular action of `group` on every color of `palette`.
pub fn regular_cover(palette: &[&str], group: FiniteGroup) -> Result<GroupCover> {
    let palette = crate::graphs::Palette::new(palette.iter().copied())?;
    Ok(GroupCover::uniform(palette, &GroupAction::regular(group)))
}
