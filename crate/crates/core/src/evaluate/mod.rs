//! The functional `Φ` on labeled foams: chain contraction on film surfaces,
//! closed formulas on 2-manifold pieces, and Casimir legs between them.

mod axioms;

pub use axioms::{admissible_cuts, check_axioms, cut_value, disjoint_union, insertion_terms, label_with};

use std::cell::RefCell;
use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::foams::{graph_cut_named, CyclicFoam, FilmSurface, Mark, Patch, Sign, Split};
use crate::frobenius::{casimir, CardyData, GraphCardyBundle};
use crate::graphs::{Color, GraphClass};
use crate::linalg::{basis_vector, Matrix};
use crate::rational::Q;

/// A foam with a vector at every film vertex (in `B_σ` of its vertex
/// graph), every free-circle vertex (in `B^s`) and every interior point
/// (in `A^s`), keyed by name.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledFoam {
    pub foam: CyclicFoam,
    pub labels: BTreeMap<String, Vec<Q>>,
}

impl LabeledFoam {
    pub fn new(foam: CyclicFoam, labels: BTreeMap<String, Vec<Q>>) -> Self {
        LabeledFoam { foam, labels }
    }

    /// A film surface whose vertex labels are given in cyclic order of its
    /// single component.
    pub fn from_film(film: FilmSurface, labels: Vec<Vec<Q>>) -> Result<Self> {
        let order = film
            .components()
            .first()
            .cloned()
            .ok_or_else(|| Error::InvalidSurface("empty film".into()))?;
        if labels.len() != order.len() || film.components().len() != 1 {
            return Err(Error::DimensionMismatch("one label per vertex of a connected film".into()));
        }
        let labels = order
            .iter()
            .zip(labels)
            .map(|(&v, x)| (film.name(v).to_string(), x))
            .collect();
        Ok(LabeledFoam::new(CyclicFoam::from_film(film), labels))
    }

    fn label(&self, name: &str) -> Result<&Vec<Q>> {
        self.labels
            .get(name)
            .ok_or_else(|| Error::UnlabeledPoint(name.to_string()))
    }

    /// Every mark and vertex carries a vector of the right dimension.
    pub fn check(&self, bundle: &GraphCardyBundle) -> Result<()> {
        let film = &self.foam.film;
        for v in 0..film.vertex_count() {
            let (class, _, _) = film.vertex_graph_at(v)?;
            expect_dim(film.name(v), self.label(film.name(v))?, bundle.graph.dim(&class)?)?;
        }
        for p in &self.foam.patches {
            let a = bundle.closed_algebra(&p.color)?.dim();
            for m in &p.points {
                expect_dim(&m.name, self.label(&m.name)?, a)?;
            }
            let b = bundle.graph.dim(&GraphClass::segment(p.color.clone()))?;
            for m in p.free.iter().flatten() {
                expect_dim(&m.name, self.label(&m.name)?, b)?;
            }
        }
        Ok(())
    }
}

fn expect_dim(name: &str, x: &[Q], n: usize) -> Result<()> {
    if x.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "label of {name} has {} coordinates, expected {n}",
            x.len()
        )));
    }
    Ok(())
}

/// Precomputed algebraic data for repeated evaluation.
pub struct Evaluator<'a> {
    pub bundle: &'a GraphCardyBundle,
    cardy: BTreeMap<Color, std::result::Result<CardyData, String>>,
    copairing_a: BTreeMap<Color, Matrix>,
    casimir_a: BTreeMap<Color, Vec<Q>>,
    trace: RefCell<Option<Vec<String>>>,
}

impl<'a> Evaluator<'a> {
    pub fn new(bundle: &'a GraphCardyBundle) -> Result<Self> {
        let mut copairing_a = BTreeMap::new();
        let mut casimir_a = BTreeMap::new();
        let mut cardy = BTreeMap::new();
        for (s, a) in &bundle.closed {
            copairing_a.insert(s.clone(), a.copairing()?);
            casimir_a.insert(s.clone(), casimir(a)?);
            cardy.insert(s.clone(), bundle.cardy(s).map_err(|e| e.to_string()));
        }
        Ok(Evaluator {
            bundle,
            cardy,
            copairing_a,
            casimir_a,
            trace: RefCell::new(None),
        })
    }

    /// Starts recording a line per decomposition step.
    pub fn with_trace(self) -> Self {
        *self.trace.borrow_mut() = Some(Vec::new());
        self
    }

    pub fn take_trace(&self) -> Vec<String> {
        self.trace.borrow_mut().as_mut().map(std::mem::take).unwrap_or_default()
    }

    fn note(&self, line: impl FnOnce() -> String) {
        if let Some(t) = self.trace.borrow_mut().as_mut() {
            t.push(line());
        }
    }

    pub fn cardy(&self, s: &Color) -> Result<&CardyData> {
        match self.cardy.get(s) {
            Some(Ok(cd)) => Ok(cd),
            Some(Err(m)) => Err(Error::NoUnit(format!("{s}: {m}"))),
            None => Err(Error::UnknownColor(s.to_string())),
        }
    }

    /// `Φ` of a connected film surface with `x[v]` at vertex `v`.
    pub fn film_value(&self, film: &FilmSurface, x: &[Vec<Q>]) -> Result<Q> {
        if !film.is_connected() {
            return Err(Error::InvalidSurface("film surface is not connected".into()));
        }
        let order = &film.components()[0];
        let seq = film.class_sequence(0);
        let g = &self.bundle.graph;
        match order.len() {
            0 | 1 => Err(Error::InvalidSurface(
                "Φ is defined on film surfaces with at least two vertices".into(),
            )),
            2 => g.bilinear(&seq[0], &x[order[0]], &x[order[1]]),
            3 => g.trilinear(&seq, &x[order[0]], &x[order[1]], &x[order[2]]),
            n => {
                let fresh = |base: &str| {
                    (0..)
                        .map(|k| format!("{base}{k}"))
                        .find(|n| film.vertex_index(n).is_none())
                        .expect("an unused name")
                };
                let cut = graph_cut_named(film, Split { start: 0, len: 2 }, &fresh("q+"), &fresh("q-"))?;
                let m = g.copairing(&cut.class)?;
                let dim = m.rows();
                let mut xl = vec![Vec::new(); cut.left.vertex_count()];
                for (i, &v) in cut.left_vertices.iter().enumerate() {
                    xl[i] = x[v].clone();
                }
                let mut t = Vec::with_capacity(dim);
                for i in 0..dim {
                    xl[cut.plus] = basis_vector(dim, i);
                    t.push(self.film_value(&cut.left, &xl)?);
                }
                let y = m.apply_left(&t);
                let mut xr = vec![Vec::new(); cut.right.vertex_count()];
                for (i, &v) in cut.right_vertices.iter().enumerate() {
                    xr[i] = x[v].clone();
                }
                xr[cut.minus] = y;
                self.note(|| format!("chain: {n} vertices, cut class {}", cut.class));
                self.film_value(&cut.right, &xr)
            }
        }
    }

    /// `Φ` of a connected film surface built from a cyclic class sequence.
    pub fn eval_film(&self, seq: &[(GraphClass, Vec<Q>)]) -> Result<Q> {
        let classes: Vec<GraphClass> = seq.iter().map(|(c, _)| c.clone()).collect();
        let film = crate::foams::compose(&classes)?;
        let order = film.components()[0].clone();
        let mut x = vec![Vec::new(); film.vertex_count()];
        for (&v, (c, xi)) in order.iter().zip(seq) {
            expect_dim(film.name(v), xi, self.bundle.graph.dim(c)?)?;
            x[v] = xi.clone();
        }
        self.film_value(&film, &x)
    }

    fn normalized_a(&self, s: &Color, x: &[Q], sign: Sign) -> Result<Vec<Q>> {
        Ok(match sign {
            Sign::Plus => x.to_vec(),
            Sign::Minus => self.bundle.closed_algebra(s)?.star(x),
        })
    }

    fn normalized_b(&self, s: &Color, x: &[Q], sign: Sign) -> Result<Vec<Q>> {
        Ok(match sign {
            Sign::Plus => x.to_vec(),
            Sign::Minus => self
                .bundle
                .open_involution
                .get(s)
                .ok_or_else(|| Error::UnknownColor(s.to_string()))?
                .apply(x),
        })
    }

    /// The element `c_P` with `Φ(P) = l_A(c_P · legs)`: points, boundary
    /// circles through `φ*`, handles and crosscaps.
    fn patch_element(&self, lf: &LabeledFoam, p: &Patch) -> Result<Vec<Q>> {
        let s = &p.color;
        let a = self.bundle.closed_algebra(s)?;
        let mut c = a.unit.clone();
        for m in &p.points {
            c = a.mul(&c, &self.normalized_a(s, lf.label(&m.name)?, m.sign)?);
        }
        if !p.free.is_empty() || (!p.orientable && p.crosscaps > 0) {
            let cd = self.cardy(s)?;
            for circle in &p.free {
                let mut beta = cd.b.unit.clone();
                for m in circle {
                    beta = cd.b.mul(&beta, &self.normalized_b(s, lf.label(&m.name)?, m.sign)?);
                }
                c = a.mul(&c, &cd.phi_adjoint.apply(&beta));
            }
            for _ in 0..p.crosscaps {
                c = a.mul(&c, &cd.u);
            }
        }
        let k = &self.casimir_a[s];
        for _ in 0..p.genus {
            c = a.mul(&c, k);
        }
        Ok(c)
    }

    /// `Φ` of a patch without glued circles.
    pub fn eval_klein(&self, lf: &LabeledFoam, p: &Patch) -> Result<Q> {
        if !p.glued.is_empty() {
            return Err(Error::InvalidSurface("the patch is glued to the seam".into()));
        }
        let c = self.patch_element(lf, p)?;
        let v = self.bundle.closed_algebra(&p.color)?.l(&c);
        self.note(|| format!("closed piece of color {}: {v}", p.color));
        Ok(v)
    }

    /// `Φ` of one seam component given an `A^s` element on each of its
    /// disks; the element acts at the first vertex of the disk.
    fn seam_value(&self, lf: &LabeledFoam, ci: usize, disk_labels: &BTreeMap<usize, Vec<Q>>) -> Result<Q> {
        let film = &lf.foam.film;
        let (comp, verts, disks) = film.component_surface(ci);
        let mut x: Vec<Vec<Q>> = verts
            .iter()
            .map(|&v| lf.label(film.name(v)).cloned())
            .collect::<Result<_>>()?;
        let order = &comp.components()[0];
        for (local, &d) in disks.iter().enumerate() {
            let Some(a) = disk_labels.get(&d) else { continue };
            let disk = &comp.disks()[local];
            let v = *order
                .iter()
                .find(|v| disk.vertices.contains(v))
                .ok_or_else(|| Error::InvalidSurface("disk without vertices".into()))?;
            let (class, _, _) = comp.vertex_graph_at(v)?;
            x[v] = self.bundle.phi_operator(&disk.color, &class, a)?.apply(&x[v]);
        }
        self.film_value(&comp, &x)
    }

    /// `Φ` of a foam all of whose patches are plain disks.
    pub fn eval_film_marked(&self, lf: &LabeledFoam) -> Result<Q> {
        if let Some(p) = lf.foam.patches.iter().find(|p| !p.is_plain()) {
            return Err(Error::InvalidSurface(format!(
                "patch of color {} is not a plain disk",
                p.color
            )));
        }
        let labels = self.plain_disk_labels(lf, &lf.foam.patches.iter().collect::<Vec<_>>())?;
        let mut v = Q::one();
        for ci in 0..lf.foam.film.components().len() {
            v *= self.seam_value(lf, ci, &labels)?;
        }
        Ok(v)
    }

    fn plain_disk_labels(&self, lf: &LabeledFoam, patches: &[&Patch]) -> Result<BTreeMap<usize, Vec<Q>>> {
        let mut out = BTreeMap::new();
        for p in patches.iter().filter(|p| p.is_plain()) {
            if p.points.is_empty() {
                continue;
            }
            let a = self.bundle.closed_algebra(&p.color)?;
            let g = p.glued[0];
            let mut c = a.unit.clone();
            for m in &p.points {
                let x = self.normalized_a(&p.color, lf.label(&m.name)?, m.sign.times(g.sign))?;
                c = a.mul(&c, &x);
            }
            out.insert(g.disk, c);
        }
        Ok(out)
    }

    /// `Φ` of an arbitrary labeled foam.
    pub fn eval_foam(&self, lf: &LabeledFoam) -> Result<Q> {
        lf.foam.validate()?;
        let mut total = Q::one();
        for comp in lf.foam.connected_components() {
            let v = self.eval_component(lf, &comp.seam_components, &comp.patches)?;
            if v.is_zero() {
                return Ok(v);
            }
            total *= v;
        }
        Ok(total)
    }

    fn eval_component(&self, lf: &LabeledFoam, seams: &[usize], patch_ids: &[usize]) -> Result<Q> {
        let patches: Vec<&Patch> = patch_ids.iter().map(|&i| &lf.foam.patches[i]).collect();
        if seams.is_empty() {
            let [p] = patches[..] else {
                return Err(Error::InvalidSurface("a component without seam has one patch".into()));
            };
            return self.eval_klein(lf, p);
        }
        let plain = self.plain_disk_labels(lf, &patches)?;
        // Casimir legs from every glued circle of a non-plain patch
        struct Legs {
            color: Color,
            disks: Vec<(usize, Sign)>,
            tensor: BTreeMap<Vec<usize>, Q>,
        }
        let mut legs = Vec::new();
        for p in patches.iter().filter(|p| !p.is_plain()) {
            let c = self.patch_element(lf, p)?;
            let a = self.bundle.closed_algebra(&p.color)?;
            let f = &self.copairing_a[&p.color];
            let dual: Vec<Vec<Q>> = (0..a.dim()).map(|j| f.column(j)).collect();
            let r = p.glued.len();
            let mut tensor = BTreeMap::new();
            for idx in crate::groupcover::odometer(&vec![a.dim(); r]) {
                let mut y = c.clone();
                for &j in &idx {
                    y = a.mul(&y, &dual[j]);
                }
                let v = a.l(&y);
                if !v.is_zero() {
                    tensor.insert(idx, v);
                }
            }
            self.note(|| format!("patch of color {} cut off its {r} glued circle(s)", p.color));
            legs.push(Legs {
                color: p.color.clone(),
                disks: p.glued.iter().map(|g| (g.disk, g.sign)).collect(),
                tensor,
            });
        }
        let mut total = Q::zero();
        let choices: Vec<Vec<(&Vec<usize>, &Q)>> = legs.iter().map(|l| l.tensor.iter().collect()).collect();
        let sizes: Vec<usize> = choices.iter().map(Vec::len).collect();
        for pick in crate::groupcover::odometer(&sizes) {
            let mut coeff = Q::one();
            let mut labels = plain.clone();
            for ((l, ch), &k) in legs.iter().zip(&choices).zip(&pick) {
                let (idx, v) = ch[k];
                coeff *= v;
                let n = self.bundle.closed_algebra(&l.color)?.dim();
                for (&(d, sign), &j) in l.disks.iter().zip(idx) {
                    labels.insert(d, self.normalized_a(&l.color, &basis_vector(n, j), sign)?);
                }
            }
            let mut v = coeff;
            for &ci in seams {
                v *= self.seam_value(lf, ci, &labels)?;
                if v.is_zero() {
                    break;
                }
            }
            total += v;
        }
        Ok(total)
    }
}

/// `Φ` on a cyclic sequence of (class, vector) pairs.
pub fn eval_film(bundle: &GraphCardyBundle, seq: &[(GraphClass, Vec<Q>)]) -> Result<Q> {
    Evaluator::new(bundle)?.eval_film(seq)
}

pub fn eval_film_marked(bundle: &GraphCardyBundle, lf: &LabeledFoam) -> Result<Q> {
    lf.check(bundle)?;
    Evaluator::new(bundle)?.eval_film_marked(lf)
}

/// `Φ` of a single patch with free boundary only; labels are looked up by name.
pub fn eval_klein(bundle: &GraphCardyBundle, lf: &LabeledFoam, patch: usize) -> Result<Q> {
    let p = lf
        .foam
        .patches
        .get(patch)
        .ok_or_else(|| Error::InvalidSurface(format!("no patch {patch}")))?;
    Evaluator::new(bundle)?.eval_klein(lf, p)
}

pub fn eval_foam(bundle: &GraphCardyBundle, lf: &LabeledFoam) -> Result<Q> {
    lf.check(bundle)?;
    Evaluator::new(bundle)?.eval_foam(lf)
}

/// Reverses the reference orientation of an orientable patch: every sign
/// flips and every free circle is read backwards.
pub fn reorient_patch(p: &mut Patch) {
    for g in &mut p.glued {
        g.sign = g.sign.flip();
    }
    for m in &mut p.points {
        m.sign = m.sign.flip();
    }
    for c in &mut p.free {
        c.reverse();
        for m in c.iter_mut() {
            m.sign = m.sign.flip();
        }
    }
}

/// Rewrites every local orientation as `+` by applying the involutions to
/// labels, reorients orientable patches glued with `-` only, and drops
/// marks labeled with a unit.
pub fn normalize_foam(bundle: &GraphCardyBundle, lf: &LabeledFoam) -> Result<LabeledFoam> {
    let ev = Evaluator::new(bundle)?;
    let mut out = lf.clone();
    for p in &mut out.foam.patches {
        if p.orientable && !p.glued.is_empty() && p.glued.iter().all(|g| g.sign == Sign::Minus) {
            reorient_patch(p);
        }
        let s = p.color.clone();
        let a = bundle.closed_algebra(&s)?;
        let mut points = Vec::new();
        for m in &p.points {
            let x = ev.normalized_a(&s, lf.label(&m.name)?, m.sign)?;
            out.labels.insert(m.name.clone(), x.clone());
            if x != a.unit {
                points.push(Mark::new(&m.name, Sign::Plus));
            } else {
                out.labels.remove(&m.name);
            }
        }
        p.points = points;
        let unit_b = ev.cardy(&s).ok().map(|cd| cd.b.unit.clone());
        for c in &mut p.free {
            let mut kept = Vec::new();
            for m in c.iter() {
                let x = ev.normalized_b(&s, lf.label(&m.name)?, m.sign)?;
                if Some(&x) == unit_b.as_ref() {
                    out.labels.remove(&m.name);
                    continue;
                }
                out.labels.insert(m.name.clone(), x);
                kept.push(Mark::new(&m.name, Sign::Plus));
            }
            *c = kept;
        }
    }
    out.foam.validate()?;
    Ok(out)
}
