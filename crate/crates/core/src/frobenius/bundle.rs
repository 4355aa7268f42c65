use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::graphs::{involute, Color, GraphClass};
use crate::linalg::{basis_vector, is_zero_vec, Matrix};
use crate::rational::Q;
use crate::report::Report;

use super::equipped::{casimir, twisted_casimir, vec_string, verify_equipped, EquippedFrobenius};
use super::graph::{verify_graph_frobenius, Form3, GraphFrobeniusData};

/// A complete theory: closed algebras `A^s`, the graph-graded `B_★`, the
/// representations `φ_σ^s`, the crosscap elements `U^s` and the
/// involutions of the segment spaces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphCardyBundle {
    pub graph: GraphFrobeniusData,
    pub closed: BTreeMap<Color, EquippedFrobenius>,
    /// `*_{I_s}` on `B_{I_s}`.
    pub open_involution: BTreeMap<Color, Matrix>,
    /// `φ_σ^s(a_i)` for each basis element `a_i` of `A^s`, as matrices on
    /// coordinates of `B_σ`. Stored for classes with an `s`-edge.
    pub phi: BTreeMap<(Color, GraphClass), Vec<Matrix>>,
    pub crosscap: BTreeMap<Color, Vec<Q>>,
}

/// The Cardy-Frobenius data of one color, derived from a bundle.
#[derive(Clone, Debug)]
pub struct CardyData {
    pub color: Color,
    pub a: EquippedFrobenius,
    pub b: EquippedFrobenius,
    /// Column `i` is `φ^s(a_i)` in `B^s`.
    pub phi: Matrix,
    /// Column `k` is `φ*(b_k)` in `A^s`.
    pub phi_adjoint: Matrix,
    pub u: Vec<Q>,
}

impl GraphCardyBundle {
    pub fn colors(&self) -> Vec<Color> {
        self.closed.keys().cloned().collect()
    }

    pub fn closed_algebra(&self, s: &Color) -> Result<&EquippedFrobenius> {
        self.closed
            .get(s)
            .ok_or_else(|| Error::UnknownColor(s.to_string()))
    }

    /// `φ_σ^s(a)`; the identity when `σ` has no `s`-edge and nothing is stored.
    pub fn phi_operator(&self, s: &Color, sigma: &GraphClass, a: &[Q]) -> Result<Matrix> {
        let n = self.graph.dim(sigma)?;
        match self.phi.get(&(s.clone(), sigma.clone())) {
            Some(ms) => {
                if ms.len() != a.len() {
                    return Err(Error::DimensionMismatch(format!(
                        "A^{s} label has {} coordinates, expected {}",
                        a.len(),
                        ms.len()
                    )));
                }
                let mut out = Matrix::zeros(n, n);
                for (c, m) in a.iter().zip(ms) {
                    if !c.is_zero() {
                        out = out.add(&m.scale(c));
                    }
                }
                Ok(out)
            }
            None if !sigma.has_color(s) => Ok(Matrix::identity(n)),
            None => Err(Error::MissingClass(format!("phi for {s} on {sigma}"))),
        }
    }

    /// The algebra `B^s = B_{I_s}` with product from the forms, unit solved
    /// from the product, `l_B(x) = (x, 1)` and `*_{I_s}`.
    pub fn open_algebra(&self, s: &Color) -> Result<EquippedFrobenius> {
        let seg = GraphClass::segment(s.clone());
        let n = self.graph.dim(&seg)?;
        let t = self.graph.oriented_form3(&[seg.clone(), seg.clone(), seg.clone()])?;
        let g = self.graph.pairing(&seg)?;
        let hinv_t = g
            .inverse()
            .ok_or_else(|| Error::SingularPairing(seg.key()))?
            .transpose();
        let mut mult = vec![Q::zero(); n * n * n];
        for i in 0..n {
            for j in 0..n {
                let tv: Vec<Q> = (0..n).map(|k| t.get([i, j, k])).collect();
                if is_zero_vec(&tv) {
                    continue;
                }
                for (k, y) in hinv_t.apply(&tv).into_iter().enumerate() {
                    mult[(i * n + j) * n + k] = y;
                }
            }
        }
        let unit = solve_unit(&mult, n).ok_or_else(|| Error::NoUnit(s.to_string()))?;
        let functional = g.apply(&unit);
        let star = self
            .open_involution
            .get(s)
            .cloned()
            .ok_or_else(|| Error::UnknownColor(s.to_string()))?;
        EquippedFrobenius::new(self.graph.spaces[&seg].clone(), mult, unit, functional, star)
    }

    pub fn cardy(&self, s: &Color) -> Result<CardyData> {
        let a = self.closed_algebra(s)?.clone();
        let b = self.open_algebra(s)?;
        let seg = GraphClass::segment(s.clone());
        let cols: Vec<Vec<Q>> = (0..a.dim())
            .map(|i| Ok(self.phi_operator(s, &seg, &a.basis(i))?.apply(&b.unit)))
            .collect::<Result<_>>()?;
        let phi = Matrix::from_fn(b.dim(), a.dim(), |k, i| cols[i][k].clone());
        let fa_inv_t = a
            .pairing_matrix()
            .inverse()
            .ok_or_else(|| Error::SingularPairing(format!("A^{s}")))?
            .transpose();
        let phi_adjoint = fa_inv_t.mul(&phi.transpose()).mul(&b.pairing_matrix().transpose());
        let u = self
            .crosscap
            .get(s)
            .cloned()
            .ok_or_else(|| Error::UnknownColor(s.to_string()))?;
        Ok(CardyData {
            color: s.clone(),
            a,
            b,
            phi,
            phi_adjoint,
            u,
        })
    }

    /// Re-expresses the bundle in new bases: `p` per class of the working
    /// set and `q` per color, both as `f_j = Σ_i m_ij d_i`.
    pub fn change_basis(
        &self,
        p: &BTreeMap<GraphClass, Matrix>,
        q: &BTreeMap<Color, Matrix>,
    ) -> Result<Self> {
        let missing = |what: String| Error::DimensionMismatch(format!("no basis change for {what}"));
        let graph = self.graph.change_basis(p)?;
        let mut closed = BTreeMap::new();
        let mut crosscap = BTreeMap::new();
        let mut open_involution = BTreeMap::new();
        for (s, a) in &self.closed {
            let qs = q.get(s).ok_or_else(|| missing(s.to_string()))?;
            closed.insert(s.clone(), a.change_basis(qs)?);
            let qinv = qs.inverse().ok_or_else(|| missing(s.to_string()))?;
            crosscap.insert(s.clone(), qinv.apply(&self.crosscap[s]));
        }
        for (s, m) in &self.open_involution {
            let seg = GraphClass::segment(s.clone());
            let ps = p.get(&seg).ok_or_else(|| missing(seg.key()))?;
            let pinv = ps.inverse().ok_or_else(|| missing(seg.key()))?;
            open_involution.insert(s.clone(), pinv.mul(m).mul(ps));
        }
        let mut phi = BTreeMap::new();
        for ((s, sigma), ms) in &self.phi {
            let ps = p.get(sigma).ok_or_else(|| missing(sigma.key()))?;
            let pinv = ps.inverse().ok_or_else(|| missing(sigma.key()))?;
            let qs = q.get(s).ok_or_else(|| missing(s.to_string()))?;
            let conj: Vec<Matrix> = ms.iter().map(|m| pinv.mul(m).mul(ps)).collect();
            let n = ps.rows();
            let new: Vec<Matrix> = (0..qs.cols())
                .map(|k| {
                    let mut acc = Matrix::zeros(n, n);
                    for (i, m) in conj.iter().enumerate() {
                        let c = &qs[(i, k)];
                        if !c.is_zero() {
                            acc = acc.add(&m.scale(c));
                        }
                    }
                    acc
                })
                .collect();
            phi.insert((s.clone(), sigma.clone()), new);
        }
        Ok(GraphCardyBundle {
            graph,
            closed,
            open_involution,
            phi,
            crosscap,
        })
    }
}

fn solve_unit(mult: &[Q], n: usize) -> Option<Vec<Q>> {
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for j in 0..n {
        for k in 0..n {
            let d = if j == k { Q::one() } else { Q::zero() };
            rows.push((0..n).map(|i| mult[(i * n + j) * n + k].clone()).collect());
            rhs.push(d.clone());
            rows.push((0..n).map(|i| mult[(j * n + i) * n + k].clone()).collect());
            rhs.push(d);
        }
    }
    Matrix::from_rows(rows).solve(&rhs)
}

/// The Cardy-Frobenius axioms of one color.
pub fn verify_cardy(bundle: &GraphCardyBundle, s: &Color) -> Result<Report> {
    let mut r = Report::new();
    let cd = match bundle.cardy(s) {
        Ok(cd) => cd,
        Err(e @ (Error::NoUnit(_) | Error::SingularPairing(_))) => {
            r.fail("B^s is an equipped Frobenius algebra", e.to_string());
            return Ok(r);
        }
        Err(e) => return Err(e),
    };
    let (a, b) = (&cd.a, &cd.b);
    r.extend(verify_equipped(a).scoped("A"));
    r.record(
        "A commutative",
        (!a.is_commutative()).then(|| "x y != y x for some basis pair".to_string()),
    );
    r.extend(verify_equipped(b).scoped("B"));

    let phi = |x: &[Q]| cd.phi.apply(x);
    let ea: Vec<Vec<Q>> = (0..a.dim()).map(|i| a.basis(i)).collect();
    let eb: Vec<Vec<Q>> = (0..b.dim()).map(|i| b.basis(i)).collect();

    let mut w = (phi(&a.unit) != b.unit).then(|| "φ(1_A) != 1_B".to_string());
    'hom: for i in 0..a.dim() {
        for j in 0..a.dim() {
            if w.is_some() {
                break 'hom;
            }
            if phi(&a.mul(&ea[i], &ea[j])) != b.mul(&phi(&ea[i]), &phi(&ea[j])) {
                w = Some(format!("({}, {})", a.labels[i], a.labels[j]));
            }
        }
    }
    r.record("φ is a homomorphism", w);

    let mut w = None;
    'centre: for i in 0..a.dim() {
        let pa = phi(&ea[i]);
        for (k, bk) in eb.iter().enumerate() {
            if b.mul(&pa, bk) != b.mul(bk, &pa) {
                w = Some(format!("φ({}) and {}", a.labels[i], b.labels[k]));
                break 'centre;
            }
        }
    }
    r.record("φ(A) lies in the centre of B", w);

    let w = (0..a.dim())
        .find(|&i| phi(&a.star(&ea[i])) != b.star(&phi(&ea[i])))
        .map(|i| format!("a = {}", a.labels[i]));
    r.record("φ(x*) = φ(x)*", w);

    let mut w = None;
    'cardy: for x in 0..b.dim() {
        let px = cd.phi_adjoint.column(x);
        for y in 0..b.dim() {
            let lhs = a.pairing(&px, &cd.phi_adjoint.column(y));
            let mut tr = Q::zero();
            for (k, bk) in eb.iter().enumerate() {
                tr += &b.mul(&b.mul(&eb[x], bk), &eb[y])[k];
            }
            if lhs != tr {
                w = Some(format!(
                    "x = {}, y = {}: (φ*x, φ*y) = {lhs}, tr W = {tr}",
                    b.labels[x], b.labels[y]
                ));
                break 'cardy;
            }
        }
    }
    r.record("Cardy condition (φ*(x), φ*(y))_A = tr W_{x,y}", w);

    let u2 = a.mul(&cd.u, &cd.u);
    let kstar = twisted_casimir(a)?;
    r.record(
        "U² = K_A*",
        (u2 != kstar).then(|| format!("U² = {}, K_A* = {}", vec_string(&u2), vec_string(&kstar))),
    );
    let pu = phi(&cd.u);
    let kb = casimir(b)?;
    r.record(
        "φ(U) = K_B",
        (pu != kb).then(|| format!("φ(U) = {}, K_B = {}", vec_string(&pu), vec_string(&kb))),
    );
    Ok(r)
}

/// The full graph-Cardy-Frobenius axiom set, including the graph-Frobenius
/// axioms of `B_★`.
pub fn verify_graph_cardy(bundle: &GraphCardyBundle) -> Result<Report> {
    let mut r = verify_graph_frobenius(&bundle.graph)?;
    for s in bundle.colors() {
        r.extend(verify_cardy(bundle, &s)?.scoped(s.as_str()));
        r.extend(verify_representations(bundle, &s)?.scoped(s.as_str()));
    }
    Ok(r)
}

fn verify_representations(bundle: &GraphCardyBundle, s: &Color) -> Result<Report> {
    let mut r = Report::new();
    let g = &bundle.graph;
    let a = bundle.closed_algebra(s)?;
    let na = a.dim();

    let w = bundle
        .phi
        .iter()
        .find(|((c, sigma), ms)| c == s && !sigma.has_color(s) && ms.iter().any(|m| !m.is_zero()))
        .map(|((_, sigma), _)| format!("φ on {sigma} is nonzero"));
    r.record("φ_σ^s = 0 when σ has no s-edge", w);

    let mut w = None;
    for sigma in g.classes().iter().filter(|c| c.has_color(s)) {
        let n = g.dim(sigma)?;
        match bundle.phi.get(&(s.clone(), sigma.clone())) {
            Some(ms) if ms.len() == na && ms.iter().all(|m| m.rows() == n && m.cols() == n) => {}
            _ => {
                w = Some(format!("φ on {sigma} missing or misshapen"));
                break;
            }
        }
    }
    r.record("φ_σ^s defined on every σ with an s-edge", w);
    if !r.is_ok() {
        return Ok(r);
    }
    let classes: Vec<GraphClass> = g.classes().into_iter().filter(|c| c.has_color(s)).collect();
    let ops = |sigma: &GraphClass, x: &[Q]| bundle.phi_operator(s, sigma, x);

    let mut w = None;
    'rep: for sigma in &classes {
        let n = g.dim(sigma)?;
        if ops(sigma, &a.unit)? != Matrix::identity(n) {
            w = Some(format!("φ_{sigma}(1) != id"));
            break;
        }
        for i in 0..na {
            for j in 0..na {
                let lhs = ops(sigma, &a.mul(&a.basis(i), &a.basis(j)))?;
                let rhs = ops(sigma, &a.basis(i))?.mul(&ops(sigma, &a.basis(j))?);
                if lhs != rhs {
                    w = Some(format!("on {sigma} at ({}, {})", a.labels[i], a.labels[j]));
                    break 'rep;
                }
            }
        }
    }
    r.record("φ_σ^s is a representation", w);

    let seg = GraphClass::segment(s.clone());
    let w = match bundle.open_algebra(s) {
        Ok(b) => {
            let mut w = None;
            'seg: for i in 0..na {
                let m = ops(&seg, &a.basis(i))?;
                let pa = m.apply(&b.unit);
                for k in 0..b.dim() {
                    let bk = basis_vector(b.dim(), k);
                    if m.apply(&bk) != b.mul(&pa, &bk) {
                        w = Some(format!("a = {}, b = {}", a.labels[i], b.labels[k]));
                        break 'seg;
                    }
                }
            }
            w
        }
        Err(e) => Some(e.to_string()),
    };
    r.record("φ_{I_s}(a)(b) = φ(a) b", w);

    let mut w = None;
    'bil: for sigma in &classes {
        let gm = g.pairing(sigma)?;
        let star = involute(sigma);
        for i in 0..na {
            let lhs = ops(sigma, &a.basis(i))?.transpose().mul(gm);
            let rhs = gm.mul(&ops(&star, &a.basis(i))?);
            if lhs != rhs {
                w = Some(format!("on {sigma} with a = {}", a.labels[i]));
                break 'bil;
            }
        }
    }
    r.record("(φ(a) x1, x2) = (x1, φ(a) x2)", w);

    let mut w = None;
    'tri: for (key, form) in &g.form3 {
        let slots: Vec<usize> = (0..3).filter(|&t| key[t].has_color(s)).collect();
        if slots.len() < 2 {
            continue;
        }
        for i in 0..na {
            let moved: Vec<Form3> = slots
                .iter()
                .map(|&t| {
                    let ids: Vec<Matrix> = (0..3).map(|u| Matrix::identity(form.dims[u])).collect();
                    let m = ops(&key[t], &a.basis(i))?;
                    let mut p: [&Matrix; 3] = [&ids[0], &ids[1], &ids[2]];
                    p[t] = &m;
                    Ok(form.transform(p))
                })
                .collect::<Result<_>>()?;
            if moved.windows(2).any(|w| w[0] != w[1]) {
                w = Some(format!(
                    "({}, {}, {}) with a = {}",
                    key[0], key[1], key[2], a.labels[i]
                ));
                break 'tri;
            }
        }
    }
    r.record("(φ(a) x1, x2, x3) = (x1, φ(a) x2, x3) = (x1, x2, φ(a) x3)", w);
    Ok(r)
}
