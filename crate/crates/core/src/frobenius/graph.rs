use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::foams::{compose, graph_cut, FilmSurface, Split};
use crate::graphs::{involute, GraphClass, Palette};
use crate::linalg::Matrix;
use crate::rational::Q;
use crate::report::Report;

/// A trilinear form stored by its nonzero entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Form3 {
    pub dims: [usize; 3],
    pub entries: BTreeMap<[usize; 3], Q>,
}

impl Form3 {
    pub fn zero(dims: [usize; 3]) -> Self {
        Form3 {
            dims,
            entries: BTreeMap::new(),
        }
    }

    pub fn get(&self, idx: [usize; 3]) -> Q {
        self.entries.get(&idx).cloned().unwrap_or_else(Q::zero)
    }

    pub fn set(&mut self, idx: [usize; 3], v: Q) {
        if v.is_zero() {
            self.entries.remove(&idx);
        } else {
            self.entries.insert(idx, v);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// `Σ T[i,j,k] x_i y_j z_k`.
    pub fn eval(&self, x: &[Q], y: &[Q], z: &[Q]) -> Q {
        let mut acc = Q::zero();
        for ([i, j, k], v) in &self.entries {
            if x[*i].is_zero() || y[*j].is_zero() || z[*k].is_zero() {
                continue;
            }
            acc += v * &x[*i] * &y[*j] * &z[*k];
        }
        acc
    }

    /// The same form with slots permuted cyclically: slot `t` of the result
    /// is slot `(t + r) % 3` of `self`.
    pub fn rotate(&self, r: usize) -> Form3 {
        let p = |t: usize| (t + r) % 3;
        Form3 {
            dims: [self.dims[p(0)], self.dims[p(1)], self.dims[p(2)]],
            entries: self
                .entries
                .iter()
                .map(|(k, v)| ([k[p(0)], k[p(1)], k[p(2)]], v.clone()))
                .collect(),
        }
    }

    /// Changes basis in every slot: new basis `f_j = Σ_i p_ij d_i`.
    pub fn transform(&self, p: [&Matrix; 3]) -> Form3 {
        let mut cur: BTreeMap<[usize; 3], Q> = self.entries.clone();
        for slot in 0..3 {
            let mut next: BTreeMap<[usize; 3], Q> = BTreeMap::new();
            for (k, v) in &cur {
                for a in 0..p[slot].cols() {
                    let c = &p[slot][(k[slot], a)];
                    if c.is_zero() {
                        continue;
                    }
                    let mut nk = *k;
                    nk[slot] = a;
                    *next.entry(nk).or_insert_with(Q::zero) += v * c;
                }
            }
            next.retain(|_, v| !v.is_zero());
            cur = next;
        }
        Form3 {
            dims: [p[0].cols(), p[1].cols(), p[2].cols()],
            entries: cur,
        }
    }
}

/// Least rotation of `seq` and the shift `r` with `least[t] = seq[(t + r) % n]`.
pub fn least_rotation(seq: &[GraphClass]) -> (Vec<GraphClass>, usize) {
    let n = seq.len();
    (0..n)
        .map(|r| ((0..n).map(|t| seq[(t + r) % n].clone()).collect::<Vec<_>>(), r))
        .min()
        .expect("non-empty sequence")
}

/// Every composable sequence of length `n` over `classes`, one per rotation orbit.
pub fn composable_sequences(classes: &[GraphClass], n: usize) -> Vec<(Vec<GraphClass>, FilmSurface)> {
    let mut out = Vec::new();
    if classes.is_empty() {
        return out;
    }
    let k = classes.len();
    let mut idx = vec![0usize; n];
    loop {
        let seq: Vec<GraphClass> = idx.iter().map(|&i| classes[i].clone()).collect();
        if least_rotation(&seq).0 == seq {
            if let Ok(f) = compose(&seq) {
                out.push((seq, f));
            }
        }
        let mut p = n;
        loop {
            if p == 0 {
                return out;
            }
            p -= 1;
            idx[p] += 1;
            if idx[p] < k {
                break;
            }
            idx[p] = 0;
        }
    }
}

/// The graph-graded space `B_★` restricted to a working set of classes, with
/// its bilinear and trilinear forms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphFrobeniusData {
    pub palette: Palette,
    /// Basis labels of `B_σ` for each class of the working set.
    pub spaces: BTreeMap<GraphClass, Vec<String>>,
    /// `G_σ[i][j] = (b_i, c_j)` for `b ∈ B_σ`, `c ∈ B_σ*`.
    pub form2: BTreeMap<GraphClass, Matrix>,
    /// Trilinear forms keyed by the least rotation of their class triple.
    pub form3: BTreeMap<Vec<GraphClass>, Form3>,
}

impl GraphFrobeniusData {
    pub fn classes(&self) -> Vec<GraphClass> {
        self.spaces.keys().cloned().collect()
    }

    pub fn contains(&self, c: &GraphClass) -> bool {
        self.spaces.contains_key(c)
    }

    pub fn dim(&self, c: &GraphClass) -> Result<usize> {
        self.spaces
            .get(c)
            .map(Vec::len)
            .ok_or_else(|| Error::MissingClass(c.key()))
    }

    pub fn pairing(&self, c: &GraphClass) -> Result<&Matrix> {
        self.form2.get(c).ok_or_else(|| Error::MissingClass(c.key()))
    }

    /// Coefficients `M` of `K_σ^⊗ = Σ M_ij b_i ⊗ c_j` in `B_σ ⊗ B_σ*`.
    pub fn copairing(&self, c: &GraphClass) -> Result<Matrix> {
        let g = self.pairing(c)?;
        g.inverse()
            .map(|m| m.transpose())
            .ok_or_else(|| Error::SingularPairing(c.key()))
    }

    /// The trilinear form on `seq`, slots in the given order.
    pub fn oriented_form3(&self, seq: &[GraphClass]) -> Result<Form3> {
        if seq.len() != 3 {
            return Err(Error::DimensionMismatch("trilinear forms take three classes".into()));
        }
        let dims = [self.dim(&seq[0])?, self.dim(&seq[1])?, self.dim(&seq[2])?];
        let (key, r) = least_rotation(seq);
        match self.form3.get(&key) {
            // key slot t is seq slot (t + r) % 3, so seq slot u is key slot (u + 3 - r) % 3
            Some(f) => Ok(f.rotate((3 - r) % 3)),
            None => Ok(Form3::zero(dims)),
        }
    }

    pub fn bilinear(&self, c: &GraphClass, x: &[Q], y: &[Q]) -> Result<Q> {
        Ok(self.pairing(c)?.bilinear(x, y))
    }

    pub fn trilinear(&self, seq: &[GraphClass], x: &[Q], y: &[Q], z: &[Q]) -> Result<Q> {
        Ok(self.oriented_form3(seq)?.eval(x, y, z))
    }

    /// Re-expresses all forms in new bases `f_j = Σ_i p_ij b_i` per class.
    pub fn change_basis(&self, p: &BTreeMap<GraphClass, Matrix>) -> Result<Self> {
        let get = |c: &GraphClass| -> Result<&Matrix> {
            p.get(c)
                .ok_or_else(|| Error::DimensionMismatch(format!("no basis change for {c}")))
        };
        let mut form2 = BTreeMap::new();
        for (c, g) in &self.form2 {
            let star = involute(c);
            form2.insert(c.clone(), get(c)?.transpose().mul(g).mul(get(&star)?));
        }
        let mut form3 = BTreeMap::new();
        for (k, f) in &self.form3 {
            form3.insert(k.clone(), f.transform([get(&k[0])?, get(&k[1])?, get(&k[2])?]));
        }
        Ok(GraphFrobeniusData {
            palette: self.palette.clone(),
            spaces: self.spaces.clone(),
            form2,
            form3,
        })
    }
}

/// The two sides of the crossing identity on a composable quadruple, as
/// sparse maps over basis quadruples in the sequence's slot order.
pub fn crossing_sides(
    b: &GraphFrobeniusData,
    film: &FilmSurface,
) -> Result<(BTreeMap<[usize; 4], Q>, BTreeMap<[usize; 4], Q>)> {
    let seq = film.class_sequence(0);
    let side = |split: Split| -> Result<BTreeMap<[usize; 4], Q>> {
        let cut = graph_cut(film, split)?;
        let tau = cut.class.clone();
        if !b.contains(&tau) {
            return Err(Error::MissingCutClass(tau.key()));
        }
        let m = b.copairing(&tau)?;
        let l_pos: Vec<usize> = (0..2).map(|t| (split.start + t) % 4).collect();
        let r_pos: Vec<usize> = (0..2).map(|t| (split.start + 2 + t) % 4).collect();
        let left = b.oriented_form3(&[seq[l_pos[0]].clone(), seq[l_pos[1]].clone(), tau.clone()])?;
        let right =
            b.oriented_form3(&[involute(&tau), seq[r_pos[0]].clone(), seq[r_pos[1]].clone()])?;
        let mut by_first: BTreeMap<usize, Vec<(usize, usize, &Q)>> = BTreeMap::new();
        for ([j, y, z], v) in &right.entries {
            by_first.entry(*j).or_default().push((*y, *z, v));
        }
        let mut out: BTreeMap<[usize; 4], Q> = BTreeMap::new();
        for ([x1, x2, i], v) in &left.entries {
            for j in 0..m.cols() {
                let mij = &m[(*i, j)];
                if mij.is_zero() {
                    continue;
                }
                let c = v * mij;
                for (y, z, w) in by_first.get(&j).into_iter().flatten() {
                    let mut key = [0usize; 4];
                    key[l_pos[0]] = *x1;
                    key[l_pos[1]] = *x2;
                    key[r_pos[0]] = *y;
                    key[r_pos[1]] = *z;
                    *out.entry(key).or_insert_with(Q::zero) += &c * *w;
                }
            }
        }
        out.retain(|_, v| !v.is_zero());
        Ok(out)
    };
    Ok((side(Split { start: 0, len: 2 })?, side(Split { start: 3, len: 2 })?))
}

pub fn verify_graph_frobenius(b: &GraphFrobeniusData) -> Result<Report> {
    let mut r = Report::new();
    let classes = b.classes();

    let w = classes
        .iter()
        .find(|c| !b.contains(&involute(c)))
        .map(|c| format!("{c}* is missing"));
    r.record("working set closed under involution", w);

    let mut w = None;
    for c in &classes {
        match b.form2.get(c) {
            None => {
                w = Some(format!("no bilinear form for {c}"));
                break;
            }
            Some(g) => {
                let (n, m) = (b.dim(c)?, b.dim(&involute(c)).unwrap_or(0));
                if g.rows() != n || g.cols() != m {
                    w = Some(format!("form on {c} has shape {}x{}", g.rows(), g.cols()));
                    break;
                }
            }
        }
    }
    r.record("bilinear forms defined on B_σ x B_σ*", w);
    if !r.is_ok() {
        return Ok(r);
    }
    let w = b
        .form2
        .keys()
        .find(|c| !b.contains(c))
        .map(|c| format!("form on {c} outside the working set"));
    r.record("(B_σ1, B_σ2) = 0 unless σ2 = σ1*", w);

    let w = classes
        .iter()
        .find(|c| b.form2[*c].rank() < b.dim(c).unwrap_or(0))
        .map(|c| format!("pairing on {c} is singular"));
    r.record("bilinear form nondegenerate", w);

    let w = classes
        .iter()
        .find(|c| b.form2[*c] != b.form2[&involute(c)].transpose())
        .map(|c| format!("(x, y)_{c} != (y, x)"));
    r.record("bilinear form symmetric", w);

    let mut w = None;
    for (k, f) in &b.form3 {
        if k.iter().any(|c| !b.contains(c)) {
            w = Some(format!("triple {k:?} outside the working set"));
            break;
        }
        let dims = [b.dim(&k[0])?, b.dim(&k[1])?, b.dim(&k[2])?];
        if f.dims != dims || f.entries.keys().any(|e| (0..3).any(|t| e[t] >= dims[t])) {
            return Err(Error::DimensionMismatch(format!(
                "trilinear form on {} {} {}",
                k[0], k[1], k[2]
            )));
        }
        if compose(k).is_err() && !f.is_zero() {
            w = Some(format!("({}, {}, {}) has no compatible surface", k[0], k[1], k[2]));
            break;
        }
    }
    r.record("(B_σ1, B_σ2, B_σ3) = 0 without a compatible surface", w);

    let triples = composable_sequences(&classes, 3);
    let w = triples
        .iter()
        .find(|(s, _)| !b.form3.contains_key(s))
        .map(|(s, _)| format!("no trilinear form for ({}, {}, {})", s[0], s[1], s[2]));
    r.record("trilinear forms defined on composable triples", w);

    let mut w = None;
    for (k, f) in &b.form3 {
        for rot in 1..3 {
            let rotated: Vec<GraphClass> = (0..3).map(|t| k[(t + rot) % 3].clone()).collect();
            if &rotated == k && f.rotate(rot) != *f {
                w = Some(format!("({}, {}, {}) under rotation by {rot}", k[0], k[1], k[2]));
            }
        }
    }
    r.record("trilinear form cyclically symmetric", w);

    let mut w = None;
    for (seq, film) in composable_sequences(&classes, 4) {
        let (lhs, rhs) = crossing_sides(b, &film)?;
        if lhs != rhs {
            let witness = lhs
                .iter()
                .find(|(k, v)| rhs.get(*k) != Some(*v))
                .map(|(k, _)| *k)
                .or_else(|| rhs.keys().find(|k| !lhs.contains_key(*k)).copied())
                .unwrap();
            w = Some(format!(
                "({}, {}, {}, {}) at basis {:?}",
                seq[0], seq[1], seq[2], seq[3], witness
            ));
            break;
        }
    }
    r.record("crossing identity", w);
    Ok(r)
}

/// Structure constants of `B_★`: `(x₁x₂, x₃) = (x₁, x₂, x₃)`. For basis
/// elements of `B_σ1` and `B_σ2` the product has one component in
/// `B_σ3*` for every composable triple `(σ1, σ2, σ3)`.
#[derive(Clone, Debug, Default)]
pub struct StarProduct {
    terms: BTreeMap<(GraphClass, GraphClass), Vec<(GraphClass, BTreeMap<(usize, usize), Vec<(usize, Q)>>)>>,
}

/// A sparse element of `B_★`: class ↦ coordinates.
pub type GradedVector = BTreeMap<GraphClass, BTreeMap<usize, Q>>;

impl StarProduct {
    pub fn mul_basis(&self, c1: &GraphClass, i: usize, c2: &GraphClass, j: usize) -> GradedVector {
        let mut out = GradedVector::new();
        if let Some(ts) = self.terms.get(&(c1.clone(), c2.clone())) {
            for (tau, table) in ts {
                if let Some(v) = table.get(&(i, j)) {
                    let slot = out.entry(tau.clone()).or_default();
                    for (k, c) in v {
                        *slot.entry(*k).or_insert_with(Q::zero) += c;
                    }
                }
            }
        }
        clean(&mut out);
        out
    }

    pub fn mul(&self, x: &GradedVector, y: &GradedVector) -> GradedVector {
        let mut out = GradedVector::new();
        for (c1, xv) in x {
            for (c2, yv) in y {
                for (i, a) in xv {
                    for (j, b) in yv {
                        for (tau, v) in self.mul_basis(c1, *i, c2, *j) {
                            let slot = out.entry(tau).or_default();
                            for (k, c) in v {
                                *slot.entry(k).or_insert_with(Q::zero) += a * b * c;
                            }
                        }
                    }
                }
            }
        }
        clean(&mut out);
        out
    }

    /// The product `B_σ × B_σ → B_σ` as a dense table, for `σ = σ*`.
    pub fn dense_table(&self, c: &GraphClass, n: usize) -> Vec<Q> {
        let mut mult = vec![Q::zero(); n * n * n];
        for i in 0..n {
            for j in 0..n {
                if let Some(v) = self.mul_basis(c, i, c, j).get(c) {
                    for (k, x) in v {
                        mult[(i * n + j) * n + k] = x.clone();
                    }
                }
            }
        }
        mult
    }
}

fn clean(v: &mut GradedVector) {
    for m in v.values_mut() {
        m.retain(|_, c| !c.is_zero());
    }
    v.retain(|_, m| !m.is_empty());
}

pub fn basis_element(c: &GraphClass, i: usize) -> GradedVector {
    GradedVector::from([(c.clone(), BTreeMap::from([(i, Q::from_integer(1.into()))]))])
}

pub fn product_from_forms(b: &GraphFrobeniusData) -> Result<StarProduct> {
    let classes = b.classes();
    let mut p = StarProduct::default();
    for (seq, _) in composable_sequences(&classes, 3) {
        // every rotation of a stored triple defines a product
        let mut seen = BTreeSet::new();
        for r in 0..3 {
            let s: Vec<GraphClass> = (0..3).map(|t| seq[(t + r) % 3].clone()).collect();
            if !seen.insert(s.clone()) {
                continue;
            }
            let t = b.oriented_form3(&s)?;
            let target = involute(&s[2]);
            if !b.contains(&target) {
                return Err(Error::MissingClass(target.key()));
            }
            // (y, c_k) with y ∈ B_target, c_k ∈ B_σ3: y = H^{-T} t
            let h = b.pairing(&target)?;
            let hinv_t = h
                .inverse()
                .ok_or_else(|| Error::SingularPairing(target.key()))?
                .transpose();
            let mut table: BTreeMap<(usize, usize), Vec<(usize, Q)>> = BTreeMap::new();
            let mut rows: BTreeMap<(usize, usize), Vec<Q>> = BTreeMap::new();
            for ([i, j, k], v) in &t.entries {
                rows.entry((*i, *j))
                    .or_insert_with(|| vec![Q::zero(); t.dims[2]])[*k] = v.clone();
            }
            for (ij, tv) in rows {
                let y = hinv_t.apply(&tv);
                let sparse: Vec<(usize, Q)> = y
                    .into_iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .collect();
                table.insert(ij, sparse);
            }
            p.terms
                .entry((s[0].clone(), s[1].clone()))
                .or_default()
                .push((target, table));
        }
    }
    Ok(p)
}

/// Associativity of `B_★` on basis triples within the working set.
pub fn check_associativity(b: &GraphFrobeniusData, p: &StarProduct) -> Result<Option<String>> {
    let classes = b.classes();
    for c1 in &classes {
        for c2 in &classes {
            for c3 in &classes {
                for i in 0..b.dim(c1)? {
                    for j in 0..b.dim(c2)? {
                        let xy = p.mul_basis(c1, i, c2, j);
                        for k in 0..b.dim(c3)? {
                            let z = basis_element(c3, k);
                            let lhs = p.mul(&xy, &z);
                            let rhs = p.mul(&basis_element(c1, i), &p.mul_basis(c2, j, c3, k));
                            if lhs != rhs {
                                return Ok(Some(format!(
                                    "({c1}#{i} {c2}#{j}) {c3}#{k} != {c1}#{i} ({c2}#{j} {c3}#{k})"
                                )));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(None)
}

/// The unit `1 ∈ B_{I_s}` for the product restricted to `B_{I_s}`.
pub fn find_unit(b: &GraphFrobeniusData, p: &StarProduct, segment: &GraphClass) -> Result<Vec<Q>> {
    let n = b.dim(segment)?;
    let table = p.dense_table(segment, n);
    // unknown u: Σ_i u_i (b_i b_j)_k = δ_jk and Σ_i u_i (b_j b_i)_k = δ_jk
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for j in 0..n {
        for k in 0..n {
            rows.push((0..n).map(|i| table[(i * n + j) * n + k].clone()).collect());
            rhs.push(if j == k { Q::from_integer(1.into()) } else { Q::zero() });
            rows.push((0..n).map(|i| table[(j * n + i) * n + k].clone()).collect());
            rhs.push(if j == k { Q::from_integer(1.into()) } else { Q::zero() });
        }
    }
    Matrix::from_rows(rows)
        .solve(&rhs)
        .ok_or_else(|| Error::NoUnit(segment.colors()[0].to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::named::*;
    use crate::rational::q;

    fn one_dim(classes: &[GraphClass]) -> GraphFrobeniusData {
        let palette = Palette::new(["a", "b", "c"]).unwrap();
        let spaces = classes.iter().map(|c| (c.clone(), vec!["x".to_string()])).collect();
        let form2 = classes
            .iter()
            .map(|c| (c.clone(), Matrix::from_rows(vec![vec![q(1)]])))
            .collect();
        let form3 = composable_sequences(classes, 3)
            .into_iter()
            .map(|(s, _)| {
                let mut f = Form3::zero([1, 1, 1]);
                f.set([0, 0, 0], q(1));
                (s, f)
            })
            .collect();
        GraphFrobeniusData {
            palette,
            spaces,
            form2,
            form3,
        }
    }

    fn working_set() -> Vec<GraphClass> {
        vec![segment("a"), segment("b"), segment("c"), theta("a", "b", "c")]
    }

    #[test]
    fn trivial_data_passes() {
        let b = one_dim(&working_set());
        let r = verify_graph_frobenius(&b).unwrap();
        assert!(r.is_ok(), "{r}");
        let p = product_from_forms(&b).unwrap();
        assert_eq!(check_associativity(&b, &p).unwrap(), None);
        assert_eq!(find_unit(&b, &p, &segment("a")).unwrap(), vec![q(1)]);
    }

    /// `B_{I_a}` = group algebra of Z/2 with `(x, y)` = coefficient of `e` in `xy`.
    fn z2_segment() -> GraphFrobeniusData {
        let a = segment("a");
        let mut f = Form3::zero([2, 2, 2]);
        for i in 0..2 {
            for j in 0..2 {
                f.set([i, j, (i + j) % 2], q(1));
            }
        }
        GraphFrobeniusData {
            palette: Palette::new(["a"]).unwrap(),
            spaces: BTreeMap::from([(a.clone(), vec!["e".into(), "g".into()])]),
            form2: BTreeMap::from([(a.clone(), Matrix::identity(2))]),
            form3: BTreeMap::from([(vec![a.clone(), a.clone(), a], f)]),
        }
    }

    #[test]
    fn perturbed_entry_breaks_crossing_and_associativity() {
        let b = z2_segment();
        assert!(verify_graph_frobenius(&b).unwrap().is_ok());
        let p = product_from_forms(&b).unwrap();
        assert_eq!(check_associativity(&b, &p).unwrap(), None);
        assert_eq!(find_unit(&b, &p, &segment("a")).unwrap(), vec![q(1), q(0)]);

        let mut bad = b.clone();
        bad.form3.values_mut().next().unwrap().set([0, 0, 0], q(2));
        let r = verify_graph_frobenius(&bad).unwrap();
        assert!(r.failed("crossing identity"), "{r}");
        let p = product_from_forms(&bad).unwrap();
        assert!(check_associativity(&bad, &p).unwrap().is_some());
    }

    #[test]
    fn rotation_lookup() {
        let t = theta("a", "b", "c");
        let (least, r) = least_rotation(&[t.clone(), segment("a"), segment("a")]);
        assert_eq!(least[(3 - r) % 3], t);
        let mut f = Form3::zero([1, 2, 3]);
        f.set([0, 1, 2], q(5));
        let g = f.rotate(1);
        assert_eq!(g.dims, [2, 3, 1]);
        assert_eq!(g.get([1, 2, 0]), q(5));
        assert_eq!(g.rotate(2), f);
    }

    #[test]
    fn composable_triples_over_the_working_set() {
        let seqs = composable_sequences(&working_set(), 3);
        // (I_s)^3 for each color and θ^3
        assert_eq!(seqs.len(), 4);
    }
}
