use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{basis_vector, dot, Matrix};
use crate::rational::{format_vec, Q};
use crate::report::Report;

/// A finite-dimensional algebra with unit, functional `l` and involution `*`.
///
/// `mult[(i * n + j) * n + k]` is the coefficient of `d_k` in `d_i d_j`.
/// The involution matrix maps coordinates: column `j` is `d_j*`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquippedFrobenius {
    pub labels: Vec<String>,
    mult: Vec<Q>,
    pub unit: Vec<Q>,
    pub functional: Vec<Q>,
    pub involution: Matrix,
}

impl EquippedFrobenius {
    pub fn new(
        labels: Vec<String>,
        mult: Vec<Q>,
        unit: Vec<Q>,
        functional: Vec<Q>,
        involution: Matrix,
    ) -> Result<Self> {
        let n = labels.len();
        if mult.len() != n * n * n
            || unit.len() != n
            || functional.len() != n
            || involution.rows() != n
            || involution.cols() != n
        {
            return Err(Error::DimensionMismatch(format!(
                "equipped algebra of dimension {n} has inconsistent tables"
            )));
        }
        Ok(EquippedFrobenius {
            labels,
            mult,
            unit,
            functional,
            involution,
        })
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> &Q {
        let n = self.dim();
        &self.mult[(i * n + j) * n + k]
    }

    pub fn structure_constants(&self) -> &[Q] {
        &self.mult
    }

    pub fn mul(&self, x: &[Q], y: &[Q]) -> Vec<Q> {
        let n = self.dim();
        let mut out = vec![Q::zero(); n];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                let c = xi * yj;
                let row = &self.mult[(i * n + j) * n..(i * n + j + 1) * n];
                for (o, m) in out.iter_mut().zip(row) {
                    if !m.is_zero() {
                        *o += &c * m;
                    }
                }
            }
        }
        out
    }

    pub fn basis(&self, i: usize) -> Vec<Q> {
        basis_vector(self.dim(), i)
    }

    pub fn l(&self, x: &[Q]) -> Q {
        dot(&self.functional, x)
    }

    pub fn star(&self, x: &[Q]) -> Vec<Q> {
        self.involution.apply(x)
    }

    pub fn pairing(&self, x: &[Q], y: &[Q]) -> Q {
        self.l(&self.mul(x, y))
    }

    /// `F_{ij} = l(d_i d_j)`.
    pub fn pairing_matrix(&self) -> Matrix {
        let n = self.dim();
        Matrix::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| self.structure_constant(i, j, k) * &self.functional[k])
                .sum()
        })
    }

    /// `F^{ij}`, the inverse of the pairing matrix.
    pub fn copairing(&self) -> Result<Matrix> {
        self.pairing_matrix()
            .inverse()
            .ok_or_else(|| Error::SingularPairing(format!("algebra {:?}", self.labels)))
    }

    pub fn is_commutative(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| (0..n).all(|k| self.structure_constant(i, j, k) == self.structure_constant(j, i, k))))
    }

    /// Re-expresses everything in the basis `f_j = Σ_i p_ij d_i`.
    pub fn change_basis(&self, p: &Matrix) -> Result<Self> {
        let n = self.dim();
        let inv = p
            .inverse()
            .ok_or_else(|| Error::DimensionMismatch("basis change is singular".into()))?;
        let cols: Vec<Vec<Q>> = (0..n).map(|j| p.column(j)).collect();
        let mut mult = Vec::with_capacity(n * n * n);
        for a in 0..n {
            for b in 0..n {
                mult.extend(inv.apply(&self.mul(&cols[a], &cols[b])));
            }
        }
        EquippedFrobenius::new(
            self.labels.clone(),
            mult,
            inv.apply(&self.unit),
            p.apply_left(&self.functional),
            inv.mul(&self.involution).mul(p),
        )
    }
}

pub fn casimir_tensor(f: &EquippedFrobenius) -> Result<Matrix> {
    f.copairing()
}

/// `K = Σ F^{ij} d_i d_j`.
pub fn casimir(f: &EquippedFrobenius) -> Result<Vec<Q>> {
    let inv = f.copairing()?;
    let n = f.dim();
    let mut out = vec![Q::zero(); n];
    for i in 0..n {
        for j in 0..n {
            let c = &inv[(i, j)];
            if c.is_zero() {
                continue;
            }
            for (o, v) in out.iter_mut().zip(f.mul(&f.basis(i), &f.basis(j))) {
                *o += c * v;
            }
        }
    }
    Ok(out)
}

/// `K* = Σ F^{ij} d_i d_j*`.
pub fn twisted_casimir(f: &EquippedFrobenius) -> Result<Vec<Q>> {
    let inv = f.copairing()?;
    let n = f.dim();
    let mut out = vec![Q::zero(); n];
    for i in 0..n {
        for j in 0..n {
            let c = &inv[(i, j)];
            if c.is_zero() {
                continue;
            }
            let dj = f.star(&f.basis(j));
            for (o, v) in out.iter_mut().zip(f.mul(&f.basis(i), &dj)) {
                *o += c * v;
            }
        }
    }
    Ok(out)
}

pub fn verify_equipped(f: &EquippedFrobenius) -> Report {
    let mut r = Report::new();
    let n = f.dim();
    let e: Vec<Vec<Q>> = (0..n).map(|i| f.basis(i)).collect();
    let name = |i: usize| f.labels[i].as_str();

    let mut w = None;
    'assoc: for i in 0..n {
        for j in 0..n {
            let ij = f.mul(&e[i], &e[j]);
            for k in 0..n {
                if f.mul(&ij, &e[k]) != f.mul(&e[i], &f.mul(&e[j], &e[k])) {
                    w = Some(format!("({}, {}, {})", name(i), name(j), name(k)));
                    break 'assoc;
                }
            }
        }
    }
    r.record("associativity", w);

    let w = (0..n)
        .find(|&i| f.mul(&f.unit, &e[i]) != e[i] || f.mul(&e[i], &f.unit) != e[i])
        .map(|i| format!("unit fails on {}", name(i)));
    r.record("two-sided unit", w);

    let pm = f.pairing_matrix();
    let w = (pm.rank() < n).then(|| {
        let kernel = (0..n)
            .find(|&i| pm.row(i).iter().all(Zero::is_zero))
            .map(|i| format!("({}, {}) row vanishes", name(i), name(i)));
        kernel.unwrap_or_else(|| format!("rank {} < {}", pm.rank(), n))
    });
    r.record("pairing nondegenerate", w);

    let sq = f.involution.mul(&f.involution);
    r.record(
        "involution squares to identity",
        (sq != Matrix::identity(n)).then(|| "(*)^2 != id".to_string()),
    );

    let w = (0..n)
        .find(|&i| f.l(&f.star(&e[i])) != f.l(&e[i]))
        .map(|i| format!("l({0}*) != l({0})", name(i)));
    r.record("l(x*) = l(x)", w);

    let mut w = None;
    'anti: for i in 0..n {
        for j in 0..n {
            let lhs = f.star(&f.mul(&e[i], &e[j]));
            let rhs = f.mul(&f.star(&e[j]), &f.star(&e[i]));
            if lhs != rhs {
                w = Some(format!("({}, {})", name(i), name(j)));
                break 'anti;
            }
        }
    }
    r.record("(xy)* = y* x*", w);

    let twisted = Matrix::from_fn(n, n, |i, j| f.pairing(&e[i], &f.star(&e[j])));
    r.record(
        "twisted pairing l(x y*) nondegenerate",
        (twisted.rank() < n).then(|| format!("rank {} < {}", twisted.rank(), n)),
    );
    r
}

/// Renders `x` as a sum of labeled basis elements.
pub fn describe(f: &EquippedFrobenius, x: &[Q]) -> String {
    let mut parts = Vec::new();
    for (i, c) in x.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        if c.is_one() {
            parts.push(f.labels[i].clone());
        } else {
            parts.push(format!("{}*{}", c, f.labels[i]));
        }
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

pub(crate) fn vec_string(x: &[Q]) -> String {
    format!("[{}]", format_vec(x))
}
