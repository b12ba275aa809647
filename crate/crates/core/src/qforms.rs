//! Quadratic and bilinear forms over `F_p`: diagonalisation, Witt index,
//! isotropic subspaces, hyperbolic pairings and orthogonal complements.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::combinatorics::PointSet;
use crate::error::{Error, Result};
use crate::field::{checked_size, decode, PrimeField};
use crate::linalg::{self, Matrix};
use crate::surfaces::Surface;

/// A linear or affine subspace of `F_p^m`, stored canonically: the basis is
/// in reduced row echelon form and the translate (if any) is reduced against
/// it, with a zero translate collapsed to `None`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subspace {
    ambient: usize,
    basis: Matrix,
    pivots: Vec<usize>,
    translate: Option<Vec<u32>>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Subspace {
        Subspace {
            ambient,
            basis: Vec::new(),
            pivots: Vec::new(),
            translate: None,
        }
    }

    pub fn full(ambient: usize) -> Subspace {
        let basis = linalg::identity(ambient);
        Subspace {
            ambient,
            basis,
            pivots: (0..ambient).collect(),
            translate: None,
        }
    }

    pub fn span(field: &PrimeField, ambient: usize, vectors: &[Vec<u32>]) -> Subspace {
        let rows: Matrix = vectors.iter().filter(|v| v.iter().any(|&x| x != 0)).cloned().collect();
        let (basis, pivots) = if rows.is_empty() {
            (Vec::new(), Vec::new())
        } else {
            linalg::rref(field, &rows)
        };
        Subspace {
            ambient,
            basis,
            pivots,
            translate: None,
        }
    }

    /// `translate + self`, in canonical form.
    pub fn shifted(&self, field: &PrimeField, translate: &[u32]) -> Subspace {
        let t = self.reduce(field, translate);
        let mut out = self.linear_part();
        if t.iter().any(|&x| x != 0) {
            out.translate = Some(t);
        }
        out
    }

    pub fn linear_part(&self) -> Subspace {
        Subspace {
            translate: None,
            ..self.clone()
        }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn translate(&self) -> Option<&[u32]> {
        self.translate.as_deref()
    }

    pub fn is_affine(&self) -> bool {
        self.translate.is_some()
    }

    /// `x` with its pivot coordinates eliminated against the basis.
    pub fn reduce(&self, field: &PrimeField, x: &[u32]) -> Vec<u32> {
        let mut y = x.to_vec();
        for (row, &pc) in self.basis.iter().zip(&self.pivots) {
            let c = y[pc];
            if c != 0 {
                for (yj, &rj) in y.iter_mut().zip(row) {
                    *yj = field.sub(*yj, field.mul(c, rj));
                }
            }
        }
        y
    }

    pub fn contains(&self, field: &PrimeField, x: &[u32]) -> bool {
        let y = match &self.translate {
            Some(t) => field.sub_vec(x, t),
            None => x.to_vec(),
        };
        self.reduce(field, &y).iter().all(|&c| c == 0)
    }

    /// Every element, in the order of the coefficient index.
    pub fn elements(&self, field: &PrimeField) -> Vec<Vec<u32>> {
        let k = self.dim();
        let p = field.p();
        let n = (p as usize).pow(k as u32);
        let zero = vec![0u32; self.ambient];
        let base = self.translate.as_ref().unwrap_or(&zero);
        (0..n)
            .map(|i| {
                let c = decode(p, k, i);
                let mut v = base.clone();
                for (ci, row) in c.iter().zip(&self.basis) {
                    if *ci != 0 {
                        for (vj, &rj) in v.iter_mut().zip(row) {
                            *vj = field.add(*vj, field.mul(*ci, rj));
                        }
                    }
                }
                v
            })
            .collect()
    }

    pub fn sum(&self, field: &PrimeField, other: &Subspace) -> Subspace {
        let mut rows = self.basis.clone();
        rows.extend(other.basis.iter().cloned());
        Subspace::span(field, self.ambient, &rows)
    }

    /// Intersection of the linear parts.
    pub fn intersect(&self, field: &PrimeField, other: &Subspace) -> Subspace {
        if self.dim() == 0 || other.dim() == 0 {
            return Subspace::zero(self.ambient);
        }
        let ann = linalg::nullspace(field, &other.basis, self.ambient);
        if ann.is_empty() {
            return self.linear_part();
        }
        // Coefficients c with sum c_i v_i orthogonal (dot) to every annihilator row.
        let constraints: Matrix = ann
            .iter()
            .map(|a| self.basis.iter().map(|v| field.dot(v, a)).collect())
            .collect();
        let coeffs = linalg::nullspace(field, &constraints, self.dim());
        let vecs: Matrix = coeffs
            .iter()
            .map(|c| {
                let mut v = vec![0u32; self.ambient];
                for (ci, row) in c.iter().zip(&self.basis) {
                    for (vj, &rj) in v.iter_mut().zip(row) {
                        *vj = field.add(*vj, field.mul(*ci, rj));
                    }
                }
                v
            })
            .collect();
        Subspace::span(field, self.ambient, &vecs)
    }

    /// Whether `self (+) other` is the whole ambient space.
    pub fn is_complement(&self, field: &PrimeField, other: &Subspace) -> bool {
        self.dim() + other.dim() == self.ambient && self.sum(field, other).dim() == self.ambient
    }
}

/// Every `k`-dimensional linear subspace of `F_p^m`, in canonical order.
pub fn all_subspaces(field: &PrimeField, m: usize, k: usize) -> Result<Vec<Subspace>> {
    checked_size(field.p(), m * k.max(1))?;
    let p = field.p();
    let mut out = Vec::new();
    let mut pivots = Vec::with_capacity(k);
    fn choose(
        start: usize,
        m: usize,
        k: usize,
        pivots: &mut Vec<usize>,
        f: &mut dyn FnMut(&[usize]),
    ) {
        if pivots.len() == k {
            f(pivots);
            return;
        }
        for c in start..m {
            pivots.push(c);
            choose(c + 1, m, k, pivots, f);
            pivots.pop();
        }
    }
    choose(0, m, k, &mut pivots, &mut |piv| {
        let free: Vec<(usize, usize)> = piv
            .iter()
            .enumerate()
            .flat_map(|(i, &pc)| {
                (pc + 1..m)
                    .filter(|c| !piv.contains(c))
                    .map(move |c| (i, c))
            })
            .collect();
        let n = (p as usize).pow(free.len() as u32);
        for idx in 0..n {
            let vals = decode(p, free.len(), idx);
            let mut basis = vec![vec![0u32; m]; k];
            for (i, &pc) in piv.iter().enumerate() {
                basis[i][pc] = 1;
            }
            for (&(i, c), &v) in free.iter().zip(&vals) {
                basis[i][c] = v;
            }
            out.push(Subspace {
                ambient: m,
                basis,
                pivots: piv.to_vec(),
                translate: None,
            });
        }
    });
    out.sort();
    Ok(out)
}

/// Every `k`-dimensional affine subspace of `F_p^m`.
pub fn all_affine_subspaces(field: &PrimeField, m: usize, k: usize) -> Result<Vec<Subspace>> {
    let p = field.p();
    let mut out = Vec::new();
    for lin in all_subspaces(field, m, k)? {
        let free: Vec<usize> = (0..m).filter(|c| !lin.pivots.contains(c)).collect();
        for idx in 0..(p as usize).pow(free.len() as u32) {
            let vals = decode(p, free.len(), idx);
            let mut t = vec![0u32; m];
            for (&c, &v) in free.iter().zip(&vals) {
                t[c] = v;
            }
            out.push(lin.shifted(field, &t));
        }
    }
    out.sort();
    Ok(out)
}

/// A symmetric bilinear form `x o y = x^T A y` with quadratic form
/// `Q(x) = x o x`.
#[derive(Clone, Debug)]
pub struct QuadraticSpace {
    field: PrimeField,
    a: Matrix,
    rank: usize,
    witt: OnceLock<Option<usize>>,
}

impl PartialEq for QuadraticSpace {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.a == other.a
    }
}

impl QuadraticSpace {
    pub fn new(field: &PrimeField, a: Matrix) -> Result<QuadraticSpace> {
        let m = a.len();
        for row in &a {
            if row.len() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    got: row.len(),
                });
            }
        }
        let a: Matrix = a
            .into_iter()
            .map(|r| r.into_iter().map(|x| x % field.p()).collect())
            .collect();
        for i in 0..m {
            for j in 0..i {
                if a[i][j] != a[j][i] {
                    return Err(Error::BadParameter {
                        scenario: "QuadraticSpace".into(),
                        name: "A",
                        value: format!("{a:?}"),
                        reason: "matrix is not symmetric".into(),
                    });
                }
            }
        }
        let rank = if m == 0 { 0 } else { linalg::rank(field, &a) };
        Ok(QuadraticSpace {
            field: field.clone(),
            a,
            rank,
            witt: OnceLock::new(),
        })
    }

    pub fn diagonal(field: &PrimeField, diag: &[u32]) -> QuadraticSpace {
        let m = diag.len();
        let a = (0..m)
            .map(|i| (0..m).map(|j| if i == j { diag[i] % field.p() } else { 0 }).collect())
            .collect();
        QuadraticSpace::new(field, a).expect("diagonal matrices are symmetric")
    }

    /// The dot form `x . x` on `F_p^m`.
    pub fn dot(field: &PrimeField, m: usize) -> QuadraticSpace {
        QuadraticSpace::diagonal(field, &vec![1; m])
    }

    /// `Q(x1, x2) = x1 . x2` on `F_p^n x F_p^n`.
    pub fn hyperbolic(field: &PrimeField, n: usize) -> QuadraticSpace {
        let half = field.inv(2);
        let mut a = vec![vec![0u32; 2 * n]; 2 * n];
        for i in 0..n {
            a[i][n + i] = half;
            a[n + i][i] = half;
        }
        QuadraticSpace::new(field, a).expect("symmetric by construction")
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn matrix(&self) -> &Matrix {
        &self.a
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn degenerate_dim(&self) -> usize {
        self.dim() - self.rank
    }

    pub fn is_degenerate(&self) -> bool {
        self.rank < self.dim()
    }

    pub fn bilinear(&self, x: &[u32], y: &[u32]) -> u32 {
        let ay = linalg::mat_vec(&self.field, &self.a, y);
        self.field.dot(x, &ay)
    }

    pub fn eval(&self, x: &[u32]) -> u32 {
        self.bilinear(x, x)
    }

    pub fn determinant(&self) -> u32 {
        linalg::determinant(&self.field, &self.a)
    }

    /// Witt index via the determinant and parity classification.
    pub fn witt_index(&self) -> Result<usize> {
        if self.is_degenerate() {
            return Err(Error::DegenerateForm {
                rank: self.rank,
                dim: self.dim(),
            });
        }
        let cached = self.witt.get_or_init(|| {
            let m = self.dim();
            if m % 2 == 1 {
                return Some((m - 1) / 2);
            }
            let n = m / 2;
            if n == 0 {
                return Some(0);
            }
            let det_square = self.field.is_square(self.determinant());
            let parity_even = (n * (self.field.p() as usize - 1) / 2) % 2 == 0;
            Some(if det_square == parity_even { n } else { n - 1 })
        });
        Ok(cached.expect("set for non-degenerate forms"))
    }

    pub fn is_totally_isotropic(&self, v: &Subspace) -> bool {
        let b = v.basis();
        b.iter()
            .enumerate()
            .all(|(i, x)| b[i..].iter().all(|y| self.bilinear(x, y) == 0))
    }

    /// All totally isotropic linear subspaces of dimension `k`.
    pub fn totally_isotropic(&self, k: usize) -> Result<Vec<Subspace>> {
        let f = &self.field;
        let m = self.dim();
        checked_size(f.p(), m)?;
        if k == 0 {
            return Ok(vec![Subspace::zero(m)]);
        }
        // Isotropic lines, one normalised representative each.
        let lines: Vec<Vec<u32>> = (1..(f.p() as usize).pow(m as u32))
            .filter_map(|i| {
                let v = decode(f.p(), m, i);
                let lead = *v.iter().find(|&&x| x != 0).unwrap();
                (lead == 1 && self.eval(&v) == 0).then_some(v)
            })
            .collect();
        let mut level: BTreeSet<Subspace> =
            lines.iter().map(|v| Subspace::span(f, m, std::slice::from_ref(v))).collect();
        for _ in 1..k {
            let mut next = BTreeSet::new();
            for s in &level {
                for v in &lines {
                    if s.contains(f, v) || s.basis().iter().any(|b| self.bilinear(b, v) != 0) {
                        continue;
                    }
                    let mut rows = s.basis().clone();
                    rows.push(v.clone());
                    next.insert(Subspace::span(f, m, &rows));
                }
            }
            level = next;
        }
        Ok(level.into_iter().collect())
    }
}

/// `(M, D)` with `M^T A M = D` diagonal and `M` invertible.
pub fn diagonalize(q: &QuadraticSpace) -> (Matrix, QuadraticSpace) {
    let f = q.field();
    let a = q.matrix();
    let m = q.dim();
    let mut mm = linalg::identity(m);
    let cur = |mm: &Matrix| linalg::congruence(f, a, mm);
    for k in 0..m {
        let mut b = cur(&mm);
        if b[k][k] == 0 {
            if let Some(i) = (k + 1..m).find(|&i| b[i][i] != 0) {
                for row in mm.iter_mut() {
                    row.swap(k, i);
                }
            } else if let Some((i, j)) = (k..m)
                .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
                .find(|&(i, j)| b[i][j] != 0)
            {
                // All remaining diagonal entries vanish: e_i += e_j makes
                // the new diagonal entry 2 b_ij, then move it to slot k.
                for row in mm.iter_mut() {
                    row[i] = f.add(row[i], row[j]);
                    row.swap(k, i);
                }
            } else {
                break;
            }
            b = cur(&mm);
        }
        let inv = f.inv(b[k][k]);
        for j in k + 1..m {
            if b[k][j] != 0 {
                let c = f.mul(b[k][j], inv);
                for row in mm.iter_mut() {
                    row[j] = f.sub(row[j], f.mul(c, row[k]));
                }
            }
        }
    }
    let d = cur(&mm);
    let diag: Vec<u32> = (0..m).map(|i| d[i][i]).collect();
    (mm, QuadraticSpace::diagonal(f, &diag))
}

pub fn witt_index(q: &QuadraticSpace) -> Result<usize> {
    q.witt_index()
}

/// All maximal totally isotropic subspaces of a non-degenerate form.
/// A form of Witt index zero yields the empty set.
pub fn enumerate_max_isotropic(q: &QuadraticSpace) -> Result<Vec<Subspace>> {
    let w = q.witt_index()?;
    if w == 0 {
        return Ok(Vec::new());
    }
    q.totally_isotropic(w)
}

/// A totally isotropic `V` paired against `W` by `w_i o v_j = delta_ij`.
#[derive(Clone, Debug)]
pub struct IsotropicPairing {
    pub space: Subspace,
    pub w_basis: Matrix,
    pub v_basis: Matrix,
}

impl IsotropicPairing {
    /// The matrix `w_i o v_j`.
    pub fn gram(&self, q: &QuadraticSpace) -> Matrix {
        self.w_basis
            .iter()
            .map(|w| self.v_basis.iter().map(|v| q.bilinear(w, v)).collect())
            .collect()
    }
}

pub fn complementary_isotropic(q: &QuadraticSpace, w: &Subspace) -> Result<IsotropicPairing> {
    let f = q.field();
    let m = q.dim();
    if m % 2 != 0 || q.is_degenerate() {
        return Err(Error::NotMaximalIsotropic(
            "form must be non-degenerate of even dimension".into(),
        ));
    }
    let n = m / 2;
    if q.witt_index()? != n {
        return Err(Error::NotMaximalIsotropic(format!(
            "Witt index {} < {n}",
            q.witt_index()?
        )));
    }
    if w.dim() != n || w.is_affine() || w.ambient() != m || !q.is_totally_isotropic(w) {
        return Err(Error::NotMaximalIsotropic(format!(
            "W has dimension {} and must be a totally isotropic {n}-space",
            w.dim()
        )));
    }
    let wa = linalg::mat_mul(f, w.basis(), q.matrix());
    let u: Matrix = (0..n)
        .map(|j| {
            let e: Vec<u32> = (0..n).map(|i| u32::from(i == j)).collect();
            linalg::solve(f, &wa, &e).expect("non-degenerate form pairs W with a dual")
        })
        .collect();
    let half = f.inv(2);
    let v: Matrix = (0..n)
        .map(|j| {
            let mut vj = u[j].clone();
            for k in 0..n {
                let c = f.neg(f.mul(q.bilinear(&u[j], &u[k]), half));
                vj = f.add_vec(&vj, &f.scale_vec(c, &w.basis()[k]));
            }
            vj
        })
        .collect();
    Ok(IsotropicPairing {
        space: Subspace::span(f, m, &v),
        w_basis: w.basis().clone(),
        v_basis: v,
    })
}

/// `W^perp = { v : v o w = 0 for all w in W }`.
pub fn orthogonal_complement(q: &QuadraticSpace, w: &Subspace) -> Subspace {
    let f = q.field();
    let m = q.dim();
    if w.dim() == 0 {
        return Subspace::full(m);
    }
    let rows = linalg::mat_mul(f, w.basis(), q.matrix());
    Subspace::span(f, m, &linalg::nullspace(f, &rows, m))
}

/// `|W|^{-1} sum_{w in W} e(x o w)`, the character-sum indicator of `W^perp`.
pub fn orthogonal_indicator(q: &QuadraticSpace, w: &Subspace, x: &[u32]) -> Complex64 {
    let f = q.field();
    let elems = w.linear_part().elements(f);
    let s: Complex64 = elems.iter().map(|v| f.char_eval(q.bilinear(x, v))).sum();
    s / elems.len() as f64
}

/// The Galilean map `(x, Q(x)) -> (x + t, Q(x + t))` applied to `E`, where
/// `t` is a point of the surface.
pub fn galilean(s: &Surface, t: &[u32], e: &PointSet) -> Result<PointSet> {
    let f = s.field();
    if !s.contains(t) {
        return Err(Error::NotOnSurface(t.to_vec()));
    }
    let n = s.dim() - 1;
    let mut out = Vec::with_capacity(e.len());
    for x in e.points() {
        if !s.contains(x) {
            return Err(Error::NotOnSurface(x.clone()));
        }
        let xi = f.add_vec(&x[..n], &t[..n]);
        out.push(s.lift(&xi));
    }
    Ok(PointSet::new(f, s.dim(), out))
}

/// Which of the three tables governs a surface of dimension `d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum AmbientClass {
    /// `d` odd, Witt index `(d-1)/2`.
    OddPlus,
    /// `d` odd, Witt index `(d-3)/2`.
    OddMinus,
    Even,
}

pub fn ambient_class(q: &QuadraticSpace) -> Result<AmbientClass> {
    let d = q.dim() + 1;
    if d % 2 == 0 {
        return Ok(AmbientClass::Even);
    }
    Ok(if q.witt_index()? == (d - 1) / 2 {
        AmbientClass::OddPlus
    } else {
        AmbientClass::OddMinus
    })
}

/// Rank, radical dimension and Witt index of a restricted form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
pub struct SubsurfaceType {
    pub rank: usize,
    pub degenerate_dim: usize,
    pub witt: usize,
}

/// The triples the tables allow for a `d`-dimensional surface; struck
/// entries are left out.
pub fn allowed_subsurface_types(d: usize, class: AmbientClass) -> Vec<SubsurfaceType> {
    let d = d as i64;
    let rows: Vec<(i64, Vec<i64>)> = match class {
        AmbientClass::OddPlus => vec![
            (3, vec![d - 3, d - 5]),
            (4, vec![d - 5]),
            (5, vec![d - 5, d - 7]),
            (6, vec![d - 7]),
            (7, vec![d - 9]),
        ],
        AmbientClass::OddMinus => vec![(3, vec![d - 3, d - 5]), (4, vec![d - 5]), (5, vec![d - 7])],
        AmbientClass::Even => vec![
            (3, vec![d - 4]),
            (4, vec![d - 4, d - 6]),
            (5, vec![d - 6]),
            (6, vec![d - 8]),
        ],
    };
    let mut out = Vec::new();
    for (off, witts) in rows {
        let r = d - off;
        if r < 1 || r < d - 7 {
            continue;
        }
        for w2 in witts {
            if w2 >= 0 && w2 % 2 == 0 {
                out.push(SubsurfaceType {
                    rank: r as usize,
                    degenerate_dim: (d - 3 - r) as usize,
                    witt: (w2 / 2) as usize,
                });
            }
        }
    }
    out
}

/// Classify `Q` restricted to `V`.
pub fn classify_subsurface(q: &QuadraticSpace, v: &Subspace) -> Result<SubsurfaceType> {
    let f = q.field();
    let b = v.basis();
    let gram: Matrix = b
        .iter()
        .map(|x| b.iter().map(|y| q.bilinear(x, y)).collect())
        .collect();
    let restricted = QuadraticSpace::new(f, gram)?;
    let r = restricted.rank();
    if r == 0 {
        return Err(Error::FullyDegenerate);
    }
    let (_, dq) = diagonalize(&restricted);
    let nonzero: Vec<u32> = (0..dq.dim())
        .map(|i| dq.matrix()[i][i])
        .filter(|&x| x != 0)
        .collect();
    let witt = QuadraticSpace::diagonal(f, &nonzero).witt_index()?;
    Ok(SubsurfaceType {
        rank: r,
        degenerate_dim: v.dim() - r,
        witt,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn witt_examples() {
        let f3 = PrimeField::new(3).unwrap();
        let f5 = PrimeField::new(5).unwrap();
        assert_eq!(QuadraticSpace::diagonal(&f5, &[1, 1]).witt_index().unwrap(), 1);
        assert_eq!(QuadraticSpace::diagonal(&f3, &[1, 1]).witt_index().unwrap(), 0);
        for p in [3, 5, 7, 11] {
            let f = PrimeField::new(p).unwrap();
            assert_eq!(QuadraticSpace::hyperbolic(&f, 1).witt_index().unwrap(), 1);
        }
        assert!(matches!(
            QuadraticSpace::diagonal(&f5, &[1, 0]).witt_index(),
            Err(Error::DegenerateForm { .. })
        ));
    }

    #[test]
    fn diagonalize_hyperbolic_plane() {
        let f = PrimeField::new(5).unwrap();
        let q = QuadraticSpace::new(&f, vec![vec![0, 1], vec![1, 0]]).unwrap();
        let (m, d) = diagonalize(&q);
        assert_eq!(&linalg::congruence(&f, q.matrix(), &m), d.matrix());
        assert_ne!(linalg::determinant(&f, &m), 0);
        assert_eq!(d.matrix()[0][1], 0);
    }

    #[test]
    fn diagonal_is_fixed() {
        let f = PrimeField::new(7).unwrap();
        let q = QuadraticSpace::diagonal(&f, &[3, 5, 1]);
        let (m, d) = diagonalize(&q);
        assert_eq!(m, linalg::identity(3));
        assert_eq!(d, q);
    }

    #[test]
    fn axes_are_the_isotropic_lines_of_x1x2() {
        let f = PrimeField::new(5).unwrap();
        let q = QuadraticSpace::hyperbolic(&f, 1);
        let got = enumerate_max_isotropic(&q).unwrap();
        let want = vec![
            Subspace::span(&f, 2, &[vec![0, 1]]),
            Subspace::span(&f, 2, &[vec![1, 0]]),
        ];
        let mut want = want;
        want.sort();
        assert_eq!(got, want);
        let f3 = PrimeField::new(3).unwrap();
        assert!(enumerate_max_isotropic(&QuadraticSpace::dot(&f3, 2)).unwrap().is_empty());
    }

    #[test]
    fn pairing_for_x1x2() {
        let f = PrimeField::new(7).unwrap();
        let q = QuadraticSpace::hyperbolic(&f, 1);
        let w = Subspace::span(&f, 2, &[vec![1, 0]]);
        let pair = complementary_isotropic(&q, &w).unwrap();
        assert_eq!(pair.gram(&q), vec![vec![1]]);
        assert_eq!(pair.v_basis[0][0], 0);
        assert!(q.is_totally_isotropic(&pair.space));
    }

    #[test]
    fn complement_of_zero_and_lagrangian() {
        let f = PrimeField::new(5).unwrap();
        let q = QuadraticSpace::hyperbolic(&f, 1);
        assert_eq!(orthogonal_complement(&q, &Subspace::zero(2)), Subspace::full(2));
        let w = Subspace::span(&f, 2, &[vec![1, 0]]);
        assert_eq!(orthogonal_complement(&q, &w), w);
    }

    #[test]
    fn subspace_counts() {
        let f = PrimeField::new(3).unwrap();
        // Gaussian binomial [4 choose 2]_3 = 130.
        assert_eq!(all_subspaces(&f, 4, 2).unwrap().len(), 130);
        assert_eq!(all_affine_subspaces(&f, 2, 1).unwrap().len(), 12);
    }

    #[test]
    fn isotropic_plane_is_fully_degenerate() {
        let f = PrimeField::new(3).unwrap();
        let q = QuadraticSpace::hyperbolic(&f, 2);
        let v = Subspace::span(&f, 4, &[vec![1, 0, 0, 0], vec![0, 1, 0, 0]]);
        assert!(matches!(classify_subsurface(&q, &v), Err(Error::FullyDegenerate)));
    }
}
