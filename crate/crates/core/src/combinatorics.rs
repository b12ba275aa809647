//! Additive energy, VH structure, incidences between points and the
//! hyperplanes `H(x)`, greedy decompositions into affine pieces, planar
//! covers, and the energy-exponent calculus.

use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{checked_size, decode, encode, FFunction, PrimeField};
use crate::fourier::fourier_transform;
use crate::qforms::{all_subspaces, enumerate_max_isotropic, galilean, QuadraticSpace, Subspace};
use crate::surfaces::{Surface, SurfaceKind};

/// A finite set of points of `F_p^d`, kept sorted and deduplicated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet {
    field: PrimeField,
    dim: usize,
    points: Vec<Vec<u32>>,
}

impl PointSet {
    /// Panics if a point has the wrong length or a coordinate `>= p`.
    pub fn new(field: &PrimeField, dim: usize, mut points: Vec<Vec<u32>>) -> PointSet {
        for x in &points {
            assert!(
                x.len() == dim && x.iter().all(|&c| c < field.p()),
                "point {x:?} is not in F_{}^{dim}",
                field.p()
            );
        }
        points.sort_unstable();
        points.dedup();
        PointSet {
            field: field.clone(),
            dim,
            points,
        }
    }

    pub fn empty(field: &PrimeField, dim: usize) -> PointSet {
        PointSet::new(field, dim, Vec::new())
    }

    /// Lift parameters `xi` to surface points `(xi, Q(xi))`.
    pub fn from_params<'a>(s: &Surface, params: impl IntoIterator<Item = &'a [u32]>) -> PointSet {
        PointSet::new(s.field(), s.dim(), params.into_iter().map(|xi| s.lift(xi)).collect())
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<u32>] {
        &self.points
    }

    pub fn contains(&self, x: &[u32]) -> bool {
        self.points.binary_search_by(|p| p.as_slice().cmp(x)).is_ok()
    }

    /// Drop the last coordinate.
    pub fn params(&self) -> PointSet {
        PointSet::new(
            &self.field,
            self.dim - 1,
            self.points.iter().map(|x| x[..self.dim - 1].to_vec()).collect(),
        )
    }

    pub fn union(&self, other: &PointSet) -> PointSet {
        let mut pts = self.points.clone();
        pts.extend(other.points.iter().cloned());
        PointSet::new(&self.field, self.dim, pts)
    }

    pub fn difference(&self, other: &PointSet) -> PointSet {
        let pts = self.points.iter().filter(|x| !other.contains(x)).cloned().collect();
        PointSet::new(&self.field, self.dim, pts)
    }

    pub fn indicator(&self) -> Result<FFunction> {
        FFunction::indicator(&self.field, self.dim, self.points.iter().map(Vec::as_slice))
    }

    /// A uniformly random subset of `universe` of the given size.
    pub fn random_subset(universe: &PointSet, size: usize, rng: &mut impl Rng) -> PointSet {
        let pts: Vec<Vec<u32>> = universe
            .points
            .choose_multiple(rng, size.min(universe.len()))
            .cloned()
            .collect();
        PointSet::new(&universe.field, universe.dim, pts)
    }
}

fn check_ambient(a: &PointSet, b: &PointSet) -> Result<()> {
    if a.dim != b.dim || a.field != b.field {
        return Err(Error::DimensionMismatch {
            expected: a.dim,
            got: b.dim,
        });
    }
    Ok(())
}

/// How to count additive quadruples.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum EnergyMethod {
    /// Loop over `(a, b, c)` and look up `d = a + b - c`.
    QuadrupleLoop,
    /// `sum_s r(s)^2` over the representation function of `A + B`.
    Representation,
    /// `p^{-d} sum_xi |1_A^(xi)|^2 |1_B^(xi)|^2`, rounded.
    Fourier,
}

/// `Lambda(A, B) = #{(a, b, c, d) : a, c in A; b, d in B; a + b = c + d}`.
pub fn additive_energy(a: &PointSet, b: &PointSet, method: EnergyMethod) -> Result<u64> {
    check_ambient(a, b)?;
    let f = &a.field;
    match method {
        EnergyMethod::QuadrupleLoop => Ok(a
            .points
            .par_iter()
            .map(|x| {
                let mut n = 0u64;
                for y in &b.points {
                    let s = f.add_vec(x, y);
                    for z in &a.points {
                        if b.contains(&f.sub_vec(&s, z)) {
                            n += 1;
                        }
                    }
                }
                n
            })
            .sum()),
        EnergyMethod::Representation => {
            let mut r: HashMap<usize, u64> = HashMap::new();
            for x in &a.points {
                for y in &b.points {
                    *r.entry(encode(f.p(), &f.add_vec(x, y))).or_default() += 1;
                }
            }
            Ok(r.values().map(|c| c * c).sum())
        }
        EnergyMethod::Fourier => {
            checked_size(f.p(), a.dim)?;
            let fa = fourier_transform(&a.indicator()?);
            let fb = fourier_transform(&b.indicator()?);
            let s: f64 = fa
                .data
                .iter()
                .zip(&fb.data)
                .map(|(x, y)| x.norm_sqr() * y.norm_sqr())
                .sum();
            Ok((s / fa.data.len() as f64).round() as u64)
        }
    }
}

/// `Lambda(E) = Lambda(E, E)` through the representation function.
pub fn energy(e: &PointSet) -> u64 {
    additive_energy(e, e, EnergyMethod::Representation).expect("same ambient")
}

fn check_on_h3(e: &PointSet) -> Result<()> {
    if e.dim != 3 {
        return Err(Error::DimensionMismatch { expected: 3, got: e.dim });
    }
    let f = &e.field;
    for x in &e.points {
        if f.mul(x[0], x[1]) != x[2] {
            return Err(Error::NotOnSurface(x.clone()));
        }
    }
    Ok(())
}

/// The off-diagonal energy on the 3-dimensional hyperbolic paraboloid:
/// quadruples `a - d = c - b` with `b1 != d1` and `b2 != d2`.
pub fn energy_star(e: &PointSet) -> Result<u64> {
    check_on_h3(e)?;
    let f = &e.field;
    Ok(e.points
        .par_iter()
        .map(|a| {
            let mut n = 0u64;
            for b in &e.points {
                let s = f.add_vec(a, b);
                for c in &e.points {
                    let d = f.sub_vec(&s, c);
                    if b[0] != d[0] && b[1] != d[1] && e.contains(&d) {
                        n += 1;
                    }
                }
            }
            n
        })
        .sum())
}

/// Slice sizes of `E` on the vertical lines `x1 = j` and the horizontal
/// lines `x2 = k` of the 3-dimensional hyperbolic paraboloid.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct VhProfile {
    pub vertical: Vec<usize>,
    pub horizontal: Vec<usize>,
    pub max: usize,
}

impl VhProfile {
    /// Whether every VH line meets `E` in at most `p^alpha` points.
    pub fn is_vh(&self, p: u32, alpha: f64) -> bool {
        self.max as f64 <= f64::from(p).powf(alpha) + 1e-9
    }
}

pub fn vh_profile(e: &PointSet) -> Result<VhProfile> {
    check_on_h3(e)?;
    let p = e.field.p() as usize;
    let mut vertical = vec![0; p];
    let mut horizontal = vec![0; p];
    for x in &e.points {
        vertical[x[0] as usize] += 1;
        horizontal[x[1] as usize] += 1;
    }
    let max = vertical.iter().chain(&horizontal).copied().max().unwrap_or(0);
    Ok(VhProfile {
        vertical,
        horizontal,
        max,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct L52Report {
    pub energy: u64,
    pub bound: f64,
    pub ratio: f64,
}

/// `Lambda(E)` against `|E|^{5/2} + sum_j |E_j|^3 + sum_k |E^k|^3`.
pub fn energy_bound_l52(e: &PointSet) -> Result<L52Report> {
    let prof = vh_profile(e)?;
    let energy = energy(e);
    let cube = |v: &[usize]| v.iter().map(|&c| (c as f64).powi(3)).sum::<f64>();
    let bound = (e.len() as f64).powf(2.5) + cube(&prof.vertical) + cube(&prof.horizontal);
    let ratio = if bound > 0.0 { energy as f64 / bound } else { 0.0 };
    Ok(L52Report { energy, bound, ratio })
}

/// An affine hyperplane `{y : normal . y = offset}`, normalised so the first
/// nonzero entry of `normal` is 1. The zero normal stands for the whole
/// space.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
pub struct Hyperplane {
    pub normal: Vec<u32>,
    pub offset: u32,
}

impl Hyperplane {
    pub fn new(field: &PrimeField, normal: Vec<u32>, offset: u32) -> Hyperplane {
        match normal.iter().find(|&&c| c != 0) {
            None => Hyperplane { normal, offset: 0 },
            Some(&lead) => {
                let inv = field.inv(lead);
                Hyperplane {
                    normal: field.scale_vec(inv, &normal),
                    offset: field.mul(inv, offset),
                }
            }
        }
    }

    /// `H(x) = {y : x o y = x o x}` for the parameter `x` of a surface point.
    pub fn of_param(q: &QuadraticSpace, x: &[u32]) -> Hyperplane {
        let f = q.field();
        let normal = crate::linalg::mat_vec(f, q.matrix(), x);
        Hyperplane::new(f, normal, q.eval(x))
    }

    pub fn is_whole_space(&self) -> bool {
        self.normal.iter().all(|&c| c == 0)
    }

    pub fn contains(&self, field: &PrimeField, y: &[u32]) -> bool {
        field.dot(&self.normal, y) == self.offset
    }

    /// Every proper affine hyperplane of `F_p^m`, in canonical order.
    pub fn all(field: &PrimeField, m: usize) -> Result<Vec<Hyperplane>> {
        let n = checked_size(field.p(), m)?;
        let mut out = Vec::new();
        for i in 1..n {
            let v = decode(field.p(), m, i);
            if v.iter().find(|&&c| c != 0) == Some(&1) {
                for c in 0..field.p() {
                    out.push(Hyperplane { normal: v.clone(), offset: c });
                }
            }
        }
        out.sort();
        Ok(out)
    }
}

/// A multiset of hyperplanes stored as distinct items with multiplicities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperplaneFamily {
    field: PrimeField,
    dim: usize,
    items: Vec<(Hyperplane, usize)>,
}

impl HyperplaneFamily {
    pub fn new(field: &PrimeField, dim: usize, planes: impl IntoIterator<Item = Hyperplane>) -> HyperplaneFamily {
        let mut counts: BTreeMap<Hyperplane, usize> = BTreeMap::new();
        for h in planes {
            *counts.entry(h).or_default() += 1;
        }
        HyperplaneFamily {
            field: field.clone(),
            dim,
            items: counts.into_iter().collect(),
        }
    }

    /// `L_B = {H(b) : b in B}` for surface points `B`.
    pub fn from_surface_points(q: &QuadraticSpace, b: &PointSet) -> HyperplaneFamily {
        let m = q.dim();
        HyperplaneFamily::new(q.field(), m, b.points.iter().map(|x| Hyperplane::of_param(q, &x[..m])))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn items(&self) -> &[(Hyperplane, usize)] {
        &self.items
    }

    /// Size counted with multiplicity.
    pub fn len(&self) -> usize {
        self.items.iter().map(|(_, c)| c).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn distinct(&self) -> usize {
        self.items.len()
    }

    pub fn max_multiplicity(&self) -> usize {
        self.items.iter().map(|(_, c)| *c).max().unwrap_or(0)
    }
}

/// `|I(L, P)|`, counting each hyperplane with its multiplicity.
pub fn incidence_count(p: &PointSet, l: &HyperplaneFamily) -> Result<u64> {
    if p.dim != l.dim {
        return Err(Error::DimensionMismatch {
            expected: l.dim,
            got: p.dim,
        });
    }
    let f = &p.field;
    Ok(l.items
        .iter()
        .map(|(h, c)| *c as u64 * p.points.iter().filter(|x| h.contains(f, x)).count() as u64)
        .sum())
}

/// The double-counting estimate `C1^{1/2} |P|^{1/2} |L| + C2 |P|` with
/// measured constants.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct DoubleCount {
    pub incidences: u64,
    /// Largest `|l cap l' cap P|` over distinct `l != l'`.
    pub c1: usize,
    /// Largest multiplicity.
    pub c2: usize,
    pub bound: f64,
}

impl DoubleCount {
    pub fn holds(&self) -> bool {
        self.incidences as f64 <= self.bound + 1e-9
    }
}

pub fn doublecount(p: &PointSet, l: &HyperplaneFamily) -> Result<DoubleCount> {
    let incidences = incidence_count(p, l)?;
    let f = &p.field;
    let members: Vec<Vec<bool>> = l
        .items
        .iter()
        .map(|(h, _)| p.points.iter().map(|x| h.contains(f, x)).collect())
        .collect();
    let mut c1 = 0;
    for i in 0..members.len() {
        for j in i + 1..members.len() {
            let k = members[i].iter().zip(&members[j]).filter(|(a, b)| **a && **b).count();
            c1 = c1.max(k);
        }
    }
    let c2 = l.max_multiplicity();
    let bound = (c1 as f64).sqrt() * (p.len() as f64).sqrt() * l.len() as f64 + (c2 * p.len()) as f64;
    Ok(DoubleCount {
        incidences,
        c1,
        c2,
        bound,
    })
}

/// Whether `H(x) = H(x')` for two surface parameters.
pub fn same_hyperplane(q: &QuadraticSpace, x: &[u32], y: &[u32]) -> bool {
    Hyperplane::of_param(q, x) == Hyperplane::of_param(q, y)
}

/// The incidence problem produced from `Lambda(A, B)` by moving the best
/// `b` to the origin.
#[derive(Clone, Debug)]
pub struct EnergyIncidence {
    /// The surface point of `B` sent to the origin.
    pub pivot: Vec<u32>,
    pub a_prime: PointSet,
    pub b_prime: PointSet,
    pub lines: HyperplaneFamily,
    pub points: PointSet,
    pub incidences: u64,
    pub energy: u64,
}

impl EnergyIncidence {
    /// `|L_{B'}| |I(L_{B'}, P_{A'})|`.
    pub fn bound(&self) -> u64 {
        self.lines.len() as u64 * self.incidences
    }

    pub fn holds(&self) -> bool {
        self.energy <= self.bound()
    }
}

pub fn energy_to_incidence(s: &Surface, a: &PointSet, b: &PointSet) -> Result<EnergyIncidence> {
    check_ambient(a, b)?;
    let q = s.form();
    if q.is_degenerate() {
        return Err(Error::DegenerateForm {
            rank: q.rank(),
            dim: q.dim(),
        });
    }
    for x in a.points.iter().chain(&b.points) {
        if !s.contains(x) {
            return Err(Error::NotOnSurface(x.clone()));
        }
    }
    let f = s.field();
    let m = s.dim() - 1;
    let energy = additive_energy(a, b, EnergyMethod::Representation)?;
    let mut best: Option<EnergyIncidence> = None;
    for piv in &b.points {
        let shift = s.lift(&piv[..m].iter().map(|&c| f.neg(c)).collect::<Vec<_>>());
        let a_prime = galilean(s, &shift, a)?;
        let b_prime = galilean(s, &shift, b)?;
        let lines = HyperplaneFamily::from_surface_points(q, &b_prime);
        let points = a_prime.params();
        let incidences = incidence_count(&points, &lines)?;
        if best.as_ref().map_or(true, |e| incidences > e.incidences) {
            best = Some(EnergyIncidence {
                pivot: piv.clone(),
                a_prime,
                b_prime,
                lines,
                points,
                incidences,
                energy,
            });
        }
    }
    Ok(best.unwrap_or_else(|| EnergyIncidence {
        pivot: Vec::new(),
        a_prime: a.clone(),
        b_prime: b.clone(),
        lines: HyperplaneFamily::new(f, m, []),
        points: a.params(),
        incidences: 0,
        energy,
    }))
}

/// `E = E_c cup E_u`, with `E_c` split into affine pieces.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub pieces: Vec<(Subspace, PointSet)>,
    pub residual: PointSet,
    pub threshold: f64,
}

impl Decomposition {
    pub fn structured(&self) -> PointSet {
        let mut out = PointSet::empty(&self.residual.field, self.residual.dim);
        for (_, piece) in &self.pieces {
            out = out.union(piece);
        }
        out
    }
}

/// Largest coset of any candidate subspace within `pts`, ties broken by
/// subspace order and then coset representative.
fn heaviest_coset(field: &PrimeField, cands: &[Subspace], pts: &[Vec<u32>]) -> Option<(usize, Vec<u32>, usize)> {
    let per: Vec<Option<(Vec<u32>, usize)>> = cands
        .par_iter()
        .map(|v| {
            let mut counts: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
            for x in pts {
                *counts.entry(v.reduce(field, x)).or_default() += 1;
            }
            let mut best: Option<(Vec<u32>, usize)> = None;
            for (k, c) in counts {
                if best.as_ref().map_or(true, |b| c > b.1) {
                    best = Some((k, c));
                }
            }
            best
        })
        .collect();
    let mut best: Option<(usize, Vec<u32>, usize)> = None;
    for (i, b) in per.into_iter().enumerate() {
        if let Some((k, c)) = b {
            if best.as_ref().map_or(true, |b| c > b.2) {
                best = Some((i, k, c));
            }
        }
    }
    best
}

/// Peel off, one at a time, the affine `c`-dimensional subspace holding the
/// most remaining points while that count exceeds `|E|^rho`.
///
/// With `isotropic_only`, candidates are translates of the totally
/// isotropic `c`-dimensional subspaces of `q`.
pub fn greedy_decompose(
    e: &PointSet,
    c: usize,
    rho: f64,
    isotropic_only: bool,
    q: Option<&QuadraticSpace>,
) -> Result<Decomposition> {
    let f = &e.field;
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::InvalidExponent(rho));
    }
    let cands = if isotropic_only {
        let q = q.ok_or_else(|| Error::BadParameter {
            scenario: "greedy_decompose".into(),
            name: "q",
            value: "None".into(),
            reason: "isotropic decomposition needs a form".into(),
        })?;
        q.totally_isotropic(c)?
    } else {
        all_subspaces(f, e.dim, c)?
    };
    let threshold = (e.len() as f64).powf(rho);
    let mut rest: Vec<Vec<u32>> = e.points.clone();
    let mut pieces = Vec::new();
    while let Some((i, key, count)) = heaviest_coset(f, &cands, &rest) {
        if (count as f64) <= threshold {
            break;
        }
        let v = &cands[i];
        let (inside, outside): (Vec<_>, Vec<_>) = rest.into_iter().partition(|x| v.reduce(f, x) == key);
        pieces.push((v.shifted(f, &key), PointSet::new(f, e.dim, inside)));
        rest = outside;
    }
    Ok(Decomposition {
        pieces,
        residual: PointSet::new(f, e.dim, rest),
        threshold,
    })
}

/// A VH plane of `F^3`: `x2 = a x3 + b` (type 1) or `x1 = a x3 + b` (type 2).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
pub struct VhPlane {
    pub kind: u8,
    pub a: u32,
    pub b: u32,
}

impl VhPlane {
    pub fn all(field: &PrimeField) -> Vec<VhPlane> {
        let p = field.p();
        let mut out = Vec::with_capacity(2 * (p * p) as usize);
        for kind in [1, 2] {
            for a in 0..p {
                for b in 0..p {
                    out.push(VhPlane { kind, a, b });
                }
            }
        }
        out
    }

    pub fn contains(&self, field: &PrimeField, x: &[u32]) -> bool {
        let lhs = if self.kind == 1 { x[1] } else { x[0] };
        lhs == field.add(field.mul(self.a, x[2]), self.b)
    }
}

#[derive(Clone, Debug)]
pub struct PlanarCover {
    pub planes: Vec<VhPlane>,
    pub residual: PointSet,
}

/// Greedily choose up to `budget` VH planes, each covering the most points
/// not yet covered. After `k` picks every VH plane meets the residual in at
/// most `|E| / k` points.
pub fn planar_entropy_cover(e: &PointSet, budget: usize) -> Result<PlanarCover> {
    if e.dim != 3 {
        return Err(Error::DimensionMismatch { expected: 3, got: e.dim });
    }
    let f = &e.field;
    let all = VhPlane::all(f);
    let mut rest = e.points.clone();
    let mut planes = Vec::new();
    while planes.len() < budget && !rest.is_empty() {
        let mut best = (0, all[0]);
        for pl in &all {
            let c = rest.iter().filter(|x| pl.contains(f, x)).count();
            if c > best.0 {
                best = (c, *pl);
            }
        }
        let pl = best.1;
        rest.retain(|x| !pl.contains(f, x));
        planes.push(pl);
    }
    Ok(PlanarCover {
        planes,
        residual: PointSet::new(f, 3, rest),
    })
}

/// The fewest VH planes covering `E`, by exhaustive search. Only for small
/// sets (at most 64 points).
pub fn min_vh_cover(e: &PointSet) -> Result<usize> {
    if e.dim != 3 {
        return Err(Error::DimensionMismatch { expected: 3, got: e.dim });
    }
    if e.len() > 64 {
        return Err(Error::BadParameter {
            scenario: "min_vh_cover".into(),
            name: "E",
            value: e.len().to_string(),
            reason: "exact cover is limited to 64 points".into(),
        });
    }
    let f = &e.field;
    let full: u64 = if e.len() == 64 { u64::MAX } else { (1u64 << e.len()) - 1 };
    let mut masks: Vec<u64> = VhPlane::all(f)
        .iter()
        .map(|pl| {
            e.points
                .iter()
                .enumerate()
                .filter(|(_, x)| pl.contains(f, x))
                .fold(0u64, |m, (i, _)| m | (1 << i))
        })
        .filter(|&m| m != 0)
        .collect();
    masks.sort_unstable();
    masks.dedup();
    fn search(masks: &[u64], covered: u64, full: u64, left: usize) -> bool {
        if covered == full {
            return true;
        }
        if left == 0 {
            return false;
        }
        // Branch on the planes through the lowest uncovered point.
        let bit = (!covered & full).trailing_zeros();
        masks
            .iter()
            .filter(|&&m| m >> bit & 1 == 1)
            .any(|&m| search(masks, covered | m, full, left - 1))
    }
    Ok((0..=e.len()).find(|&k| search(&masks, 0, full, k)).unwrap_or(e.len()))
}

/// The closed-form energy exponents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum EnergyKind {
    /// Three dimensions, Witt index one: `1 + 2 alpha` for `alpha >= 3/4`.
    Dim3Witt1,
    /// Two dimensions: `2`.
    Dim2,
    /// Rank one with a degenerate direction: `2 + alpha`.
    Rank1Deg,
    /// Rank two with a degenerate direction: `1 + 4 alpha - 2 alpha^2` for
    /// `alpha >= 3/4`.
    Rank2Deg,
    /// Four dimensions: `5/2 + alpha/2` for `3/5 <= alpha <= 1`.
    Dim4,
    /// Five dimensions, Witt index two: `19/7 + 2 alpha / 7` for
    /// `alpha >= 9/16`.
    Dim5Witt2,
}

impl EnergyKind {
    pub const ALL: [EnergyKind; 6] = [
        EnergyKind::Dim3Witt1,
        EnergyKind::Dim2,
        EnergyKind::Rank1Deg,
        EnergyKind::Rank2Deg,
        EnergyKind::Dim4,
        EnergyKind::Dim5Witt2,
    ];

    /// Smallest `alpha` the formula is stated for.
    pub fn alpha_min(self) -> f64 {
        match self {
            EnergyKind::Dim3Witt1 | EnergyKind::Rank2Deg => 0.75,
            EnergyKind::Dim4 => 0.6,
            EnergyKind::Dim5Witt2 => 9.0 / 16.0,
            EnergyKind::Dim2 | EnergyKind::Rank1Deg => 0.0,
        }
    }
}

pub fn energy_exponent_closed(kind: EnergyKind, alpha: f64) -> Result<f64> {
    if !(kind.alpha_min()..=1.0).contains(&alpha) {
        return Err(Error::OutOfValidityRange {
            kind: format!("{kind:?}"),
            alpha,
        });
    }
    Ok(match kind {
        EnergyKind::Dim3Witt1 => 1.0 + 2.0 * alpha,
        EnergyKind::Dim2 => 2.0,
        EnergyKind::Rank1Deg => 2.0 + alpha,
        EnergyKind::Rank2Deg => 1.0 + 4.0 * alpha - 2.0 * alpha * alpha,
        EnergyKind::Dim4 => 2.5 + alpha / 2.0,
        EnergyKind::Dim5Witt2 => 19.0 / 7.0 + 2.0 * alpha / 7.0,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Provenance {
    ClosedForm,
    Recursion,
}

/// A tabulated exponent `Psi` on `[0, 1]`, evaluated by linear
/// interpolation.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct EnergyExponent {
    pub alpha_grid: Vec<f64>,
    pub psi_values: Vec<f64>,
    pub provenance: Provenance,
}

fn uniform_grid(points: usize) -> Vec<f64> {
    let n = points.max(2) - 1;
    (0..=n).map(|i| i as f64 / n as f64).collect()
}

impl EnergyExponent {
    /// Tabulate a closed form, using `Psi(alpha_min)` below the validity
    /// range (a set obeying the slice bound at `alpha` obeys it at any
    /// larger exponent).
    pub fn from_closed(kind: EnergyKind, points: usize) -> Result<EnergyExponent> {
        let alpha_grid = uniform_grid(points);
        let psi_values = alpha_grid
            .iter()
            .map(|&a| energy_exponent_closed(kind, a.max(kind.alpha_min())))
            .collect::<Result<Vec<_>>>()?;
        let e = EnergyExponent {
            alpha_grid,
            psi_values,
            provenance: Provenance::ClosedForm,
        };
        e.validate()?;
        Ok(e)
    }

    /// Nondecreasing, `Psi(1) = 3` and `Psi < 3` before the last node.
    pub fn validate(&self) -> Result<()> {
        let bad = |reason: &str| Error::BadParameter {
            scenario: "EnergyExponent".into(),
            name: "psi_values",
            value: format!("{:?}", self.psi_values),
            reason: reason.into(),
        };
        let (g, v) = (&self.alpha_grid, &self.psi_values);
        if g.len() != v.len() || g.len() < 2 || g[0] != 0.0 || *g.last().unwrap() != 1.0 {
            return Err(bad("grid must span [0, 1] with matching values"));
        }
        if g.windows(2).any(|w| w[1] <= w[0]) {
            return Err(bad("grid must be increasing"));
        }
        if v.windows(2).any(|w| w[1] < w[0] - 1e-12) {
            return Err(bad("exponent must be nondecreasing"));
        }
        if (v[v.len() - 1] - 3.0).abs() > 1e-9 {
            return Err(bad("exponent must equal 3 at alpha = 1"));
        }
        if v[..v.len() - 1].iter().any(|&x| x >= 3.0) {
            return Err(bad("exponent must stay below 3 for alpha < 1"));
        }
        Ok(())
    }

    pub fn eval(&self, alpha: f64) -> f64 {
        let a = alpha.clamp(0.0, 1.0);
        let g = &self.alpha_grid;
        let i = g.partition_point(|&x| x <= a).clamp(1, g.len() - 1);
        let (x0, x1) = (g[i - 1], g[i]);
        let (y0, y1) = (self.psi_values[i - 1], self.psi_values[i]);
        y0 + (y1 - y0) * (a - x0) / (x1 - x0)
    }
}

/// The root `rho` of `5/2 + rho/2 = 4(1 - rho) + Psi(alpha/rho)` and the
/// resulting `Psi'(alpha) = (5 + rho)/2`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct RecursionStep {
    pub rho: f64,
    pub value: f64,
}

pub fn energy_exponent_recurse(inner: &EnergyExponent, alpha: f64) -> Result<RecursionStep> {
    inner.validate()?;
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::OutOfValidityRange {
            kind: "recursion".into(),
            alpha,
        });
    }
    let h = |rho: f64| 2.5 + rho / 2.0 - 4.0 * (1.0 - rho) - inner.eval(if rho > 0.0 { alpha / rho } else { 0.0 });
    if h(1.0) < 0.0 {
        return Err(Error::NoRoot { alpha, endpoint: 3.0 });
    }
    if alpha >= 1.0 || h(1.0) == 0.0 {
        return Ok(RecursionStep { rho: 1.0, value: 3.0 });
    }
    let (mut lo, mut hi) = (alpha, 1.0);
    if h(lo) > 0.0 {
        return Err(Error::NoRoot {
            alpha,
            endpoint: (5.0 + lo) / 2.0,
        });
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if h(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let rho = 0.5 * (lo + hi);
    Ok(RecursionStep {
        rho,
        value: (5.0 + rho) / 2.0,
    })
}

/// Tabulate one step of the dimension recursion.
pub fn recursion_curve(inner: &EnergyExponent, points: usize) -> Result<EnergyExponent> {
    let alpha_grid = uniform_grid(points);
    let psi_values = alpha_grid
        .iter()
        .map(|&a| energy_exponent_recurse(inner, a).map(|s| s.value))
        .collect::<Result<Vec<_>>>()?;
    Ok(EnergyExponent {
        alpha_grid,
        psi_values,
        provenance: Provenance::Recursion,
    })
}

/// `theta(alpha) = 3 alpha + Psi(alpha)(1 - alpha)`, the exponent after
/// adding a degenerate direction.
pub fn degenerate_lift(inner: &EnergyExponent, alpha: f64) -> f64 {
    3.0 * alpha + inner.eval(alpha) * (1.0 - alpha)
}

/// Largest `|E cap j|` over translates `j` of the given linear subspaces.
pub fn max_coset_hit(field: &PrimeField, subspaces: &[Subspace], e: &PointSet) -> usize {
    if e.is_empty() {
        return 0;
    }
    heaviest_coset(field, subspaces, &e.points).map_or(1, |(_, _, c)| c)
}

/// One point of the empirical scatter.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct AlphaSample {
    pub label: String,
    pub size: usize,
    pub alpha: f64,
    pub exponent: f64,
    pub curve: f64,
}

impl AlphaSample {
    pub fn below_curve(&self, slack: f64) -> bool {
        self.exponent <= self.curve + slack
    }
}

/// The closed-form curve used to judge a surface of this shape, if any.
pub fn curve_for_surface(s: &Surface) -> Result<Option<EnergyExponent>> {
    let q = s.form();
    let d = s.dim();
    let kind = match d {
        3 if s.kind() == SurfaceKind::HyperbolicParaboloid || q.witt_index()? == 1 => Some(EnergyKind::Dim3Witt1),
        4 => Some(EnergyKind::Dim4),
        5 if q.witt_index()? == 2 => Some(EnergyKind::Dim5Witt2),
        _ => None,
    };
    kind.map(|k| EnergyExponent::from_closed(k, 201)).transpose()
}

fn curve_value(s: &Surface, curve: &Option<EnergyExponent>, alpha: f64) -> f64 {
    match curve {
        Some(c) => c.eval(alpha),
        // Witt index zero in three dimensions: the 5/2 bound.
        None if s.dim() == 3 => 2.5,
        None => 3.0,
    }
}

/// Structured and random subsets of `S` with their slice exponent
/// `alpha = log_|E| max_j |E cap j|` (over maximal totally isotropic affine
/// `j`) and energy exponent `log_|E| Lambda(E)`.
pub fn empirical_alpha_energy(s: &Surface, trials: usize, seed: u64) -> Result<Vec<AlphaSample>> {
    let f = s.field();
    let q = s.form();
    if s.dim() > 5 || f.p() > 7 {
        return Err(Error::BadParameter {
            scenario: "empirical_alpha_energy".into(),
            name: "surface",
            value: format!("{s:?}"),
            reason: "scatter is limited to d <= 5, p <= 7".into(),
        });
    }
    let iso = enumerate_max_isotropic(q)?;
    let curve = curve_for_surface(s)?;
    let universe = PointSet::new(f, s.dim(), s.points());
    let mut sets: Vec<(String, PointSet)> = Vec::new();
    if let Some(w) = iso.first() {
        let w_pts = w.elements(f);
        sets.push(("isotropic subspace".into(), PointSet::from_params(s, w_pts.iter().map(Vec::as_slice))));
        let shift: Vec<u32> = (0..q.dim()).map(|i| u32::from(i == 0)).collect();
        let other = iso.get(1).unwrap_or(w);
        let mut two: Vec<Vec<u32>> = w_pts;
        two.extend(other.elements(f).into_iter().map(|v| f.add_vec(&v, &shift)));
        sets.push(("two isotropic translates".into(), PointSet::from_params(s, two.iter().map(Vec::as_slice))));
    }
    if universe.len() <= 2500 {
        sets.push(("whole surface".into(), universe.clone()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for t in 0..trials {
        let size = rng.gen_range(2..=universe.len().min(60));
        sets.push((format!("random #{t}"), PointSet::random_subset(&universe, size, &mut rng)));
    }
    let out = sets
        .into_par_iter()
        .filter(|(_, e)| e.len() >= 2)
        .map(|(label, e)| {
            let n = e.len() as f64;
            let hit = max_coset_hit(f, &iso, &e.params()).max(1);
            let alpha = (hit as f64).ln() / n.ln();
            let exponent = (energy(&e) as f64).ln() / n.ln();
            AlphaSample {
                label,
                size: e.len(),
                alpha,
                exponent,
                curve: curve_value(s, &curve, alpha),
            }
        })
        .collect();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn energy_of_small_sets() {
        let f = PrimeField::new(5).unwrap();
        let one = PointSet::new(&f, 2, vec![vec![1, 2]]);
        assert_eq!(energy(&one), 1);
        let line = PointSet::new(&f, 2, (0..5).map(|t| vec![t, 2 * t % 5]).collect());
        for m in [EnergyMethod::QuadrupleLoop, EnergyMethod::Representation, EnergyMethod::Fourier] {
            assert_eq!(additive_energy(&line, &line, m).unwrap(), 125);
        }
        let two = PointSet::new(&f, 2, vec![vec![0, 0], vec![1, 3]]);
        assert_eq!(energy(&two), 6);
    }

    #[test]
    fn hyperplane_normalisation() {
        let f = PrimeField::new(5).unwrap();
        let h = Hyperplane::new(&f, vec![0, 2, 4], 3);
        assert_eq!(h.normal, vec![0, 1, 2]);
        assert_eq!(h.offset, 4);
        assert_eq!(Hyperplane::all(&f, 2).unwrap().len(), 30);
    }

    #[test]
    fn closed_exponents() {
        assert_eq!(energy_exponent_closed(EnergyKind::Dim3Witt1, 0.75).unwrap(), 2.5);
        assert!((energy_exponent_closed(EnergyKind::Dim5Witt2, 9.0 / 16.0).unwrap() - 23.0 / 8.0).abs() < 1e-15);
        assert!(energy_exponent_closed(EnergyKind::Dim3Witt1, 0.5).is_err());
        assert!(EnergyExponent::from_closed(EnergyKind::Dim2, 11).is_err());
    }

    #[test]
    fn recursion_endpoints() {
        let inner = EnergyExponent::from_closed(EnergyKind::Dim5Witt2, 101).unwrap();
        assert_eq!(energy_exponent_recurse(&inner, 1.0).unwrap().value, 3.0);
        let a = energy_exponent_recurse(&inner, 0.5).unwrap().value;
        let b = energy_exponent_recurse(&inner, 0.9).unwrap().value;
        assert!(a <= b && b < 3.0);
    }

    #[test]
    fn vh_planes_partition() {
        let f = PrimeField::new(3).unwrap();
        let all = PointSet::new(&f, 3, (0..27).map(|i| decode(3, 3, i)).collect());
        let cover = planar_entropy_cover(&all, 3).unwrap();
        assert!(cover.residual.is_empty());
        assert_eq!(min_vh_cover(&PointSet::new(&f, 3, vec![vec![0, 0, 0], vec![1, 1, 1]])).unwrap(), 1);
    }
}
