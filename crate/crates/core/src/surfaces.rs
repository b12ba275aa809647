//! Quadratic surfaces `S = {(xi, Q(xi))}` with normalised surface measure,
//! the extension and restriction operators, closed forms for `(dsigma)^v`,
//! Bochner-Riesz convolution and its tubes, and a few exact identities
//! built on top.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{checked_size, decode, encode, FFunction, Measure, PrimeField};
use crate::fourier::{convolve, fourier_transform, inverse_transform};
use crate::linalg::{self, Matrix};
use crate::qforms::QuadraticSpace;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum SurfaceKind {
    /// `Q(xi) = xi . xi`.
    Paraboloid,
    /// `Q(xi1, xi2) = xi1 . xi2` with `xi1, xi2` in `F^n`.
    HyperbolicParaboloid,
    General,
}

struct SurfaceData {
    q: QuadraticSpace,
    kind: SurfaceKind,
    qvals: Vec<u32>,
}

/// A surface in `F_p^d` given by a form on `F_p^{d-1}`. Cheap to clone.
#[derive(Clone)]
pub struct Surface {
    inner: Arc<SurfaceData>,
}

impl std::fmt::Debug for Surface {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Surface({:?}, d={}, {:?})", self.inner.kind, self.dim(), self.field())
    }
}

impl Surface {
    pub fn new(q: QuadraticSpace, kind: SurfaceKind) -> Result<Surface> {
        let f = q.field().clone();
        let m = q.dim();
        let n = checked_size(f.p(), m + 1)? / f.p() as usize;
        let qvals = (0..n).map(|i| q.eval(&decode(f.p(), m, i))).collect();
        Ok(Surface {
            inner: Arc::new(SurfaceData { q, kind, qvals }),
        })
    }

    pub fn paraboloid(field: &PrimeField, d: usize) -> Result<Surface> {
        Surface::new(QuadraticSpace::dot(field, d - 1), SurfaceKind::Paraboloid)
    }

    /// `d` must be odd.
    pub fn hyperbolic_paraboloid(field: &PrimeField, d: usize) -> Result<Surface> {
        if d % 2 == 0 || d < 3 {
            return Err(Error::DimensionMismatch {
                expected: d | 1,
                got: d,
            });
        }
        Surface::new(QuadraticSpace::hyperbolic(field, (d - 1) / 2), SurfaceKind::HyperbolicParaboloid)
    }

    pub fn general(q: QuadraticSpace) -> Result<Surface> {
        Surface::new(q, SurfaceKind::General)
    }

    pub fn field(&self) -> &PrimeField {
        self.inner.q.field()
    }

    pub fn form(&self) -> &QuadraticSpace {
        &self.inner.q
    }

    pub fn kind(&self) -> SurfaceKind {
        self.inner.kind
    }

    /// Ambient dimension `d`.
    pub fn dim(&self) -> usize {
        self.inner.q.dim() + 1
    }

    pub fn size(&self) -> usize {
        self.inner.qvals.len()
    }

    /// `Q(xi)` for the parameter with index `i`.
    #[inline]
    pub fn q_at(&self, i: usize) -> u32 {
        self.inner.qvals[i]
    }

    pub fn lift(&self, xi: &[u32]) -> Vec<u32> {
        let mut v = xi.to_vec();
        v.push(self.inner.q.eval(xi));
        v
    }

    pub fn point(&self, i: usize) -> Vec<u32> {
        let mut v = decode(self.field().p(), self.dim() - 1, i);
        v.push(self.inner.qvals[i]);
        v
    }

    pub fn points(&self) -> Vec<Vec<u32>> {
        (0..self.size()).map(|i| self.point(i)).collect()
    }

    pub fn contains(&self, x: &[u32]) -> bool {
        x.len() == self.dim() && self.inner.q.eval(&x[..x.len() - 1]) == x[x.len() - 1]
    }

    /// Index in `F^d` of the lifted parameter `i`.
    #[inline]
    pub fn ambient_index(&self, i: usize) -> usize {
        i + self.size() * self.inner.qvals[i] as usize
    }
}

/// A function on a surface, indexed by the parameter `xi` in `F^{d-1}`.
#[derive(Clone, Debug)]
pub struct SurfaceFunction {
    pub surface: Surface,
    pub values: Vec<Complex64>,
}

impl SurfaceFunction {
    pub fn from_values(surface: &Surface, values: Vec<Complex64>) -> Result<SurfaceFunction> {
        if values.len() != surface.size() {
            return Err(Error::DimensionMismatch {
                expected: surface.size(),
                got: values.len(),
            });
        }
        Ok(SurfaceFunction {
            surface: surface.clone(),
            values,
        })
    }

    pub fn from_fn(surface: &Surface, mut f: impl FnMut(&[u32]) -> Complex64) -> SurfaceFunction {
        let p = surface.field().p();
        let m = surface.dim() - 1;
        let values = (0..surface.size()).map(|i| f(&decode(p, m, i))).collect();
        SurfaceFunction {
            surface: surface.clone(),
            values,
        }
    }

    pub fn constant(surface: &Surface, c: Complex64) -> SurfaceFunction {
        SurfaceFunction {
            surface: surface.clone(),
            values: vec![c; surface.size()],
        }
    }

    pub fn indicator<'a>(surface: &Surface, params: impl IntoIterator<Item = &'a [u32]>) -> SurfaceFunction {
        let mut g = SurfaceFunction::constant(surface, Complex64::new(0.0, 0.0));
        for xi in params {
            g.values[encode(surface.field().p(), xi)] = Complex64::new(1.0, 0.0);
        }
        g
    }

    pub fn delta(surface: &Surface, xi: &[u32]) -> SurfaceFunction {
        SurfaceFunction::indicator(surface, [xi])
    }

    pub fn get(&self, xi: &[u32]) -> Complex64 {
        self.values[encode(self.surface.field().p(), xi)]
    }

    /// `L^e(S, dsigma)` with the normalised surface measure.
    pub fn lq_norm(&self, e: f64) -> Result<f64> {
        crate::field::lp_norm_values(&self.values, e, Measure::Normalized, self.values.len())
    }

    /// `<g, h>_{dsigma} = |S|^{-1} sum g conj(h)`.
    pub fn inner(&self, other: &SurfaceFunction) -> Complex64 {
        let s: Complex64 = self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()).sum();
        s / self.values.len() as f64
    }

    pub fn scale(&self, c: Complex64) -> SurfaceFunction {
        self.map(|z| z * c)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> SurfaceFunction {
        SurfaceFunction {
            surface: self.surface.clone(),
            values: self.values.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &SurfaceFunction) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// The function placed on the lifted points of `F^d`.
    pub fn to_ambient(&self) -> FFunction {
        let s = &self.surface;
        let mut out = FFunction::zeros(s.field(), s.dim()).expect("surface already passed the size guard");
        for (i, v) in self.values.iter().enumerate() {
            out.data[s.ambient_index(i)] = *v;
        }
        out
    }
}

/// `(g dsigma)^v(x) = |S|^{-1} sum_xi g(xi) e(x . (xi, Q(xi)))`, evaluated
/// everywhere through the inverse transform.
pub fn extension(g: &SurfaceFunction) -> FFunction {
    let s = &g.surface;
    let amb = g.to_ambient();
    let scale = amb.data.len() as f64 / s.size() as f64;
    let mut out = inverse_transform(&amb);
    for z in out.data.iter_mut() {
        *z *= scale;
    }
    out
}

/// The extension operator summed straight from its definition.
pub fn extension_naive(g: &SurfaceFunction) -> FFunction {
    let s = &g.surface;
    let f = s.field();
    let d = s.dim();
    let n = checked_size(f.p(), d).expect("surface already passed the size guard");
    let pts = s.points();
    let norm = 1.0 / s.size() as f64;
    let data = (0..n)
        .into_par_iter()
        .map(|i| {
            let x = decode(f.p(), d, i);
            let acc: Complex64 = pts
                .iter()
                .zip(&g.values)
                .filter(|(_, v)| **v != Complex64::new(0.0, 0.0))
                .map(|(xi, v)| v * f.char_eval(f.dot(&x, xi)))
                .sum();
            acc * norm
        })
        .collect();
    FFunction {
        field: f.clone(),
        dim: d,
        data,
    }
}

/// `F^` sampled on the surface.
pub fn restriction(f: &FFunction, s: &Surface) -> SurfaceFunction {
    let ft = fourier_transform(f);
    let values = (0..s.size()).map(|i| ft.data[s.ambient_index(i)]).collect();
    SurfaceFunction {
        surface: s.clone(),
        values,
    }
}

/// `(dsigma)^v`: closed form for the two named kinds, direct summation
/// otherwise.
pub fn surface_measure_inverse_ft(s: &Surface) -> FFunction {
    match s.kind() {
        SurfaceKind::HyperbolicParaboloid => hyperbolic_dsigma(s),
        SurfaceKind::Paraboloid => paraboloid_dsigma(s),
        SurfaceKind::General => extension_naive(&SurfaceFunction::constant(s, Complex64::new(1.0, 0.0))),
    }
}

/// `1` at the origin, `0` on the rest of `t = 0`, and
/// `p^{-n} e(-x2 . x1 / t)` for `t != 0`.
pub fn hyperbolic_dsigma(s: &Surface) -> FFunction {
    let f = s.field().clone();
    let d = s.dim();
    let n = (d - 1) / 2;
    let scale = (f.p() as f64).powi(-(n as i32));
    FFunction::from_fn(&f, d, |x| {
        let t = x[d - 1];
        if t == 0 {
            if x[..d - 1].iter().all(|&c| c == 0) {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        } else {
            let ph = f.neg(f.div(f.dot(&x[n..2 * n], &x[..n]), t));
            f.char_eval(ph) * scale
        }
    })
    .expect("surface already passed the size guard")
}

/// `sum_{xi in F} e(t xi^2) = legendre(t) * G` with `G = sqrt(p)` or
/// `i sqrt(p)` according to `p mod 4`.
pub fn gauss_sum(f: &PrimeField, t: u32) -> Complex64 {
    let rp = (f.p() as f64).sqrt();
    let g = if f.p() % 4 == 1 {
        Complex64::new(rp, 0.0)
    } else {
        Complex64::new(0.0, rp)
    };
    g * f64::from(f.legendre(t))
}

/// `delta(x)` at `t = 0` and `p^{-(d-1)} g(t)^{d-1} e(-x.x / 4t)` otherwise.
pub fn paraboloid_dsigma(s: &Surface) -> FFunction {
    let f = s.field().clone();
    let d = s.dim();
    let m = d - 1;
    let scale = (f.p() as f64).powi(-(m as i32));
    FFunction::from_fn(&f, d, |x| {
        let t = x[m];
        if t == 0 {
            if x[..m].iter().all(|&c| c == 0) {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        } else {
            let xx = f.dot(&x[..m], &x[..m]);
            let ph = f.neg(f.div(xx, f.mul(4, t)));
            gauss_sum(&f, t).powi(m as i32) * f.char_eval(ph) * scale
        }
    })
    .expect("surface already passed the size guard")
}

/// Which Bochner-Riesz kernel to convolve with.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BrVariant {
    /// `K = (dsigma)^v - delta_0`.
    WithDelta,
    /// `K~ = (dsigma)^v`.
    KernelOnly,
}

pub fn br_kernel(s: &Surface, variant: BrVariant) -> FFunction {
    let mut k = surface_measure_inverse_ft(s);
    if variant == BrVariant::WithDelta {
        k.data[0] -= 1.0;
    }
    k
}

/// `F * K` or `F * K~` under counting-measure convolution.
pub fn bochner_riesz(f: &FFunction, s: &Surface, variant: BrVariant) -> FFunction {
    convolve(f, &br_kernel(s, variant))
}

/// The set `{(x1, x2' - m s, t' + s)}` in `F^3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
pub struct Tube {
    pub m: u32,
    pub x2: u32,
    pub t: u32,
}

impl Tube {
    pub fn points(&self, f: &PrimeField) -> Vec<[u32; 3]> {
        let mut out = Vec::with_capacity((f.p() * f.p()) as usize);
        for s in 0..f.p() {
            for x1 in 0..f.p() {
                out.push([x1, f.sub(self.x2, f.mul(self.m, s)), f.add(self.t, s)]);
            }
        }
        out
    }

    pub fn contains(&self, f: &PrimeField, x: &[u32]) -> bool {
        let s = f.sub(x[2], self.t);
        f.add(x[1], f.mul(self.m, s)) == self.x2
    }

    /// `J_m(x1, x2 - x2', t - t') = delta(x2 - x2' + m (t - t'))`.
    pub fn kernel(&self, f: &PrimeField) -> FFunction {
        FFunction::from_fn(f, 3, |x| {
            Complex64::new(f64::from(u8::from(self.contains(f, x))), 0.0)
        })
        .expect("F^3 is within the guard")
    }

    /// The input `delta(x2 - x2') delta(t - t') e(m x1)`.
    pub fn wave(&self, f: &PrimeField) -> FFunction {
        FFunction::from_fn(f, 3, |x| {
            if x[1] == self.x2 && x[2] == self.t {
                f.char_eval(f.mul(self.m, x[0]))
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .expect("F^3 is within the guard")
    }
}

/// Largest gap between `|(h0 * K)(x,t)|` and `p^n |(h~ dsigma)^v(w, t')|`
/// over `t != 0`, with `w = (x2, x1)/t, t' = -1/t` on the hyperbolic
/// paraboloid and `w = x / 2t, t' = -1/4t` on the paraboloid.
pub fn pseudo_conformal_check(h0: &FFunction, s: &Surface) -> Result<f64> {
    let f = s.field();
    let d = s.dim();
    if d % 2 == 0 || s.kind() == SurfaceKind::General {
        return Err(Error::BadParameter {
            scenario: "pseudo_conformal_check".into(),
            name: "surface",
            value: format!("{s:?}"),
            reason: "needs a paraboloid or hyperbolic paraboloid in odd dimension".into(),
        });
    }
    let m = d - 1;
    let n = m / 2;
    let block = s.size();
    if h0.data[block..].iter().any(|z| z.norm() > 0.0) {
        return Err(Error::BadParameter {
            scenario: "pseudo_conformal_check".into(),
            name: "h0",
            value: "support".into(),
            reason: "must vanish off t = 0".into(),
        });
    }
    let lhs = bochner_riesz(h0, s, BrVariant::WithDelta);
    let h_s = SurfaceFunction::from_values(s, h0.data[..block].to_vec())?;
    let ext = extension(&h_s);
    let pn = (f.p() as f64).powi(n as i32);
    let mut worst: f64 = 0.0;
    for i in block..lhs.data.len() {
        let x = decode(f.p(), d, i);
        let t = x[m];
        let ti = f.inv(t);
        let (w, tp): (Vec<u32>, u32) = match s.kind() {
            SurfaceKind::HyperbolicParaboloid => {
                let mut w: Vec<u32> = x[n..m].to_vec();
                w.extend_from_slice(&x[..n]);
                (f.scale_vec(ti, &w), f.neg(ti))
            }
            _ => {
                let i2 = f.inv(f.mul(2, t));
                (f.scale_vec(i2, &x[..m]), f.neg(f.inv(f.mul(4, t))))
            }
        };
        let mut y = w;
        y.push(tp);
        let dev = (lhs.data[i].norm() - pn * ext.get(&y).norm()).abs();
        worst = worst.max(dev);
    }
    Ok(worst)
}

/// `F = delta(x2 - a x3 - b) f(x1, x3)`, its transform, and the prediction
/// `f^(xi1, xi3 + a xi2) e(-xi2 b)`.
#[derive(Clone, Debug)]
pub struct PlaneEmbedding {
    pub embedded: FFunction,
    pub transform: FFunction,
    pub predicted: FFunction,
}

impl PlaneEmbedding {
    pub fn deviation(&self) -> f64 {
        self.transform.max_abs_diff(&self.predicted)
    }
}

pub fn plane_embed_ft(f2: &FFunction, a: u32, b: u32) -> Result<PlaneEmbedding> {
    if f2.dim != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: f2.dim,
        });
    }
    let f = f2.field.clone();
    let embedded = FFunction::from_fn(&f, 3, |x| {
        if x[1] == f.add(f.mul(a, x[2]), b) {
            f2.get(&[x[0], x[2]])
        } else {
            Complex64::new(0.0, 0.0)
        }
    })?;
    let transform = fourier_transform(&embedded);
    let f2hat = fourier_transform(f2);
    let predicted = FFunction::from_fn(&f, 3, |xi| {
        f2hat.get(&[xi[0], f.add(xi[2], f.mul(a, xi[1]))]) * f.char_eval(f.neg(f.mul(xi[1], b)))
    })?;
    Ok(PlaneEmbedding {
        embedded,
        transform,
        predicted,
    })
}

/// Carry `f` on `S_A` to `g` on `S_B` where `A = M^T B M`, via
/// `g(M xi) = f(xi)`. Extension norms and surface norms agree.
pub fn equivalence_transfer(f: &SurfaceFunction, m: &Matrix, target: &Surface) -> Result<SurfaceFunction> {
    let field = f.surface.field();
    let a = f.surface.form().matrix();
    let b = target.form().matrix();
    if m.len() != a.len() || b.len() != a.len() {
        return Err(Error::NotCongruent);
    }
    if linalg::inverse(field, m).is_none() || &linalg::congruence(field, b, m) != a {
        return Err(Error::NotCongruent);
    }
    let p = field.p();
    let k = a.len();
    let mut values = vec![Complex64::new(0.0, 0.0); f.values.len()];
    for (i, v) in f.values.iter().enumerate() {
        let xi = decode(p, k, i);
        values[encode(p, &linalg::mat_vec(field, m, &xi))] = *v;
    }
    SurfaceFunction::from_values(target, values)
}

/// Some `M` with `M^T B M = A`, by exhaustive search (two variables or
/// fewer).
pub fn find_congruence(field: &PrimeField, a: &Matrix, b: &Matrix) -> Result<Option<Matrix>> {
    let k = a.len();
    let total = checked_size(field.p(), k * k)?;
    for idx in 0..total {
        let flat = decode(field.p(), k * k, idx);
        let m: Matrix = flat.chunks(k).map(|r| r.to_vec()).collect();
        if &linalg::congruence(field, b, &m) == a && linalg::determinant(field, &m) != 0 {
            return Ok(Some(m));
        }
    }
    Ok(None)
}
