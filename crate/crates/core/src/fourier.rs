//! Fourier analysis on `F_p^d`: transforms, mixed norms, the exact `L^2`
//! extension constant and lower bounds for other exponent pairs.
//!
//! Space carries counting measure and the dual carries normalised measure:
//! `f^(xi) = sum_x f(x) e(-x.xi)` and `g^v(x) = p^{-d} sum_xi g(xi) e(x.xi)`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{decode, encode, FFunction, Measure, PrimeField};
use crate::qforms::Subspace;
use crate::surfaces::{extension, restriction, Surface, SurfaceFunction};

fn axis_pass(field: &PrimeField, data: &[Complex64], dim: usize, axis: usize, sign: i64) -> Vec<Complex64> {
    let p = field.p() as usize;
    let stride = p.pow(axis as u32);
    let n = data.len();
    debug_assert_eq!(n, p.pow(dim as u32));
    let chars = field.characters().values();
    let pencils: Vec<Vec<Complex64>> = (0..n / p)
        .into_par_iter()
        .map(|k| {
            let lo = k % stride;
            let hi = k / stride;
            let base = hi * stride * p + lo;
            (0..p)
                .map(|xi| {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for x in 0..p {
                        let ph = (sign * (x * xi) as i64).rem_euclid(p as i64) as usize;
                        acc += data[base + x * stride] * chars[ph];
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (k, pencil) in pencils.into_iter().enumerate() {
        let base = (k / stride) * stride * p + k % stride;
        for (xi, v) in pencil.into_iter().enumerate() {
            out[base + xi * stride] = v;
        }
    }
    out
}

fn transform(f: &FFunction, sign: i64) -> FFunction {
    let mut data = f.data.clone();
    for axis in 0..f.dim {
        data = axis_pass(&f.field, &data, f.dim, axis, sign);
    }
    FFunction {
        field: f.field.clone(),
        dim: f.dim,
        data,
    }
}

/// `f^(xi) = sum_x f(x) e(-x.xi)`, computed one axis at a time.
pub fn fourier_transform(f: &FFunction) -> FFunction {
    transform(f, -1)
}

/// `g^v(x) = p^{-d} sum_xi g(xi) e(x.xi)`.
pub fn inverse_transform(g: &FFunction) -> FFunction {
    let scale = 1.0 / g.data.len() as f64;
    let mut out = transform(g, 1);
    for z in out.data.iter_mut() {
        *z *= scale;
    }
    out
}

/// The defining double sum, for cross-checks at small sizes.
pub fn fourier_transform_naive(f: &FFunction) -> FFunction {
    let p = f.p();
    let d = f.dim;
    let n = f.data.len();
    let pts: Vec<Vec<u32>> = (0..n).map(|i| decode(p, d, i)).collect();
    let data = (0..n)
        .into_par_iter()
        .map(|j| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, x) in pts.iter().enumerate() {
                let ph = f.field.neg(f.field.dot(x, &pts[j]));
                acc += f.data[i] * f.field.char_eval(ph);
            }
            acc
        })
        .collect();
    FFunction {
        field: f.field.clone(),
        dim: d,
        data,
    }
}

/// Counting-measure convolution `(a * b)(x) = sum_y a(y) b(x - y)` via the
/// transform.
pub fn convolve(a: &FFunction, b: &FFunction) -> FFunction {
    let mut fa = fourier_transform(a);
    let fb = fourier_transform(b);
    for (x, y) in fa.data.iter_mut().zip(&fb.data) {
        *x *= y;
    }
    inverse_transform(&fa)
}

/// The same convolution by direct summation.
pub fn convolve_direct(a: &FFunction, b: &FFunction) -> FFunction {
    let p = a.p();
    let d = a.dim;
    let n = a.data.len();
    let field = &a.field;
    let support: Vec<(Vec<u32>, Complex64)> = (0..n)
        .filter(|&i| a.data[i] != Complex64::new(0.0, 0.0))
        .map(|i| (decode(p, d, i), a.data[i]))
        .collect();
    let data = (0..n)
        .into_par_iter()
        .map(|i| {
            let x = decode(p, d, i);
            support
                .iter()
                .map(|(y, v)| v * b.data[encode(p, &field.sub_vec(&x, y))])
                .sum()
        })
        .collect();
    FFunction {
        field: field.clone(),
        dim: d,
        data,
    }
}

/// Iterated norm `L^q_{V[,t]} L^p_W`.
#[derive(Clone, Debug)]
pub struct MixedNormSpec {
    pub v: Subspace,
    pub w: Subspace,
    pub outer_exp: f64,
    pub inner_exp: f64,
    /// Whether the function carries a trailing `t` coordinate that joins the
    /// outer sum.
    pub include_t: bool,
}

fn power_sum(values: impl Iterator<Item = f64>, e: f64) -> f64 {
    if e.is_infinite() {
        values.fold(0.0, f64::max)
    } else {
        values.map(|x| x.powf(e)).sum()
    }
}

fn root(s: f64, e: f64) -> f64 {
    if e.is_infinite() {
        s
    } else {
        s.powf(1.0 / e)
    }
}

/// `(sum_{v,t} (sum_w |F(w+v,t)|^p)^{q/p})^{1/q}`. Under normalised measure
/// each sum is averaged over its own index set.
pub fn mixed_norm(values: &[Complex64], field: &PrimeField, spec: &MixedNormSpec, measure: Measure) -> Result<f64> {
    let (q, pe) = (spec.outer_exp, spec.inner_exp);
    for e in [q, pe] {
        if e.is_nan() || e < 1.0 {
            return Err(Error::InvalidExponent(e));
        }
    }
    let m = spec.v.ambient();
    if spec.w.ambient() != m || spec.v.is_affine() || spec.w.is_affine() || !spec.v.is_complement(field, &spec.w) {
        return Err(Error::NonComplementary);
    }
    let p = field.p() as usize;
    let slices = if spec.include_t { p } else { 1 };
    let expected = p.pow(m as u32) * slices;
    if values.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            got: values.len(),
        });
    }
    let ve = spec.v.elements(field);
    let we = spec.w.elements(field);
    let block = p.pow(m as u32);
    let mut outer_terms = Vec::with_capacity(ve.len() * slices);
    for t in 0..slices {
        for v in &ve {
            let inner = power_sum(
                we.iter().map(|w| values[t * block + encode(field.p(), &field.add_vec(w, v))].norm()),
                pe,
            );
            let inner = if measure == Measure::Normalized && pe.is_finite() {
                inner / we.len() as f64
            } else {
                inner
            };
            outer_terms.push(root(inner, pe));
        }
    }
    let n_outer = outer_terms.len();
    let mut s = power_sum(outer_terms.into_iter(), q);
    if measure == Measure::Normalized && q.is_finite() {
        s /= n_outer as f64;
    }
    Ok(root(s, q))
}

/// `log_p` constant implied at exponent `q / theta` by interpolating an
/// `L^2` bound with constant `p^alpha` against decay `p^{-d_tilde/2}`.
pub fn stein_tomas_transfer(alpha: f64, theta: f64, d_tilde: f64) -> f64 {
    (theta * alpha - d_tilde * (1.0 - theta) / 4.0).max(0.0)
}

/// A bound `R*(q -> p) <= C p^alpha`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct ExponentBound {
    pub p_exp: f64,
    pub q_exp: f64,
    pub log_constant: f64,
}

/// `R*(2 -> 2) = (p^d / |S|)^{1/2}`.
pub fn exact_r22(s: &Surface) -> f64 {
    let pd = (s.field().p() as f64).powi(s.dim() as i32);
    (pd / s.size() as f64).sqrt()
}

/// Operator norm of the extension map `L^2(dsigma) -> L^2(dx)` by power
/// iteration on `R E`, where restriction is the adjoint of extension.
pub fn power_iteration_r22(s: &Surface, iters: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = SurfaceFunction::from_fn(s, |_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
    let mut est = 0.0;
    for _ in 0..iters.max(1) {
        let ng = g.lq_norm(2.0).expect("finite exponent");
        if ng == 0.0 {
            return 0.0;
        }
        let eg = extension(&g);
        let ne = eg.lp_norm(2.0, Measure::Counting).expect("finite exponent");
        est = ne / ng;
        let next = restriction(&eg, s);
        let nn = next.lq_norm(2.0).expect("finite exponent");
        g = next.scale(Complex64::new(1.0 / nn, 0.0));
    }
    est
}

/// `||E g||_{L^p(dx)} / ||g||_{L^q(dsigma)}`.
pub fn extension_ratio(g: &SurfaceFunction, p_exp: f64, q_exp: f64) -> Result<f64> {
    let den = g.lq_norm(q_exp)?;
    if den == 0.0 {
        return Ok(0.0);
    }
    Ok(extension(g).lp_norm(p_exp, Measure::Counting)? / den)
}

fn duality_map(z: Complex64, e: f64) -> Complex64 {
    let r = z.norm();
    if r == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    z / r * r.powf(e - 1.0)
}

/// Nonlinear power iteration for `max ||E g||_p / ||g||_q` started at `g`.
pub fn ascend_extension_ratio(g: &SurfaceFunction, p_exp: f64, q_exp: f64, iters: usize) -> Result<(f64, SurfaceFunction)> {
    let mut best = extension_ratio(g, p_exp, q_exp)?;
    let mut best_g = g.clone();
    let mut cur = g.clone();
    if p_exp.is_infinite() || q_exp.is_infinite() || q_exp <= 1.0 {
        return Ok((best, best_g));
    }
    let q_conj = q_exp / (q_exp - 1.0);
    for _ in 0..iters {
        let eg = extension(&cur);
        let mut dual = eg.clone();
        for z in dual.data.iter_mut() {
            *z = duality_map(*z, p_exp);
        }
        let back = restriction(&dual, &g.surface);
        let next = back.map(|z| duality_map(z, q_conj));
        if next.lq_norm(q_exp)? == 0.0 {
            break;
        }
        let r = extension_ratio(&next, p_exp, q_exp)?;
        cur = next;
        if r > best + 1e-12 {
            best = r;
            best_g = cur.clone();
        } else {
            break;
        }
    }
    Ok((best, best_g))
}

/// A lower bound for `R*(q -> p)` from structured candidates (constants,
/// point masses, isotropic subspaces of the surface form) and random
/// starts, each refined by [`ascend_extension_ratio`].
pub fn extension_norm_lower_bound(s: &Surface, p_exp: f64, q_exp: f64, random_starts: usize, seed: u64) -> Result<f64> {
    let mut cands = vec![
        SurfaceFunction::constant(s, Complex64::new(1.0, 0.0)),
        SurfaceFunction::delta(s, &vec![0; s.dim() - 1]),
    ];
    let q = s.form();
    if !q.is_degenerate() {
        if let Ok(iso) = crate::qforms::enumerate_max_isotropic(q) {
            if let Some(w) = iso.first() {
                let pts = w.elements(s.field());
                cands.push(SurfaceFunction::indicator(s, pts.iter().map(|v| v.as_slice())));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..random_starts {
        cands.push(SurfaceFunction::from_fn(s, |_| {
            Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        }));
    }
    let mut best: f64 = 0.0;
    for c in &cands {
        best = best.max(ascend_extension_ratio(c, p_exp, q_exp, 30)?.0);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;

    #[test]
    fn delta_and_constant() {
        let f = PrimeField::new(3).unwrap();
        let d = FFunction::delta(&f, 2, &[0, 0]).unwrap();
        assert!(fourier_transform(&d).data.iter().all(|z| (z - 1.0).norm() < 1e-12));
        let one = FFunction::from_fn(&f, 1, |_| Complex64::new(1.0, 0.0)).unwrap();
        let t = fourier_transform(&one);
        assert!((t.data[0] - 3.0).norm() < 1e-12);
        assert!(t.data[1].norm() < 1e-12 && t.data[2].norm() < 1e-12);
        let inv = inverse_transform(&one);
        assert!((inv.data[0] - 1.0).norm() < 1e-12 && inv.data[1].norm() < 1e-12);
    }

    #[test]
    fn transfer_arithmetic() {
        assert_eq!(stein_tomas_transfer(0.5, 0.5, 2.0), 0.0);
        assert!((stein_tomas_transfer(0.7, 1.0, 2.0) - 0.7).abs() < 1e-15);
        assert_eq!(stein_tomas_transfer(0.0, 0.3, 4.0), 0.0);
    }
}
