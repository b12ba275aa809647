//! Prime fields, vectors over them, the additive character and dense
//! complex-valued functions on `F_p^d`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest number of points any enumeration is allowed to touch.
pub const SIZE_GUARD: u64 = 1 << 31;

/// Values of `e(k) = exp(2 pi i k / p)` for `k` in `0..p`.
#[derive(Clone, Debug)]
pub struct CharacterTable {
    p: u32,
    values: Vec<Complex64>,
}

impl CharacterTable {
    pub fn new(p: u32) -> CharacterTable {
        let values = (0..p)
            .map(|k| Complex64::from_polar(1.0, 2.0 * PI * f64::from(k) / f64::from(p)))
            .collect();
        CharacterTable { p, values }
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, k: u32) -> Complex64 {
        self.values[k as usize]
    }
}

struct Tables {
    p: u32,
    inv: Vec<u32>,
    square: Vec<bool>,
    chars: CharacterTable,
}

/// The field `F_p` for an odd prime `p`.
///
/// Cloning is cheap; the lookup tables are shared.
#[derive(Clone)]
pub struct PrimeField {
    t: Arc<Tables>,
}

impl fmt::Debug for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.t.p)
    }
}

impl PartialEq for PrimeField {
    fn eq(&self, other: &Self) -> bool {
        self.t.p == other.t.p
    }
}

impl Eq for PrimeField {}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= n {
        if n % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}

impl PrimeField {
    pub fn new(p: u32) -> Result<PrimeField> {
        if p < 3 || !is_prime(u64::from(p)) || p > 65_521 {
            return Err(Error::InvalidPrime(u64::from(p)));
        }
        let mut inv = vec![0u32; p as usize];
        for x in 1..p {
            inv[x as usize] = pow_mod(x, p - 2, p);
        }
        let mut square = vec![false; p as usize];
        for x in 1..p {
            square[((u64::from(x) * u64::from(x)) % u64::from(p)) as usize] = true;
        }
        Ok(PrimeField {
            t: Arc::new(Tables {
                p,
                inv,
                square,
                chars: CharacterTable::new(p),
            }),
        })
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.t.p
    }

    pub fn characters(&self) -> &CharacterTable {
        &self.t.chars
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.t.p {
            s - self.t.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.t.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.t.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((u64::from(a) * u64::from(b)) % u64::from(self.t.p)) as u32
    }

    /// Multiplicative inverse. Panics on zero.
    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        assert!(a != 0, "zero has no inverse");
        self.t.inv[a as usize]
    }

    #[inline]
    pub fn div(&self, a: u32, b: u32) -> u32 {
        self.mul(a, self.inv(b))
    }

    /// Reduce any integer into `[0, p)`.
    #[inline]
    pub fn reduce(&self, x: i64) -> u32 {
        x.rem_euclid(i64::from(self.t.p)) as u32
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        let p = u64::from(self.t.p);
        let mut base = u64::from(a) % p;
        let mut e = e;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        acc as u32
    }

    /// True for nonzero squares.
    #[inline]
    pub fn is_square(&self, a: u32) -> bool {
        self.t.square[a as usize]
    }

    /// Legendre symbol: 0, 1 or -1.
    pub fn legendre(&self, a: u32) -> i32 {
        if a == 0 {
            0
        } else if self.is_square(a) {
            1
        } else {
            -1
        }
    }

    /// Whether `-1` is a square, i.e. `p = 1 mod 4`.
    pub fn minus_one_is_square(&self) -> bool {
        self.t.p % 4 == 1
    }

    /// Some square root of `a`, if one exists.
    pub fn sqrt(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return Some(0);
        }
        (1..self.t.p).find(|&x| self.mul(x, x) == a)
    }

    /// `e(x) = exp(2 pi i x / p)`.
    #[inline]
    pub fn char_eval(&self, x: u32) -> Complex64 {
        self.t.chars.get(x)
    }

    pub fn dot(&self, a: &[u32], b: &[u32]) -> u32 {
        debug_assert_eq!(a.len(), b.len());
        let p = u64::from(self.t.p);
        let s: u64 = a
            .iter()
            .zip(b)
            .map(|(&x, &y)| u64::from(x) * u64::from(y))
            .sum();
        (s % p) as u32
    }

    pub fn add_vec(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        a.iter().zip(b).map(|(&x, &y)| self.add(x, y)).collect()
    }

    pub fn sub_vec(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        a.iter().zip(b).map(|(&x, &y)| self.sub(x, y)).collect()
    }

    pub fn scale_vec(&self, c: u32, a: &[u32]) -> Vec<u32> {
        a.iter().map(|&x| self.mul(c, x)).collect()
    }
}

fn pow_mod(a: u32, e: u32, p: u32) -> u32 {
    let p = u64::from(p);
    let (mut base, mut e, mut acc) = (u64::from(a) % p, e, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc as u32
}

/// `e(x)` for a field element `x`.
pub fn char_eval(field: &PrimeField, x: u32) -> Complex64 {
    field.char_eval(x)
}

/// A point of `F_p^d`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
pub struct FFVector {
    pub coords: Vec<u32>,
}

impl FFVector {
    pub fn new(coords: Vec<u32>) -> FFVector {
        FFVector { coords }
    }

    pub fn zero(d: usize) -> FFVector {
        FFVector { coords: vec![0; d] }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn dot(&self, other: &FFVector, field: &PrimeField) -> u32 {
        field.dot(&self.coords, &other.coords)
    }
}

/// `p^d`, or `SizeOverflow` past the guard.
pub fn checked_size(p: u32, d: usize) -> Result<usize> {
    let mut n: u64 = 1;
    for _ in 0..d {
        n = n.saturating_mul(u64::from(p));
        if n > SIZE_GUARD {
            return Err(Error::SizeOverflow { p, d });
        }
    }
    Ok(n as usize)
}

/// Little-endian base-`p` index of `coords`.
#[inline]
pub fn encode(p: u32, coords: &[u32]) -> usize {
    let mut idx = 0usize;
    for &c in coords.iter().rev() {
        idx = idx * p as usize + c as usize;
    }
    idx
}

/// Inverse of [`encode`].
#[inline]
pub fn decode(p: u32, d: usize, idx: usize) -> Vec<u32> {
    let mut out = vec![0u32; d];
    decode_into(p, idx, &mut out);
    out
}

#[inline]
pub fn decode_into(p: u32, mut idx: usize, out: &mut [u32]) {
    for c in out.iter_mut() {
        *c = (idx % p as usize) as u32;
        idx /= p as usize;
    }
}

/// All `p^d` points in index order.
pub fn enumerate_points(
    field: &PrimeField,
    d: usize,
) -> Result<impl ExactSizeIterator<Item = FFVector>> {
    let n = checked_size(field.p(), d)?;
    let p = field.p();
    Ok((0..n).map(move |i| FFVector::new(decode(p, d, i))))
}

/// Measure on `F_p^d`: counting, or the probability measure `p^{-d}` per point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Measure {
    Counting,
    Normalized,
}

fn check_exponent(e: f64) -> Result<()> {
    if e.is_nan() || e < 1.0 {
        return Err(Error::InvalidExponent(e));
    }
    Ok(())
}

/// `L^e` norm of a slice of values under the given measure, where `total`
/// is the number of points the measure is normalised against.
pub fn lp_norm_values(values: &[Complex64], e: f64, measure: Measure, total: usize) -> Result<f64> {
    check_exponent(e)?;
    if e.is_infinite() {
        return Ok(values.iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    let mut s: f64 = values.iter().map(|z| z.norm().powf(e)).sum();
    if measure == Measure::Normalized {
        s /= total as f64;
    }
    Ok(s.powf(1.0 / e))
}

/// A dense complex function on `F_p^d`.
#[derive(Clone, Debug)]
pub struct FFunction {
    pub field: PrimeField,
    pub dim: usize,
    pub data: Vec<Complex64>,
}

impl FFunction {
    pub fn zeros(field: &PrimeField, dim: usize) -> Result<FFunction> {
        let n = checked_size(field.p(), dim)?;
        Ok(FFunction {
            field: field.clone(),
            dim,
            data: vec![Complex64::new(0.0, 0.0); n],
        })
    }

    pub fn from_fn(
        field: &PrimeField,
        dim: usize,
        mut f: impl FnMut(&[u32]) -> Complex64,
    ) -> Result<FFunction> {
        let n = checked_size(field.p(), dim)?;
        let p = field.p();
        let mut x = vec![0u32; dim];
        let data = (0..n)
            .map(|i| {
                decode_into(p, i, &mut x);
                f(&x)
            })
            .collect();
        Ok(FFunction {
            field: field.clone(),
            dim,
            data,
        })
    }

    pub fn from_data(field: &PrimeField, dim: usize, data: Vec<Complex64>) -> Result<FFunction> {
        let n = checked_size(field.p(), dim)?;
        if data.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: data.len(),
            });
        }
        Ok(FFunction {
            field: field.clone(),
            dim,
            data,
        })
    }

    /// Indicator of a set of points.
    pub fn indicator<'a>(
        field: &PrimeField,
        dim: usize,
        points: impl IntoIterator<Item = &'a [u32]>,
    ) -> Result<FFunction> {
        let mut f = FFunction::zeros(field, dim)?;
        for x in points {
            f.data[encode(field.p(), x)] = Complex64::new(1.0, 0.0);
        }
        Ok(f)
    }

    pub fn delta(field: &PrimeField, dim: usize, at: &[u32]) -> Result<FFunction> {
        FFunction::indicator(field, dim, [at])
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn p(&self) -> u32 {
        self.field.p()
    }

    #[inline]
    pub fn get(&self, x: &[u32]) -> Complex64 {
        self.data[encode(self.field.p(), x)]
    }

    #[inline]
    pub fn set(&mut self, x: &[u32], v: Complex64) {
        let i = encode(self.field.p(), x);
        self.data[i] = v;
    }

    pub fn lp_norm(&self, e: f64, measure: Measure) -> Result<f64> {
        lp_norm_values(&self.data, e, measure, self.data.len())
    }

    /// `sum_x f(x) conj(g(x))` under counting measure.
    pub fn inner(&self, other: &FFunction) -> Complex64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a * b.conj())
            .sum()
    }

    pub fn scale(&self, c: Complex64) -> FFunction {
        FFunction {
            field: self.field.clone(),
            dim: self.dim,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &FFunction) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn support(&self, eps: f64) -> Vec<usize> {
        (0..self.data.len())
            .filter(|&i| self.data[i].norm() > eps)
            .collect()
    }
}

/// Lower-case alias kept for call sites that read better as a free function.
pub fn lp_norm(f: &FFunction, e: f64, measure: Measure) -> Result<f64> {
    f.lp_norm(e, measure)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_match_definitions() {
        for p in [3, 5, 7, 11, 13] {
            let f = PrimeField::new(p).unwrap();
            for x in 1..p {
                assert_eq!(f.mul(x, f.inv(x)), 1);
            }
            let sq: Vec<u32> = (1..p).map(|x| x * x % p).collect();
            for x in 1..p {
                assert_eq!(f.is_square(x), sq.contains(&x));
            }
            let sum: Complex64 = f.characters().values().iter().sum();
            assert!(sum.norm() < 1e-9);
        }
    }

    #[test]
    fn rejects_non_primes() {
        for p in [0, 1, 2, 4, 9, 15] {
            assert!(PrimeField::new(p).is_err());
        }
    }

    #[test]
    fn characters() {
        let f = PrimeField::new(5).unwrap();
        assert!((f.char_eval(0) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((f.char_eval(1) * f.char_eval(4) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        let f3 = PrimeField::new(3).unwrap();
        let s: Complex64 = (0..3).map(|x| f3.char_eval(x)).sum();
        assert!(s.norm() < 1e-12);
    }

    #[test]
    fn enumeration_order() {
        let f = PrimeField::new(3).unwrap();
        let pts: Vec<_> = enumerate_points(&f, 1).unwrap().map(|v| v.coords).collect();
        assert_eq!(pts, vec![vec![0], vec![1], vec![2]]);
        let pts: Vec<_> = enumerate_points(&f, 2).unwrap().collect();
        assert_eq!(pts.len(), 9);
        assert_eq!(pts[0].coords, vec![0, 0]);
        assert_eq!(pts[8].coords, vec![2, 2]);
        let f13 = PrimeField::new(13).unwrap();
        assert!(matches!(
            enumerate_points(&f13, 9).err(),
            Some(Error::SizeOverflow { .. })
        ));
    }

    #[test]
    fn norms() {
        let f = PrimeField::new(3).unwrap();
        let d = FFunction::delta(&f, 2, &[1, 2]).unwrap();
        assert!((d.lp_norm(2.0, Measure::Counting).unwrap() - 1.0).abs() < 1e-12);
        let one = FFunction::from_fn(&f, 2, |_| Complex64::new(1.0, 0.0)).unwrap();
        assert!((one.lp_norm(2.0, Measure::Counting).unwrap() - 3.0).abs() < 1e-12);
        for e in [1.0, 1.5, 4.0, f64::INFINITY] {
            assert!((one.lp_norm(e, Measure::Normalized).unwrap() - 1.0).abs() < 1e-12);
        }
        assert!(one.lp_norm(0.5, Measure::Counting).is_err());
    }
}
