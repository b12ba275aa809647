use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fflab::field::{decode, FFunction, Measure, PrimeField};
use fflab::fourier::{convolve, convolve_direct, exact_r22, fourier_transform, inverse_transform, power_iteration_r22};
use fflab::surfaces::{extension, restriction, surface_measure_inverse_ft, Surface, SurfaceFunction};

fn e(p: u32, k: u64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * (k % u64::from(p)) as f64 / f64::from(p))
}

fn dot(p: u32, a: &[u32], b: &[u32]) -> u64 {
    a.iter().zip(b).map(|(x, y)| u64::from(*x) * u64::from(*y)).sum::<u64>() % u64::from(p)
}

fn random_fn(field: &PrimeField, d: usize, seed: u64) -> FFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    FFunction::from_fn(field, d, |_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).unwrap()
}

#[test]
fn transform_matches_the_defining_sum() {
    for (p, d) in [(3, 1), (3, 3), (5, 2), (7, 2)] {
        let field = PrimeField::new(p).unwrap();
        let f = random_fn(&field, d, 11);
        let got = fourier_transform(&f);
        let n = f.data.len();
        for j in 0..n {
            let xi = decode(p, d, j);
            let want: Complex64 = (0..n)
                .map(|i| f.data[i] * e(p, u64::from(p) - dot(p, &decode(p, d, i), &xi)))
                .sum();
            assert!((got.data[j] - want).norm() < 1e-9, "p={p} d={d} xi={xi:?}");
        }
    }
}

#[test]
fn inverse_undoes_forward_and_plancherel_holds() {
    let field = PrimeField::new(5).unwrap();
    let f = random_fn(&field, 3, 3);
    let g = fourier_transform(&f);
    assert!(inverse_transform(&g).max_abs_diff(&f) < 1e-12);
    let lhs = f.lp_norm(2.0, Measure::Counting).unwrap().powi(2);
    let rhs = g.lp_norm(2.0, Measure::Counting).unwrap().powi(2) / 125.0;
    assert!((lhs - rhs).abs() < 1e-9 * lhs);
}

#[test]
fn convolution_through_the_transform() {
    let field = PrimeField::new(7).unwrap();
    let a = random_fn(&field, 2, 1);
    let b = random_fn(&field, 2, 2);
    assert!(convolve(&a, &b).max_abs_diff(&convolve_direct(&a, &b)) < 1e-10);
}

/// `(dsigma)^v(x) = |S|^{-1} sum_{s in S} e(x.s)`, summed point by point.
fn brute_dsigma(s: &Surface) -> Vec<Complex64> {
    let p = s.field().p();
    let d = s.dim();
    let pts = s.points();
    let total = (p as usize).pow(d as u32);
    (0..total)
        .map(|i| {
            let x = decode(p, d, i);
            pts.iter().map(|z| e(p, dot(p, &x, z))).sum::<Complex64>() / pts.len() as f64
        })
        .collect()
}

#[test]
fn closed_form_surface_transforms_match_brute_force() {
    for (p, d) in [(3, 3), (5, 3), (7, 3), (3, 5)] {
        let field = PrimeField::new(p).unwrap();
        for s in [Surface::paraboloid(&field, d).unwrap(), Surface::hyperbolic_paraboloid(&field, d).unwrap()] {
            let closed = surface_measure_inverse_ft(&s);
            let brute = brute_dsigma(&s);
            let dev = closed.data.iter().zip(&brute).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            assert!(dev < 1e-9, "p={p} d={d} {:?}: {dev}", s.kind());
        }
    }
}

#[test]
fn extension_and_restriction_are_adjoint() {
    let field = PrimeField::new(5).unwrap();
    let s = Surface::hyperbolic_paraboloid(&field, 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let g = SurfaceFunction::from_fn(&s, |_| Complex64::new(rng.gen(), rng.gen()));
    let f = random_fn(&field, 3, 4);
    // <Eg, f> with counting measure equals <g, Rf> with normalised measure.
    let lhs: Complex64 = extension(&g).data.iter().zip(&f.data).map(|(a, b)| a * b.conj()).sum();
    let rf = restriction(&f, &s);
    let rhs: Complex64 =
        s.points().iter().map(|x| g.get(&x[..2]) * rf.get(&x[..2]).conj()).sum::<Complex64>() / s.size() as f64;
    assert!((lhs - rhs).norm() < 1e-9 * lhs.norm().max(1.0));
}

#[test]
fn r22_formula_agrees_with_power_iteration() {
    for p in [3, 5, 7] {
        let field = PrimeField::new(p).unwrap();
        let s = Surface::paraboloid(&field, 3).unwrap();
        let exact = exact_r22(&s);
        assert!((exact - f64::from(p).sqrt()).abs() < 1e-12);
        assert!((power_iteration_r22(&s, 40, 1) - exact).abs() < 1e-6 * exact);
    }
}

proptest! {
    #[test]
    fn field_inverse_and_distributivity(p in prop::sample::select(vec![3u32, 5, 7, 11, 13, 101]), a in 0u32..1000, b in 0u32..1000, c in 0u32..1000) {
        let f = PrimeField::new(p).unwrap();
        let (a, b, c) = (a % p, b % p, c % p);
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        if a != 0 {
            prop_assert_eq!(f.mul(a, f.inv(a)), 1);
        }
        prop_assert_eq!(f.add(a, f.neg(a)), 0);
        prop_assert_eq!(f.is_square(a) || a == 0, (0..p).any(|x| f.mul(x, x) == a));
    }

    #[test]
    fn transform_is_linear(seed in 0u64..500, re in -2.0f64..2.0, im in -2.0f64..2.0) {
        let field = PrimeField::new(3).unwrap();
        let a = random_fn(&field, 3, seed);
        let b = random_fn(&field, 3, seed + 1);
        let c = Complex64::new(re, im);
        let mut sum = a.clone();
        for (x, y) in sum.data.iter_mut().zip(&b.data) {
            *x = *x * c + y;
        }
        let lhs = fourier_transform(&sum);
        let fa = fourier_transform(&a).scale(c);
        let fb = fourier_transform(&b);
        let dev = lhs.data.iter().zip(fa.data.iter().zip(&fb.data)).map(|(l, (x, y))| (l - x - y).norm()).fold(0.0, f64::max);
        prop_assert!(dev < 1e-9);
    }
}

#[test]
fn invalid_primes_are_rejected() {
    for p in [0, 1, 2, 9, 15] {
        assert!(PrimeField::new(p).is_err(), "{p}");
    }
}
