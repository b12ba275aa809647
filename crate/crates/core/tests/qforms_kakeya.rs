use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fflab::field::{decode, FFunction, PrimeField};
use fflab::kakeya::{eot_ratio, kakeya_maximal, kakeya_set_audit, KakeyaInstance};
use fflab::qforms::{complementary_isotropic, enumerate_max_isotropic, orthogonal_complement, QuadraticSpace, Subspace};

fn q_eval(p: u32, diag: &[u32], x: &[u32]) -> u32 {
    (diag.iter().zip(x).map(|(a, v)| u64::from(*a) * u64::from(*v) * u64::from(*v)).sum::<u64>() % u64::from(p)) as u32
}

fn b_eval(p: u32, diag: &[u32], x: &[u32], y: &[u32]) -> u32 {
    (diag.iter().zip(x.iter().zip(y)).map(|(a, (u, v))| u64::from(*a) * u64::from(*u) * u64::from(*v)).sum::<u64>()
        % u64::from(p)) as u32
}

/// Largest totally isotropic dimension, by trying vectors and pairs.
fn brute_witt(p: u32, diag: &[u32]) -> usize {
    let m = diag.len();
    let n = (p as usize).pow(m as u32);
    let iso: Vec<Vec<u32>> = (1..n).map(|i| decode(p, m, i)).filter(|x| q_eval(p, diag, x) == 0).collect();
    if iso.is_empty() {
        return 0;
    }
    if m < 4 {
        return 1;
    }
    for x in &iso {
        for y in &iso {
            let independent = (0..p).all(|c| x.iter().zip(y).any(|(a, b)| (c * a) % p != *b));
            if independent && b_eval(p, diag, x, y) == 0 {
                return 2;
            }
        }
    }
    1
}

#[test]
fn witt_index_of_diagonal_forms() {
    for p in [3, 5, 7] {
        for m in [2, 3, 4] {
            let n = (p as usize - 1).pow(m as u32);
            for i in 0..n {
                let diag: Vec<u32> = decode(p - 1, m, i).iter().map(|c| c + 1).collect();
                let f = PrimeField::new(p).unwrap();
                let q = QuadraticSpace::diagonal(&f, &diag);
                assert_eq!(q.witt_index().unwrap(), brute_witt(p, &diag), "p={p} {diag:?}");
            }
        }
    }
}

#[test]
fn complementary_isotropic_pairs_dually() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for p in [3, 5, 7] {
        let f = PrimeField::new(p).unwrap();
        for n in [1, 2] {
            let q = QuadraticSpace::hyperbolic(&f, n);
            let all = enumerate_max_isotropic(&q).unwrap();
            for _ in 0..10 {
                let w = &all[rng.gen_range(0..all.len())];
                let pair = complementary_isotropic(&q, w).unwrap();
                let gram = pair.gram(&q);
                for (i, row) in gram.iter().enumerate() {
                    for (j, &g) in row.iter().enumerate() {
                        assert_eq!(g, u32::from(i == j));
                    }
                }
                assert!(q.is_totally_isotropic(&pair.space));
                assert!(w.is_complement(&f, &pair.space));
            }
        }
    }
}

#[test]
fn anisotropic_forms_have_no_maximal_pair() {
    let f = PrimeField::new(3).unwrap();
    // x^2 + y^2 is anisotropic when -1 is not a square.
    let q = QuadraticSpace::diagonal(&f, &[1, 1]);
    assert_eq!(q.witt_index().unwrap(), 0);
    assert!(complementary_isotropic(&q, &Subspace::zero(2)).is_err());
}

#[test]
fn orthogonal_complement_by_membership() {
    let f = PrimeField::new(5).unwrap();
    let q = QuadraticSpace::diagonal(&f, &[1, 2, 3]);
    let w = Subspace::span(&f, 3, &[vec![1, 1, 0]]);
    let perp = orthogonal_complement(&q, &w);
    assert_eq!(perp.dim(), 2);
    for i in 0..125 {
        let x = decode(5, 3, i);
        assert_eq!(perp.contains(&f, &x), b_eval(5, &[1, 2, 3], &x, &[1, 1, 0]) == 0);
    }
}

#[test]
fn parabolic_kakeya_sets_at_every_small_prime() {
    for p in [3, 5, 7, 11] {
        let f = PrimeField::new(p).unwrap();
        for m in [2, 3] {
            let k = KakeyaInstance::parabolic(&f, m).unwrap();
            let audit = kakeya_set_audit(&KakeyaInstance::new(k.set.clone(), None).unwrap()).unwrap();
            assert!(audit.is_kakeya, "p={p} m={m}");
        }
    }
}

#[test]
fn maximal_function_by_direct_line_sums() {
    let f = PrimeField::new(5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let g = FFunction::from_fn(&f, 2, |_| num_complex::Complex64::new(rng.gen_range(-1.0..1.0), 0.0)).unwrap();
    let star = kakeya_maximal(&g).unwrap();
    for eta in 0..5u32 {
        let best = (0..5u32)
            .map(|b| (0..5u32).map(|t| g.get(&[(b + eta * t) % 5, t]).norm()).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((star.values[eta as usize] - best).abs() < 1e-12);
    }
    // A single line in direction 0 carries everything in that direction.
    let line = FFunction::indicator(&f, 2, [[2u32, 0], [2, 1], [2, 2], [2, 3], [2, 4]].iter().map(|x| &x[..])).unwrap();
    let r = eot_ratio(&line, 2.0).unwrap();
    // F* is 5 in direction 0 and 1 elsewhere; ||F||_2 = sqrt(5).
    let want = ((25.0 + 4.0) / 5.0f64).sqrt() / 5.0f64.sqrt();
    assert!((r - want).abs() < 1e-12);
}
