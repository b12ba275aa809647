use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fflab::combinatorics::{
    additive_energy, energy, energy_bound_l52, energy_star, energy_to_incidence, incidence_count, vh_profile,
    EnergyMethod, Hyperplane, HyperplaneFamily, PointSet,
};
use fflab::field::PrimeField;
use fflab::surfaces::Surface;

/// Quadruples counted with no lookup structure at all.
fn brute_energy(p: u32, pts: &[Vec<u32>]) -> u64 {
    let mut n = 0;
    for a in pts {
        for b in pts {
            for c in pts {
                for d in pts {
                    if (0..a.len()).all(|i| (a[i] + b[i]) % p == (c[i] + d[i]) % p) {
                        n += 1;
                    }
                }
            }
        }
    }
    n
}

fn random_points(field: &PrimeField, s: &Surface, k: usize, seed: u64) -> PointSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = s.points();
    pts.shuffle(&mut rng);
    pts.truncate(k);
    PointSet::new(field, s.dim(), pts)
}

#[test]
fn three_energy_methods_agree_with_brute_force() {
    for p in [3, 5, 7] {
        let field = PrimeField::new(p).unwrap();
        let s = Surface::hyperbolic_paraboloid(&field, 3).unwrap();
        for seed in 0..6 {
            let e = random_points(&field, &s, 4 + 3 * seed as usize, seed);
            let want = brute_energy(p, e.points());
            for m in [EnergyMethod::QuadrupleLoop, EnergyMethod::Representation, EnergyMethod::Fourier] {
                assert_eq!(additive_energy(&e, &e, m).unwrap(), want, "p={p} {m:?}");
            }
        }
    }
}

#[test]
fn energy_of_structured_sets() {
    let field = PrimeField::new(5).unwrap();
    // On a full line a + b - c always lands back on the line.
    let line: Vec<Vec<u32>> = (0..5).map(|t| vec![t, 0, 0]).collect();
    assert_eq!(energy(&PointSet::new(&field, 3, line)), 125);
    // A single point.
    assert_eq!(energy(&PointSet::new(&field, 3, vec![vec![1, 2, 3]])), 1);
    // Two points: r(0) = 1, r(u) = 2, r(2u) = 1.
    assert_eq!(energy(&PointSet::new(&field, 3, vec![vec![0, 0, 0], vec![1, 0, 0]])), 6);
}

#[test]
fn off_diagonal_energy_is_bounded_by_total() {
    let field = PrimeField::new(5).unwrap();
    let s = Surface::hyperbolic_paraboloid(&field, 3).unwrap();
    for seed in 0..5 {
        let e = random_points(&field, &s, 12, seed);
        let star = energy_star(&e).unwrap();
        assert!(star <= energy(&e));
    }
    let off = PointSet::new(&field, 3, vec![vec![1, 1, 2]]);
    assert!(energy_star(&off).is_err());
}

#[test]
fn vh_profile_counts_lines() {
    let field = PrimeField::new(3).unwrap();
    let s = Surface::hyperbolic_paraboloid(&field, 3).unwrap();
    let all = PointSet::new(&field, 3, s.points());
    let prof = vh_profile(&all).unwrap();
    assert_eq!(prof.vertical, vec![3, 3, 3]);
    assert_eq!(prof.max, 3);
    let r = energy_bound_l52(&all).unwrap();
    assert_eq!(r.energy, brute_energy(3, all.points()));
}

#[test]
fn incidences_by_direct_count() {
    let field = PrimeField::new(5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let pts: Vec<Vec<u32>> = (0..15).map(|_| vec![rng.gen_range(0..5), rng.gen_range(0..5)]).collect();
    let ps = PointSet::new(&field, 2, pts);
    let planes: Vec<Hyperplane> = (0..8)
        .map(|_| Hyperplane::new(&field, vec![1, rng.gen_range(0..5)], rng.gen_range(0..5)))
        .collect();
    let fam = HyperplaneFamily::new(&field, 2, planes.clone());
    let want: u64 = planes
        .iter()
        .map(|h| {
            ps.points()
                .iter()
                .filter(|x| (x[0] + h.normal[1] * x[1]) % 5 == h.offset)
                .count() as u64
        })
        .sum();
    assert_eq!(incidence_count(&ps, &fam).unwrap(), want);
}

#[test]
fn energy_is_bounded_by_its_incidence_problem() {
    let field = PrimeField::new(5).unwrap();
    let s = Surface::hyperbolic_paraboloid(&field, 3).unwrap();
    for seed in 0..8 {
        let a = random_points(&field, &s, 10, seed);
        let b = random_points(&field, &s, 7, seed + 100);
        let r = energy_to_incidence(&s, &a, &b).unwrap();
        assert_eq!(r.energy, additive_energy(&a, &b, EnergyMethod::QuadrupleLoop).unwrap());
        assert!(r.holds(), "seed {seed}: {} > {}", r.energy, r.bound());
    }
}
