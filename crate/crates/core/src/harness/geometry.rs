//! Quadratic forms, Kakeya sets and the coset parameterisation.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use super::{random_complex, worst, Ctx, Outcome, Witness};
use crate::combinatorics::PointSet;
use crate::error::{Error, Result};
use crate::field::{checked_size, decode, FFunction, PrimeField};
use crate::kakeya::{
    coset_extension, dual_consistency, eot_ratio, exp_kak_ratio, kakeya_set_audit, reg_set_bound,
    restriction_to_kakeya_embed, KakeyaInstance,
};
use crate::linalg::{self, Matrix};
use crate::qforms::{
    allowed_subsurface_types, ambient_class, classify_subsurface, complementary_isotropic, enumerate_max_isotropic,
    orthogonal_complement, orthogonal_indicator, QuadraticSpace, Subspace,
};
use crate::surfaces::{extension, Surface, SurfaceFunction};

fn random_invertible(f: &PrimeField, m: usize, rng: &mut ChaCha8Rng) -> Matrix {
    loop {
        let a: Matrix = (0..m).map(|_| (0..m).map(|_| rng.gen_range(0..f.p())).collect()).collect();
        if linalg::determinant(f, &a) != 0 {
            return a;
        }
    }
}

fn random_subspace(f: &PrimeField, m: usize, k: usize, rng: &mut ChaCha8Rng) -> Subspace {
    loop {
        let vecs: Vec<Vec<u32>> = (0..k).map(|_| (0..m).map(|_| rng.gen_range(0..f.p())).collect()).collect();
        let s = Subspace::span(f, m, &vecs);
        if s.dim() == k {
            return s;
        }
    }
}

fn random_diagonal(f: &PrimeField, m: usize, rng: &mut ChaCha8Rng) -> QuadraticSpace {
    let diag: Vec<u32> = (0..m).map(|_| rng.gen_range(1..f.p())).collect();
    QuadraticSpace::diagonal(f, &diag)
}

/// Largest `k` with a totally isotropic `k`-space, by enumeration.
fn isotropic_search(q: &QuadraticSpace) -> Result<usize> {
    let mut k = 0;
    while k < q.dim() && !q.totally_isotropic(k + 1)?.is_empty() {
        k += 1;
    }
    Ok(k)
}

pub(super) fn qf1(ctx: &Ctx) -> Result<Outcome> {
    // The parameter is the dimension of the form.
    let m = ctx.d();
    ctx.require((1..=4).contains(&m), "dim", m, "form dimension must be 1..=4")?;
    let field = ctx.field()?;
    let p = ctx.p();
    let forms = checked_size(p - 1, m)?;
    let rows: Vec<(usize, usize, bool, bool)> = (0..forms)
        .into_par_iter()
        .map(|i| {
            let diag: Vec<u32> = decode(p - 1, m, i).iter().map(|c| c + 1).collect();
            let q = QuadraticSpace::diagonal(&field, &diag);
            let formula = q.witt_index()?;
            let searched = isotropic_search(&q)?;
            Ok((formula, searched, field.is_square(q.determinant()), field.minus_one_is_square()))
        })
        .collect::<Result<_>>()?;
    let mismatches = rows.iter().filter(|r| r.0 != r.1).count();
    let mut cases: Vec<(bool, usize)> = rows.iter().map(|r| (r.2, r.0)).collect();
    cases.sort_unstable();
    cases.dedup();
    let first_bad = rows.iter().position(|r| r.0 != r.1);
    let witness = first_bad.map(|i| decode(p - 1, m, i).iter().map(|&c| f64::from(c + 1)).collect::<Vec<_>>());
    Ok(Outcome::new(
        mismatches as f64,
        json!({
            "forms": forms,
            "mismatches": mismatches,
            "determinant_square_and_index": cases,
        }),
        Witness::values(&witness.unwrap_or_default()),
    ))
}

pub(super) fn qf2(ctx: &Ctx) -> Result<Outcome> {
    let m = ctx.d();
    ctx.require(m == 2 || m == 4, "dim", m, "needs a form of dimension 2 or 4")?;
    let field = ctx.field()?;
    let n = m / 2;
    let h = QuadraticSpace::hyperbolic(&field, n);
    let results = ctx.trials(ctx.params.trials, |_, rng| {
        let mm = random_invertible(&field, m, rng);
        let q = QuadraticSpace::new(&field, linalg::congruence(&field, h.matrix(), &mm))?;
        let all = enumerate_max_isotropic(&q)?;
        let w = all.choose(rng).expect("split forms have maximal isotropic subspaces").clone();
        let pair = complementary_isotropic(&q, &w)?;
        let gram = pair.gram(&q);
        let mut bad = 0usize;
        for (i, row) in gram.iter().enumerate() {
            for (j, &g) in row.iter().enumerate() {
                bad += usize::from(g != u32::from(i == j));
            }
        }
        bad += usize::from(!q.is_totally_isotropic(&pair.space));
        bad += usize::from(pair.space.dim() != n || !w.is_complement(&field, &pair.space));
        let flat: Vec<f64> = q.matrix().iter().flatten().map(|&c| f64::from(c)).collect();
        Ok((bad as f64, flat))
    })?;
    let (v, flat) = worst(results).expect("at least one trial");
    Ok(Outcome::new(v, json!({}), Witness::values(&flat)))
}

pub(super) fn qf3(ctx: &Ctx) -> Result<Outcome> {
    let m = ctx.d();
    ctx.require((1..=4).contains(&m), "dim", m, "form dimension must be 1..=4")?;
    let field = ctx.field()?;
    let p = ctx.p();
    let results = ctx.trials(ctx.params.trials, |_, rng| {
        let q = QuadraticSpace::new(&field, linalg::congruence(&field, random_diagonal(&field, m, rng).matrix(), &random_invertible(&field, m, rng)))?;
        let k = rng.gen_range(0..=m);
        let w = random_subspace(&field, m, k, rng);
        let perp = orthogonal_complement(&q, &w);
        let mut dev: f64 = 0.0;
        for i in 0..checked_size(p, m)? {
            let x = decode(p, m, i);
            let direct = w.basis().iter().all(|b| q.bilinear(&x, b) == 0);
            let want = Complex64::new(f64::from(u8::from(direct)), 0.0);
            dev = dev.max((orthogonal_indicator(&q, &w, &x) - want).norm());
            if perp.contains(&field, &x) != direct {
                dev = dev.max(1.0);
            }
        }
        let flat: Vec<f64> = w.basis().iter().flatten().map(|&c| f64::from(c)).collect();
        Ok((dev, flat))
    })?;
    let (v, flat) = worst(results).expect("at least one trial");
    Ok(Outcome::new(v, json!({}), Witness::values(&flat)))
}

pub(super) fn qf4(ctx: &Ctx) -> Result<Outcome> {
    let d = ctx.d();
    ctx.require((4..=7).contains(&d), "dim", d, "tables cover 4 <= d <= 7")?;
    let field = ctx.field()?;
    let m = d - 1;
    let results = ctx.trials(ctx.params.trials, |t, rng| {
        let q = if t % 2 == 0 {
            QuadraticSpace::dot(&field, m)
        } else {
            random_diagonal(&field, m, rng)
        };
        let class = ambient_class(&q)?;
        let v = random_subspace(&field, m, d - 3, rng);
        // A form vanishing on all of V is outside the classification.
        match classify_subsurface(&q, &v) {
            Ok(ty) => {
                let allowed = allowed_subsurface_types(d, class);
                let flat: Vec<f64> = v.basis().iter().flatten().map(|&c| f64::from(c)).collect();
                Ok((f64::from(u8::from(!allowed.contains(&ty))), Some((ty, flat))))
            }
            Err(Error::FullyDegenerate) => Ok((0.0, None)),
            Err(e) => Err(e),
        }
    })?;
    let skipped = results.iter().filter(|r| r.1.is_none()).count();
    let mut seen: Vec<_> = results.iter().filter_map(|r| r.1.as_ref().map(|x| x.0)).collect();
    seen.sort_unstable();
    seen.dedup();
    let outside = results.iter().filter(|r| r.0 > 0.0).count();
    let (_, w) = worst(results).expect("at least one trial");
    Ok(Outcome::new(
        outside as f64,
        json!({"fully_degenerate": skipped, "types_seen": seen}),
        Witness::values(&w.map(|x| x.1).unwrap_or_default()),
    ))
}

fn indicator(f: &PrimeField, m: usize, pts: &[Vec<u32>]) -> Result<FFunction> {
    FFunction::indicator(f, m, pts.iter().map(Vec::as_slice))
}

pub(super) fn kk1(ctx: &Ctx) -> Result<Outcome> {
    let m = ctx.d();
    ctx.require(m == 2 || m == 3, "dim", m, "maximal ratios run for m = 2, 3")?;
    let field = ctx.field()?;
    let p = ctx.p();
    let e = m as f64;
    let space: Vec<Vec<u32>> = (0..checked_size(p, m)?).map(|i| decode(p, m, i)).collect();
    let results: Vec<(f64, FFunction)> = if p == 3 && m == 2 {
        (1..1u32 << 9)
            .into_par_iter()
            .map(|mask| {
                let pts: Vec<Vec<u32>> =
                    space.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, x)| x.clone()).collect();
                let f = indicator(&field, m, &pts)?;
                Ok((eot_ratio(&f, e)?, f))
            })
            .collect::<Result<_>>()?
    } else {
        let kakeya = KakeyaInstance::parabolic(&field, m)?;
        ctx.trials(ctx.params.trials, |t, rng| {
            let f = match t % 4 {
                0 => indicator(&field, m, kakeya.set.points())?,
                1 => {
                    let mut pts = space.clone();
                    pts.shuffle(rng);
                    pts.truncate(rng.gen_range(1..=space.len()));
                    indicator(&field, m, &pts)?
                }
                2 => {
                    // A few random lines.
                    let k = rng.gen_range(1..=p as usize);
                    let mut pts = Vec::new();
                    for _ in 0..k {
                        let b: Vec<u32> = (0..m - 1).map(|_| rng.gen_range(0..p)).collect();
                        let dir: Vec<u32> = (0..m - 1).map(|_| rng.gen_range(0..p)).collect();
                        pts.extend(crate::kakeya::AffineLine::new(b, dir).points(&field));
                    }
                    indicator(&field, m, &pts)?
                }
                _ => FFunction::from_fn(&field, m, |_| {
                    Complex64::new(if rng.gen_bool(0.3) { rng.gen_range(0.0..1.0) } else { 0.0 }, 0.0)
                })?,
            };
            if f.data.iter().all(|z| z.norm() == 0.0) {
                let pt = indicator(&field, m, &space[..1])?;
                return Ok((eot_ratio(&pt, e)?, pt));
            }
            Ok((eot_ratio(&f, e)?, f))
        })?
    };
    let sets = results.len();
    let (v, f) = worst(results).expect("at least one input");
    Ok(Outcome::new(
        v,
        json!({"inputs": sets, "exhaustive": p == 3 && m == 2, "exponent": e}),
        Witness::function(&f),
    ))
}

pub(super) fn kk2(ctx: &Ctx) -> Result<Outcome> {
    let m = ctx.d();
    ctx.require(m == 2 || m == 3, "dim", m, "maximal ratios run for m = 2, 3")?;
    let field = ctx.field()?;
    let results = ctx.trials(ctx.params.trials, |t, rng| {
        let e = [2.0f64, 1.5, 3.0][t % 3].min(m as f64 + 0.5);
        let start = FFunction::from_fn(&field, m, |_| Complex64::new(rng.gen_range(0.01..1.0), 0.0))?;
        let dc = dual_consistency(&start, e, 1e-9, 500)?;
        Ok((dc.gap, (dc, start)))
    })?;
    let iters = results.iter().map(|r| r.1 .0.iterations).max().unwrap_or(0);
    let (v, (dc, start)) = worst(results).expect("at least one trial");
    Ok(Outcome::new(
        v,
        json!({"worst": dc, "max_iterations": iters}),
        Witness::function(&start),
    ))
}

pub(super) fn kk3(ctx: &Ctx) -> Result<Outcome> {
    let n = ctx.d();
    ctx.require(n == 1 || n == 2, "dim", n, "embedding runs for n = 1, 2")?;
    let field = ctx.field()?;
    let p = ctx.p();
    let nn = checked_size(p, n)?;
    let results = ctx.trials(ctx.params.trials, |t, rng| {
        let h: Vec<f64> = (0..nn).map(|_| if rng.gen_bool(0.8) { rng.gen_range(0.0..2.0) } else { 0.0 }).collect();
        let b: Vec<Vec<u32>> = (0..nn)
            .map(|_| (0..n).map(|_| if t == 0 { 0 } else { rng.gen_range(0..p) }).collect())
            .collect();
        let emb = restriction_to_kakeya_embed(&field, n, &h, &b)?;
        Ok((emb.closed_form_deviation.max(emb.collapse_deviation), h))
    })?;
    let (v, h) = worst(results).expect("at least one trial");
    Ok(Outcome::new(v, json!({}), Witness::values(&h)))
}

/// The polynomial-method lower bound is `|K| >= p^m / m!`; the metric is that envelope
/// over the measured size.
fn audit_metric(k: &KakeyaInstance, m: usize) -> Result<(f64, bool)> {
    let a = kakeya_set_audit(k)?;
    let fact: f64 = (1..=m).map(|i| i as f64).product();
    Ok((1.0 / (a.density * fact), a.is_kakeya))
}

pub(super) fn kk4(ctx: &Ctx) -> Result<Outcome> {
    let m = ctx.d();
    ctx.require(m == 2 || m == 3, "dim", m, "audits run for m = 2, 3")?;
    let field = ctx.field()?;
    let p = ctx.p();
    let k = m - 1;
    let nd = checked_size(p, k)?;
    let results: Vec<(f64, (bool, Vec<Vec<u32>>))> = if p == 3 && m == 2 {
        (0..27usize)
            .into_par_iter()
            .map(|code| {
                let bases: Vec<Vec<u32>> = decode(3, 3, code).into_iter().map(|b| vec![b]).collect();
                let inst = KakeyaInstance::union_of_lines(&field, m, bases.clone())?;
                let (v, ok) = audit_metric(&inst, m)?;
                Ok((v, (ok, bases)))
            })
            .collect::<Result<_>>()?
    } else {
        ctx.trials(ctx.params.trials, |t, rng| {
            let inst = if t == 0 {
                KakeyaInstance::parabolic(&field, m)?
            } else {
                let bases = (0..nd).map(|_| (0..k).map(|_| rng.gen_range(0..p)).collect()).collect();
                KakeyaInstance::union_of_lines(&field, m, bases)?
            };
            let (v, ok) = audit_metric(&inst, m)?;
            Ok((v, (ok, inst.witness.unwrap_or_default())))
        })?
    };
    let failures = results.iter().filter(|r| !r.1 .0).count();
    let (v, (_, bases)) = worst(results).expect("at least one instance");
    let flat: Vec<f64> = bases.iter().flatten().map(|&c| f64::from(c)).collect();
    Ok(Outcome::new(v, json!({"not_kakeya": failures}), Witness::values(&flat)).with_violations(failures))
}

/// The paraboloid when its form splits, the hyperbolic paraboloid
/// otherwise, with a complementary pair of maximal isotropic subspaces.
fn split_surface(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<(Surface, Subspace, Subspace)> {
    let field = ctx.field()?;
    let d = ctx.d();
    let p_split = Surface::paraboloid(&field, d)?;
    let s = if p_split.form().witt_index()? == (d - 1) / 2 {
        p_split
    } else {
        Surface::hyperbolic_paraboloid(&field, d)?
    };
    let all = enumerate_max_isotropic(s.form())?;
    let w = all.choose(rng).expect("split form").clone();
    let v = complementary_isotropic(s.form(), &w)?.space;
    Ok((s, w, v))
}

pub(super) fn mx1(ctx: &Ctx) -> Result<Outcome> {
    let d = ctx.d();
    ctx.require(d % 2 == 1 && d >= 3, "dim", d, "needs odd d >= 3")?;
    let results = ctx.trials(ctx.params.trials, |_, rng| {
        let (s, w, v) = split_surface(ctx, rng)?;
        let g = SurfaceFunction::from_fn(&s, |_| random_complex(rng));
        let dev = coset_extension(&g, &w, &v)?.max_abs_diff(&extension(&g));
        Ok((dev, g))
    })?;
    let (v, g) = worst(results).expect("at least one trial");
    Ok(Outcome::new(v, json!({"surface": format!("{:?}", g.surface.kind())}), Witness::surface(&g)))
}

pub(super) fn mx2(ctx: &Ctx) -> Result<Outcome> {
    let d = ctx.d();
    ctx.require(d % 2 == 1 && d >= 3, "dim", d, "needs odd d >= 3")?;
    let results = ctx.trials(ctx.params.trials, |t, rng| {
        let (s, w, v) = split_surface(ctx, rng)?;
        let g = match t % 3 {
            0 => SurfaceFunction::from_fn(&s, |_| random_complex(rng)),
            1 => {
                // Supported on a few cosets of W.
                let shifts: Vec<Vec<u32>> = (0..2).map(|_| (0..d - 1).map(|_| rng.gen_range(0..s.field().p())).collect()).collect();
                let field = s.field().clone();
                SurfaceFunction::from_fn(&s, |xi| {
                    if shifts.iter().any(|sh| w.contains(&field, &field.sub_vec(xi, sh))) {
                        random_complex(rng)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
            }
            _ => SurfaceFunction::delta(&s, &vec![0; d - 1]),
        };
        Ok((exp_kak_ratio(&g, &w, &v)?, g))
    })?;
    let (v, g) = worst(results).expect("at least one trial");
    Ok(Outcome::new(v, json!({}), Witness::surface(&g)))
}

pub(super) fn mx3(ctx: &Ctx) -> Result<Outcome> {
    let d = ctx.d();
    ctx.require(d % 2 == 1 && d >= 3, "dim", d, "needs odd d >= 3")?;
    let field = ctx.field()?;
    let s = Surface::paraboloid(&field, d)?;
    let iso = enumerate_max_isotropic(s.form())?;
    ctx.require(!iso.is_empty(), "prime", ctx.p(), "the paraboloid form has no isotropic subspace")?;
    let p = ctx.p();
    let m = d - 1;
    let results = ctx.trials(ctx.params.trials, |_, rng| {
        let zs = rng.gen_range(1..=p as usize);
        let pieces = rng.gen_range(1..=p as usize);
        let mut z_all: Vec<u32> = (0..p).collect();
        z_all.shuffle(rng);
        let mut pts = Vec::new();
        for &z in &z_all[..zs] {
            for _ in 0..pieces {
                let w = iso.choose(rng).expect("nonempty");
                let shift: Vec<u32> = (0..m).map(|_| rng.gen_range(0..p)).collect();
                for x in w.elements(&field) {
                    let mut y = field.add_vec(&x, &shift);
                    y.push(z);
                    pts.push(y);
                }
            }
        }
        let e = PointSet::new(&field, d, pts);
        let report = reg_set_bound(&s, &e, pieces)?;
        Ok((report.constant, e))
    })?;
    let (v, e) = worst(results).expect("at least one trial");
    Ok(Outcome::new(v, json!({"worst_size": e.len()}), Witness::points(&e)))
}
