//! The Kakeya maximal operator over `F_p^m`, its dual, Kakeya set audits,
//! the embedding of Kakeya superpositions into the extension operator of
//! the hyperbolic paraboloid, and the coset parameterisation of the
//! paraboloid extension operator.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::combinatorics::PointSet;
use crate::error::{Error, Result};
use crate::field::{checked_size, decode, encode, lp_norm_values, FFunction, Measure, PrimeField};
use crate::fourier::{mixed_norm, MixedNormSpec};
use crate::linalg;
use crate::qforms::Subspace;
use crate::surfaces::{extension, restriction, Surface, SurfaceFunction, SurfaceKind};

/// The non-horizontal line `{(b + eta t, t) : t in F}` of `F^m`.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct AffineLine {
    pub base: Vec<u32>,
    pub dir: Vec<u32>,
}

impl AffineLine {
    pub fn new(base: Vec<u32>, dir: Vec<u32>) -> AffineLine {
        assert_eq!(base.len(), dir.len(), "base and direction live in the same F^(m-1)");
        AffineLine { base, dir }
    }

    pub fn point(&self, f: &PrimeField, t: u32) -> Vec<u32> {
        let mut x = f.add_vec(&self.base, &f.scale_vec(t, &self.dir));
        x.push(t);
        x
    }

    pub fn points(&self, f: &PrimeField) -> Vec<Vec<u32>> {
        (0..f.p()).map(|t| self.point(f, t)).collect()
    }

    pub fn contains(&self, f: &PrimeField, x: &[u32]) -> bool {
        x.len() == self.base.len() + 1 && self.point(f, x[x.len() - 1]) == x
    }
}

fn line_dim(f: &FFunction) -> Result<usize> {
    if f.dim < 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: f.dim });
    }
    checked_size(f.p(), 2 * (f.dim - 1))?;
    Ok(f.dim - 1)
}

/// `sum_{x in l(b, eta)} |F(x)|` for every base `b`, indexed by `encode(b)`.
pub fn line_sums(f: &FFunction, dir: &[u32]) -> Vec<f64> {
    let field = &f.field;
    let p = field.p();
    let k = f.dim - 1;
    let nb = (p as usize).pow(k as u32);
    let mut sums = vec![0.0; nb];
    let mut x = vec![0u32; f.dim];
    for (i, z) in f.data.iter().enumerate() {
        let a = z.norm();
        if a == 0.0 {
            continue;
        }
        crate::field::decode_into(p, i, &mut x);
        let t = x[k];
        let b: Vec<u32> = (0..k).map(|j| field.sub(x[j], field.mul(dir[j], t))).collect();
        sums[encode(p, &b)] += a;
    }
    sums
}

/// `F*(eta)` with a maximising base for every direction.
#[derive(Clone, Debug, PartialEq)]
pub struct MaximalFunction {
    pub p: u32,
    /// `m - 1`.
    pub dim: usize,
    pub values: Vec<f64>,
    pub bases: Vec<Vec<u32>>,
}

pub fn kakeya_maximal(f: &FFunction) -> Result<MaximalFunction> {
    let k = line_dim(f)?;
    let p = f.p();
    let nd = (p as usize).pow(k as u32);
    let (values, bases): (Vec<f64>, Vec<Vec<u32>>) = (0..nd)
        .into_par_iter()
        .map(|di| {
            let sums = line_sums(f, &decode(p, k, di));
            let (bi, best) = sums
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |acc, (i, &s)| if s > acc.1 { (i, s) } else { acc });
            (best, decode(p, k, bi))
        })
        .unzip();
    Ok(MaximalFunction { p, dim: k, values, bases })
}

fn real_norm(values: &[f64], e: f64, measure: Measure) -> Result<f64> {
    let z: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    lp_norm_values(&z, e, measure, z.len())
}

/// `||F*||_{L^e(dtheta)} / ||F||_{L^e(dx)}` with normalised measure on
/// directions and counting measure on `F^m`.
pub fn eot_ratio(f: &FFunction, e: f64) -> Result<f64> {
    let den = f.lp_norm(e, Measure::Counting)?;
    if den == 0.0 {
        return Ok(0.0);
    }
    let star = kakeya_maximal(f)?;
    Ok(real_norm(&star.values, e, Measure::Normalized)? / den)
}

/// `p^{-(m-1)} sum_v h(v) 1_{l(x0(v), v)}`.
pub fn dual_kakeya_apply(field: &PrimeField, m: usize, h: &[f64], x0: &[Vec<u32>]) -> Result<FFunction> {
    let k = m - 1;
    let nd = checked_size(field.p(), k)?;
    if h.len() != nd || x0.len() != nd {
        return Err(Error::DimensionMismatch {
            expected: nd,
            got: h.len().min(x0.len()),
        });
    }
    let mut out = FFunction::zeros(field, m)?;
    let w = 1.0 / nd as f64;
    for (vi, (&hv, b)) in h.iter().zip(x0).enumerate() {
        if hv == 0.0 {
            continue;
        }
        let line = AffineLine::new(b.clone(), decode(field.p(), k, vi));
        for x in line.points(field) {
            out.data[encode(field.p(), &x)] += Complex64::new(hv * w, 0.0);
        }
    }
    Ok(out)
}

/// `p^{-(m-1)} sum_v h(v) sum_{x in l(x0(v), v)} G(x)`, which equals
/// `<dual_kakeya_apply(h, x0), G>` for real `h`.
pub fn line_pairing(g: &FFunction, h: &[f64], x0: &[Vec<u32>]) -> Complex64 {
    let field = &g.field;
    let k = g.dim - 1;
    let s: Complex64 = h
        .iter()
        .zip(x0)
        .enumerate()
        .map(|(vi, (&hv, b))| {
            let line = AffineLine::new(b.clone(), decode(field.p(), k, vi));
            let ls: Complex64 = line.points(field).iter().map(|x| g.get(x)).sum();
            ls * hv
        })
        .sum();
    s / h.len() as f64
}

/// Primal and dual lower bounds for the maximal operator norm at
/// `L^e -> L^e` and its dual `L^{e'} -> L^{e'}`, pushed up by alternating
/// the two duality maps until they agree.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct DualConsistency {
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
    pub iterations: usize,
}

pub fn dual_consistency(start: &FFunction, e: f64, tol: f64, max_iter: usize) -> Result<DualConsistency> {
    if !(e > 1.0 && e.is_finite()) {
        return Err(Error::InvalidExponent(e));
    }
    let m = start.dim;
    line_dim(start)?;
    let ec = e / (e - 1.0);
    let mut cur = FFunction {
        field: start.field.clone(),
        dim: m,
        data: start.data.iter().map(|z| Complex64::new(z.norm(), 0.0)).collect(),
    };
    let mut out = DualConsistency {
        primal: 0.0,
        dual: 0.0,
        gap: f64::INFINITY,
        iterations: 0,
    };
    for it in 1..=max_iter.max(1) {
        let star = kakeya_maximal(&cur)?;
        let primal = real_norm(&star.values, e, Measure::Normalized)? / cur.lp_norm(e, Measure::Counting)?;
        let h: Vec<f64> = star.values.iter().map(|v| v.powf(e - 1.0)).collect();
        let g = dual_kakeya_apply(&cur.field, m, &h, &star.bases)?;
        let dual = g.lp_norm(ec, Measure::Counting)? / real_norm(&h, ec, Measure::Normalized)?;
        out = DualConsistency {
            primal,
            dual,
            gap: (dual - primal).abs(),
            iterations: it,
        };
        if out.gap < tol {
            break;
        }
        let mx = g.data.iter().map(|z| z.re).fold(0.0, f64::max);
        cur = FFunction {
            field: cur.field.clone(),
            dim: m,
            data: g.data.iter().map(|z| Complex64::new((z.re / mx).powf(ec - 1.0), 0.0)).collect(),
        };
    }
    Ok(out)
}

/// A subset of `F^m` with an optional line in every non-horizontal
/// direction, indexed by `encode(eta)`.
#[derive(Clone, Debug)]
pub struct KakeyaInstance {
    pub set: PointSet,
    pub witness: Option<Vec<Vec<u32>>>,
}

impl KakeyaInstance {
    pub fn new(set: PointSet, witness: Option<Vec<Vec<u32>>>) -> Result<KakeyaInstance> {
        let f = set.field().clone();
        let k = set.dim() - 1;
        if let Some(w) = &witness {
            let nd = checked_size(f.p(), k)?;
            if w.len() != nd {
                return Err(Error::DimensionMismatch {
                    expected: nd,
                    got: w.len(),
                });
            }
            for (di, b) in w.iter().enumerate() {
                let line = AffineLine::new(b.clone(), decode(f.p(), k, di));
                if let Some(x) = line.points(&f).into_iter().find(|x| !set.contains(x)) {
                    return Err(Error::BadParameter {
                        scenario: "KakeyaInstance".into(),
                        name: "witness",
                        value: format!("{line:?}"),
                        reason: format!("point {x:?} of the witness line is missing from the set"),
                    });
                }
            }
        }
        Ok(KakeyaInstance { set, witness })
    }

    /// The union of the lines `l(b(eta), eta)`.
    pub fn union_of_lines(field: &PrimeField, m: usize, bases: Vec<Vec<u32>>) -> Result<KakeyaInstance> {
        let k = m - 1;
        let mut pts = Vec::new();
        for (di, b) in bases.iter().enumerate() {
            pts.extend(AffineLine::new(b.clone(), decode(field.p(), k, di)).points(field));
        }
        KakeyaInstance::new(PointSet::new(field, m, pts), Some(bases))
    }

    /// Lines with `b(eta)_i = -eta_i^2 / 4`, whose union is the set where
    /// every `t^2 - x_i` is a square.
    pub fn parabolic(field: &PrimeField, m: usize) -> Result<KakeyaInstance> {
        let k = m - 1;
        let nd = checked_size(field.p(), k)?;
        let q = field.inv(field.reduce(4));
        let bases = (0..nd)
            .map(|di| {
                decode(field.p(), k, di)
                    .iter()
                    .map(|&e| field.neg(field.mul(q, field.mul(e, e))))
                    .collect()
            })
            .collect();
        KakeyaInstance::union_of_lines(field, m, bases)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct KakeyaAudit {
    /// A line in every non-horizontal direction.
    pub is_kakeya: bool,
    /// Also a line in every horizontal direction.
    pub all_directions: bool,
    pub density: f64,
}

pub fn kakeya_set_audit(k: &KakeyaInstance) -> Result<KakeyaAudit> {
    let set = &k.set;
    let f = set.field().clone();
    let m = set.dim();
    let p = f.p();
    let kd = m - 1;
    let total = checked_size(p, m)?;
    let density = set.len() as f64 / total as f64;
    let is_kakeya = match &k.witness {
        Some(_) => true,
        None => {
            let ind = set.indicator()?;
            let nd = checked_size(p, kd)?;
            (0..nd).into_par_iter().all(|di| {
                line_sums(&ind, &decode(p, kd, di))
                    .iter()
                    .any(|&s| s >= f64::from(p) - 0.5)
            })
        }
    };
    // Horizontal directions (eta, 0), one representative per projective point.
    let nh = checked_size(p, kd)?;
    let all_directions = is_kakeya
        && (1..nh).all(|i| {
            let eta = decode(p, kd, i);
            if eta.iter().find(|&&c| c != 0) != Some(&1) {
                return true;
            }
            let mut dir = eta;
            dir.push(0);
            set.points()
                .iter()
                .any(|x| (0..p).all(|s| set.contains(&f.add_vec(x, &f.scale_vec(s, &dir)))))
        });
    Ok(KakeyaAudit {
        is_kakeya,
        all_directions,
        density,
    })
}

/// The extension of `f(xi, theta) = h(theta)^{1/2} e(-b(-theta) . xi)` on
/// the hyperbolic paraboloid, its line-superposition closed form, and the
/// collapse of its `L^2` norm in `x2`.
#[derive(Clone, Debug)]
pub struct KakeyaEmbedding {
    pub f: SurfaceFunction,
    /// `p^{-n} sum_theta h^{1/2}(theta) 1_{l(b(-theta), -theta)}(x1, t) e(theta . x2)`.
    pub closed_form: FFunction,
    /// `(p^{-n} sum_theta h(theta) 1_{l(b(-theta), -theta)}(x1, t))^{1/2}` on `F^{n+1}`.
    pub collapse: FFunction,
    pub closed_form_deviation: f64,
    pub collapse_deviation: f64,
}

/// `h` and `b` are indexed by `encode(theta)` over `F^n`.
pub fn restriction_to_kakeya_embed(field: &PrimeField, n: usize, h: &[f64], b: &[Vec<u32>]) -> Result<KakeyaEmbedding> {
    let p = field.p();
    let nn = checked_size(p, n)?;
    if h.len() != nn || b.len() != nn {
        return Err(Error::DimensionMismatch {
            expected: nn,
            got: h.len().min(b.len()),
        });
    }
    if let Some(&neg) = h.iter().find(|&&v| v < 0.0) {
        return Err(Error::BadParameter {
            scenario: "restriction_to_kakeya_embed".into(),
            name: "h",
            value: neg.to_string(),
            reason: "h must be nonnegative".into(),
        });
    }
    let d = 2 * n + 1;
    let s = Surface::hyperbolic_paraboloid(field, d)?;
    let neg = |v: &[u32]| v.iter().map(|&c| field.neg(c)).collect::<Vec<u32>>();
    let f = SurfaceFunction::from_fn(&s, |x| {
        let (xi, theta) = x.split_at(n);
        let bm = &b[encode(p, &neg(theta))];
        h[encode(p, theta)].sqrt() * field.char_eval(field.neg(field.dot(bm, xi)))
    });
    let ext = extension(&f);
    let scale = (p as f64).powi(-(n as i32));
    // For each theta the line l(b(-theta), -theta) in the (x1, t) space.
    let lines: Vec<AffineLine> = (0..nn)
        .map(|ti| {
            let theta = decode(p, n, ti);
            AffineLine::new(b[encode(p, &neg(&theta))].clone(), neg(&theta))
        })
        .collect();
    let closed_form = FFunction::from_fn(field, d, |x| {
        let (x1, rest) = x.split_at(n);
        let (x2, t) = rest.split_at(n);
        let mut y = x1.to_vec();
        y.push(t[0]);
        let s: Complex64 = (0..nn)
            .filter(|&ti| h[ti] != 0.0 && lines[ti].contains(field, &y))
            .map(|ti| h[ti].sqrt() * field.char_eval(field.dot(&decode(p, n, ti), x2)))
            .sum();
        s * scale
    })?;
    let collapse = FFunction::from_fn(field, n + 1, |y| {
        let s: f64 = (0..nn).filter(|&ti| lines[ti].contains(field, y)).map(|ti| h[ti]).sum();
        Complex64::new((s * scale).sqrt(), 0.0)
    })?;
    // L^2 over x2 of the extension, counting measure.
    let mut measured = FFunction::zeros(field, n + 1)?;
    for (i, z) in ext.data.iter().enumerate() {
        let x = decode(p, d, i);
        let mut y = x[..n].to_vec();
        y.push(x[d - 1]);
        measured.data[encode(p, &y)] += Complex64::new(z.norm_sqr(), 0.0);
    }
    for z in measured.data.iter_mut() {
        *z = Complex64::new(z.re.sqrt(), 0.0);
    }
    Ok(KakeyaEmbedding {
        closed_form_deviation: ext.max_abs_diff(&closed_form),
        collapse_deviation: measured.max_abs_diff(&collapse),
        f,
        closed_form,
        collapse,
    })
}

/// `log_p` of the right side of `K*_m(q -> p) <~ p^{(m-1)(1-1/p)} R*(2q -> 2p)^2`
/// given `log_p R*`.
pub fn kakeya_from_restriction_exponent(m: usize, p_exp: f64, log_r: f64) -> f64 {
    (m as f64 - 1.0) * (1.0 - 1.0 / p_exp) + 2.0 * log_r
}

fn check_pair(s: &Surface, w: &Subspace, v: &Subspace) -> Result<usize> {
    let f = s.field();
    let q = s.form();
    let m = q.dim();
    if s.dim() % 2 == 0 {
        return Err(Error::NotIsotropicPair);
    }
    let n = m / 2;
    let ok = [w, v]
        .iter()
        .all(|u| u.ambient() == m && !u.is_affine() && u.dim() == n && q.is_totally_isotropic(u))
        && w.is_complement(f, v);
    if ok {
        Ok(n)
    } else {
        Err(Error::NotIsotropicPair)
    }
}

/// The extension operator summed over `xi1 in W`, `xi2 in V` with
/// `Q(xi1 + xi2) = 2 xi1 o xi2`, evaluated at `x = x1 + x2` (`x1 in V`,
/// `x2 in W`). When `W` and `V` are also isotropic for the dot product (the
/// paraboloid) the cross terms `xi1 . x2 + xi2 . x1` vanish and the phase is
/// `xi1 . x1 + xi2 . x2 + 2 t xi1 o xi2`.
pub fn coset_extension(g: &SurfaceFunction, w: &Subspace, v: &Subspace) -> Result<FFunction> {
    let s = &g.surface;
    let n = check_pair(s, w, v)?;
    let f = s.field();
    let q = s.form();
    let p = f.p();
    let d = s.dim();
    let m = d - 1;
    let mut rows = v.basis().clone();
    rows.extend(w.basis().iter().cloned());
    let inv = linalg::inverse(f, &rows).ok_or(Error::NotIsotropicPair)?;
    let we = w.elements(f);
    let ve = v.elements(f);
    let two = f.add(1, 1);
    let terms: Vec<(Vec<u32>, Vec<u32>, u32, Complex64)> = we
        .iter()
        .flat_map(|x1| ve.iter().map(move |x2| (x1, x2)))
        .filter_map(|(xi1, xi2)| {
            let val = g.values[encode(p, &f.add_vec(xi1, xi2))];
            (val != Complex64::new(0.0, 0.0)).then(|| (xi1.clone(), xi2.clone(), f.mul(two, q.bilinear(xi1, xi2)), val))
        })
        .collect();
    let norm = 1.0 / g.values.len() as f64;
    let total = checked_size(p, d)?;
    let data = (0..total)
        .into_par_iter()
        .map(|i| {
            let x = decode(p, d, i);
            let t = x[m];
            // Coordinates of x in the basis (v_1..v_n, w_1..w_n).
            let c = linalg::mat_vec(f, &linalg::transpose(&inv), &x[..m]);
            let mut x1 = vec![0u32; m];
            let mut x2 = vec![0u32; m];
            for j in 0..n {
                x1 = f.add_vec(&x1, &f.scale_vec(c[j], &v.basis()[j]));
                x2 = f.add_vec(&x2, &f.scale_vec(c[n + j], &w.basis()[j]));
            }
            let acc: Complex64 = terms
                .iter()
                .map(|(xi1, xi2, b, val)| {
                    let cross = f.add(f.dot(xi1, &x2), f.dot(xi2, &x1));
                    let phase = f.add(f.add(f.dot(xi1, &x1), f.dot(xi2, &x2)), f.add(cross, f.mul(t, *b)));
                    val * f.char_eval(phase)
                })
                .sum();
            acc * norm
        })
        .collect();
    FFunction::from_data(f, d, data)
}

/// `||(g dsigma)^v||_{L^r_{V,t} L^2_W} / ||g||_{L^r_V L^2_W(dsigma)}` with
/// `r = (2d+2)/(d-1)`.
pub fn exp_kak_ratio(g: &SurfaceFunction, w: &Subspace, v: &Subspace) -> Result<f64> {
    let s = &g.surface;
    check_pair(s, w, v)?;
    let d = s.dim() as f64;
    let r = (2.0 * d + 2.0) / (d - 1.0);
    let spec = |include_t| MixedNormSpec {
        v: v.clone(),
        w: w.clone(),
        outer_exp: r,
        inner_exp: 2.0,
        include_t,
    };
    let den = mixed_norm(&g.values, s.field(), &spec(false), Measure::Normalized)?;
    if den == 0.0 {
        return Ok(0.0);
    }
    let ext = extension(g);
    Ok(mixed_norm(&ext.data, s.field(), &spec(true), Measure::Counting)? / den)
}

/// `||F^||_{L^{(2d+2)/(d+3)}(P, dsigma)}` for `F = 1_E` against
/// `p^{gamma/2 + (e+1)/(d+1) + (d-3)/(2d+2)}`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct RegSetReport {
    pub lhs: f64,
    pub gamma: f64,
    pub e: f64,
    pub log_bound: f64,
    pub constant: f64,
}

/// `pieces` is the largest number of isotropic pieces used on any slice.
pub fn reg_set_bound(s: &Surface, e_set: &PointSet, pieces: usize) -> Result<RegSetReport> {
    if s.kind() != SurfaceKind::Paraboloid {
        return Err(Error::BadParameter {
            scenario: "reg_set_bound".into(),
            name: "surface",
            value: format!("{s:?}"),
            reason: "the bound is stated for the paraboloid".into(),
        });
    }
    let pf = f64::from(s.field().p());
    let d = s.dim() as f64;
    let r = (2.0 * d + 2.0) / (d + 3.0);
    let lhs = restriction(&e_set.indicator()?, s).lq_norm(r)?;
    let gamma = (e_set.len().max(1) as f64).ln() / pf.ln();
    let e = (pieces.max(1) as f64).ln() / pf.ln();
    let log_bound = gamma / 2.0 + (e + 1.0) / (d + 1.0) + (d - 3.0) / (2.0 * d + 2.0);
    Ok(RegSetReport {
        lhs,
        gamma,
        e,
        log_bound,
        constant: lhs / pf.powf(log_bound),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maximal_of_constant_and_line() {
        let f = PrimeField::new(5).unwrap();
        let one = FFunction::from_fn(&f, 2, |_| Complex64::new(1.0, 0.0)).unwrap();
        assert!(kakeya_maximal(&one).unwrap().values.iter().all(|&v| v == 5.0));
        let line = AffineLine::new(vec![0], vec![2]);
        let pts = line.points(&f);
        let ind = FFunction::indicator(&f, 2, pts.iter().map(Vec::as_slice)).unwrap();
        let star = kakeya_maximal(&ind).unwrap();
        for (i, &v) in star.values.iter().enumerate() {
            assert_eq!(v, if i == 2 { 5.0 } else { 1.0 });
        }
    }

    #[test]
    fn parabolic_set_is_kakeya() {
        let f = PrimeField::new(7).unwrap();
        let k = KakeyaInstance::parabolic(&f, 2).unwrap();
        let a = kakeya_set_audit(&k).unwrap();
        assert!(a.is_kakeya);
        assert!(a.density > 0.5 && a.density < 0.6);
    }
}
