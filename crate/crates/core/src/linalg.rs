//! Dense linear algebra over `F_p`. Matrices are row-major `Vec<Vec<u32>>`.

use crate::field::PrimeField;

pub type Matrix = Vec<Vec<u32>>;

pub fn identity(m: usize) -> Matrix {
    (0..m)
        .map(|i| (0..m).map(|j| u32::from(i == j)).collect())
        .collect()
}

pub fn transpose(a: &Matrix) -> Matrix {
    if a.is_empty() {
        return Vec::new();
    }
    let (r, c) = (a.len(), a[0].len());
    (0..c).map(|j| (0..r).map(|i| a[i][j]).collect()).collect()
}

pub fn mat_mul(f: &PrimeField, a: &Matrix, b: &Matrix) -> Matrix {
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let s: u64 = (0..inner)
                        .map(|k| u64::from(row[k]) * u64::from(b[k][j]))
                        .sum();
                    (s % u64::from(f.p())) as u32
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec(f: &PrimeField, a: &Matrix, x: &[u32]) -> Vec<u32> {
    a.iter().map(|row| f.dot(row, x)).collect()
}

/// `M^T A M`.
pub fn congruence(f: &PrimeField, a: &Matrix, m: &Matrix) -> Matrix {
    mat_mul(f, &mat_mul(f, &transpose(m), a), m)
}

/// Reduced row echelon form of `rows`; returns the nonzero rows and their
/// pivot columns.
pub fn rref(f: &PrimeField, rows: &[Vec<u32>]) -> (Matrix, Vec<usize>) {
    let mut m: Matrix = rows.to_vec();
    let ncols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(pr) = (r..m.len()).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, pr);
        let inv = f.inv(m[r][c]);
        for x in m[r].iter_mut() {
            *x = f.mul(*x, inv);
        }
        for i in 0..m.len() {
            if i != r && m[i][c] != 0 {
                let k = m[i][c];
                for j in 0..ncols {
                    let v = f.mul(k, m[r][j]);
                    m[i][j] = f.sub(m[i][j], v);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank(f: &PrimeField, rows: &[Vec<u32>]) -> usize {
    rref(f, rows).1.len()
}

/// Basis of `{x : A x = 0}` for an `r x ncols` matrix.
pub fn nullspace(f: &PrimeField, a: &[Vec<u32>], ncols: usize) -> Matrix {
    let (r, pivots) = rref(f, a);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![0u32; ncols];
            v[fc] = 1;
            for (row, &pc) in r.iter().zip(&pivots) {
                v[pc] = f.neg(row[fc]);
            }
            v
        })
        .collect()
}

/// Some solution of `A x = b`, if any.
pub fn solve(f: &PrimeField, a: &[Vec<u32>], b: &[u32]) -> Option<Vec<u32>> {
    let ncols = a.first().map_or(0, Vec::len);
    let aug: Matrix = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi);
            r
        })
        .collect();
    let (r, pivots) = rref(f, &aug);
    if pivots.contains(&ncols) {
        return None;
    }
    let mut x = vec![0u32; ncols];
    for (row, &pc) in r.iter().zip(&pivots) {
        x[pc] = row[ncols];
    }
    Some(x)
}

pub fn determinant(f: &PrimeField, a: &Matrix) -> u32 {
    let n = a.len();
    let mut m = a.clone();
    let mut det = 1u32;
    for c in 0..n {
        let Some(pr) = (c..n).find(|&i| m[i][c] != 0) else {
            return 0;
        };
        if pr != c {
            m.swap(pr, c);
            det = f.neg(det);
        }
        det = f.mul(det, m[c][c]);
        let inv = f.inv(m[c][c]);
        for i in c + 1..n {
            if m[i][c] != 0 {
                let k = f.mul(m[i][c], inv);
                for j in c..n {
                    let v = f.mul(k, m[c][j]);
                    m[i][j] = f.sub(m[i][j], v);
                }
            }
        }
    }
    det
}

pub fn inverse(f: &PrimeField, a: &Matrix) -> Option<Matrix> {
    let n = a.len();
    let aug: Matrix = a
        .iter()
        .zip(identity(n))
        .map(|(row, id)| row.iter().copied().chain(id).collect())
        .collect();
    let (r, pivots) = rref(f, &aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(r.into_iter().map(|row| row[n..].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_det() {
        let f = PrimeField::new(7).unwrap();
        let a = vec![vec![1, 2, 3], vec![0, 1, 4], vec![5, 6, 0]];
        let inv = inverse(&f, &a).unwrap();
        assert_eq!(mat_mul(&f, &a, &inv), identity(3));
        assert_ne!(determinant(&f, &a), 0);
        let sing = vec![vec![1, 2], vec![2, 4]];
        assert!(inverse(&f, &sing).is_none());
        assert_eq!(determinant(&f, &sing), 0);
    }

    #[test]
    fn nullspace_is_annihilated() {
        let f = PrimeField::new(5).unwrap();
        let a = vec![vec![1, 2, 3, 4], vec![2, 4, 1, 3]];
        let ns = nullspace(&f, &a, 4);
        assert_eq!(ns.len(), 4 - rank(&f, &a));
        for v in &ns {
            assert!(mat_vec(&f, &a, v).iter().all(|&x| x == 0));
        }
    }
}
