//! Dense exact linear algebra over [`Scalar`].
//!
//! Matrices here are small (a few hundred rows at most), so everything is
//! plain Gauss-Jordan elimination on `Vec<Vec<Scalar>>`.

use num_traits::{One, Zero};

use crate::scalar::Scalar;

pub type Matrix = Vec<Vec<Scalar>>;

pub fn zeros(rows: usize, cols: usize) -> Matrix {
    vec![vec![Scalar::zero(); cols]; rows]
}

pub fn transpose(m: &Matrix, cols: usize) -> Matrix {
    let mut t = zeros(cols, m.len());
    for (i, row) in m.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            t[j][i] = x.clone();
        }
    }
    t
}

/// Reduced row echelon form in place. Returns the pivot columns; rows past
/// `pivots.len()` are zero afterwards.
pub fn rref(m: &mut Matrix) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Scalar::one() / &m[r][c];
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &Matrix) -> usize {
    let mut work = m.clone();
    rref(&mut work).len()
}

/// Basis of `{x : m x = 0}` for a matrix with `cols` columns.
pub fn right_kernel(m: &Matrix, cols: usize) -> Vec<Vec<Scalar>> {
    let mut work: Matrix = m.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    let pivots = rref(&mut work);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Scalar::zero(); cols];
            v[f] = Scalar::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -work[row][f].clone();
            }
            v
        })
        .collect()
}

/// Independent rows spanning the same space as `rows`, in reduced form.
pub fn row_basis(rows: &[Vec<Scalar>]) -> Matrix {
    let mut work: Matrix = rows.to_vec();
    let n = rref(&mut work).len();
    work.truncate(n);
    work
}

/// Whether two families of equal-length vectors span the same subspace.
/// Reduced row echelon form is canonical, so comparing it decides equality.
pub fn same_span(a: &[Vec<Scalar>], b: &[Vec<Scalar>]) -> bool {
    row_basis(a) == row_basis(b)
}

pub fn mat_vec(m: &Matrix, v: &[Scalar]) -> Vec<Scalar> {
    m.iter()
        .map(|row| row.iter().zip(v).fold(Scalar::zero(), |acc, (a, b)| acc + a * b))
        .collect()
}

/// Solves `m x = b`. Returns `None` when inconsistent, otherwise one solution
/// together with the dimension of the solution space.
pub fn solve(m: &Matrix, b: &[Scalar], cols: usize) -> Option<(Vec<Scalar>, usize)> {
    let mut aug: Matrix = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.contains(&cols) {
        return None;
    }
    let mut x = vec![Scalar::zero(); cols];
    for (row, &pc) in pivots.iter().enumerate() {
        x[pc] = aug[row][cols].clone();
    }
    Some((x, cols - pivots.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{frac, int};

    fn m(rows: &[&[i64]]) -> Matrix {
        rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
    }

    #[test]
    fn rank_and_kernel() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(rank(&a), 2);
        let k = right_kernel(&a, 3);
        assert_eq!(k.len(), 1);
        assert!(mat_vec(&a, &k[0]).iter().all(Zero::is_zero));
    }

    #[test]
    fn kernel_of_empty_rows_is_everything() {
        let k = right_kernel(&Vec::new(), 2);
        assert_eq!(k.len(), 2);
        assert!(right_kernel(&m(&[&[0, 0]]), 2).len() == 2);
    }

    #[test]
    fn span_equality_ignores_presentation() {
        let a = m(&[&[1, 1, 0], &[0, 1, 1]]);
        let b = m(&[&[1, 2, 1], &[1, 0, -1], &[2, 2, 0]]);
        assert!(same_span(&a, &b));
        assert!(!same_span(&a, &m(&[&[1, 0, 0]])));
        assert!(same_span(&[], &m(&[&[0, 0, 0]])));
    }

    #[test]
    fn solves_consistent_systems() {
        let a = vec![vec![int(2)]];
        let (x, free) = solve(&a, &[int(1)], 1).unwrap();
        assert_eq!(x, vec![frac(1, 2)]);
        assert_eq!(free, 0);
        assert!(solve(&vec![vec![int(0)]], &[int(1)], 1).is_none());
    }
}
