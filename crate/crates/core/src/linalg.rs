//! Small dense linear algebra for the solver and the second-order test:
//! pivoted solves and determinants, null-space bases, symmetric eigenvalues.
//! Dimensions are tiny (n up to ~10), so plain row-major storage and O(n^3)
//! algorithms are the right tool.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Index, IndexMut};

use crate::fmath;

/// Row-major dense matrix of f64.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds a matrix from nested row slices; all rows must share a length.
    pub fn from_rows(rows: &[&[f64]]) -> Matrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = Matrix::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            m.data[i * c..(i + 1) * c].copy_from_slice(row);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| fmath::abs(*v)).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn norm_frobenius(&self) -> f64 {
        fmath::sqrt(self.data.iter().map(|v| v * v).sum())
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().map(|v| fmath::abs(*v)).fold(0.0, f64::max)
    }

    pub fn mat_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "dimension mismatch in mat_vec");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Largest |a_ij - a_ji| over the off-diagonal pairs.
    pub fn symmetry_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols.min(self.rows) {
                worst = worst.max(fmath::abs(self[(i, j)] - self[(j, i)]));
            }
        }
        worst
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LinalgError {
    /// A pivot fell below the singularity threshold during elimination.
    SingularMatrix,
    /// The rows handed to `null_space_basis` are linearly dependent.
    RankDeficient,
    /// `sym_eigenvalues` was given a matrix that is not symmetric.
    NotSymmetric,
    /// The Jacobi sweep limit was hit (should not happen for finite input).
    NoConvergence,
}

impl fmt::Display for LinalgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinalgError::SingularMatrix => write!(f, "matrix is singular to working precision"),
            LinalgError::RankDeficient => write!(f, "rows are linearly dependent"),
            LinalgError::NotSymmetric => write!(f, "matrix is not symmetric"),
            LinalgError::NoConvergence => write!(f, "eigenvalue iteration failed to converge"),
        }
    }
}

impl core::error::Error for LinalgError {}

/// Relative pivot threshold below which elimination reports singularity.
const PIVOT_TOL: f64 = 1e-12;

/// Relative tolerance for declaring constraint gradients dependent.
const RANK_TOL: f64 = 1e-10;

/// Seeds whose residual after projection is shorter than this are skipped
/// when completing a null-space basis.
const SEED_TOL: f64 = 1e-8;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm2(a: &[f64]) -> f64 {
    fmath::sqrt(dot(a, a))
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
pub fn solve_linear(a: &Matrix, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
    assert!(a.is_square(), "solve_linear needs a square matrix");
    assert_eq!(a.rows(), b.len(), "dimension mismatch in solve_linear");
    let n = a.rows();
    let mut m = a.clone();
    let mut rhs = b.to_vec();
    let scale = a.max_abs_entry();
    if scale == 0.0 {
        return Err(LinalgError::SingularMatrix);
    }
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&p, &q| {
                fmath::abs(m[(p, col)])
                    .partial_cmp(&fmath::abs(m[(q, col)]))
                    .expect("finite entries")
            })
            .expect("non-empty column");
        if fmath::abs(m[(pivot_row, col)]) < PIVOT_TOL * scale {
            return Err(LinalgError::SingularMatrix);
        }
        if pivot_row != col {
            for j in 0..n {
                let tmp = m[(col, j)];
                m[(col, j)] = m[(pivot_row, j)];
                m[(pivot_row, j)] = tmp;
            }
            rhs.swap(col, pivot_row);
        }
        let pivot = m[(col, col)];
        for r in (col + 1)..n {
            let factor = m[(r, col)] / pivot;
            if factor == 0.0 {
                continue;
            }
            m[(r, col)] = 0.0;
            for j in (col + 1)..n {
                m[(r, j)] -= factor * m[(col, j)];
            }
            rhs[r] -= factor * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = rhs[i];
        for j in (i + 1)..n {
            s -= m[(i, j)] * x[j];
        }
        x[i] = s / m[(i, i)];
    }
    Ok(x)
}

/// Determinant by pivoted elimination. A singular matrix yields a value
/// near zero rather than an error.
pub fn determinant(a: &Matrix) -> f64 {
    assert!(a.is_square(), "determinant needs a square matrix");
    let n = a.rows();
    let mut m = a.clone();
    let mut det = 1.0;
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&p, &q| {
                fmath::abs(m[(p, col)])
                    .partial_cmp(&fmath::abs(m[(q, col)]))
                    .expect("finite entries")
            })
            .expect("non-empty column");
        let pivot = m[(pivot_row, col)];
        if pivot == 0.0 {
            return 0.0;
        }
        if pivot_row != col {
            for j in 0..n {
                let tmp = m[(col, j)];
                m[(col, j)] = m[(pivot_row, j)];
                m[(pivot_row, j)] = tmp;
            }
            det = -det;
        }
        det *= pivot;
        for r in (col + 1)..n {
            let factor = m[(r, col)] / pivot;
            if factor == 0.0 {
                continue;
            }
            for j in col..n {
                m[(r, j)] -= factor * m[(col, j)];
            }
        }
    }
    det
}

/// Orthonormal basis of the null space of `j` (m x n, m < n).
///
/// The rows of `j` are orthonormalized by modified Gram-Schmidt (with one
/// re-orthogonalization pass); the basis is then completed with coordinate
/// seeds in index order, skipping seeds that project to nearly nothing, so
/// the output is deterministic. Linearly dependent rows are reported as
/// `RankDeficient` and signal a constraint-qualification failure to callers.
pub fn null_space_basis(j: &Matrix) -> Result<Vec<Vec<f64>>, LinalgError> {
    let (m, n) = (j.rows(), j.cols());
    assert!(m >= 1 && n > m, "null_space_basis needs 1 <= m < n");

    let mut q: Vec<Vec<f64>> = Vec::with_capacity(m);
    for i in 0..m {
        let row = j.row(i);
        let row_norm = norm2(row);
        let mut v = row.to_vec();
        for _ in 0..2 {
            for base in &q {
                let c = dot(&v, base);
                for (vk, bk) in v.iter_mut().zip(base) {
                    *vk -= c * bk;
                }
            }
        }
        let res = norm2(&v);
        if row_norm == 0.0 || res < RANK_TOL * row_norm {
            return Err(LinalgError::RankDeficient);
        }
        for vk in &mut v {
            *vk /= res;
        }
        q.push(v);
    }

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n - m);
    for seed in 0..n {
        if basis.len() == n - m {
            break;
        }
        let mut v = vec![0.0; n];
        v[seed] = 1.0;
        for _ in 0..2 {
            for base in q.iter().chain(basis.iter()) {
                let c = dot(&v, base);
                for (vk, bk) in v.iter_mut().zip(base) {
                    *vk -= c * bk;
                }
            }
        }
        let res = norm2(&v);
        if res < SEED_TOL {
            continue;
        }
        for vk in &mut v {
            *vk /= res;
        }
        basis.push(v);
    }
    debug_assert_eq!(basis.len(), n - m);
    Ok(basis)
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, sorted
/// ascending. The input must be symmetric to within 1e-12 (relative).
pub fn sym_eigenvalues(s: &Matrix) -> Result<Vec<f64>, LinalgError> {
    assert!(s.is_square(), "sym_eigenvalues needs a square matrix");
    let n = s.rows();
    let scale = s.max_abs_entry().max(1.0);
    if s.symmetry_defect() > 1e-12 * scale {
        return Err(LinalgError::NotSymmetric);
    }
    let mut a = s.clone();
    // Work on an exactly symmetric copy.
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    let full_norm = a.norm_frobenius();
    let target = 1e-12 * full_norm;

    const MAX_SWEEPS: usize = 60;
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += 2.0 * a[(i, j)] * a[(i, j)];
            }
        }
        if fmath::sqrt(off) <= target {
            let mut eigs: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
            eigs.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
            return Ok(eigs);
        }
        for p in 0..n {
            for qi in (p + 1)..n {
                let apq = a[(p, qi)];
                if apq == 0.0 {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(qi, qi)];
                let theta = 0.5 * (aqq - app) / apq;
                let t = if theta >= 0.0 {
                    1.0 / (theta + fmath::sqrt(1.0 + theta * theta))
                } else {
                    -1.0 / (-theta + fmath::sqrt(1.0 + theta * theta))
                };
                let c = 1.0 / fmath::sqrt(1.0 + t * t);
                let sn = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, qi)];
                    a[(k, p)] = c * akp - sn * akq;
                    a[(k, qi)] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(qi, k)];
                    a[(p, k)] = c * apk - sn * aqk;
                    a[(qi, k)] = sn * apk + c * aqk;
                }
            }
        }
    }
    Err(LinalgError::NoConvergence)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_identity() {
        let a = Matrix::identity(3);
        let b = [4.0, -1.0, 0.5];
        assert_eq!(solve_linear(&a, &b).unwrap(), b.to_vec());
    }

    #[test]
    fn solve_projected_hessian_system() {
        let a = Matrix::from_rows(&[&[2.0, 2.0], &[2.0, 8.0]]);
        let x = solve_linear(&a, &[4.0, 10.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14);
        assert!((x[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn zero_matrix_is_singular() {
        let a = Matrix::zeros(2, 2);
        assert_eq!(solve_linear(&a, &[1.0, 1.0]), Err(LinalgError::SingularMatrix));
    }

    #[test]
    fn solve_residual_is_small() {
        let a = Matrix::from_rows(&[&[3.0, 1.0, -2.0], &[1.0, 4.0, 0.5], &[-2.0, 0.5, 5.0]]);
        let b = [1.0, -2.0, 3.0];
        let x = solve_linear(&a, &b).unwrap();
        let ax = a.mat_vec(&x);
        let bn = norm2(&b);
        let res = norm2(&ax.iter().zip(&b).map(|(p, q)| p - q).collect::<Vec<_>>());
        assert!(res <= 1e-10 * (1.0 + bn));
    }

    #[test]
    fn null_space_of_coordinate_constraint() {
        let j = Matrix::from_rows(&[&[0.0, 0.0, 1.0]]);
        let basis = null_space_basis(&j).unwrap();
        assert_eq!(basis.len(), 2);
        assert_eq!(basis[0], vec![1.0, 0.0, 0.0]);
        assert_eq!(basis[1], vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn null_space_of_two_plane_constraints() {
        let j = Matrix::from_rows(&[&[2.0, 0.0, -2.0], &[1.0, 0.0, 1.0]]);
        let basis = null_space_basis(&j).unwrap();
        assert_eq!(basis.len(), 1);
        let v = &basis[0];
        assert!((v[1].abs() - 1.0).abs() < 1e-14);
        assert!(v[0].abs() < 1e-14 && v[2].abs() < 1e-14);
    }

    #[test]
    fn dependent_rows_are_rank_deficient() {
        let j = Matrix::from_rows(&[&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]]);
        assert_eq!(null_space_basis(&j), Err(LinalgError::RankDeficient));
        let z = Matrix::from_rows(&[&[0.0, 0.0, 0.0]]);
        assert_eq!(null_space_basis(&z), Err(LinalgError::RankDeficient));
    }

    #[test]
    fn null_space_vectors_are_orthonormal_and_annihilated() {
        let j = Matrix::from_rows(&[&[1.0, 2.0, 3.0, -1.0], &[0.5, -2.0, 1.0, 4.0]]);
        let basis = null_space_basis(&j).unwrap();
        assert_eq!(basis.len(), 2);
        for v in &basis {
            for r in 0..j.rows() {
                assert!(dot(j.row(r), v).abs() <= 1e-9);
            }
        }
        for a in 0..basis.len() {
            for b in 0..basis.len() {
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((dot(&basis[a], &basis[b]) - expected).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn eigenvalues_of_diagonal() {
        let a = Matrix::from_rows(&[&[3.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 2.0]]);
        assert_eq!(sym_eigenvalues(&a).unwrap(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn eigenvalues_of_projected_hessian() {
        let a = Matrix::from_rows(&[&[2.0, 2.0], &[2.0, 8.0]]);
        let eigs = sym_eigenvalues(&a).unwrap();
        let root = 13f64.sqrt();
        assert!((eigs[0] - (5.0 - root)).abs() < 1e-12);
        assert!((eigs[1] - (5.0 + root)).abs() < 1e-12);
    }

    #[test]
    fn eigenvalues_of_zero_matrix() {
        let a = Matrix::zeros(3, 3);
        assert_eq!(sym_eigenvalues(&a).unwrap(), vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn asymmetric_input_rejected() {
        let a = Matrix::from_rows(&[&[1.0, 2.0], &[0.0, 1.0]]);
        assert_eq!(sym_eigenvalues(&a), Err(LinalgError::NotSymmetric));
    }

    #[test]
    fn determinant_examples() {
        assert!((determinant(&Matrix::from_rows(&[&[2.0, 2.0], &[2.0, 8.0]])) - 12.0).abs() < 1e-12);
        assert_eq!(determinant(&Matrix::identity(4)), 1.0);
        let repeated = Matrix::from_rows(&[&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0], &[1.0, 2.0, 3.0]]);
        assert!(determinant(&repeated).abs() < 1e-12);
    }

    #[test]
    fn eigen_sum_matches_trace() {
        let a = Matrix::from_rows(&[
            &[4.0, 1.0, -0.5, 0.2],
            &[1.0, -3.0, 2.0, 1.1],
            &[-0.5, 2.0, 0.7, -2.2],
            &[0.2, 1.1, -2.2, 5.5],
        ]);
        let eigs = sym_eigenvalues(&a).unwrap();
        let trace: f64 = (0..4).map(|i| a[(i, i)]).sum();
        let sum: f64 = eigs.iter().sum();
        assert!((sum - trace).abs() <= 1e-9 * a.norm_frobenius());
        let det = determinant(&a);
        let prod: f64 = eigs.iter().product();
        assert!((prod - det).abs() <= 1e-9 * det.abs().max(1.0));
    }
}
