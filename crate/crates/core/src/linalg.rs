//! Small dense square matrices and the numerical kernels built on them:
//! a cyclic Jacobi eigensolver for real symmetric matrices and a pivoted
//! Gaussian elimination solve.
//!
//! Everything here targets the tiny systems this crate produces (interaction
//! matrices up to ~64, least-squares normal matrices up to a few dozen), so
//! the implementations favor reproducibility over asymptotic speed: fixed
//! sweep order, no blocking, no randomization.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Row-major square matrix of `f64`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    dim: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(dim: usize) -> Self {
        Matrix {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Matrix::zeros(dim);
        for i in 0..dim {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Build from a row-major slice; `data.len()` must be `dim * dim`.
    pub fn from_rows(dim: usize, data: &[f64]) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::Shape {
                expected: dim * dim,
                got: data.len(),
            });
        }
        Ok(Matrix {
            dim,
            data: data.to_vec(),
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.dim + col] = value;
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.dim).map(|r| self.get(r, col)).collect()
    }

    /// y = A x
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim];
        for r in 0..self.dim {
            let row = &self.data[r * self.dim..(r + 1) * self.dim];
            y[r] = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
        y
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|v| v * v).sum())
    }

    /// Largest |A_ij - A_ji|.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }
}

/// Convergence threshold for the Jacobi sweep, relative to ||H||_F.
const JACOBI_REL_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 60;

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let mut sum = 0.0;
    for i in 0..a.dim() {
        for j in (i + 1)..a.dim() {
            sum += 2.0 * a.get(i, j) * a.get(i, j);
        }
    }
    libm::sqrt(sum)
}

/// Eigendecomposition of a real symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in ascending order with eigenvectors as the matching
/// columns of an orthonormal matrix. Each eigenvector's sign is fixed so that
/// its largest-magnitude component is positive, which makes the decomposition
/// deterministic. The input is *not* checked for symmetry; callers that
/// accept external data should go through [`crate::spectral::eigh`].
pub fn jacobi_eigh(matrix: &Matrix) -> Result<(Vec<f64>, Matrix)> {
    let n = matrix.dim();
    let mut a = matrix.clone();
    let mut v = Matrix::identity(n);
    if n <= 1 {
        return Ok((a.column(0).first().map(|&x| vec![x]).unwrap_or_default(), v));
    }

    let scale = matrix.frobenius_norm();
    let tol = if scale > 0.0 {
        JACOBI_REL_TOL * scale
    } else {
        return Ok((vec![0.0; n], v)); // zero matrix
    };

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) < tol {
            converged = true;
            break;
        }
        // Cyclic sweep over the strict upper triangle in fixed order.
        for p in 0..(n - 1) {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                // tan of the rotation angle, smaller root for stability
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sign / (theta.abs() + libm::sqrt(1.0 + theta * theta))
                };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = t * c;
                let tau = s / (1.0 + c);

                a.set(p, p, app - t * apq);
                a.set(q, q, aqq + t * apq);
                a.set(p, q, 0.0);
                a.set(q, p, 0.0);
                for i in 0..n {
                    if i != p && i != q {
                        let aip = a.get(i, p);
                        let aiq = a.get(i, q);
                        a.set(i, p, aip - s * (aiq + tau * aip));
                        a.set(p, i, a.get(i, p));
                        a.set(i, q, aiq + s * (aip - tau * aiq));
                        a.set(q, i, a.get(i, q));
                    }
                }
                for i in 0..n {
                    let vip = v.get(i, p);
                    let viq = v.get(i, q);
                    v.set(i, p, vip - s * (viq + tau * vip));
                    v.set(i, q, viq + s * (vip - tau * viq));
                }
            }
        }
    }
    if !converged && off_diagonal_norm(&a) >= tol {
        return Err(Error::NoConvergence {
            sweeps: JACOBI_MAX_SWEEPS,
        });
    }

    // Sort ascending, permuting eigenvector columns along.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(i, i).partial_cmp(&a.get(j, j)).unwrap());

    let mut values = Vec::with_capacity(n);
    let mut vectors = Matrix::zeros(n);
    for (dst, &src) in order.iter().enumerate() {
        values.push(a.get(src, src));
        // Sign convention: largest-magnitude component positive.
        let col = v.column(src);
        let mut max_idx = 0;
        for (i, x) in col.iter().enumerate() {
            if x.abs() > col[max_idx].abs() {
                max_idx = i;
            }
        }
        let sign = if col[max_idx] < 0.0 { -1.0 } else { 1.0 };
        for (r, x) in col.iter().enumerate() {
            vectors.set(r, dst, sign * x);
        }
    }
    Ok((values, vectors))
}

/// Solve `A x = b` by Gaussian elimination with partial pivoting.
///
/// Errors with [`Error::RankDeficient`] when a pivot falls below
/// `1e-14 * max |A_ij|`.
pub fn solve(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    let n = a.dim();
    if b.len() != n {
        return Err(Error::Shape {
            expected: n,
            got: b.len(),
        });
    }
    let mut m = a.clone();
    let mut x: Vec<f64> = b.to_vec();
    let scale = m.data.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    if scale == 0.0 {
        return Err(Error::RankDeficient);
    }
    let pivot_tol = 1e-14 * scale;

    for col in 0..n {
        let mut pivot = col;
        for row in (col + 1)..n {
            if m.get(row, col).abs() > m.get(pivot, col).abs() {
                pivot = row;
            }
        }
        if m.get(pivot, col).abs() < pivot_tol {
            return Err(Error::RankDeficient);
        }
        if pivot != col {
            for k in 0..n {
                let tmp = m.get(col, k);
                m.set(col, k, m.get(pivot, k));
                m.set(pivot, k, tmp);
            }
            x.swap(col, pivot);
        }
        let inv = 1.0 / m.get(col, col);
        for row in (col + 1)..n {
            let factor = m.get(row, col) * inv;
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                m.set(row, k, m.get(row, k) - factor * m.get(col, k));
            }
            x[row] -= factor * x[col];
        }
    }
    for col in (0..n).rev() {
        let mut acc = x[col];
        for k in (col + 1)..n {
            acc -= m.get(col, k) * x[k];
        }
        x[col] = acc / m.get(col, col);
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(dim: usize, rows: &[f64]) -> Matrix {
        let m = Matrix::from_rows(dim, rows).unwrap();
        assert!(m.max_asymmetry() == 0.0);
        m
    }

    #[test]
    fn two_by_two_closed_form() {
        // [[a, g], [g, b]] -> (a+b)/2 +- sqrt(((a-b)/2)^2 + g^2)
        let (a, b, g) = (4.253e9, 4.253e9, 6.5e6);
        let m = sym(2, &[a, g, g, b]);
        let (vals, vecs) = jacobi_eigh(&m).unwrap();
        let mid = 0.5 * (a + b);
        let split = libm::sqrt(0.25 * (a - b) * (a - b) + g * g);
        assert!((vals[0] - (mid - split)).abs() < 1e-3);
        assert!((vals[1] - (mid + split)).abs() < 1e-3);
        // resonant case: equal weights
        for col in 0..2 {
            let v = vecs.column(col);
            assert!((v[0].abs() - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        }
    }

    #[test]
    fn diagonal_passthrough() {
        let m = sym(3, &[3.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 2.0]);
        let (vals, vecs) = jacobi_eigh(&m).unwrap();
        assert_eq!(vals, vec![1.0, 2.0, 3.0]);
        // identity up to column permutation, signs positive
        assert_eq!(vecs.get(1, 0), 1.0);
        assert_eq!(vecs.get(2, 1), 1.0);
        assert_eq!(vecs.get(0, 2), 1.0);
    }

    #[test]
    fn orthonormal_and_reconstructs() {
        let m = sym(
            4,
            &[
                2.0, -1.0, 0.5, 0.0, //
                -1.0, 3.0, 1.0, 0.2, //
                0.5, 1.0, 1.5, -0.7, //
                0.0, 0.2, -0.7, 2.5,
            ],
        );
        let (vals, vecs) = jacobi_eigh(&m).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let dot: f64 = (0..4).map(|k| vecs.get(k, i) * vecs.get(k, j)).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-12);
            }
            let av = m.mul_vec(&vecs.column(i));
            for (k, x) in av.iter().enumerate() {
                assert!((x - vals[i] * vecs.get(k, i)).abs() < 1e-10 * m.frobenius_norm());
            }
        }
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn zero_matrix_ok() {
        let (vals, _) = jacobi_eigh(&Matrix::zeros(3)).unwrap();
        assert_eq!(vals, vec![0.0; 3]);
    }

    #[test]
    fn solve_roundtrip() {
        let a = Matrix::from_rows(3, &[4.0, 1.0, 0.0, 1.0, 3.0, -1.0, 0.0, -1.0, 2.0]).unwrap();
        let x_true = [1.0, -2.0, 0.5];
        let b = a.mul_vec(&x_true);
        let x = solve(&a, &b).unwrap();
        for (xi, ti) in x.iter().zip(x_true.iter()) {
            assert!((xi - ti).abs() < 1e-12);
        }
    }

    #[test]
    fn solve_singular_is_rank_error() {
        let a = Matrix::from_rows(2, &[1.0, 2.0, 2.0, 4.0]).unwrap();
        assert_eq!(solve(&a, &[1.0, 2.0]), Err(Error::RankDeficient));
    }
}
