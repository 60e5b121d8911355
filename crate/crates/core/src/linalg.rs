//! Dense matrices and the small amount of linear algebra the toolkit needs:
//! symmetric eigendecomposition (cyclic Jacobi), SPD solves, and spectral
//! radii of symmetric matrices.
//!
//! Everything here targets the sizes that actually occur (covariances up to a
//! few hundred rows, Gram matrices up to the window length), so a plain
//! row-major `Vec<f64>` with O(n^3) algorithms is both sufficient and fully
//! deterministic.

use crate::error::{CoreError, Result};
use serde::{Deserialize, Serialize};

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(CoreError::InvalidParameter(
                "ragged rows in matrix constructor".into(),
            ));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Maximum absolute entry-wise difference against another matrix.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                if (self[(i, j)] - self[(j, i)]).abs() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// `self * v` for a column vector.
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| dot(self.row(i), v))
            .collect()
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Eigendecomposition of a symmetric matrix.
pub struct SymmetricEigen {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Eigenvectors as columns, aligned with `values`.
    pub vectors: Matrix,
}

/// Cyclic Jacobi eigenvalue iteration for symmetric matrices.
///
/// Converges to machine precision in a handful of sweeps for the sizes used
/// here; the rotation order is fixed, so results are deterministic.
pub fn symmetric_eigen(m: &Matrix) -> Result<SymmetricEigen> {
    if m.rows != m.cols {
        return Err(CoreError::InvalidParameter(
            "eigendecomposition requires a square matrix".into(),
        ));
    }
    let n = m.rows;
    let mut a = m.clone();
    let mut v = Matrix::identity(n);
    let scale: f64 = a
        .data
        .iter()
        .map(|x| x.abs())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);

    for _sweep in 0..64 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a[(i, j)] * a[(i, j)];
            }
        }
        if off.sqrt() <= 1e-14 * scale * n as f64 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    1.0 / (theta - (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].partial_cmp(&a[(j, j)]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| a[(i, i)]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for k in 0..n {
            vectors[(k, new_col)] = v[(k, old_col)];
        }
    }
    Ok(SymmetricEigen { values, vectors })
}

/// Spectral radius (largest absolute eigenvalue) of a symmetric matrix.
pub fn spectral_radius_symmetric(m: &Matrix) -> Result<f64> {
    let eig = symmetric_eigen(m)?;
    Ok(eig
        .values
        .iter()
        .map(|x| x.abs())
        .fold(0.0, f64::max))
}

/// Symmetric square root `A` with `A * A^T = m`, eigenvalues clipped at zero.
///
/// Eigendecomposition is used instead of Cholesky so that nearly singular
/// covariances (deep hierarchies) still factorize. Eigenvalues below
/// `-neg_tol` are an error; values in `[-neg_tol, 0]` are clipped to zero and
/// reported through `clipped`.
pub struct PsdFactor {
    pub factor: Matrix,
    pub min_eigenvalue: f64,
    pub clipped: bool,
}

pub fn psd_factor(m: &Matrix, neg_tol: f64) -> Result<PsdFactor> {
    let eig = symmetric_eigen(m)?;
    let min_ev = eig.values.first().copied().unwrap_or(0.0);
    if min_ev < -neg_tol {
        return Err(CoreError::CovarianceConstruction(format!(
            "matrix has eigenvalue {min_ev:.3e} below tolerance -{neg_tol:.1e}"
        )));
    }
    let n = m.nrows();
    let mut factor = Matrix::zeros(n, n);
    for j in 0..n {
        let lam = eig.values[j].max(0.0).sqrt();
        for i in 0..n {
            factor[(i, j)] = eig.vectors[(i, j)] * lam;
        }
    }
    Ok(PsdFactor {
        factor,
        min_eigenvalue: min_ev,
        clipped: min_ev < 0.0,
    })
}

/// Solve `(A + ridge*I) x = b` for symmetric positive definite `A` by
/// Cholesky. Falls back to an eigenvalue pseudo-inverse when the
/// factorization breaks down (rank-deficient `A` with `ridge == 0`), which
/// yields the minimum-norm least-squares solution.
#[allow(clippy::needless_range_loop)] // substitution loops index several arrays
pub fn solve_spd_with_ridge(a: &Matrix, ridge: f64, b: &[f64]) -> Result<Vec<f64>> {
    let n = a.nrows();
    if a.ncols() != n || b.len() != n {
        return Err(CoreError::InvalidParameter(
            "solve_spd_with_ridge shape mismatch".into(),
        ));
    }
    let mut l = Matrix::zeros(n, n);
    let mut ok = true;
    'chol: for i in 0..n {
        for j in 0..=i {
            let mut sum = a[(i, j)] + if i == j { ridge } else { 0.0 };
            for k in 0..j {
                sum -= l[(i, k)] * l[(j, k)];
            }
            if i == j {
                if sum <= 1e-12 * (1.0 + a[(i, i)].abs()) {
                    ok = false;
                    break 'chol;
                }
                l[(i, j)] = sum.sqrt();
            } else {
                l[(i, j)] = sum / l[(j, j)];
            }
        }
    }
    if ok {
        // forward then back substitution
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut sum = b[i];
            for k in 0..i {
                sum -= l[(i, k)] * y[k];
            }
            y[i] = sum / l[(i, i)];
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut sum = y[i];
            for k in (i + 1)..n {
                sum -= l[(k, i)] * x[k];
            }
            x[i] = sum / l[(i, i)];
        }
        return Ok(x);
    }
    // Pseudo-inverse route: minimum-norm solution.
    let mut shifted = a.clone();
    for i in 0..n {
        shifted[(i, i)] += ridge;
    }
    let eig = symmetric_eigen(&shifted)?;
    let max_ev = eig.values.iter().fold(0.0_f64, |acc, &x| acc.max(x.abs()));
    let cutoff = max_ev * 1e-12;
    let mut x = vec![0.0; n];
    for j in 0..n {
        if eig.values[j].abs() <= cutoff {
            continue;
        }
        let mut vb = 0.0;
        for i in 0..n {
            vb += eig.vectors[(i, j)] * b[i];
        }
        let coef = vb / eig.values[j];
        for i in 0..n {
            x[i] += coef * eig.vectors[(i, j)];
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_of_diagonal_is_immediate() {
        let m = Matrix::from_rows(vec![vec![3.0, 0.0], vec![0.0, -1.0]]).unwrap();
        let eig = symmetric_eigen(&m).unwrap();
        assert!((eig.values[0] - -1.0).abs() < 1e-12);
        assert!((eig.values[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn eigen_reconstructs_matrix() {
        let m = Matrix::from_rows(vec![
            vec![2.0, 0.5, 0.1],
            vec![0.5, 1.0, -0.3],
            vec![0.1, -0.3, 0.7],
        ])
        .unwrap();
        let eig = symmetric_eigen(&m).unwrap();
        let n = 3;
        let mut rec = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += eig.vectors[(i, k)] * eig.values[k] * eig.vectors[(j, k)];
                }
                rec[(i, j)] = s;
            }
        }
        assert!(m.max_abs_diff(&rec) < 1e-10);
    }

    #[test]
    fn spectral_radius_of_known_matrix() {
        // eigenvalues 3 and 1
        let m = Matrix::from_rows(vec![vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        assert!((spectral_radius_symmetric(&m).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn psd_factor_squares_back() {
        let m = Matrix::from_rows(vec![vec![1.0, 0.5], vec![0.5, 1.0]]).unwrap();
        let f = psd_factor(&m, 1e-9).unwrap().factor;
        let mut prod = Matrix::zeros(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                let mut s = 0.0;
                for k in 0..2 {
                    s += f[(i, k)] * f[(j, k)];
                }
                prod[(i, j)] = s;
            }
        }
        assert!(m.max_abs_diff(&prod) < 1e-12);
    }

    #[test]
    fn psd_factor_rejects_indefinite() {
        let m = Matrix::from_rows(vec![vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(psd_factor(&m, 1e-9).is_err());
    }

    #[test]
    fn spd_solve_matches_manual_inverse() {
        let a = Matrix::from_rows(vec![vec![4.0, 1.0], vec![1.0, 3.0]]).unwrap();
        let x = solve_spd_with_ridge(&a, 0.0, &[1.0, 2.0]).unwrap();
        // inverse of [[4,1],[1,3]] is 1/11 [[3,-1],[-1,4]]
        assert!((x[0] - (3.0 - 2.0) / 11.0).abs() < 1e-12);
        assert!((x[1] - (-1.0 + 8.0) / 11.0).abs() < 1e-12);
    }

    #[test]
    fn singular_solve_returns_minimum_norm() {
        // A = [[1,1],[1,1]] (rank 1), b = [2,2]; min-norm solution is [1,1].
        let a = Matrix::from_rows(vec![vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let x = solve_spd_with_ridge(&a, 0.0, &[2.0, 2.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-9, "{x:?}");
        assert!((x[1] - 1.0).abs() < 1e-9, "{x:?}");
    }
}
