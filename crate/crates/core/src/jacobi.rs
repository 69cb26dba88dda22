//! Cyclic Jacobi eigenvalue iteration for real symmetric matrices.
//!
//! Plane rotations annihilate one off-diagonal entry at a time; sweeping
//! cyclically drives the off-diagonal mass to zero. Slow beyond a few
//! hundred rows but unconditionally robust, which is all the bound
//! scanner needs: its matrices are small.

// Index loops mirror the rotation formulas.
#![allow(clippy::needless_range_loop)]

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum JacobiError {
    #[error("Jacobi iteration did not converge within {0} sweeps")]
    NoConvergence(usize),
    #[error("matrix must be square and symmetric")]
    NotSymmetric,
}

/// Full eigendecomposition of a symmetric matrix.
///
/// Returns `(eigenvalues, eigenvectors)` with `eigenvectors[c]` the unit
/// eigenvector for `eigenvalues[c]`, unsorted. `tol` bounds the final
/// off-diagonal mass relative to the Frobenius norm.
pub fn sym_eigen(
    matrix: &[Vec<f64>],
    tol: f64,
    max_sweeps: usize,
) -> Result<(Vec<f64>, Vec<Vec<f64>>), JacobiError> {
    let n = matrix.len();
    if matrix.iter().any(|row| row.len() != n) {
        return Err(JacobiError::NotSymmetric);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (matrix[i][j] - matrix[j][i]).abs() > 1e-12 * frobenius(matrix).max(1.0) {
                return Err(JacobiError::NotSymmetric);
            }
        }
    }
    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    let mut v = identity(n);
    if n <= 1 {
        return Ok((a.iter().map(|r| r.first().copied().unwrap_or(0.0)).collect(), v));
    }
    let scale = frobenius(&a).max(f64::MIN_POSITIVE);

    for _ in 0..max_sweeps {
        let off = off_diagonal_mass(&a);
        if off <= tol * scale {
            let eigenvalues = (0..n).map(|i| a[i][i]).collect();
            return Ok((eigenvalues, transpose(&v)));
        }
        for p in 0..(n - 1) {
            for q in (p + 1)..n {
                if a[p][q].abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let theta = 0.5 * (a[q][q] - a[p][p]) / a[p][q];
                let t = {
                    let s = theta.signum();
                    s / (theta.abs() + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                rotate(&mut a, &mut v, p, q, c, s);
            }
        }
    }
    let off = off_diagonal_mass(&a);
    if off <= tol * scale {
        let eigenvalues = (0..n).map(|i| a[i][i]).collect();
        Ok((eigenvalues, transpose(&v)))
    } else {
        Err(JacobiError::NoConvergence(max_sweeps))
    }
}

/// Smallest eigenvalue and its eigenvector.
pub fn sym_eigen_smallest(
    matrix: &[Vec<f64>],
    tol: f64,
    max_sweeps: usize,
) -> Result<(f64, Vec<f64>), JacobiError> {
    let (values, vectors) = sym_eigen(matrix, tol, max_sweeps)?;
    let (idx, &min) = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).expect("non-NaN eigenvalues"))
        .expect("nonempty spectrum");
    Ok((min, vectors[idx].clone()))
}

fn rotate(a: &mut [Vec<f64>], v: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let n = a.len();
    for k in 0..n {
        let akp = a[k][p];
        let akq = a[k][q];
        a[k][p] = c * akp - s * akq;
        a[k][q] = s * akp + c * akq;
    }
    for k in 0..n {
        let apk = a[p][k];
        let aqk = a[q][k];
        a[p][k] = c * apk - s * aqk;
        a[q][k] = s * apk + c * aqk;
    }
    for k in 0..n {
        let vkp = v[k][p];
        let vkq = v[k][q];
        v[k][p] = c * vkp - s * vkq;
        v[k][q] = s * vkp + c * vkq;
    }
}

fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

fn transpose(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = m.len();
    (0..n).map(|c| (0..n).map(|r| m[r][c]).collect()).collect()
}

fn frobenius(a: &[Vec<f64>]) -> f64 {
    a.iter()
        .flat_map(|r| r.iter())
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
}

fn off_diagonal_mass(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[i][j] * a[i][j];
            }
        }
    }
    acc.sqrt()
}
