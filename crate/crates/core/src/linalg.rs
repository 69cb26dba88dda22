//! Exact dense linear algebra over the Gaussian rationals.
//!
//! Systems are solved by clearing denominators row by row and running
//! fraction-free (Bareiss) elimination over the Gaussian integers, so all
//! intermediate divisions are exact. Pivots are chosen by largest norm
//! (the integer-content heuristic); ties break deterministically by lowest
//! row index, and elimination proceeds column by column from the left.

#![allow(clippy::needless_range_loop)]

use crate::scalar::ComplexRational;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinalgError {
    #[error("matrix is singular")]
    Singular,
    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
}

/// Dense matrix of exact Gaussian-rational entries, row-major.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<ComplexRational>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ComplexRational::zero(); rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> ComplexRational) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &ComplexRational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: ComplexRational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul_vec(&self, x: &[ComplexRational]) -> Vec<ComplexRational> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = ComplexRational::zero();
                for j in 0..self.cols {
                    acc += &(self.get(i, j) * &x[j]);
                }
                acc
            })
            .collect()
    }

    /// True when `A[j][i] = conj(A[i][j])` for all entries.
    pub fn is_hermitian(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows)
                .all(|i| (i..self.cols).all(|j| self.get(j, i) == &self.get(i, j).conj()))
    }

    /// Solves `A·x = b` exactly. Requires a square nonsingular matrix.
    pub fn solve(&self, rhs: &[ComplexRational]) -> Result<Vec<ComplexRational>, LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::ShapeMismatch {
                expected: self.rows,
                got: self.cols,
            });
        }
        if rhs.len() != self.rows {
            return Err(LinalgError::ShapeMismatch {
                expected: self.rows,
                got: rhs.len(),
            });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(Vec::new());
        }
        // Augmented Gaussian-integer matrix, denominators cleared per row.
        let mut m: Vec<Vec<GaussInt>> = (0..n)
            .map(|i| {
                let mut row: Vec<ComplexRational> =
                    (0..n).map(|j| self.get(i, j).clone()).collect();
                row.push(rhs[i].clone());
                clear_denominators(&row)
            })
            .collect();

        let mut prev = GaussInt::one();
        for col in 0..n {
            let pivot_row = match select_pivot(&m, col, col) {
                Some(r) => r,
                None => return Err(LinalgError::Singular),
            };
            m.swap(col, pivot_row);
            for i in (col + 1)..n {
                for j in (col + 1)..=n {
                    let t = m[col][col].mul(&m[i][j]).sub(&m[i][col].mul(&m[col][j]));
                    m[i][j] = t.exact_div(&prev);
                }
                m[i][col] = GaussInt::zero();
            }
            prev = m[col][col].clone();
        }

        // Back-substitution in exact rational arithmetic.
        let mut x = vec![ComplexRational::zero(); n];
        for i in (0..n).rev() {
            let mut acc = m[i][n].to_scalar();
            for j in (i + 1)..n {
                acc -= &(&m[i][j].to_scalar() * &x[j]);
            }
            x[i] = &acc / &m[i][i].to_scalar();
        }
        Ok(x)
    }

    /// Exact rank via fraction-free elimination with column skipping.
    pub fn rank(&self) -> usize {
        let mut m: Vec<Vec<GaussInt>> = (0..self.rows)
            .map(|i| {
                let row: Vec<ComplexRational> =
                    (0..self.cols).map(|j| self.get(i, j).clone()).collect();
                clear_denominators(&row)
            })
            .collect();
        let mut prev = GaussInt::one();
        let mut pivots = 0usize;
        for col in 0..self.cols {
            if pivots == self.rows {
                break;
            }
            let pivot_row = match select_pivot(&m, pivots, col) {
                Some(r) => r,
                None => continue,
            };
            m.swap(pivots, pivot_row);
            for i in (pivots + 1)..self.rows {
                for j in (col + 1)..self.cols {
                    let t = m[pivots][col]
                        .mul(&m[i][j])
                        .sub(&m[i][col].mul(&m[pivots][j]));
                    m[i][j] = t.exact_div(&prev);
                }
                m[i][col] = GaussInt::zero();
            }
            prev = m[pivots][col].clone();
            pivots += 1;
        }
        pivots
    }

    /// A nonzero kernel vector if the matrix is rank-deficient, found by
    /// rational Gauss–Jordan reduction. Diagnostic path only.
    pub fn kernel_vector(&self) -> Option<Vec<ComplexRational>> {
        let mut m: Vec<Vec<ComplexRational>> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).clone()).collect())
            .collect();
        let mut pivot_cols = Vec::new();
        let mut row = 0usize;
        for col in 0..self.cols {
            let pivot = (row..self.rows).find(|&r| !m[r][col].is_zero());
            let Some(p) = pivot else { continue };
            m.swap(row, p);
            let inv = m[row][col].recip().expect("nonzero pivot");
            for j in col..self.cols {
                m[row][j] = &m[row][j] * &inv;
            }
            for r in 0..self.rows {
                if r != row && !m[r][col].is_zero() {
                    let factor = m[r][col].clone();
                    for j in col..self.cols {
                        let t = &m[row][j] * &factor;
                        m[r][j] -= &t;
                    }
                }
            }
            pivot_cols.push(col);
            row += 1;
            if row == self.rows {
                break;
            }
        }
        let free_col = (0..self.cols).find(|c| !pivot_cols.contains(c))?;
        let mut v = vec![ComplexRational::zero(); self.cols];
        v[free_col] = ComplexRational::one();
        for (r, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = -&m[r][free_col];
        }
        Some(v)
    }
}

/// Gaussian integer used internally by the fraction-free elimination.
#[derive(Clone, PartialEq, Eq, Debug)]
struct GaussInt {
    re: BigInt,
    im: BigInt,
}

impl GaussInt {
    fn zero() -> Self {
        Self {
            re: BigInt::zero(),
            im: BigInt::zero(),
        }
    }

    fn one() -> Self {
        Self {
            re: BigInt::one(),
            im: BigInt::zero(),
        }
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn norm(&self) -> BigInt {
        &self.re * &self.re + &self.im * &self.im
    }

    fn mul(&self, other: &Self) -> Self {
        Self {
            re: &self.re * &other.re - &self.im * &other.im,
            im: &self.re * &other.im + &self.im * &other.re,
        }
    }

    fn sub(&self, other: &Self) -> Self {
        Self {
            re: &self.re - &other.re,
            im: &self.im - &other.im,
        }
    }

    /// Exact division in ℤ[i]; panics if the quotient is not integral,
    /// which would indicate a broken elimination invariant.
    fn exact_div(&self, d: &Self) -> Self {
        let n = d.norm();
        let num_re = &self.re * &d.re + &self.im * &d.im;
        let num_im = &self.im * &d.re - &self.re * &d.im;
        let (q_re, r_re) = num_re.div_rem(&n);
        let (q_im, r_im) = num_im.div_rem(&n);
        assert!(
            r_re.is_zero() && r_im.is_zero(),
            "non-exact division in fraction-free elimination"
        );
        Self { re: q_re, im: q_im }
    }

    fn to_scalar(&self) -> ComplexRational {
        ComplexRational::new(
            BigRational::from_integer(self.re.clone()),
            BigRational::from_integer(self.im.clone()),
        )
    }
}

/// Scales a rational row by the LCM of all its denominators.
fn clear_denominators(row: &[ComplexRational]) -> Vec<GaussInt> {
    let mut lcm = BigInt::one();
    for c in row {
        lcm = lcm.lcm(c.re.denom());
        lcm = lcm.lcm(c.im.denom());
    }
    row.iter()
        .map(|c| {
            let re = c.re.numer() * (&lcm / c.re.denom());
            let im = c.im.numer() * (&lcm / c.im.denom());
            GaussInt { re, im }
        })
        .collect()
}

/// Row with the largest-norm nonzero entry in `col`, scanning rows
/// `start..`; ties go to the lowest row index.
fn select_pivot(m: &[Vec<GaussInt>], start: usize, col: usize) -> Option<usize> {
    let mut best: Option<(usize, BigInt)> = None;
    for (i, row) in m.iter().enumerate().skip(start) {
        if row[col].is_zero() {
            continue;
        }
        let norm = row[col].norm();
        match &best {
            Some((_, b)) if *b >= norm => {}
            _ => best = Some((i, norm)),
        }
    }
    best.map(|(i, _)| i)
}
