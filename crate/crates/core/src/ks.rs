//! Khavinson–Shapiro bound measurement: how much multiplication by a fixed
//! homogeneous `P_k` inflates apolar norms, degree by degree.
//!
//! For each degree `m` the scanner computes
//! `μ_m = min { ∥P_k·g∥_a / ∥g∥_a : g homogeneous of degree m, g ≠ 0 }`,
//! the smallest singular value of multiplication between apolar-orthonormal
//! bases, and fits `μ_m ≈ C·(m+1)^{τ/2}` to exhibit the pair `(C, τ)`.
//! `τ = 0` with `C = min_m μ_m` always certifies the scanned range.
//!
//! Every floating μ carries an exact-arithmetic cross-check: the rounded
//! minimizer's Rayleigh quotient is recomputed over the rationals and must
//! agree with μ² to the stated tolerance.

use crate::apolar::{apolar_inner, ApolarScale};
use crate::jacobi::{sym_eigen_smallest, JacobiError};
use crate::linalg::QMatrix;
use crate::poly::{homogeneous_dim, MultiIndex, Polynomial, PolyError};
use crate::scalar::ComplexRational;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum KsError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("expected a nonzero homogeneous polynomial")]
    NotHomogeneous,
    #[error("empty scan range: m_min {m_min} > m_max {m_max}")]
    EmptyRange { m_min: u32, m_max: u32 },
    #[error(transparent)]
    Eigen(#[from] JacobiError),
}

/// Numeric controls for the scanner.
#[derive(Clone, Debug)]
pub struct KsOptions {
    /// Off-diagonal tolerance for the Jacobi iteration.
    pub jacobi_tolerance: f64,
    pub max_sweeps: usize,
    /// Relative tolerance for the exact Rayleigh cross-check.
    pub rayleigh_tolerance: f64,
    /// Degrees below this are excluded from the (C, τ) fit.
    pub fit_min_degree: u32,
}

impl Default for KsOptions {
    fn default() -> Self {
        Self {
            jacobi_tolerance: 1e-10,
            max_sweeps: 100,
            rayleigh_tolerance: 1e-6,
            fit_min_degree: 2,
        }
    }
}

fn check_input(p: &Polynomial) -> Result<u32, KsError> {
    if p.is_zero() || !p.is_homogeneous() {
        return Err(KsError::NotHomogeneous);
    }
    Ok(p.degree().expect("nonzero"))
}

/// Matrix of `g ↦ P_k·g` from the orthonormal basis `{z^α/√α!, |α|=m}` to
/// `{z^β/√β!, |β|=m+k}`: entries `c_{β−α}·√(β!/α!)` in double precision.
pub fn multiplication_matrix(p: &Polynomial, m: u32) -> Result<Vec<Vec<Complex64>>, KsError> {
    let k = check_input(p)?;
    let dim = p.dim();
    let in_basis = MultiIndex::all_of_degree(dim, m);
    let out_basis = MultiIndex::all_of_degree(dim, m + k);
    let mut mat = vec![vec![Complex64::new(0.0, 0.0); in_basis.len()]; out_basis.len()];
    for (j, alpha) in in_basis.iter().enumerate() {
        let alpha_fact = alpha.factorial().to_f64().unwrap_or(f64::NAN);
        for (i, beta) in out_basis.iter().enumerate() {
            if let Some(gamma) = beta.checked_sub(alpha) {
                let c = p.coeff(&gamma);
                if c.is_zero() {
                    continue;
                }
                let beta_fact = beta.factorial().to_f64().unwrap_or(f64::NAN);
                mat[i][j] = c.to_c64() * (beta_fact / alpha_fact).sqrt();
            }
        }
    }
    Ok(mat)
}

/// Exact quadratic-form data behind the multiplication matrix: the
/// Hermitian Gram matrix `A[i][j] = ⟨P·e_j, P·e_i⟩_a` on the monomial basis
/// of degree `m`, plus the diagonal apolar weights `α!`.
pub struct ExactGram {
    pub basis: Vec<MultiIndex>,
    pub gram: QMatrix,
    pub weights: Vec<BigInt>,
}

pub fn exact_multiplication_gram(p: &Polynomial, m: u32) -> Result<ExactGram, KsError> {
    check_input(p)?;
    let dim = p.dim();
    let basis = MultiIndex::all_of_degree(dim, m);
    let images: Vec<Polynomial> = basis
        .iter()
        .map(|e| {
            p.mul(&Polynomial::monomial(dim, e.clone(), ComplexRational::one()))
                .expect("same dim")
        })
        .collect();
    let gram = QMatrix::from_fn(basis.len(), basis.len(), |i, j| {
        apolar_inner(&images[j], &images[i]).expect("same dim")
    });
    let scale = ApolarScale::new(dim, m);
    let weights = basis.iter().map(|a| scale.weights[a].clone()).collect();
    Ok(ExactGram {
        basis,
        gram,
        weights,
    })
}

/// One measured singular value with its certification data.
#[derive(Clone, Debug)]
pub struct SingularValue {
    /// `μ_m`, the smallest singular value.
    pub value: f64,
    /// Minimizing vector in the orthonormal-basis coordinates.
    pub minimizer: Vec<Complex64>,
    /// Exact Rayleigh quotient of the rounded minimizer (equals `μ_m²` up
    /// to the check tolerance).
    pub exact_rayleigh: f64,
    /// Cross-check passed.
    pub certified: bool,
}

/// Smallest singular value of multiplication by `p` at input degree `m`,
/// via cyclic Jacobi on the orthonormal-basis Gram matrix.
#[allow(clippy::needless_range_loop)]
pub fn min_singular_value(p: &Polynomial, m: u32, opts: &KsOptions) -> Result<SingularValue, KsError> {
    let gram = exact_multiplication_gram(p, m)?;
    let n = gram.basis.len();
    let w: Vec<f64> = gram
        .weights
        .iter()
        .map(|x| x.to_f64().unwrap_or(f64::NAN))
        .collect();
    let mut re = vec![vec![0.0f64; n]; n];
    let mut im = vec![vec![0.0f64; n]; n];
    let mut has_imag = false;
    for i in 0..n {
        for j in 0..n {
            let scale = (w[i] * w[j]).sqrt();
            let entry = gram.gram.get(i, j).to_c64() / scale;
            re[i][j] = entry.re;
            im[i][j] = entry.im;
            if entry.im != 0.0 {
                has_imag = true;
            }
        }
    }

    let (lambda_min, eigvec) = if has_imag {
        // Hermitian H = R + iS embeds as the real symmetric [[R, −S],[S, R]];
        // eigenvalues coincide (with doubled multiplicity).
        let mut big = vec![vec![0.0f64; 2 * n]; 2 * n];
        for i in 0..n {
            for j in 0..n {
                big[i][j] = re[i][j];
                big[i][j + n] = -im[i][j];
                big[i + n][j] = im[i][j];
                big[i + n][j + n] = re[i][j];
            }
        }
        let (lambda, v) = sym_eigen_smallest(&big, opts.jacobi_tolerance, opts.max_sweeps)?;
        let vec: Vec<Complex64> = (0..n).map(|i| Complex64::new(v[i], v[i + n])).collect();
        (lambda, vec)
    } else {
        let (lambda, v) = sym_eigen_smallest(&re, opts.jacobi_tolerance, opts.max_sweeps)?;
        (lambda, v.into_iter().map(|x| Complex64::new(x, 0.0)).collect())
    };

    let lambda_min = lambda_min.max(0.0);
    let value = lambda_min.sqrt();

    // Exact Rayleigh quotient of the rounded minimizer: map to monomial
    // coordinates x_i = y_i/√(α_i!), rationalize exactly, and evaluate
    // (xᴴ A x)/(xᴴ B x) over the rationals.
    let x: Vec<ComplexRational> = eigvec
        .iter()
        .zip(&w)
        .map(|(y, wi)| {
            let s = wi.sqrt();
            ComplexRational::from_f64_exact(y.re / s, y.im / s).expect("finite eigenvector")
        })
        .collect();
    let mut num = ComplexRational::zero();
    for i in 0..n {
        for j in 0..n {
            num += &(&(&x[i].conj() * gram.gram.get(i, j)) * &x[j]);
        }
    }
    let mut den = BigRational::zero();
    for i in 0..n {
        den += BigRational::from_integer(gram.weights[i].clone()) * x[i].norm_sqr();
    }
    debug_assert!(num.im.is_zero(), "Hermitian Rayleigh quotient must be real");
    let exact_rayleigh = if den.is_zero() {
        f64::NAN
    } else {
        (num.re / den).to_f64().unwrap_or(f64::NAN)
    };
    let certified = lambda_min > 0.0
        && exact_rayleigh.is_finite()
        && ((exact_rayleigh - lambda_min).abs() <= opts.rayleigh_tolerance * lambda_min);

    Ok(SingularValue {
        value,
        minimizer: eigvec,
        exact_rayleigh,
        certified,
    })
}

/// Least-squares fit of `log μ_m = log C + (τ/2)·log(m+1)`.
#[derive(Clone, Debug, Serialize)]
pub struct KsFit {
    pub c: f64,
    pub tau: f64,
    /// Per-point residuals of the log-space fit, aligned with the fitted
    /// degrees.
    pub residuals: Vec<f64>,
    pub fitted_degrees: Vec<u32>,
}

/// Scan report: per-degree minimal singular values plus the fitted and the
/// certified `(C, τ)` pairs.
#[derive(Clone, Debug, Serialize)]
pub struct KsReport {
    pub degrees: Vec<u32>,
    pub dims: Vec<usize>,
    pub mu: Vec<f64>,
    pub certified: Vec<bool>,
    pub fit: Option<KsFit>,
    /// `C₀ = min_m μ_m`: together with `τ₀ = 0` this pair satisfies the
    /// bound on the scanned range by construction.
    pub certified_constant: f64,
    pub certified_tau: f64,
}

impl KsReport {
    /// CSV table with columns `m, dim, mu, certified`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,dim,mu,certified\n");
        for i in 0..self.degrees.len() {
            out.push_str(&format!(
                "{},{},{:.12e},{}\n",
                self.degrees[i], self.dims[i], self.mu[i], self.certified[i]
            ));
        }
        out
    }
}

/// Computes `μ_m` for every `m ∈ [m_min, m_max]` and fits `(C, τ)` over the
/// degrees at or above `opts.fit_min_degree` (falling back to the whole
/// range when that window has fewer than two points).
pub fn ks_scan(
    p: &Polynomial,
    m_min: u32,
    m_max: u32,
    opts: &KsOptions,
) -> Result<KsReport, KsError> {
    check_input(p)?;
    if m_min > m_max {
        return Err(KsError::EmptyRange { m_min, m_max });
    }
    let mut degrees = Vec::new();
    let mut dims = Vec::new();
    let mut mu = Vec::new();
    let mut certified = Vec::new();
    for m in m_min..=m_max {
        let sv = min_singular_value(p, m, opts)?;
        degrees.push(m);
        dims.push(homogeneous_dim(p.dim(), m));
        mu.push(sv.value);
        certified.push(sv.certified);
    }

    let window: Vec<(u32, f64)> = degrees
        .iter()
        .zip(&mu)
        .filter(|(m, v)| **m >= opts.fit_min_degree && **v > 0.0)
        .map(|(m, v)| (*m, *v))
        .collect();
    let points = if window.len() >= 2 {
        window
    } else {
        degrees
            .iter()
            .zip(&mu)
            .filter(|(_, v)| **v > 0.0)
            .map(|(m, v)| (*m, *v))
            .collect()
    };
    let fit = if points.len() >= 2 {
        let xs: Vec<f64> = points.iter().map(|(m, _)| ((*m + 1) as f64).ln()).collect();
        let ys: Vec<f64> = points.iter().map(|(_, v)| v.ln()).collect();
        let n = xs.len() as f64;
        let sx: f64 = xs.iter().sum();
        let sy: f64 = ys.iter().sum();
        let sxx: f64 = xs.iter().map(|x| x * x).sum();
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
        let det = n * sxx - sx * sx;
        if det.abs() < 1e-30 {
            None
        } else {
            let slope = (n * sxy - sx * sy) / det;
            let intercept = (sy * sxx - sx * sxy) / det;
            let residuals = xs
                .iter()
                .zip(&ys)
                .map(|(x, y)| y - (intercept + slope * x))
                .collect();
            Some(KsFit {
                c: intercept.exp(),
                tau: 2.0 * slope,
                residuals,
                fitted_degrees: points.iter().map(|(m, _)| *m).collect(),
            })
        }
    } else {
        None
    };

    let certified_constant = mu.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(KsReport {
        degrees,
        dims,
        mu,
        certified,
        fit,
        certified_constant,
        certified_tau: 0.0,
    })
}

/// Admissibility verdict for a proposed exponent `τ`.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct TauAdmissibility {
    pub admissible: bool,
    pub reason: String,
}

/// In several variables (`d > 1`, `k > 1`) the multiplication bound can
/// only hold with `τ ≤ k − 1`; larger exponents are flagged.
pub fn check_tau_admissible(k: u32, tau: f64, d: usize) -> TauAdmissibility {
    if d > 1 && k > 1 && tau > (k as f64) - 1.0 {
        TauAdmissibility {
            admissible: false,
            reason: format!("tau = {tau} exceeds k - 1 = {} with d = {d} > 1", k - 1),
        }
    } else {
        TauAdmissibility {
            admissible: true,
            reason: String::from("within the necessary range"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(i: usize, dim: usize) -> Polynomial {
        Polynomial::variable(dim, i)
    }

    #[test]
    fn multiplication_matrix_one_dimensional() {
        // P = z1, d=1, m=1: the 1×1 matrix [√2].
        let m = multiplication_matrix(&z(0, 1), 1).unwrap();
        assert_eq!(m.len(), 1);
        assert!((m[0][0].re - 2.0f64.sqrt()).abs() < 1e-12);
        assert_eq!(m[0][0].im, 0.0);
    }

    #[test]
    fn multiplication_matrix_orthogonal_images() {
        // P = z1², d=2, m=1: columns have norms √6 and √2 and are orthogonal.
        let p = z(0, 2).pow(2);
        let m = multiplication_matrix(&p, 1).unwrap();
        let cols = 2;
        let mut norms = vec![0.0f64; cols];
        let mut dot = Complex64::new(0.0, 0.0);
        for row in &m {
            for (j, x) in row.iter().enumerate() {
                norms[j] += x.norm_sqr();
            }
            dot += row[0].conj() * row[1];
        }
        assert!((norms[0].sqrt() - 6.0f64.sqrt()).abs() < 1e-12);
        assert!((norms[1].sqrt() - 2.0f64.sqrt()).abs() < 1e-12);
        assert!(dot.norm() < 1e-12);
    }

    #[test]
    fn rejects_zero_and_inhomogeneous() {
        assert_eq!(
            multiplication_matrix(&Polynomial::zero(2), 1).unwrap_err(),
            KsError::NotHomogeneous
        );
        let p = z(0, 1).pow(2).add(&Polynomial::one(1)).unwrap();
        assert_eq!(
            multiplication_matrix(&p, 1).unwrap_err(),
            KsError::NotHomogeneous
        );
    }

    #[test]
    fn min_singular_value_power_monomial() {
        // P = z1^k in d ≥ 2: μ_m = √(k!) for every m, minimized at α₁ = 0.
        let opts = KsOptions::default();
        for k in 1..=3u32 {
            let p = z(0, 2).pow(k);
            let expected = (1..=k).map(|j| j as f64).product::<f64>().sqrt();
            for m in 0..=4u32 {
                let sv = min_singular_value(&p, m, &opts).unwrap();
                assert!(
                    (sv.value - expected).abs() < 1e-8,
                    "k={k} m={m}: {} vs {expected}",
                    sv.value
                );
                assert!(sv.certified, "k={k} m={m} certification");
            }
        }
    }

    #[test]
    fn min_singular_value_one_dim() {
        // P = z1², d=1, m=1: single ratio √(3!/1!) = √6.
        let sv = min_singular_value(&z(0, 1).pow(2), 1, &KsOptions::default()).unwrap();
        assert!((sv.value - 6.0f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn complex_coefficients_still_certify() {
        // P = z1² + i·z2²: exercises the Hermitian embedding path.
        let p = z(0, 2)
            .pow(2)
            .add(&z(1, 2).pow(2).scale(&ComplexRational::i()))
            .unwrap();
        let sv = min_singular_value(&p, 2, &KsOptions::default()).unwrap();
        assert!(sv.value > 0.0);
        assert!(sv.certified);
    }

    #[test]
    fn scan_power_monomial_flat_fit() {
        let p = z(0, 2).pow(2);
        let report = ks_scan(&p, 0, 6, &KsOptions::default()).unwrap();
        assert!(report.mu.iter().all(|&v| v > 0.0));
        assert!(report.certified.iter().all(|&c| c));
        let fit = report.fit.expect("enough points");
        assert!(fit.tau.abs() < 0.05, "tau = {}", fit.tau);
        assert!((fit.c - 2.0f64.sqrt()).abs() < 1e-6);
        assert!((report.certified_constant - 2.0f64.sqrt()).abs() < 1e-8);
        assert_eq!(report.certified_tau, 0.0);
    }

    #[test]
    fn scan_single_point_has_no_fit() {
        let p = z(0, 2).pow(2);
        let report = ks_scan(&p, 3, 3, &KsOptions::default()).unwrap();
        assert!(report.fit.is_none());
        assert!(report.certified_constant > 0.0);
    }

    #[test]
    fn scan_rejects_empty_range() {
        let p = z(0, 2).pow(2);
        assert_eq!(
            ks_scan(&p, 4, 2, &KsOptions::default()).unwrap_err(),
            KsError::EmptyRange { m_min: 4, m_max: 2 }
        );
    }

    #[test]
    fn tau_admissibility() {
        assert!(check_tau_admissible(3, 2.0, 2).admissible);
        assert!(!check_tau_admissible(3, 2.5, 2).admissible);
        assert!(check_tau_admissible(3, 5.0, 1).admissible);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let p = z(0, 2).pow(2);
        let report = ks_scan(&p, 0, 2, &KsOptions::default()).unwrap();
        let csv = report.to_csv();
        assert!(csv.starts_with("m,dim,mu,certified\n"));
        assert_eq!(csv.lines().count(), 4);
    }
}
