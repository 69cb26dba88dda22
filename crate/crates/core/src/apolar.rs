//! The apolar inner product `⟨P,Q⟩_a = (Q*(D)P)(0) = Σ_α α!·c_α·conj(d_α)`
//! and the two multiplication-norm bounds built on it.
//!
//! Monomials are orthogonal: `⟨z^α, z^β⟩_a = 0` for `α ≠ β` and
//! `⟨z^α, z^α⟩_a = α!`. Under this product, multiplication by a polynomial
//! `Q` and application of the conjugated operator `Q*(D)` are adjoint,
//! which is what makes Fischer remainders an orthogonal complement.
//!
//! Norms are kept squared so that they stay rational; square roots appear
//! only in float-reporting paths or as certified rational upper bounds.

use crate::certified;
use crate::poly::{MultiIndex, Polynomial, PolyError};
use crate::scalar::ComplexRational;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ApolarError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("expected a homogeneous polynomial")]
    NotHomogeneous,
    #[error("sup-norm estimate must be positive")]
    NonpositiveSupEstimate,
    #[error("the zero polynomial has no normalized ratio")]
    ZeroPolynomial,
}

/// Diagonal Gram data of the monomial basis in one homogeneous degree:
/// weight `α!` for every `|α| = m`.
#[derive(Clone, Debug)]
pub struct ApolarScale {
    pub degree: u32,
    pub weights: BTreeMap<MultiIndex, BigInt>,
}

impl ApolarScale {
    pub fn new(dim: usize, degree: u32) -> Self {
        let weights = MultiIndex::all_of_degree(dim, degree)
            .into_iter()
            .map(|alpha| {
                let w = alpha.factorial();
                (alpha, w)
            })
            .collect();
        Self { degree, weights }
    }
}

/// `⟨f,g⟩_a = Σ_α α!·c_α·conj(d_α)`; sesquilinear, conjugate-linear in `g`.
pub fn apolar_inner(f: &Polynomial, g: &Polynomial) -> Result<ComplexRational, PolyError> {
    if f.dim() != g.dim() {
        return Err(PolyError::DimensionMismatch {
            left: f.dim(),
            right: g.dim(),
        });
    }
    let mut acc = ComplexRational::zero();
    for (alpha, c) in f.terms() {
        let d = g.coeff(alpha);
        if d.is_zero() {
            continue;
        }
        let weight = ComplexRational::real(BigRational::from_integer(alpha.factorial()));
        acc += &(&(c * &d.conj()) * &weight);
    }
    Ok(acc)
}

/// `∥f∥²_a = Σ_α α!·|c_α|²`, exact and zero iff `f = 0`.
pub fn apolar_norm_sq(f: &Polynomial) -> BigRational {
    let mut acc = BigRational::zero();
    for (alpha, c) in f.terms() {
        acc += BigRational::from_integer(alpha.factorial()) * c.norm_sqr();
    }
    acc
}

/// Result of checking the adjoint identity `⟨Q*(D)f, g⟩_a = ⟨f, Q·g⟩_a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdjointCheck {
    pub holds: bool,
    /// Exact difference of the two sides; must be zero.
    pub residual: ComplexRational,
}

/// Evaluates both sides of the adjoint identity exactly.
pub fn verify_adjoint(
    f: &Polynomial,
    g: &Polynomial,
    q: &Polynomial,
) -> Result<AdjointCheck, PolyError> {
    let lhs = apolar_inner(&Polynomial::apply_operator(&q.conjugate_coefficients(), f)?, g)?;
    let rhs = apolar_inner(f, &q.mul(g)?)?;
    let residual = &lhs - &rhs;
    Ok(AdjointCheck {
        holds: residual.is_zero(),
        residual,
    })
}

/// Certified squared upper bound for `∥P·f_m∥_a` when `P` is homogeneous of
/// degree `k` and `f_m` homogeneous of degree `m`:
///
/// `∥P f_m∥²_a ≤ ∥f_m∥²_a · (1+m)^k · (Σ_α |c_α|·√(α!))²`
///
/// The square-root sum is replaced by exact rational upper bounds, so the
/// returned value genuinely dominates the squared norm.
pub fn beauzamy_bound_sq(p: &Polynomial, f_m: &Polynomial) -> Result<BigRational, ApolarError> {
    if !p.is_homogeneous() || !f_m.is_homogeneous() {
        return Err(ApolarError::NotHomogeneous);
    }
    if f_m.is_zero() || p.is_zero() {
        return Ok(BigRational::zero());
    }
    let k = p.degree().expect("nonzero");
    let m = f_m.degree().expect("nonzero");
    // Σ |c_α|√(α!) = Σ √(|c_α|²·α!), bounded from above term by term.
    let mut sum_upper = BigRational::zero();
    for (alpha, c) in p.terms() {
        let t = c.norm_sqr() * BigRational::from_integer(alpha.factorial());
        sum_upper += certified::sqrt_upper(&t, 40);
    }
    let mut bound = apolar_norm_sq(f_m) * &sum_upper * &sum_upper;
    for _ in 0..k {
        bound *= BigRational::from_integer(BigInt::from(m + 1));
    }
    Ok(bound)
}

/// Ratio `∥f_m∥_a / (√((m+d−1)!)·sup_est)`, the empirical quantity whose
/// boundedness over all homogeneous `f_m` exhibits the dimensional constant
/// relating apolar norms to sup norms on the unit sphere.
pub fn apolar_sup_ratio(f_m: &Polynomial, sup_est: f64) -> Result<f64, ApolarError> {
    if !f_m.is_homogeneous() {
        return Err(ApolarError::NotHomogeneous);
    }
    if f_m.is_zero() {
        return Err(ApolarError::ZeroPolynomial);
    }
    if sup_est.is_nan() || sup_est <= 0.0 {
        return Err(ApolarError::NonpositiveSupEstimate);
    }
    let m = f_m.degree().expect("nonzero");
    let d = f_m.dim() as u32;
    let mut fact = BigInt::from(1u32);
    for j in 2..=(m + d - 1) {
        fact *= BigInt::from(j);
    }
    let norm = apolar_norm_sq(f_m).to_f64().unwrap_or(f64::NAN).sqrt();
    let denom = fact.to_f64().unwrap_or(f64::NAN).sqrt() * sup_est;
    Ok(norm / denom)
}
