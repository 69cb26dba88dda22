//! Sparse multivariate polynomials over Gaussian rationals.
//!
//! A polynomial is a dimension-tagged map from exponent vectors to exact
//! complex-rational coefficients. Besides the ring operations this module
//! provides the two pieces of structure everything downstream depends on:
//! constant-coefficient differential operators (`apply_operator`) and the
//! grading into homogeneous slices (`GradedSeries`).
//!
//! Invariants maintained by every constructor and operation:
//! - no zero coefficient is ever stored;
//! - every exponent vector has length `dim`;
//! - term order is graded lexicographic, so iteration and printing are
//!   deterministic.

use crate::scalar::ComplexRational;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::One;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("expected a homogeneous polynomial")]
    NotHomogeneous,
}

/// Exponent vector of a monomial `z^α = z1^α1 ··· zd^αd`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        Self(exponents)
    }

    /// The constant monomial exponent (all zeros).
    pub fn zeros(dim: usize) -> Self {
        Self(vec![0; dim])
    }

    /// Exponent of the single variable `z_{i+1}` (0-based `i`).
    pub fn unit(dim: usize, i: usize) -> Self {
        assert!(i < dim, "variable index {i} out of range for dim {dim}");
        let mut e = vec![0; dim];
        e[i] = 1;
        Self(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    /// Total degree `|α| = Σ αᵢ`.
    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `α! = α₁!···α_d!` as an exact integer.
    pub fn factorial(&self) -> BigInt {
        let mut acc = BigInt::one();
        for &e in &self.0 {
            for j in 2..=e {
                acc *= BigInt::from(j);
            }
        }
        acc
    }

    /// Componentwise `self ≤ other`.
    pub fn divides(&self, other: &MultiIndex) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Componentwise difference, `None` unless `other` divides `self`.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        if !other.divides(self) {
            return None;
        }
        Some(Self(
            self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect(),
        ))
    }

    pub fn checked_add(&self, other: &MultiIndex) -> MultiIndex {
        assert_eq!(self.0.len(), other.0.len());
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `β!/(β−α)! = Π βᵢ(βᵢ−1)···(βᵢ−αᵢ+1)`: the integer produced by
    /// `D^α z^β` when `α` divides `β`.
    pub fn falling_factorial(beta: &MultiIndex, alpha: &MultiIndex) -> BigInt {
        debug_assert!(alpha.divides(beta));
        let mut acc = BigInt::one();
        for (&b, &a) in beta.0.iter().zip(&alpha.0) {
            for j in (b - a + 1)..=b {
                acc *= BigInt::from(j);
            }
        }
        acc
    }

    /// All exponent vectors of total degree `m` in `dim` variables, in
    /// lexicographically descending order of the underlying vectors. The
    /// order is fixed: it is the basis order used by every matrix in the
    /// crate.
    pub fn all_of_degree(dim: usize, m: u32) -> Vec<MultiIndex> {
        assert!(dim > 0, "dimension must be positive");
        let mut out = Vec::new();
        let mut current = vec![0u32; dim];
        fn rec(dim: usize, pos: usize, remaining: u32, current: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            if pos == dim - 1 {
                current[pos] = remaining;
                out.push(MultiIndex::new(current.clone()));
                return;
            }
            for e in (0..=remaining).rev() {
                current[pos] = e;
                rec(dim, pos + 1, remaining - e, current, out);
            }
        }
        rec(dim, 0, m, &mut current, &mut out);
        out
    }
}

/// Dimension of the space of homogeneous polynomials of degree `m` in `d`
/// variables: `C(m+d−1, d−1)`.
pub fn homogeneous_dim(d: usize, m: u32) -> usize {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for j in 1..d as u32 {
        num *= BigInt::from(m + j);
        den *= BigInt::from(j);
    }
    let q: BigInt = num / den;
    use num_traits::ToPrimitive;
    q.to_usize().expect("homogeneous dimension overflows usize")
}

impl Ord for MultiIndex {
    /// Graded lexicographic: total degree first, then lexicographic on the
    /// exponent vector.
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Sparse polynomial in `dim` complex variables with Gaussian-rational
/// coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct Polynomial {
    dim: usize,
    terms: BTreeMap<MultiIndex, ComplexRational>,
}

impl Polynomial {
    pub fn zero(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        Self {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: ComplexRational) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(MultiIndex::zeros(dim), c);
        p
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, ComplexRational::one())
    }

    /// The variable `z_{i+1}` (0-based `i`).
    pub fn variable(dim: usize, i: usize) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(MultiIndex::unit(dim, i), ComplexRational::one());
        p
    }

    pub fn monomial(dim: usize, alpha: MultiIndex, c: ComplexRational) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(alpha, c);
        p
    }

    pub fn from_terms<I>(dim: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (MultiIndex, ComplexRational)>,
    {
        let mut p = Self::zero(dim);
        for (alpha, c) in terms {
            p.add_term(alpha, c);
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Total degree; `None` is the degree of the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(MultiIndex::total_degree).max()
    }

    /// Coefficient of `z^α` (zero if absent).
    pub fn coeff(&self, alpha: &MultiIndex) -> ComplexRational {
        self.terms.get(alpha).cloned().unwrap_or_default()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &ComplexRational)> {
        self.terms.iter()
    }

    fn add_term(&mut self, alpha: MultiIndex, c: ComplexRational) {
        assert_eq!(
            alpha.dim(),
            self.dim,
            "exponent vector length must equal polynomial dimension"
        );
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(alpha) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn ensure_same_dim(&self, other: &Polynomial) -> Result<(), PolyError> {
        if self.dim != other.dim {
            return Err(PolyError::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }

    /// Exact sum.
    pub fn add(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.ensure_same_dim(other)?;
        let mut out = self.clone();
        for (alpha, c) in &other.terms {
            out.add_term(alpha.clone(), c.clone());
        }
        Ok(out)
    }

    /// Exact difference.
    pub fn sub(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Polynomial {
        let mut out = Polynomial::zero(self.dim);
        for (alpha, c) in &self.terms {
            out.terms.insert(alpha.clone(), -c);
        }
        out
    }

    pub fn scale(&self, c: &ComplexRational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.dim);
        }
        let mut out = Polynomial::zero(self.dim);
        for (alpha, a) in &self.terms {
            out.terms.insert(alpha.clone(), a * c);
        }
        out
    }

    /// Exact product.
    pub fn mul(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.ensure_same_dim(other)?;
        let mut out = Polynomial::zero(self.dim);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.add_term(a.checked_add(b), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, n: u32) -> Polynomial {
        let mut out = Polynomial::one(self.dim);
        for _ in 0..n {
            out = out.mul(self).expect("same dim");
        }
        out
    }

    /// Replaces every coefficient by its complex conjugate. This is the
    /// `P ↦ P*` map; it is an involution and multiplicative.
    pub fn conjugate_coefficients(&self) -> Polynomial {
        let mut out = Polynomial::zero(self.dim);
        for (alpha, c) in &self.terms {
            out.terms.insert(alpha.clone(), c.conj());
        }
        out
    }

    /// Applies the constant-coefficient differential operator `Q(D)` to
    /// `f`, where each variable `z_i` of `Q` acts as `∂/∂z_i`. On monomials
    /// `D^α z^β = (β!/(β−α)!) z^{β−α}` when `α` divides `β`, else `0`.
    ///
    /// The coefficients of `Q` are used as given; callers wanting the
    /// conjugated operator `Q*(D)` conjugate first.
    pub fn apply_operator(op: &Polynomial, f: &Polynomial) -> Result<Polynomial, PolyError> {
        op.ensure_same_dim(f)?;
        let mut out = Polynomial::zero(f.dim);
        for (alpha, c) in &op.terms {
            for (beta, b) in &f.terms {
                if let Some(gamma) = beta.checked_sub(alpha) {
                    let factor = ComplexRational::real(num_rational::BigRational::from_integer(
                        MultiIndex::falling_factorial(beta, alpha),
                    ));
                    out.add_term(gamma, &(c * b) * &factor);
                }
            }
        }
        Ok(out)
    }

    /// The degree-`m` homogeneous part.
    pub fn homogeneous_slice(&self, m: u32) -> Polynomial {
        let mut out = Polynomial::zero(self.dim);
        for (alpha, c) in &self.terms {
            if alpha.total_degree() == m {
                out.terms.insert(alpha.clone(), c.clone());
            }
        }
        out
    }

    /// True when every term has the same total degree (the zero polynomial
    /// is homogeneous of every degree).
    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(MultiIndex::total_degree);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    /// Splits into the graded series of homogeneous slices.
    pub fn homogeneous_expansion(&self) -> GradedSeries {
        let truncation = self.degree().unwrap_or(0);
        let mut slices = vec![Polynomial::zero(self.dim); truncation as usize + 1];
        for (alpha, c) in &self.terms {
            slices[alpha.total_degree() as usize]
                .terms
                .insert(alpha.clone(), c.clone());
        }
        GradedSeries {
            dim: self.dim,
            slices,
        }
    }

    /// Floating-point evaluation at a complex point.
    pub fn eval_c64(&self, point: &[Complex64]) -> Complex64 {
        assert_eq!(point.len(), self.dim);
        let mut acc = Complex64::new(0.0, 0.0);
        for (alpha, c) in &self.terms {
            let mut term = c.to_c64();
            for (z, &e) in point.iter().zip(alpha.exponents()) {
                if e > 0 {
                    term *= z.powi(e as i32);
                }
            }
            acc += term;
        }
        acc
    }
}

impl fmt::Display for Polynomial {
    /// Canonical form: terms in descending graded-lex order; real
    /// coefficients print bare with `+`/`-` separators, complex ones as
    /// `(re ± im i)`; unit real coefficients are omitted before variables.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use num_traits::Signed;
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (alpha, c) in self.terms.iter().rev() {
            let mono = monomial_string(alpha);
            if c.is_real() {
                let neg = c.re.is_negative();
                let abs = if neg { -c.re.clone() } else { c.re.clone() };
                if first {
                    if neg {
                        write!(f, "-")?;
                    }
                } else if neg {
                    write!(f, " - ")?;
                } else {
                    write!(f, " + ")?;
                }
                match (&mono, abs.is_one()) {
                    (None, _) => write!(f, "{abs}")?,
                    (Some(m), true) => write!(f, "{m}")?,
                    (Some(m), false) => write!(f, "{abs}*{m}")?,
                }
            } else {
                if !first {
                    write!(f, " + ")?;
                }
                match &mono {
                    None => write!(f, "({c})")?,
                    Some(m) => write!(f, "({c})*{m}")?,
                }
            }
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn monomial_string(alpha: &MultiIndex) -> Option<String> {
    if alpha.total_degree() == 0 {
        return None;
    }
    let parts: Vec<String> = alpha
        .exponents()
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(i, &e)| {
            if e == 1 {
                format!("z{}", i + 1)
            } else {
                format!("z{}^{}", i + 1, e)
            }
        })
        .collect();
    Some(parts.join("*"))
}

/// Truncated graded series `f = Σ_{m ≤ M} f_m` with `f_m` homogeneous of
/// degree `m`. Slice `m` lives at index `m`; the vector length fixes the
/// truncation degree `M`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GradedSeries {
    dim: usize,
    slices: Vec<Polynomial>,
}

impl GradedSeries {
    /// All-zero series truncated at degree `truncation`.
    pub fn zero(dim: usize, truncation: u32) -> Self {
        Self {
            dim,
            slices: vec![Polynomial::zero(dim); truncation as usize + 1],
        }
    }

    /// Builds from explicit slices (index = degree). Every slice must be
    /// homogeneous of its index degree or zero.
    pub fn from_slices(dim: usize, slices: Vec<Polynomial>) -> Result<Self, PolyError> {
        for (m, s) in slices.iter().enumerate() {
            if s.dim() != dim {
                return Err(PolyError::DimensionMismatch {
                    left: dim,
                    right: s.dim(),
                });
            }
            if !s.is_zero() && (!s.is_homogeneous() || s.degree() != Some(m as u32)) {
                return Err(PolyError::NotHomogeneous);
            }
        }
        let mut series = Self { dim, slices };
        if series.slices.is_empty() {
            series.slices.push(Polynomial::zero(dim));
        }
        Ok(series)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Truncation degree `M`.
    pub fn truncation(&self) -> u32 {
        (self.slices.len() - 1) as u32
    }

    pub fn slice(&self, m: u32) -> &Polynomial {
        &self.slices[m as usize]
    }

    pub fn slices(&self) -> &[Polynomial] {
        &self.slices
    }

    pub fn set_slice(&mut self, m: u32, slice: Polynomial) {
        assert!(slice.is_zero() || (slice.is_homogeneous() && slice.degree() == Some(m)));
        assert_eq!(slice.dim(), self.dim);
        self.slices[m as usize] = slice;
    }

    pub fn is_zero(&self) -> bool {
        self.slices.iter().all(Polynomial::is_zero)
    }

    /// Collapses the series back into a polynomial.
    pub fn to_polynomial(&self) -> Polynomial {
        let mut out = Polynomial::zero(self.dim);
        for s in &self.slices {
            out = out.add(s).expect("same dim");
        }
        out
    }

    /// Truncates (or zero-pads) to degree `truncation`.
    pub fn truncated(&self, truncation: u32) -> GradedSeries {
        let mut slices = self.slices.clone();
        slices.resize(truncation as usize + 1, Polynomial::zero(self.dim));
        Self {
            dim: self.dim,
            slices,
        }
    }
}

/// Degree-`n` homogeneous slice of the product `P·φ`, computed as
/// `Σ_β P_β φ_{n−β}` over the homogeneous parts `P_β` of `P`. Agrees with
/// expanding the full product whenever `n ≤ truncation(φ)`, so no
/// truncation loss occurs at or below the truncation degree.
pub fn graded_product_slice(p: &Polynomial, phi: &GradedSeries, n: u32) -> Result<Polynomial, PolyError> {
    if p.dim() != phi.dim() {
        return Err(PolyError::DimensionMismatch {
            left: p.dim(),
            right: phi.dim(),
        });
    }
    let mut out = Polynomial::zero(p.dim());
    let p_deg = match p.degree() {
        None => return Ok(out),
        Some(d) => d,
    };
    for beta in 0..=p_deg.min(n) {
        let m = n - beta;
        if m > phi.truncation() {
            continue;
        }
        let pb = p.homogeneous_slice(beta);
        if pb.is_zero() {
            continue;
        }
        out = out.add(&pb.mul(phi.slice(m))?)?;
    }
    Ok(out)
}
