//! JSON document formats. Rationals travel as canonical strings
//! (`"p/q"` reduced with positive denominator, or `"p"` for integers), so
//! exactness survives the wire.

use fischer_core::poly::PolyError;
use fischer_core::{ComplexRational, GradedSeries, MultiIndex, Polynomial};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("invalid rational string {value:?}")]
    InvalidRational { value: String },
    #[error("term exponent vector has length {got}, document dimension is {expected}")]
    WrongAlphaLength { expected: usize, got: usize },
    #[error("document dimension must be positive")]
    ZeroDimension,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// One sparse term: exponent vector plus exact complex-rational coefficient.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct TermDocument {
    pub alpha: Vec<u32>,
    pub re: String,
    pub im: String,
}

/// Wire form of a polynomial; round-trips bit-exactly.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct PolynomialDocument {
    pub dim: usize,
    pub terms: Vec<TermDocument>,
}

impl PolynomialDocument {
    pub fn from_polynomial(p: &Polynomial) -> Self {
        Self {
            dim: p.dim(),
            terms: p
                .terms()
                .map(|(alpha, c)| TermDocument {
                    alpha: alpha.exponents().to_vec(),
                    re: c.re.to_string(),
                    im: c.im.to_string(),
                })
                .collect(),
        }
    }

    pub fn to_polynomial(&self) -> Result<Polynomial, DocumentError> {
        if self.dim == 0 {
            return Err(DocumentError::ZeroDimension);
        }
        let mut terms = Vec::with_capacity(self.terms.len());
        for term in &self.terms {
            if term.alpha.len() != self.dim {
                return Err(DocumentError::WrongAlphaLength {
                    expected: self.dim,
                    got: term.alpha.len(),
                });
            }
            let re = parse_rational_string(&term.re)?;
            let im = parse_rational_string(&term.im)?;
            terms.push((
                MultiIndex::new(term.alpha.clone()),
                ComplexRational::new(re, im),
            ));
        }
        Ok(Polynomial::from_terms(self.dim, terms))
    }
}

/// Parses a canonical (or any `p`, `-p`, `p/q`) rational string.
pub fn parse_rational_string(s: &str) -> Result<BigRational, DocumentError> {
    let bad = || DocumentError::InvalidRational {
        value: s.to_string(),
    };
    let trimmed = s.trim();
    let (numer_str, denom_str) = match trimmed.split_once('/') {
        Some((n, d)) => (n, d),
        None => (trimmed, "1"),
    };
    let numer: BigInt = numer_str.trim().parse().map_err(|_| bad())?;
    let denom: BigInt = denom_str.trim().parse().map_err(|_| bad())?;
    if denom.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(numer, denom))
}

/// Series files are arrays of polynomial documents indexed by degree.
pub fn series_to_documents(series: &GradedSeries) -> Vec<PolynomialDocument> {
    series
        .slices()
        .iter()
        .map(PolynomialDocument::from_polynomial)
        .collect()
}

pub fn series_from_documents(docs: &[PolynomialDocument]) -> Result<GradedSeries, DocumentError> {
    if docs.is_empty() {
        return Err(DocumentError::ZeroDimension);
    }
    let dim = docs[0].dim;
    let slices = docs
        .iter()
        .map(|d| d.to_polynomial())
        .collect::<Result<Vec<_>, _>>()?;
    Ok(GradedSeries::from_slices(dim, slices)?)
}
