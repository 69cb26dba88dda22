//! Certified rational enclosures for the handful of irrational quantities
//! the crate needs: square roots, π, e, and exp of small arguments.
//!
//! Every function returns exact rational bounds with a proven direction, so
//! an inequality checked against the appropriate endpoint is a genuine
//! certificate rather than a floating-point observation.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Closed rational interval `[lo, hi]` known to contain the target value.
pub type RatInterval = (BigRational, BigRational);

fn pow10(digits: u32) -> BigInt {
    BigInt::from(10u32).pow(digits)
}

/// Rational lower bound on `√x` with relative error below `10^(-digits)`.
/// Requires `x ≥ 0`.
pub fn sqrt_lower(x: &BigRational, digits: u32) -> BigRational {
    let (root, scale) = scaled_isqrt(x, digits);
    BigRational::new(root, scale)
}

/// Rational upper bound on `√x` with relative error below `10^(-digits)`.
pub fn sqrt_upper(x: &BigRational, digits: u32) -> BigRational {
    if x.is_zero() {
        return BigRational::zero();
    }
    let (root, scale) = scaled_isqrt(x, digits);
    BigRational::new(root + BigInt::one(), scale)
}

/// Both square-root bounds at once.
pub fn sqrt_interval(x: &RatInterval, digits: u32) -> RatInterval {
    (sqrt_lower(&x.0, digits), sqrt_upper(&x.1, digits))
}

/// `⌊√(p·q·10^{2s})⌋` together with the scale `q·10^s`, so that
/// `root/scale ≤ √(p/q) ≤ (root+1)/scale` exactly.
fn scaled_isqrt(x: &BigRational, digits: u32) -> (BigInt, BigInt) {
    assert!(!x.is_negative(), "sqrt of a negative rational");
    let s = pow10(digits);
    let scaled = x.numer() * x.denom() * (&s * &s);
    (scaled.sqrt(), x.denom() * s)
}

/// Exact bounds on π from Machin's formula
/// `π = 16·arctan(1/5) − 4·arctan(1/239)` with alternating-series brackets.
pub fn pi_interval(terms: usize) -> RatInterval {
    let a = arctan_inv_interval(5, terms);
    let b = arctan_inv_interval(239, terms);
    let sixteen = BigRational::from_integer(BigInt::from(16));
    let four = BigRational::from_integer(BigInt::from(4));
    (
        &sixteen * &a.0 - &four * &b.1,
        &sixteen * &a.1 - &four * &b.0,
    )
}

/// Alternating-series bounds on `arctan(1/x)` for integer `x ≥ 2`:
/// consecutive partial sums bracket the limit.
fn arctan_inv_interval(x: u32, terms: usize) -> RatInterval {
    let x = BigInt::from(x);
    let x_sq = &x * &x;
    let mut sum = BigRational::zero();
    let mut power = x.clone(); // x^(2k+1)
    let mut prev = BigRational::zero();
    for k in 0..terms {
        prev = sum.clone();
        let term = BigRational::new(BigInt::one(), &power * BigInt::from(2 * k as u64 + 1));
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        power *= &x_sq;
    }
    if terms.is_multiple_of(2) {
        (prev, sum)
    } else {
        (sum, prev)
    }
}

/// Exact bounds on `e` from the factorial series with its standard tail
/// bound `0 < e − Σ_{n≤N} 1/n! < 2/(N+1)!`.
pub fn e_interval(terms: u32) -> RatInterval {
    let mut sum = BigRational::zero();
    let mut fact = BigInt::one();
    for n in 0..=terms {
        if n > 0 {
            fact *= BigInt::from(n);
        }
        sum += BigRational::new(BigInt::one(), fact.clone());
    }
    let tail = BigRational::new(BigInt::from(2), &fact * BigInt::from(terms + 1));
    (sum.clone(), sum + tail)
}

/// Exact bounds on `exp(x)` for `0 ≤ x ≤ 1/2`, via the Taylor series with
/// tail bound `Σ_{n≥N} x^n/n! ≤ 2·x^N/N!`.
pub fn exp_interval(x: &BigRational, terms: u32) -> RatInterval {
    assert!(
        !x.is_negative() && x <= &BigRational::new(BigInt::one(), BigInt::from(2)),
        "exp_interval requires 0 <= x <= 1/2"
    );
    let mut sum = BigRational::one();
    let mut term = BigRational::one();
    for n in 1..terms {
        term = term * x / BigRational::from_integer(BigInt::from(n));
        sum += term.clone();
    }
    let tail_term = term * x / BigRational::from_integer(BigInt::from(terms));
    let tail = tail_term * BigRational::from_integer(BigInt::from(2));
    (sum.clone(), sum + tail)
}

/// Interval product for intervals with nonnegative lower endpoints.
pub fn mul_nonneg(a: &RatInterval, b: &RatInterval) -> RatInterval {
    debug_assert!(!a.0.is_negative() && !b.0.is_negative());
    (&a.0 * &b.0, &a.1 * &b.1)
}

/// Interval power for intervals with nonnegative lower endpoints.
pub fn pow_nonneg(a: &RatInterval, n: u32) -> RatInterval {
    debug_assert!(!a.0.is_negative());
    let mut out = (BigRational::one(), BigRational::one());
    for _ in 0..n {
        out = mul_nonneg(&out, a);
    }
    out
}

/// Interval reciprocal; requires a strictly positive interval.
pub fn recip_pos(a: &RatInterval) -> RatInterval {
    assert!(a.0.is_positive(), "recip_pos requires a positive interval");
    (a.1.recip(), a.0.recip())
}
