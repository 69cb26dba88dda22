//! Order-of-growth estimation for truncated series, from the decay of
//! per-degree sup norms on the unit sphere, plus evaluators for the
//! explicit growth bounds (slice-norm envelope, Stirling sandwich).
//!
//! Sup norms are estimated by seeded sphere sampling with gradient-ascent
//! refinement, so they are deterministic lower bounds of the true maxima.
//! That is enough for order estimation: the estimate feeds an asymptotic
//! slope where constant factors wash out.

use crate::apolar::apolar_norm_sq;
use crate::certified::{
    self, e_interval, exp_interval, mul_nonneg, pi_interval, pow_nonneg, recip_pos, RatInterval,
};
use crate::poly::{GradedSeries, Polynomial};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GrowthError {
    #[error("truncation degree {truncation} is too small; need at least 10")]
    TruncationTooSmall { truncation: u32 },
    #[error("too few nonzero slices to estimate an order")]
    TooFewNonzeroSlices,
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
}

/// Controls for the sphere-sampling sup-norm estimator.
#[derive(Clone, Debug)]
pub struct SupNormOptions {
    pub samples: usize,
    pub ascent_steps: usize,
    /// How many of the best samples get ascent refinement.
    pub ascent_starts: usize,
    pub seed: u64,
}

impl Default for SupNormOptions {
    fn default() -> Self {
        Self {
            samples: 4096,
            ascent_steps: 50,
            ascent_starts: 8,
            seed: 0,
        }
    }
}

/// Lower-bound estimate of `max_{|θ|=1} |f(θ)|` over the unit sphere of
/// `ℂ^d ≅ ℝ^{2d}`, for homogeneous `f`. Deterministic given the seed.
pub fn sup_norm_estimate(f: &Polynomial, opts: &SupNormOptions) -> f64 {
    assert!(f.is_homogeneous(), "sup-norm estimator expects a homogeneous slice");
    if f.is_zero() {
        return 0.0;
    }
    let d = f.dim();
    let grads: Vec<Polynomial> = (0..d)
        .map(|i| Polynomial::apply_operator(&Polynomial::variable(d, i), f).expect("same dim"))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let mut best: Vec<(f64, Vec<Complex64>)> = Vec::with_capacity(opts.ascent_starts + 1);
    for _ in 0..opts.samples {
        let point = random_sphere_point(&mut rng, d);
        let value = f.eval_c64(&point).norm();
        if best.len() < opts.ascent_starts {
            best.push((value, point));
            best.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
        } else if value > best.last().unwrap().0 {
            best.pop();
            best.push((value, point));
            best.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
        }
    }

    let mut overall = best.first().map(|(v, _)| *v).unwrap_or(0.0);
    for (_, start) in best {
        let refined = ascend(f, &grads, start, opts.ascent_steps);
        if refined > overall {
            overall = refined;
        }
    }
    overall
}

fn random_sphere_point(rng: &mut ChaCha8Rng, d: usize) -> Vec<Complex64> {
    // Normalized standard Gaussians via Box-Muller.
    let mut coords = Vec::with_capacity(2 * d);
    while coords.len() < 2 * d {
        let u1: f64 = rng.random::<f64>().max(1e-300);
        let u2: f64 = rng.random();
        let r = (-2.0 * u1.ln()).sqrt();
        coords.push(r * (2.0 * std::f64::consts::PI * u2).cos());
        coords.push(r * (2.0 * std::f64::consts::PI * u2).sin());
    }
    coords.truncate(2 * d);
    let norm = coords.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
    (0..d)
        .map(|i| Complex64::new(coords[2 * i] / norm, coords[2 * i + 1] / norm))
        .collect()
}

/// Projected gradient ascent on `|f|²` over the sphere, with backtracking.
fn ascend(f: &Polynomial, grads: &[Polynomial], mut point: Vec<Complex64>, steps: usize) -> f64 {
    let mut value_sq = f.eval_c64(&point).norm_sqr();
    let mut step = 0.1;
    for _ in 0..steps {
        let fv = f.eval_c64(&point);
        let mut direction = Vec::with_capacity(point.len());
        for g in grads {
            let gi = fv.conj() * g.eval_c64(&point);
            // ∂|f|²/∂x = 2 Re gᵢ, ∂|f|²/∂y = −2 Im gᵢ.
            direction.push(Complex64::new(2.0 * gi.re, -2.0 * gi.im));
        }
        let candidate = normalize(
            point
                .iter()
                .zip(&direction)
                .map(|(z, dz)| z + step * dz)
                .collect(),
        );
        let candidate_sq = f.eval_c64(&candidate).norm_sqr();
        if candidate_sq > value_sq {
            point = candidate;
            value_sq = candidate_sq;
            step *= 1.2;
        } else {
            step *= 0.5;
        }
    }
    value_sq.sqrt()
}

fn normalize(point: Vec<Complex64>) -> Vec<Complex64> {
    let norm = point.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().max(1e-300);
    point.into_iter().map(|z| z / norm).collect()
}

/// Order estimate from per-degree sup norms (`sup_norms[m]` is degree `m`;
/// the slice length fixes the truncation `M`).
///
/// Fits `−log norm_m ≈ (1/ρ)·m·log m + b·m + c` by least squares over the
/// tail window `m ∈ [M/2, M]` and returns `ρ`. The two lower-order terms
/// absorb the non-dominant parts of the coefficient decay (and make the
/// estimate exactly scale-invariant), which the bare ratio
/// `m·log m / (−log norm_m)` would conflate into the answer at any finite
/// truncation. Conventions: an all-zero tail is order `0` (polynomials);
/// zero slices inside the window are skipped; a tail norm `≥ 1` yields the
/// `+∞` sentinel.
pub fn order_estimate(sup_norms: &[f64]) -> Result<f64, GrowthError> {
    if sup_norms.is_empty() {
        return Err(GrowthError::TruncationTooSmall { truncation: 0 });
    }
    let m_max = sup_norms.len() - 1;
    if m_max < 10 {
        return Err(GrowthError::TruncationTooSmall {
            truncation: m_max as u32,
        });
    }
    let lo = m_max / 2;
    let window: Vec<(usize, f64)> = (lo..=m_max)
        .filter(|&m| sup_norms[m] > 0.0)
        .map(|m| (m, sup_norms[m]))
        .collect();
    if window.is_empty() {
        return Ok(0.0);
    }
    if window.iter().any(|&(_, v)| v >= 1.0) {
        return Ok(f64::INFINITY);
    }
    if sup_norms.iter().filter(|&&v| v > 0.0).count() < 3 || window.len() < 3 {
        return Err(GrowthError::TooFewNonzeroSlices);
    }

    // Least squares for y = a·(m ln m) + b·m + c with y = −ln norm_m.
    let mut ata = [[0.0f64; 3]; 3];
    let mut atb = [0.0f64; 3];
    for &(m, v) in &window {
        let mf = m as f64;
        let row = [mf * mf.ln(), mf, 1.0];
        let y = -v.ln();
        for i in 0..3 {
            for j in 0..3 {
                ata[i][j] += row[i] * row[j];
            }
            atb[i] += row[i] * y;
        }
    }
    let a = solve3(&ata, &atb).ok_or(GrowthError::TooFewNonzeroSlices)?[0];
    if a <= 1e-12 {
        return Ok(f64::INFINITY);
    }
    Ok(1.0 / a)
}

fn solve3(a: &[[f64; 3]; 3], b: &[f64; 3]) -> Option<[f64; 3]> {
    let det = |m: &[[f64; 3]; 3]| -> f64 {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(a);
    if d.abs() < 1e-12 {
        return None;
    }
    let mut out = [0.0f64; 3];
    for col in 0..3 {
        let mut m = *a;
        for row in 0..3 {
            m[row][col] = b[row];
        }
        out[col] = det(&m) / d;
    }
    Some(out)
}

/// The slice-norm envelope `2√π·C_d·e^{−m/2}·(m+d−1)^{d/2}·m^{m(1/2 − 1/(ρ+ε))}`
/// satisfied by every entire function of order `≤ ρ`. Evaluated in
/// log-space.
pub fn slice_norm_envelope(m: u32, d: usize, rho_plus_eps: f64, c_d: f64) -> Result<f64, GrowthError> {
    if m < 1 {
        return Err(GrowthError::InvalidParameters("need m >= 1".into()));
    }
    if rho_plus_eps.is_nan() || rho_plus_eps <= 0.0 || c_d.is_nan() || c_d <= 0.0 {
        return Err(GrowthError::InvalidParameters(
            "need rho_plus_eps > 0 and c_d > 0".into(),
        ));
    }
    let mf = m as f64;
    let log = (2.0f64).ln() + 0.5 * std::f64::consts::PI.ln() + c_d.ln() - mf / 2.0
        + (d as f64 / 2.0) * (mf + d as f64 - 1.0).ln()
        + mf * (0.5 - 1.0 / rho_plus_eps) * mf.ln();
    Ok(log.exp())
}

/// Stirling lower bound `(2πm)^{1/2}·(m/e)^m·e^{1/(12m+1)} ≤ m!`.
pub fn stirling_lower(m: u32) -> Result<f64, GrowthError> {
    if m < 1 {
        return Err(GrowthError::InvalidParameters("need m >= 1".into()));
    }
    let mf = m as f64;
    let log = 0.5 * (2.0 * std::f64::consts::PI * mf).ln() + mf * (mf.ln() - 1.0)
        + 1.0 / (12.0 * mf + 1.0);
    Ok(log.exp())
}

/// Companion upper bound `m! ≤ 2·√(πm)·(m/e)^m` (from `e^{1/(12m)} < √2`).
pub fn stirling_upper(m: u32) -> Result<f64, GrowthError> {
    if m < 1 {
        return Err(GrowthError::InvalidParameters("need m >= 1".into()));
    }
    let mf = m as f64;
    let log = (2.0f64).ln() + 0.5 * (std::f64::consts::PI * mf).ln() + mf * (mf.ln() - 1.0);
    Ok(log.exp())
}

const CERT_DIGITS: u32 = 45;

/// Certified rational enclosure of the Stirling lower-bound formula,
/// accurate to well beyond 30 significant digits.
pub fn stirling_lower_interval(m: u32) -> Result<RatInterval, GrowthError> {
    if m < 1 {
        return Err(GrowthError::InvalidParameters("need m >= 1".into()));
    }
    let pi = pi_interval(CERT_DIGITS as usize);
    let two_pi_m = (
        &pi.0 * BigRational::from_integer(BigInt::from(2 * m)),
        &pi.1 * BigRational::from_integer(BigInt::from(2 * m)),
    );
    let root = certified::sqrt_interval(&two_pi_m, CERT_DIGITS);
    let m_pow = point_interval(BigRational::from_integer(BigInt::from(m)).pow(m as i32));
    let inv_e = recip_pos(&e_interval(CERT_DIGITS));
    let e_term = pow_nonneg(&inv_e, m);
    let corr = exp_interval(
        &BigRational::new(BigInt::one(), BigInt::from(12 * m + 1)),
        40,
    );
    Ok(mul_nonneg(
        &mul_nonneg(&root, &m_pow),
        &mul_nonneg(&e_term, &corr),
    ))
}

/// Certified rational enclosure of the Stirling upper-bound formula.
pub fn stirling_upper_interval(m: u32) -> Result<RatInterval, GrowthError> {
    if m < 1 {
        return Err(GrowthError::InvalidParameters("need m >= 1".into()));
    }
    let pi = pi_interval(CERT_DIGITS as usize);
    let pi_m = (
        &pi.0 * BigRational::from_integer(BigInt::from(m)),
        &pi.1 * BigRational::from_integer(BigInt::from(m)),
    );
    let root = certified::sqrt_interval(&pi_m, CERT_DIGITS);
    let m_pow = point_interval(BigRational::from_integer(BigInt::from(m)).pow(m as i32));
    let inv_e = recip_pos(&e_interval(CERT_DIGITS));
    let e_term = pow_nonneg(&inv_e, m);
    let two = point_interval(BigRational::from_integer(BigInt::from(2)));
    Ok(mul_nonneg(
        &mul_nonneg(&two, &root),
        &mul_nonneg(&m_pow, &e_term),
    ))
}

fn point_interval(x: BigRational) -> RatInterval {
    (x.clone(), x)
}

/// Growth data of one truncated series.
#[derive(Clone, Debug, Serialize)]
pub struct GrowthReport {
    pub truncation: u32,
    pub degrees: Vec<u32>,
    /// Sampling-based lower bounds of the per-degree sphere sup norms.
    pub sup_norms: Vec<f64>,
    pub apolar_norms: Vec<f64>,
    pub order_estimate: f64,
    pub method: Vec<String>,
}

impl GrowthReport {
    /// CSV table with columns `m, sup_norm, apolar_norm`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,sup_norm,apolar_norm\n");
        for i in 0..self.degrees.len() {
            out.push_str(&format!(
                "{},{:.12e},{:.12e}\n",
                self.degrees[i], self.sup_norms[i], self.apolar_norms[i]
            ));
        }
        out
    }
}

/// Full growth report for a truncated graded series.
pub fn growth_report(series: &GradedSeries, opts: &SupNormOptions) -> Result<GrowthReport, GrowthError> {
    let truncation = series.truncation();
    let mut degrees = Vec::new();
    let mut sup_norms = Vec::new();
    let mut apolar_norms = Vec::new();
    for m in 0..=truncation {
        let slice = series.slice(m);
        let per_degree = SupNormOptions {
            seed: opts.seed.wrapping_add(m as u64),
            ..opts.clone()
        };
        degrees.push(m);
        sup_norms.push(sup_norm_estimate(slice, &per_degree));
        apolar_norms.push(apolar_norm_sq(slice).to_f64().unwrap_or(f64::NAN).sqrt());
    }
    let order = order_estimate(&sup_norms)?;
    Ok(GrowthReport {
        truncation,
        degrees,
        sup_norms,
        apolar_norms,
        order_estimate: order,
        method: vec![
            format!(
                "sup norms: {} sphere samples + {}-step ascent from {} starts (seed {}); lower bounds",
                opts.samples, opts.ascent_steps, opts.ascent_starts, opts.seed
            ),
            String::from("order: tail-window [M/2, M] log-space fit of -log sup_norm"),
        ],
    })
}
