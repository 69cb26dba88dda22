//! Checker and regime classifier for the sequence lemma that powers the
//! uniqueness argument: a nonnegative sequence satisfying a gap recursion
//!
//!   (i)  `a_m ≤ A·(m+D)^α·max_{j∈E} a_{m+j}`
//!
//! together with a super-geometric decay envelope
//!
//!   (ii) `a_m ≤ A₀·(m+D₀)^{α₀}·b₀^{−m}·m^{−m/σ}`
//!
//! vanishes identically whenever the exponent `α` sits in one of the
//! applying regimes determined by `β∗ = min E` and `β* = max E`. The lemma
//! itself is an asymptotic statement; this module verifies its hypotheses
//! on finite data, classifies regimes, and numerically confirms the
//! decisive limit `p_{m,j}^{α/k_j}·k_j^{−1/σ} → 0` on worst-case gap
//! chains.
//!
//! All comparisons run in log-space with a small tolerance so that
//! equality-saturating examples are not rejected by rounding.

use serde::Serialize;
use std::collections::BTreeSet;
use thiserror::Error;

/// Slack for log-space inequality checks.
const LOG_TOL: f64 = 1e-12;

/// The tail slope below which a probe trace counts as decreasing.
const SLOPE_THRESHOLD: f64 = -1e-3;

#[derive(Debug, Error, PartialEq)]
pub enum LemmaError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("sequence entries must be nonnegative (entry {index} is {value})")]
    NegativeEntry { index: usize, value: f64 },
    #[error("sequence too short: need at least {needed} entries, got {got}")]
    SequenceTooShort { needed: usize, got: usize },
    #[error("conclusion does not apply: {0}")]
    NotApplicable(String),
}

/// Constants of the two hypotheses.
#[derive(Clone, Debug, Serialize)]
pub struct LemmaConfig {
    /// Gap set `E`: finite, nonempty, positive integers.
    pub gap_set: BTreeSet<u32>,
    /// `A ≥ 1` in hypothesis (i).
    pub recursion_const: f64,
    /// `D ≥ 0` in hypothesis (i).
    pub recursion_shift: f64,
    /// `α` in hypothesis (i).
    pub recursion_exponent: f64,
    /// `A₀ > 0` in hypothesis (ii).
    pub envelope_const: f64,
    /// `b₀ > 0` in hypothesis (ii).
    pub envelope_base: f64,
    /// `D₀ ≥ 0` in hypothesis (ii).
    pub envelope_shift: f64,
    /// `α₀ ≥ 0` in hypothesis (ii).
    pub envelope_exponent: f64,
    /// `σ ≠ 0` in hypothesis (ii).
    pub envelope_rate: f64,
}

impl LemmaConfig {
    pub fn validate(&self) -> Result<(), LemmaError> {
        if self.gap_set.is_empty() {
            return Err(LemmaError::InvalidConfig("gap set E must be nonempty".into()));
        }
        if self.gap_set.contains(&0) {
            return Err(LemmaError::InvalidConfig("gap set E excludes 0".into()));
        }
        // NaNs fail every constraint below.
        if self.recursion_const.is_nan() || self.recursion_const < 1.0 {
            return Err(LemmaError::InvalidConfig(format!(
                "need A >= 1, got {}",
                self.recursion_const
            )));
        }
        if self.recursion_shift.is_nan() || self.recursion_shift < 0.0 {
            return Err(LemmaError::InvalidConfig("need D >= 0".into()));
        }
        if self.envelope_const.is_nan()
            || self.envelope_const <= 0.0
            || self.envelope_base.is_nan()
            || self.envelope_base <= 0.0
        {
            return Err(LemmaError::InvalidConfig("need A0 > 0 and b0 > 0".into()));
        }
        if self.envelope_shift.is_nan()
            || self.envelope_shift < 0.0
            || self.envelope_exponent.is_nan()
            || self.envelope_exponent < 0.0
        {
            return Err(LemmaError::InvalidConfig("need D0 >= 0 and alpha0 >= 0".into()));
        }
        if self.envelope_rate == 0.0 || !self.envelope_rate.is_finite() {
            return Err(LemmaError::InvalidConfig("need sigma != 0".into()));
        }
        Ok(())
    }

    /// `β∗ = min E`.
    pub fn gap_min(&self) -> u32 {
        *self.gap_set.iter().next().expect("nonempty")
    }

    /// `β* = max E`.
    pub fn gap_max(&self) -> u32 {
        *self.gap_set.iter().next_back().expect("nonempty")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Regime {
    /// `0 ≤ α < β∗/σ`.
    NonnegativeStrict,
    /// `α = β∗/σ > 0` with the extra hypothesis `A < b₀^{β∗}`.
    Boundary,
    /// `α < 0` and `α < β*/σ`.
    Negative,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct RegimeVerdict {
    pub regime: Regime,
    pub conclusion_applies: bool,
    pub reason: String,
}

/// Decides which (if any) of the lemma's parameter regimes the
/// configuration falls into.
pub fn classify_regime(cfg: &LemmaConfig) -> Result<RegimeVerdict, LemmaError> {
    cfg.validate()?;
    let alpha = cfg.recursion_exponent;
    let sigma = cfg.envelope_rate;
    let ratio_min = cfg.gap_min() as f64 / sigma;
    let ratio_max = cfg.gap_max() as f64 / sigma;

    if alpha >= 0.0 && alpha < ratio_min {
        return Ok(RegimeVerdict {
            regime: Regime::NonnegativeStrict,
            conclusion_applies: true,
            reason: format!("0 <= alpha = {alpha} < beta_min/sigma = {ratio_min}"),
        });
    }
    if alpha < 0.0 && alpha < ratio_max {
        return Ok(RegimeVerdict {
            regime: Regime::Negative,
            conclusion_applies: true,
            reason: format!("alpha = {alpha} < 0 and alpha < beta_max/sigma = {ratio_max}"),
        });
    }
    if alpha > 0.0 && (alpha - ratio_min).abs() <= LOG_TOL * alpha.abs().max(1.0) {
        let threshold = cfg.envelope_base.powi(cfg.gap_min() as i32);
        if cfg.recursion_const < threshold {
            return Ok(RegimeVerdict {
                regime: Regime::Boundary,
                conclusion_applies: true,
                reason: format!(
                    "alpha = beta_min/sigma = {alpha} with A = {} < b0^beta_min = {threshold}",
                    cfg.recursion_const
                ),
            });
        }
        return Ok(RegimeVerdict {
            regime: Regime::Inconclusive,
            conclusion_applies: false,
            reason: format!(
                "boundary case alpha = beta_min/sigma but A = {} >= b0^beta_min = {threshold}",
                cfg.recursion_const
            ),
        });
    }
    Ok(RegimeVerdict {
        regime: Regime::Inconclusive,
        conclusion_applies: false,
        reason: format!(
            "alpha = {alpha} outside both regimes (beta_min/sigma = {ratio_min}, beta_max/sigma = {ratio_max})"
        ),
    })
}

/// Per-index outcome of a hypothesis check.
#[derive(Clone, Debug, Serialize)]
pub struct HypothesisEntry {
    pub m: usize,
    pub log_lhs: f64,
    pub log_rhs: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct HypothesisReport {
    pub entries: Vec<HypothesisEntry>,
    pub all_pass: bool,
    /// Smallest constant that would make every checked inequality hold on
    /// this data (`A` for hypothesis (i), `A₀` for hypothesis (ii)).
    pub tightest_const: f64,
}

/// Checks hypothesis (i) for `m = 0..=m_max`. The sequence must reach
/// `m_max + max E`.
pub fn check_hypothesis_i(
    a: &[f64],
    cfg: &LemmaConfig,
    m_max: usize,
) -> Result<HypothesisReport, LemmaError> {
    cfg.validate()?;
    check_nonnegative(a)?;
    let needed = m_max + cfg.gap_max() as usize + 1;
    if a.len() < needed {
        return Err(LemmaError::SequenceTooShort {
            needed,
            got: a.len(),
        });
    }
    let mut entries = Vec::with_capacity(m_max + 1);
    let mut tightest = 0.0f64;
    for m in 0..=m_max {
        let max_next = cfg
            .gap_set
            .iter()
            .map(|&j| a[m + j as usize])
            .fold(0.0f64, f64::max);
        // (m+D)^α evaluated before taking logs, so that 0^0 = 1 rather
        // than the NaN of 0·ln 0.
        let power = (m as f64 + cfg.recursion_shift).powf(cfg.recursion_exponent);
        let log_lhs = a[m].ln();
        let log_rhs = cfg.recursion_const.ln() + power.ln() + max_next.ln();
        let pass = a[m] == 0.0 || log_lhs <= log_rhs + LOG_TOL;
        // Tightest feasible A at this m: a_m / ((m+D)^α max_j a_{m+j}).
        if a[m] > 0.0 {
            let needed_log = log_lhs - power.ln() - max_next.ln();
            tightest = tightest.max(needed_log.exp());
        }
        entries.push(HypothesisEntry {
            m,
            log_lhs,
            log_rhs,
            pass,
        });
    }
    Ok(HypothesisReport {
        all_pass: entries.iter().all(|e| e.pass),
        entries,
        tightest_const: tightest,
    })
}

/// Checks hypothesis (ii) for `m = 1..=m_max`.
#[allow(clippy::needless_range_loop)]
pub fn check_hypothesis_ii(
    a: &[f64],
    cfg: &LemmaConfig,
    m_max: usize,
) -> Result<HypothesisReport, LemmaError> {
    cfg.validate()?;
    check_nonnegative(a)?;
    if a.len() < m_max + 1 {
        return Err(LemmaError::SequenceTooShort {
            needed: m_max + 1,
            got: a.len(),
        });
    }
    let mut entries = Vec::with_capacity(m_max);
    let mut tightest = 0.0f64;
    for m in 1..=m_max {
        let mf = m as f64;
        let log_lhs = a[m].ln();
        let log_envelope = cfg.envelope_exponent * (mf + cfg.envelope_shift).ln()
            - mf * cfg.envelope_base.ln()
            - (mf / cfg.envelope_rate) * mf.ln();
        let log_rhs = cfg.envelope_const.ln() + log_envelope;
        let pass = a[m] == 0.0 || log_lhs <= log_rhs + LOG_TOL;
        if a[m] > 0.0 {
            tightest = tightest.max((log_lhs - log_envelope).exp());
        }
        entries.push(HypothesisEntry {
            m,
            log_lhs,
            log_rhs,
            pass,
        });
    }
    Ok(HypothesisReport {
        all_pass: entries.iter().all(|e| e.pass),
        entries,
        tightest_const: tightest,
    })
}

fn check_nonnegative(a: &[f64]) -> Result<(), LemmaError> {
    for (index, &value) in a.iter().enumerate() {
        if value < 0.0 || !value.is_finite() {
            return Err(LemmaError::NegativeEntry { index, value });
        }
    }
    Ok(())
}

/// Trace of `p_{m,j}^{α/k_j}·k_j^{−1/σ}` along one constant gap chain.
#[derive(Clone, Debug, Serialize)]
pub struct ChainTrace {
    /// The constant gap used for every step of the chain.
    pub gap: u32,
    /// `log` of the probed quantity, indexed by `j − 1`.
    pub log_values: Vec<f64>,
    /// Least-squares slope of the log-values against `log k_j` over the
    /// second half of the trace.
    pub tail_slope: f64,
    pub decreasing: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeReport {
    pub min_gap_chain: ChainTrace,
    pub max_gap_chain: ChainTrace,
    /// Both worst-case chains trend to zero.
    pub decreasing: bool,
}

/// Numerically follows the decisive limit of the lemma's proof along the
/// two worst-case chains (all gaps `β∗`, all gaps `β*`). In the strict
/// regimes the log-values trend to `−∞`; in the boundary regime the probed
/// quantity tends to a positive constant instead, and the proof leans on
/// the extra hypothesis rather than this limit.
pub fn limit_probe(cfg: &LemmaConfig, m: u32, j_max: u32) -> Result<ProbeReport, LemmaError> {
    let verdict = classify_regime(cfg)?;
    if !verdict.conclusion_applies {
        return Err(LemmaError::NotApplicable(verdict.reason));
    }
    if m < 1 || j_max < 4 {
        return Err(LemmaError::InvalidConfig(
            "need m >= 1 and j_max >= 4 for a probe".into(),
        ));
    }
    let min_chain = probe_chain(cfg, m, j_max, cfg.gap_min());
    let max_chain = probe_chain(cfg, m, j_max, cfg.gap_max());
    let decreasing = min_chain.decreasing && max_chain.decreasing;
    Ok(ProbeReport {
        min_gap_chain: min_chain,
        max_gap_chain: max_chain,
        decreasing,
    })
}

fn probe_chain(cfg: &LemmaConfig, m: u32, j_max: u32, gap: u32) -> ChainTrace {
    let alpha = cfg.recursion_exponent;
    let sigma = cfg.envelope_rate;
    let d = cfg.recursion_shift;
    let mut log_p = 0.0f64;
    let mut log_values = Vec::with_capacity(j_max as usize);
    let mut abscissas = Vec::with_capacity(j_max as usize);
    for j in 1..=j_max {
        // p gains the factor (m + D + (j−1)·gap) at step j.
        log_p += (m as f64 + d + ((j - 1) * gap) as f64).ln();
        let k_j = (m + j * gap) as f64;
        log_values.push((alpha / k_j) * log_p - k_j.ln() / sigma);
        abscissas.push(k_j.ln());
    }
    let half = log_values.len() / 2;
    let tail_slope = least_squares_slope(&abscissas[half..], &log_values[half..]);
    ChainTrace {
        gap,
        log_values,
        tail_slope,
        decreasing: tail_slope < SLOPE_THRESHOLD,
    }
}

fn least_squares_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let sx: f64 = x.iter().sum();
    let sy: f64 = y.iter().sum();
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let det = n * sxx - sx * sx;
    if det.abs() < 1e-30 {
        return 0.0;
    }
    (n * sxy - sx * sy) / det
}

/// Finite-data consistency verdict against the lemma's conclusion
/// `a_m = 0 for all m`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum ConsistencyVerdict {
    Consistent,
    /// Hypotheses pass on the window and a regime applies, yet some entry
    /// is strictly positive. On finite data this is an alert, not a
    /// disproof: the hypotheses were only checked on a window.
    Alert { first_positive: usize },
    NotApplicable { reason: String },
}

pub fn conclusion_consistency(
    a: &[f64],
    cfg: &LemmaConfig,
    m_max: usize,
) -> Result<ConsistencyVerdict, LemmaError> {
    let verdict = classify_regime(cfg)?;
    if !verdict.conclusion_applies {
        return Ok(ConsistencyVerdict::NotApplicable {
            reason: verdict.reason,
        });
    }
    let hyp_i = check_hypothesis_i(a, cfg, m_max)?;
    let hyp_ii = check_hypothesis_ii(a, cfg, m_max)?;
    if !hyp_i.all_pass {
        return Ok(ConsistencyVerdict::NotApplicable {
            reason: "hypothesis (i) fails on the window".into(),
        });
    }
    if !hyp_ii.all_pass {
        return Ok(ConsistencyVerdict::NotApplicable {
            reason: "hypothesis (ii) fails on the window".into(),
        });
    }
    match a.iter().take(m_max + 1).position(|&v| v > 0.0) {
        Some(first_positive) => Ok(ConsistencyVerdict::Alert { first_positive }),
        None => Ok(ConsistencyVerdict::Consistent),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_config() -> LemmaConfig {
        LemmaConfig {
            gap_set: BTreeSet::from([1]),
            recursion_const: 2.0,
            recursion_shift: 0.0,
            recursion_exponent: 0.0,
            envelope_const: 1.0,
            envelope_base: 1.0,
            envelope_shift: 0.0,
            envelope_exponent: 0.0,
            envelope_rate: 2.0,
        }
    }

    #[test]
    fn geometric_sequence_satisfies_hypothesis_i() {
        // a_m = 2^{−m} with E = {1}, A = 2, α = 0: equality throughout.
        let cfg = base_config();
        let a: Vec<f64> = (0..40).map(|m| 0.5f64.powi(m)).collect();
        let report = check_hypothesis_i(&a, &cfg, 30).unwrap();
        assert!(report.all_pass);
        assert!((report.tightest_const - 2.0).abs() < 1e-9);
    }

    #[test]
    fn constant_sequence_saturates_with_a_one() {
        let mut cfg = base_config();
        cfg.recursion_const = 1.0;
        let a = vec![1.0f64; 40];
        let report = check_hypothesis_i(&a, &cfg, 30).unwrap();
        assert!(report.all_pass);
        assert!((report.tightest_const - 1.0).abs() < 1e-12);
    }

    #[test]
    fn factorial_growth_passes_with_tightest_one() {
        // a_m = m!: a_m ≤ a_{m+1} holds, so A = 1 suffices; the report's
        // tightest constant documents that.
        let mut cfg = base_config();
        cfg.recursion_const = 1.0;
        let mut a = vec![1.0f64];
        for m in 1..40usize {
            let prev = a[m - 1];
            a.push(prev * m as f64);
        }
        let report = check_hypothesis_i(&a, &cfg, 30).unwrap();
        assert!(report.all_pass);
        assert!(report.tightest_const <= 1.0 + 1e-12);
    }

    #[test]
    fn hypothesis_i_fails_when_sequence_spikes() {
        let cfg = base_config();
        let mut a = vec![0.0f64; 40];
        a[5] = 1.0; // followed by zeros: no A can work at m = 5
        let report = check_hypothesis_i(&a, &cfg, 30).unwrap();
        assert!(!report.all_pass);
        assert!(!report.entries[5].pass);
        assert!(report.tightest_const.is_infinite());
    }

    #[test]
    fn saturating_envelope_passes_hypothesis_ii() {
        // a_m = b₀^{−m}·m^{−m/σ} with A₀ = 1: equality.
        let mut cfg = base_config();
        cfg.envelope_base = 1.5;
        let a: Vec<f64> = (0..40)
            .map(|m| {
                if m == 0 {
                    1.0
                } else {
                    let mf = m as f64;
                    cfg.envelope_base.powf(-mf) * mf.powf(-mf / cfg.envelope_rate)
                }
            })
            .collect();
        let report = check_hypothesis_ii(&a, &cfg, 39).unwrap();
        assert!(report.all_pass);
        assert!((report.tightest_const - 1.0).abs() < 1e-9);
    }

    #[test]
    fn zero_sequence_passes_everything() {
        let cfg = base_config();
        let a = vec![0.0f64; 40];
        assert!(check_hypothesis_i(&a, &cfg, 30).unwrap().all_pass);
        assert!(check_hypothesis_ii(&a, &cfg, 30).unwrap().all_pass);
    }

    #[test]
    fn constant_sequence_fails_hypothesis_ii() {
        let cfg = base_config(); // σ = 2 > 0: envelope → 0
        let a = vec![1.0f64; 60];
        let report = check_hypothesis_ii(&a, &cfg, 59).unwrap();
        assert!(!report.all_pass);
        assert!(!report.entries.last().unwrap().pass);
    }

    #[test]
    fn rejects_negative_entries() {
        let cfg = base_config();
        let a = vec![1.0, -0.5, 1.0];
        assert!(matches!(
            check_hypothesis_i(&a, &cfg, 1),
            Err(LemmaError::NegativeEntry { index: 1, .. })
        ));
    }

    #[test]
    fn classify_negative_regime() {
        let mut cfg = base_config();
        cfg.gap_set = BTreeSet::from([1, 3]);
        cfg.recursion_exponent = -1.0;
        cfg.envelope_rate = 2.0;
        let v = classify_regime(&cfg).unwrap();
        assert_eq!(v.regime, Regime::Negative);
        assert!(v.conclusion_applies);
    }

    #[test]
    fn classify_inconclusive() {
        let mut cfg = base_config();
        cfg.recursion_exponent = 1.0; // β∗/σ = 0.5 ≤ 1
        let v = classify_regime(&cfg).unwrap();
        assert_eq!(v.regime, Regime::Inconclusive);
        assert!(!v.conclusion_applies);
    }

    #[test]
    fn classify_boundary_depends_on_constant() {
        let mut cfg = base_config();
        cfg.envelope_base = 3.0;
        cfg.envelope_rate = 2.0;
        cfg.recursion_exponent = 0.5; // = β∗/σ
        cfg.recursion_const = 2.0; // < b₀^{β∗} = 3
        let v = classify_regime(&cfg).unwrap();
        assert_eq!(v.regime, Regime::Boundary);
        assert!(v.conclusion_applies);

        cfg.recursion_const = 3.0; // = b₀^{β∗}: no longer strict
        let v = classify_regime(&cfg).unwrap();
        assert_eq!(v.regime, Regime::Inconclusive);
    }

    #[test]
    fn nonneg_alpha_with_negative_sigma_is_inconclusive() {
        // β∗/σ < 0 ≤ α makes the first branch vacuous.
        let mut cfg = base_config();
        cfg.envelope_rate = -2.0;
        cfg.recursion_exponent = 0.5;
        let v = classify_regime(&cfg).unwrap();
        assert_eq!(v.regime, Regime::Inconclusive);
    }

    #[test]
    fn probe_alpha_zero_decays_like_inverse_power() {
        // α = 0, σ = 1, E = {1}: probed value is k_j^{−1} exactly.
        let mut cfg = base_config();
        cfg.envelope_rate = 1.0;
        let report = limit_probe(&cfg, 1, 200).unwrap();
        assert!(report.decreasing);
        // Slope against log k_j is −1/σ = −1.
        assert!((report.min_gap_chain.tail_slope + 1.0).abs() < 1e-6);
    }

    #[test]
    fn probe_negative_regime_decays() {
        let mut cfg = base_config();
        cfg.gap_set = BTreeSet::from([1, 3]);
        cfg.recursion_exponent = -1.0;
        cfg.envelope_rate = 2.0;
        let report = limit_probe(&cfg, 1, 200).unwrap();
        assert!(report.min_gap_chain.tail_slope < 0.0);
        assert!(report.max_gap_chain.tail_slope < 0.0);
        assert!(report.decreasing);
    }

    #[test]
    fn probe_rejects_inconclusive_config() {
        let mut cfg = base_config();
        cfg.recursion_exponent = 1.0;
        assert!(matches!(
            limit_probe(&cfg, 1, 100),
            Err(LemmaError::NotApplicable(_))
        ));
    }

    #[test]
    fn consistency_verdicts() {
        let mut cfg = base_config();
        cfg.envelope_rate = 1.0; // strict regime with α = 0: β∗/σ = 1 > 0
        let zeros = vec![0.0f64; 40];
        assert_eq!(
            conclusion_consistency(&zeros, &cfg, 30).unwrap(),
            ConsistencyVerdict::Consistent
        );

        // Geometric decay passes (i) with equality; a generous envelope
        // constant makes (ii) pass on a short window even though the full
        // lemma would force the sequence to vanish. Positive entries on an
        // all-pass window raise the alert.
        cfg.envelope_const = 1e6;
        let a: Vec<f64> = (0..12).map(|m| 0.5f64.powi(m)).collect();
        match conclusion_consistency(&a, &cfg, 5).unwrap() {
            ConsistencyVerdict::Alert { first_positive } => assert_eq!(first_positive, 0),
            other => panic!("expected alert, got {other:?}"),
        }
    }

    #[test]
    fn consistency_gated_by_hypotheses() {
        let mut cfg = base_config();
        cfg.envelope_rate = 1.0;
        let mut a = vec![0.0f64; 40];
        a[5] = 1.0; // breaks hypothesis (i)
        match conclusion_consistency(&a, &cfg, 20).unwrap() {
            ConsistencyVerdict::NotApplicable { reason } => {
                assert!(reason.contains("hypothesis (i)"));
            }
            other => panic!("expected not-applicable, got {other:?}"),
        }
    }
}
