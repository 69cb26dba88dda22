//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line. Exact criteria admit zero tolerance; numeric criteria pin their
//! tolerances here, in code.

mod common;

use common::*;
use fischer_core::apolar::{apolar_inner, apolar_norm_sq, beauzamy_bound_sq};
use fischer_core::fischer::{
    decompose, decompose_homogeneous, injectivity_check, uniqueness_order_bound, BoundBranch,
};
use fischer_core::growth::{
    growth_report, order_estimate, stirling_lower_interval, stirling_upper_interval,
    SupNormOptions,
};
use fischer_core::ks::{ks_scan, KsOptions};
use fischer_core::seqlemma::{classify_regime, limit_probe, LemmaConfig, Regime};
use fischer_core::{ComplexRational, GradedSeries, MultiIndex, Polynomial};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use std::time::{Duration, Instant};

fn criterion(n: u32, description: &str, body: impl FnOnce() + std::panic::UnwindSafe) {
    let outcome = std::panic::catch_unwind(body);
    match &outcome {
        Ok(()) => println!("[PASS] criterion {n}: {description}"),
        Err(_) => println!("[FAIL] criterion {n}: {description}"),
    }
    if let Err(e) = outcome {
        std::panic::resume_unwind(e);
    }
}

fn z(i: usize, dim: usize) -> Polynomial {
    Polynomial::variable(dim, i)
}

fn assert_runtime(start: Instant, limit: Duration, what: &str) {
    let elapsed = start.elapsed();
    assert!(
        elapsed <= limit,
        "{what} took {elapsed:?}, budget {limit:?}"
    );
}

#[test]
fn criterion_01_monomial_apolar_values() {
    criterion(1, "exact monomial apolar values, |α|,|β| ≤ 6, d ≤ 3", || {
        let start = Instant::now();
        for dim in 1..=3usize {
            let mut all = Vec::new();
            for m in 0..=6u32 {
                all.extend(MultiIndex::all_of_degree(dim, m));
            }
            for a in &all {
                for b in &all {
                    let pa = Polynomial::monomial(dim, a.clone(), ComplexRational::one());
                    let pb = Polynomial::monomial(dim, b.clone(), ComplexRational::one());
                    let inner = apolar_inner(&pa, &pb).unwrap();
                    if a == b {
                        let expected = ComplexRational::real(BigRational::from_integer(
                            a.factorial(),
                        ));
                        assert_eq!(inner, expected, "⟨z^{a:?}, z^{a:?}⟩");
                    } else {
                        assert!(inner.is_zero(), "⟨z^{a:?}, z^{b:?}⟩ ≠ 0");
                    }
                }
            }
        }
        assert_runtime(start, Duration::from_secs(5), "monomial apolar suite");
    });
}

#[test]
fn criterion_02_adjoint_identity_500_triples() {
    criterion(2, "adjoint identity: exact residual 0 on 500 random triples", || {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for case in 0..500 {
            let dim = rng.random_range(1..=3);
            let f = random_polynomial(&mut rng, dim, 5, 6, true);
            let g = random_polynomial(&mut rng, dim, 5, 6, true);
            let q = random_polynomial(&mut rng, dim, 5, 6, true);
            let check = fischer_core::apolar::verify_adjoint(&f, &g, &q).unwrap();
            assert!(check.residual.is_zero(), "case {case}");
        }
    });
}

#[test]
fn criterion_03_decomposition_roundtrip_200() {
    criterion(3, "decomposition round-trip on 200 random (P, g, h)", || {
        let start = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for case in 0..200 {
            let dim = rng.random_range(1..=3);
            let k = rng.random_range(2..=4);
            let p = random_non_homogeneous(&mut rng, dim, k, true);
            let g = random_polynomial(&mut rng, dim, 3, 4, true);
            // Kernel element of P_k*(D), built by decomposing a random f.
            let f_seed = random_polynomial(&mut rng, dim, k + 2, 5, true);
            let h = decompose(&f_seed, &p).unwrap().remainder;

            let f = p.mul(&g).unwrap().add(&h).unwrap();
            let d = decompose(&f, &p).unwrap();
            assert_eq!(d.quotient, g, "case {case}: quotient mismatch");
            assert_eq!(d.remainder, h, "case {case}: remainder mismatch");
            assert!(d.verified(), "case {case}: flags");
        }
        assert_runtime(start, Duration::from_secs(60), "round-trip suite");
    });
}

#[test]
fn criterion_04_injectivity_full_rank_50() {
    criterion(4, "full rank of all diagonal blocks, 50 random P, degrees ≤ 8", || {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for case in 0..50 {
            let dim = rng.random_range(1..=3);
            let k = rng.random_range(2..=4);
            let p = random_non_homogeneous(&mut rng, dim, k, true);
            let report = injectivity_check(&p, 8).unwrap();
            assert!(
                report.all_full_rank,
                "case {case}: rank deficiency {:?} (witness {:?})",
                report.blocks, report.kernel_witness
            );
        }
    });
}

#[test]
fn criterion_05_hand_verified_anchors() {
    criterion(5, "hand-verified decomposition anchors, exact", || {
        let one = Polynomial::one(1);
        let p = z(0, 1).pow(2).add(&one).unwrap();

        let d = decompose(&z(0, 1).pow(2), &p).unwrap();
        assert_eq!(d.quotient, one);
        assert_eq!(
            d.remainder,
            Polynomial::constant(1, ComplexRational::from_int(-1))
        );

        let d = decompose(&z(0, 1).pow(4), &p).unwrap();
        assert_eq!(d.quotient, z(0, 1).pow(2).sub(&one).unwrap());
        assert_eq!(d.remainder, one);

        let laplace = z(0, 2).pow(2).add(&z(1, 2).pow(2)).unwrap();
        let d = decompose_homogeneous(&z(0, 2).pow(2), &laplace).unwrap();
        assert_eq!(
            d.quotient,
            Polynomial::constant(2, ComplexRational::from_ratio(1, 2))
        );
        let expected_r = z(0, 2)
            .pow(2)
            .sub(&z(1, 2).pow(2))
            .unwrap()
            .scale(&ComplexRational::from_ratio(1, 2));
        assert_eq!(d.remainder, expected_r);
    });
}

#[test]
fn criterion_06_ks_scanner_closed_form() {
    criterion(6, "scanner closed form μ_m = √(k!) for P = z1^k, d = 2", || {
        let start = Instant::now();
        let opts = KsOptions::default();
        for k in 1..=3u32 {
            let p = z(0, 2).pow(k);
            let report = ks_scan(&p, 0, 8, &opts).unwrap();
            let expected = (1..=k).map(|j| j as f64).product::<f64>().sqrt();
            for (m, mu) in report.degrees.iter().zip(&report.mu) {
                assert!(
                    (mu - expected).abs() < 1e-8,
                    "k={k} m={m}: μ={mu}, expected {expected}"
                );
            }
            let fit = report.fit.expect("nine data points");
            assert!(fit.tau.abs() < 0.05, "k={k}: fitted τ = {}", fit.tau);
        }
        assert_runtime(start, Duration::from_secs(30), "scanner closed form");
    });
}

#[test]
fn criterion_07_beauzamy_bound_500_pairs() {
    criterion(7, "certified multiplication bound on 500 random homogeneous pairs", || {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for case in 0..500 {
            let dim = rng.random_range(1..=3);
            let k = rng.random_range(0..=3);
            let m = rng.random_range(0..=3);
            let p = random_homogeneous(&mut rng, dim, k, 4, true);
            let f = random_homogeneous(&mut rng, dim, m, 4, true);
            let bound = beauzamy_bound_sq(&p, &f).unwrap();
            let actual = apolar_norm_sq(&p.mul(&f).unwrap());
            assert!(actual <= bound, "case {case}: {actual} > {bound}");
        }
    });
}

#[test]
fn criterion_08_order_bound_arithmetic() {
    criterion(8, "order-threshold arithmetic and branch ranges on a 10⁴ sweep", || {
        let anchor = uniqueness_order_bound(2, 0, 0, 0.0).unwrap();
        assert_eq!(anchor.rho_max, 2.0);
        assert_eq!(anchor.branch, BoundBranch::TauWithinBetaTwo);

        let mut checked = 0usize;
        for k in 2u32..=12 {
            for beta1 in 0..k {
                for beta2 in beta1..k {
                    for step in 0..=30 {
                        let tau = (k as f64 - 1.0) * step as f64 / 30.0;
                        let bound = uniqueness_order_bound(k, beta1, beta2, tau).unwrap();
                        let kf = k as f64;
                        match bound.branch {
                            BoundBranch::TauWithinBetaTwo => {
                                assert!(
                                    bound.rho_max >= 2.0 / kf - 1e-12
                                        && bound.rho_max <= 2.0 + 1e-12,
                                    "branch1 out of range: k={k} b1={beta1} b2={beta2} tau={tau}: {}",
                                    bound.rho_max
                                );
                            }
                            BoundBranch::TauExceedsBetaTwo => {
                                assert!(
                                    bound.rho_max > 2.0 - 1e-12
                                        && bound.rho_max <= 2.0 * kf + 1e-12,
                                    "branch2 out of range: k={k} b1={beta1} b2={beta2} tau={tau}: {}",
                                    bound.rho_max
                                );
                            }
                        }
                        checked += 1;
                    }
                }
            }
        }
        assert!(checked >= 10_000, "swept only {checked} points");
    });
}

#[test]
fn criterion_09_order_estimator_windows() {
    criterion(9, "order estimator: exp → 1, exp of square → 2, polynomial → 0", || {
        let start = Instant::now();
        let factorial = |m: u64| -> BigRational {
            let mut acc = BigInt::one();
            for j in 2..=m {
                acc *= BigInt::from(j);
            }
            BigRational::from_integer(acc)
        };

        // Truncated exp(z1) at M = 100.
        let exp_slices: Vec<Polynomial> = (0..=100u32)
            .map(|m| {
                z(0, 1).pow(m).scale(&ComplexRational::new(
                    factorial(m as u64).recip(),
                    BigRational::from_integer(BigInt::from(0)),
                ))
            })
            .collect();
        let exp_series = GradedSeries::from_slices(1, exp_slices).unwrap();
        let report = growth_report(&exp_series, &SupNormOptions::default()).unwrap();
        assert!(
            (0.95..=1.05).contains(&report.order_estimate),
            "exp: ρ_est = {}",
            report.order_estimate
        );

        // Truncated exp(z1²) at M = 100.
        let exp_sq_slices: Vec<Polynomial> = (0..=100u32)
            .map(|m| {
                if m % 2 == 0 {
                    z(0, 1).pow(m).scale(&ComplexRational::new(
                        factorial((m / 2) as u64).recip(),
                        BigRational::from_integer(BigInt::from(0)),
                    ))
                } else {
                    Polynomial::zero(1)
                }
            })
            .collect();
        let exp_sq_series = GradedSeries::from_slices(1, exp_sq_slices).unwrap();
        let report = growth_report(&exp_sq_series, &SupNormOptions::default()).unwrap();
        assert!(
            (1.9..=2.1).contains(&report.order_estimate),
            "exp(z²): ρ_est = {}",
            report.order_estimate
        );

        // Polynomials have order 0: directly and through the full report.
        let poly = z(0, 2)
            .mul(&z(1, 2))
            .unwrap()
            .add(&Polynomial::one(2))
            .unwrap()
            .pow(3);
        let series = poly.homogeneous_expansion().truncated(40);
        let report = growth_report(&series, &SupNormOptions::default()).unwrap();
        assert_eq!(report.order_estimate, 0.0);

        let mut norms = vec![0.0f64; 61];
        norms[0] = 3.0;
        norms[5] = 1.5;
        norms[9] = 0.25;
        assert_eq!(order_estimate(&norms).unwrap(), 0.0);

        assert_runtime(start, Duration::from_secs(30), "order estimator");
    });
}

#[test]
fn criterion_10_stirling_sandwich_certified() {
    criterion(10, "Stirling sandwich: certified rational brackets vs exact m!", || {
        let mut factorial = BigInt::one();
        for m in 1..=20u32 {
            factorial *= BigInt::from(m);
            let fact = BigRational::from_integer(factorial.clone());
            let lower = stirling_lower_interval(m).unwrap();
            let upper = stirling_upper_interval(m).unwrap();
            // Certified direction: even the enclosure's pessimistic
            // endpoint clears the inequality.
            assert!(
                lower.1 <= fact,
                "m={m}: lower-bound formula exceeds m! ({} > {fact})",
                lower.1
            );
            assert!(
                fact <= upper.0,
                "m={m}: m! exceeds upper-bound formula ({fact} > {})",
                upper.0
            );
            // Enclosures are tight far beyond 30 significant digits.
            let width_lo = (&lower.1 - &lower.0) / &lower.1;
            let width_hi = (&upper.1 - &upper.0) / &upper.1;
            let tol = BigRational::new(BigInt::one(), BigInt::from(10u8).pow(30));
            assert!(width_lo < tol && width_hi < tol, "m={m}: enclosure too wide");
        }
    });
}

#[test]
fn criterion_11_sequence_lemma_probe_and_boundary() {
    criterion(11, "sequence-lemma probe slopes and boundary clause", || {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut applying = 0usize;
        while applying < 100 {
            let beta_min = rng.random_range(1u32..=3);
            let beta_max = beta_min + rng.random_range(0u32..=3);
            // Sample from the two strict regimes.
            let (alpha, sigma) = if rng.random_bool(0.5) {
                let sigma: f64 = rng.random_range(0.2..4.0);
                let alpha = rng.random_range(0.0..(beta_min as f64 / sigma));
                (alpha, sigma)
            } else {
                let sigma = if rng.random_bool(0.5) {
                    rng.random_range(0.2..4.0)
                } else {
                    -rng.random_range(0.2..4.0)
                };
                let cap = (beta_max as f64 / sigma).min(0.0);
                (cap - rng.random_range(0.01..3.0), sigma)
            };
            let cfg = LemmaConfig {
                gap_set: BTreeSet::from_iter([beta_min, beta_max]),
                recursion_const: 1.0 + rng.random_range(0.0..2.0),
                recursion_shift: rng.random_range(0.0..2.0),
                recursion_exponent: alpha,
                envelope_const: 1.0,
                envelope_base: rng.random_range(0.5..3.0),
                envelope_shift: 0.0,
                envelope_exponent: 0.0,
                envelope_rate: sigma,
            };
            let verdict = classify_regime(&cfg).unwrap();
            if !verdict.conclusion_applies || verdict.regime == Regime::Boundary {
                continue;
            }
            applying += 1;
            let probe = limit_probe(&cfg, 1, 400).unwrap();
            assert!(
                probe.min_gap_chain.tail_slope < 0.0,
                "min chain slope {} (α={alpha}, σ={sigma})",
                probe.min_gap_chain.tail_slope
            );
            assert!(
                probe.max_gap_chain.tail_slope < 0.0,
                "max chain slope {} (α={alpha}, σ={sigma})",
                probe.max_gap_chain.tail_slope
            );
        }

        // Boundary clause: α = β∗/σ with A ≥ b₀^{β∗} is inconclusive,
        // with A < b₀^{β∗} classifies boundary.
        let mut cfg = LemmaConfig {
            gap_set: BTreeSet::from([2]),
            recursion_const: 5.0,
            recursion_shift: 0.0,
            recursion_exponent: 1.0, // β∗/σ = 2/2 = 1
            envelope_const: 1.0,
            envelope_base: 2.0, // b₀^{β∗} = 4
            envelope_shift: 0.0,
            envelope_exponent: 0.0,
            envelope_rate: 2.0,
        };
        let v = classify_regime(&cfg).unwrap();
        assert_eq!(v.regime, Regime::Inconclusive);
        assert!(!v.conclusion_applies);

        cfg.recursion_const = 3.0; // < 4
        let v = classify_regime(&cfg).unwrap();
        assert_eq!(v.regime, Regime::Boundary);
        assert!(v.conclusion_applies);
    });
}
