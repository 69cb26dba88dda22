//! Subcommand surface. Every command emits JSON by default (CSV or plain
//! text where it makes sense) and exits 0 only when all internal
//! verification flags pass. Exit codes: 0 success, 1 verification failure,
//! 2 input or usage errors.

use crate::document::{series_from_documents, DocumentError, PolynomialDocument};
use crate::parse::{parse_expression, print_expression, ParseError};
use clap::{Args, Parser, Subcommand, ValueEnum};
use fischer_core::apolar::{apolar_norm_sq, beauzamy_bound_sq, verify_adjoint, ApolarError};
use fischer_core::fischer::{decompose, uniqueness_order_bound, FischerError};
use fischer_core::growth::{growth_report, GrowthError, SupNormOptions};
use fischer_core::ks::{check_tau_admissible, ks_scan, KsError, KsOptions};
use fischer_core::poly::PolyError;
use fischer_core::seqlemma::{
    check_hypothesis_i, check_hypothesis_ii, classify_regime, conclusion_consistency, limit_probe,
    LemmaConfig, LemmaError,
};
use fischer_core::{ComplexRational, MultiIndex, Polynomial};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;
use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Document(#[from] DocumentError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Fischer(#[from] FischerError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Apolar(#[from] ApolarError),
    #[error(transparent)]
    Ks(#[from] KsError),
    #[error(transparent)]
    Growth(#[from] GrowthError),
    #[error(transparent)]
    Lemma(#[from] LemmaError),
    #[error("{0}")]
    Invalid(String),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::VerificationFailed(_) => 1,
            _ => 2,
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "fischerlab",
    version,
    about = "Exact Fischer decompositions, apolar bound scans and growth reports"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decompose f = P·q + r with P_k*(D) r = 0, exactly.
    Decompose(DecomposeArgs),
    /// Scan minimal singular values of multiplication by a homogeneous P_k.
    KsScan(KsScanArgs),
    /// Growth report and order estimate for a truncated series file.
    Order(OrderArgs),
    /// Run the exact-identity verification suite.
    Verify(VerifyArgs),
    /// Check a sequence file against the sequence-lemma hypotheses.
    LemmaCheck(LemmaCheckArgs),
    /// Uniqueness order threshold for structure parameters (k, β₁, β₂, τ).
    Bound(BoundArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

#[derive(Args, Debug)]
pub struct DecomposeArgs {
    /// Number of variables d (variables are z1..zd).
    #[arg(long)]
    pub dim: usize,
    /// The polynomial f as an expression.
    #[arg(long, conflicts_with = "input")]
    pub f: Option<String>,
    /// Alternatively, a PolynomialDocument JSON file for f.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// The polynomial P as an expression.
    #[arg(long)]
    pub p: String,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
}

#[derive(Args, Debug)]
pub struct KsScanArgs {
    #[arg(long)]
    pub dim: usize,
    /// Homogeneous polynomial P_k as an expression.
    #[arg(long)]
    pub p: String,
    #[arg(long, default_value_t = 0)]
    pub m_min: u32,
    #[arg(long, default_value_t = 8)]
    pub m_max: u32,
    /// Relative tolerance of the exact Rayleigh cross-check.
    #[arg(long, default_value_t = 1e-6)]
    pub tolerance: f64,
    /// Flag a proposed tau exponent for admissibility.
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
}

#[derive(Args, Debug)]
pub struct OrderArgs {
    /// Series file: JSON array of polynomial documents indexed by degree.
    #[arg(long)]
    pub input: PathBuf,
    /// Truncation degree M (default: series length − 1).
    #[arg(long)]
    pub truncation: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Sphere samples per degree.
    #[arg(long, default_value_t = 4096)]
    pub samples: usize,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Random cases per check.
    #[arg(long, default_value_t = 200)]
    pub cases: usize,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct LemmaCheckArgs {
    /// Sequence file: JSON array of nonnegative numbers.
    #[arg(long)]
    pub input: PathBuf,
    /// Gap set E, comma-separated positive integers, e.g. "1,2".
    #[arg(long)]
    pub gap_set: String,
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    #[arg(long, default_value_t = 0.0)]
    pub d: f64,
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub a0: f64,
    #[arg(long)]
    pub b0: f64,
    #[arg(long, default_value_t = 0.0)]
    pub d0: f64,
    #[arg(long, default_value_t = 0.0)]
    pub alpha0: f64,
    #[arg(long)]
    pub sigma: f64,
    /// Highest index checked (default: as far as the data allows).
    #[arg(long)]
    pub m_max: Option<usize>,
    /// Also run the limit probe when the regime applies.
    #[arg(long, default_value_t = false)]
    pub probe: bool,
    #[arg(long, default_value_t = 200)]
    pub probe_steps: u32,
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    #[arg(long)]
    pub k: u32,
    #[arg(long)]
    pub beta1: u32,
    #[arg(long)]
    pub beta2: u32,
    #[arg(long, default_value_t = 0.0)]
    pub tau: f64,
}

/// The documented seed override: FISCHERLAB_SEED beats the flag.
fn effective_seed(flag: Option<u64>) -> u64 {
    match std::env::var("FISCHERLAB_SEED") {
        Ok(v) => v.parse().unwrap_or_else(|_| flag.unwrap_or(0)),
        Err(_) => flag.unwrap_or(0),
    }
}

pub fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Decompose(args) => run_decompose(args),
        Command::KsScan(args) => run_ks_scan(args),
        Command::Order(args) => run_order(args),
        Command::Verify(args) => run_verify(args),
        Command::LemmaCheck(args) => run_lemma_check(args),
        Command::Bound(args) => run_bound(args),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn run_decompose(args: DecomposeArgs) -> Result<u8, CliError> {
    let f = match (&args.f, &args.input) {
        (Some(expr), None) => parse_expression(expr, args.dim)?,
        (None, Some(path)) => {
            let doc: PolynomialDocument = read_json(path)?;
            if doc.dim != args.dim {
                return Err(CliError::Invalid(format!(
                    "document dimension {} does not match --dim {}",
                    doc.dim, args.dim
                )));
            }
            doc.to_polynomial()?
        }
        _ => {
            return Err(CliError::Invalid(
                "provide f either as --f <expr> or --input <file>".into(),
            ))
        }
    };
    let p = parse_expression(&args.p, args.dim)?;
    let result = decompose(&f, &p)?;

    let payload = json!({
        "q": print_expression(&result.quotient),
        "r": print_expression(&result.remainder),
        "q_document": PolynomialDocument::from_polynomial(&result.quotient),
        "r_document": PolynomialDocument::from_polynomial(&result.remainder),
        "kernel_check": result.kernel_check,
        "reconstruction_check": result.reconstruction_check,
    });
    match args.format {
        OutputFormat::Json => println!("{}", serde_json::to_string_pretty(&payload)?),
        OutputFormat::Text | OutputFormat::Csv => {
            println!("q = {}", print_expression(&result.quotient));
            println!("r = {}", print_expression(&result.remainder));
            println!("kernel_check = {}", result.kernel_check);
            println!("reconstruction_check = {}", result.reconstruction_check);
        }
    }
    if result.verified() {
        Ok(0)
    } else {
        Err(CliError::VerificationFailed(
            "decomposition flags did not verify".into(),
        ))
    }
}

fn run_ks_scan(args: KsScanArgs) -> Result<u8, CliError> {
    let p = parse_expression(&args.p, args.dim)?;
    let opts = KsOptions {
        rayleigh_tolerance: args.tolerance,
        ..Default::default()
    };
    let report = ks_scan(&p, args.m_min, args.m_max, &opts)?;
    let tau_verdict = args
        .tau
        .map(|tau| check_tau_admissible(p.degree().unwrap_or(0), tau, args.dim));

    match args.format {
        OutputFormat::Json => {
            let payload = json!({
                "report": report,
                "tau_admissibility": tau_verdict,
            });
            println!("{}", serde_json::to_string_pretty(&payload)?);
        }
        OutputFormat::Csv => print!("{}", report.to_csv()),
        OutputFormat::Text => {
            for i in 0..report.degrees.len() {
                println!(
                    "m={} dim={} mu={:.10} certified={}",
                    report.degrees[i], report.dims[i], report.mu[i], report.certified[i]
                );
            }
            if let Some(fit) = &report.fit {
                println!("fit: C={:.6} tau={:.6}", fit.c, fit.tau);
            }
            println!(
                "certified pair: C0={:.10} tau0={}",
                report.certified_constant, report.certified_tau
            );
        }
    }
    let all_certified = report.certified.iter().all(|&c| c);
    let all_positive = report.mu.iter().all(|&v| v > 0.0);
    if all_certified && all_positive {
        Ok(0)
    } else {
        Err(CliError::VerificationFailed(
            "scan produced uncertified or nonpositive singular values".into(),
        ))
    }
}

fn run_order(args: OrderArgs) -> Result<u8, CliError> {
    let docs: Vec<PolynomialDocument> = read_json(&args.input)?;
    let mut series = series_from_documents(&docs)?;
    if let Some(truncation) = args.truncation {
        series = series.truncated(truncation);
    }
    let opts = SupNormOptions {
        samples: args.samples,
        seed: effective_seed(args.seed),
        ..Default::default()
    };
    let report = growth_report(&series, &opts)?;
    match args.format {
        OutputFormat::Json => println!("{}", serde_json::to_string_pretty(&report)?),
        OutputFormat::Csv => print!("{}", report.to_csv()),
        OutputFormat::Text => {
            println!("truncation M = {}", report.truncation);
            println!("order estimate = {}", report.order_estimate);
        }
    }
    Ok(0)
}

fn run_bound(args: BoundArgs) -> Result<u8, CliError> {
    let bound = uniqueness_order_bound(args.k, args.beta1, args.beta2, args.tau)?;
    println!("{}", serde_json::to_string_pretty(&bound)?);
    if bound.within_expected_range {
        Ok(0)
    } else {
        Err(CliError::VerificationFailed(
            "threshold fell outside its branch range".into(),
        ))
    }
}

fn run_lemma_check(args: LemmaCheckArgs) -> Result<u8, CliError> {
    let sequence: Vec<f64> = read_json(&args.input)?;
    let gap_set: BTreeSet<u32> = args
        .gap_set
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<u32>()
                .map_err(|_| CliError::Invalid(format!("bad gap set entry {s:?}")))
        })
        .collect::<Result<_, _>>()?;
    let cfg = LemmaConfig {
        gap_set,
        recursion_const: args.a,
        recursion_shift: args.d,
        recursion_exponent: args.alpha,
        envelope_const: args.a0,
        envelope_base: args.b0,
        envelope_shift: args.d0,
        envelope_exponent: args.alpha0,
        envelope_rate: args.sigma,
    };
    let regime = classify_regime(&cfg)?;
    let m_max = args.m_max.unwrap_or_else(|| {
        sequence
            .len()
            .saturating_sub(cfg.gap_max() as usize + 1)
            .min(sequence.len().saturating_sub(1))
    });
    let hyp_i = check_hypothesis_i(&sequence, &cfg, m_max)?;
    let hyp_ii = check_hypothesis_ii(&sequence, &cfg, m_max)?;
    let consistency = conclusion_consistency(&sequence, &cfg, m_max)?;
    let probe = if args.probe && regime.conclusion_applies {
        Some(limit_probe(&cfg, 1, args.probe_steps)?)
    } else {
        None
    };
    let payload = json!({
        "regime": regime,
        "hypothesis_i": hyp_i,
        "hypothesis_ii": hyp_ii,
        "consistency": consistency,
        "probe": probe,
    });
    println!("{}", serde_json::to_string_pretty(&payload)?);
    Ok(0)
}

#[derive(Serialize)]
struct CheckSummary {
    name: &'static str,
    cases: usize,
    failures: usize,
}

/// The exact-identity suite: monomial apolar values, adjointness, the
/// certified multiplication bound, and decomposition round-trips.
fn run_verify(args: VerifyArgs) -> Result<u8, CliError> {
    let seed = effective_seed(args.seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();

    // Monomial apolar values, exact.
    let mut cases = 0usize;
    let mut failures = 0usize;
    for dim in 1..=3usize {
        let mut all = Vec::new();
        for m in 0..=4u32 {
            all.extend(MultiIndex::all_of_degree(dim, m));
        }
        for a in &all {
            for b in &all {
                let pa = Polynomial::monomial(dim, a.clone(), ComplexRational::one());
                let pb = Polynomial::monomial(dim, b.clone(), ComplexRational::one());
                let inner = fischer_core::apolar::apolar_inner(&pa, &pb)?;
                let ok = if a == b {
                    inner
                        == ComplexRational::real(num_rational::BigRational::from_integer(
                            a.factorial(),
                        ))
                } else {
                    inner.is_zero()
                };
                cases += 1;
                failures += usize::from(!ok);
            }
        }
    }
    checks.push(CheckSummary {
        name: "monomial_apolar_values",
        cases,
        failures,
    });

    // Adjoint identity on random triples.
    let mut failures = 0usize;
    for _ in 0..args.cases {
        let dim = rng.random_range(1..=3);
        let f = random_polynomial(&mut rng, dim, 4, 5);
        let g = random_polynomial(&mut rng, dim, 4, 5);
        let q = random_polynomial(&mut rng, dim, 4, 5);
        if !verify_adjoint(&f, &g, &q)?.holds {
            failures += 1;
        }
    }
    checks.push(CheckSummary {
        name: "adjoint_identity",
        cases: args.cases,
        failures,
    });

    // Certified multiplication bound on homogeneous pairs.
    let mut failures = 0usize;
    for _ in 0..args.cases {
        let dim = rng.random_range(1..=3);
        let k = rng.random_range(0..=3);
        let m = rng.random_range(0..=3);
        let p = random_homogeneous(&mut rng, dim, k);
        let f = random_homogeneous(&mut rng, dim, m);
        let bound = beauzamy_bound_sq(&p, &f)?;
        if apolar_norm_sq(&p.mul(&f)?) > bound {
            failures += 1;
        }
    }
    checks.push(CheckSummary {
        name: "multiplication_bound",
        cases: args.cases,
        failures,
    });

    // Decomposition round-trips: decompose(P·g + h, P) = (g, h).
    let round_trips = (args.cases / 4).max(10);
    let mut failures = 0usize;
    for _ in 0..round_trips {
        let dim = rng.random_range(1..=2);
        let k = rng.random_range(2..=3);
        let top = random_homogeneous(&mut rng, dim, k);
        let low_degree = rng.random_range(0..k);
        let low = random_homogeneous(&mut rng, dim, low_degree);
        let p = top.add(&low)?;
        let g = random_polynomial(&mut rng, dim, 2, 3);
        let h = decompose(&random_polynomial(&mut rng, dim, k + 1, 4), &p)?.remainder;
        let f = p.mul(&g)?.add(&h)?;
        let d = decompose(&f, &p)?;
        if d.quotient != g || d.remainder != h || !d.verified() {
            failures += 1;
        }
    }
    checks.push(CheckSummary {
        name: "decomposition_round_trip",
        cases: round_trips,
        failures,
    });

    let total_failures: usize = checks.iter().map(|c| c.failures).sum();
    let payload = json!({
        "seed": seed,
        "checks": checks,
        "all_passed": total_failures == 0,
    });
    println!("{}", serde_json::to_string_pretty(&payload)?);
    if total_failures == 0 {
        Ok(0)
    } else {
        Err(CliError::VerificationFailed(format!(
            "{total_failures} verification failures"
        )))
    }
}

fn random_scalar(rng: &mut ChaCha8Rng) -> ComplexRational {
    ComplexRational::from_parts(
        rng.random_range(-5i64..=5),
        rng.random_range(1i64..=3),
        rng.random_range(-5i64..=5),
        rng.random_range(1i64..=3),
    )
}

fn random_polynomial(rng: &mut ChaCha8Rng, dim: usize, max_degree: u32, max_terms: usize) -> Polynomial {
    let n = rng.random_range(1..=max_terms);
    Polynomial::from_terms(
        dim,
        (0..n).map(|_| {
            let total = rng.random_range(0..=max_degree);
            let mut exps = vec![0u32; dim];
            for _ in 0..total {
                let i = rng.random_range(0..dim);
                exps[i] += 1;
            }
            (MultiIndex::new(exps), random_scalar(rng))
        }),
    )
}

fn random_homogeneous(rng: &mut ChaCha8Rng, dim: usize, degree: u32) -> Polynomial {
    loop {
        let basis = MultiIndex::all_of_degree(dim, degree);
        let n = rng.random_range(1..=basis.len().min(3));
        let p = Polynomial::from_terms(
            dim,
            (0..n).map(|_| {
                (
                    basis[rng.random_range(0..basis.len())].clone(),
                    random_scalar(rng),
                )
            }),
        );
        if !p.is_zero() {
            return p;
        }
    }
}
