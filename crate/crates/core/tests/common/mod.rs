//! Deterministic random generators shared by the integration suites.

use fischer_core::{ComplexRational, MultiIndex, Polynomial};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Small Gaussian-rational coefficient with numerators in ±5 and
/// denominators in 1..=3.
pub fn random_scalar(rng: &mut ChaCha8Rng, complex: bool) -> ComplexRational {
    let re_num = rng.random_range(-5i64..=5);
    let re_den = rng.random_range(1i64..=3);
    if complex && rng.random_bool(0.5) {
        let im_num = rng.random_range(-5i64..=5);
        let im_den = rng.random_range(1i64..=3);
        ComplexRational::from_parts(re_num, re_den, im_num, im_den)
    } else {
        ComplexRational::from_ratio(re_num, re_den)
    }
}

pub fn random_multi_index(rng: &mut ChaCha8Rng, dim: usize, max_degree: u32) -> MultiIndex {
    let total = rng.random_range(0..=max_degree);
    let mut exps = vec![0u32; dim];
    for _ in 0..total {
        let i = rng.random_range(0..dim);
        exps[i] += 1;
    }
    MultiIndex::new(exps)
}

/// Sparse random polynomial; may be zero when unlucky with cancellation.
pub fn random_polynomial(
    rng: &mut ChaCha8Rng,
    dim: usize,
    max_degree: u32,
    max_terms: usize,
    complex: bool,
) -> Polynomial {
    let n_terms = rng.random_range(1..=max_terms);
    Polynomial::from_terms(
        dim,
        (0..n_terms).map(|_| {
            (
                random_multi_index(rng, dim, max_degree),
                random_scalar(rng, complex),
            )
        }),
    )
}

/// Nonzero homogeneous polynomial of exactly the given degree.
pub fn random_homogeneous(
    rng: &mut ChaCha8Rng,
    dim: usize,
    degree: u32,
    max_terms: usize,
    complex: bool,
) -> Polynomial {
    loop {
        let basis = MultiIndex::all_of_degree(dim, degree);
        let n_terms = rng.random_range(1..=max_terms.min(basis.len()));
        let p = Polynomial::from_terms(
            dim,
            (0..n_terms).map(|_| {
                let alpha = basis[rng.random_range(0..basis.len())].clone();
                (alpha, random_scalar(rng, complex))
            }),
        );
        if !p.is_zero() {
            return p;
        }
    }
}

/// Non-homogeneous polynomial of total degree exactly `k` with a nonzero
/// top slice and at least one nonzero lower slice.
pub fn random_non_homogeneous(
    rng: &mut ChaCha8Rng,
    dim: usize,
    k: u32,
    complex: bool,
) -> Polynomial {
    let top = random_homogeneous(rng, dim, k, 3, complex);
    let lower_degree = rng.random_range(0..k);
    let lower = random_homogeneous(rng, dim, lower_degree, 2, complex);
    let mut p = top.add(&lower).expect("same dim");
    // Occasionally a second lower slice.
    if k >= 2 && rng.random_bool(0.4) {
        let extra_degree = rng.random_range(0..k);
        p = p
            .add(&random_homogeneous(rng, dim, extra_degree, 2, complex))
            .expect("same dim");
    }
    p
}
