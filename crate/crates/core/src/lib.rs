//! Exact Fischer decompositions and the quantitative machinery around
//! them: the apolar inner product, Khavinson–Shapiro bound scans,
//! order-of-growth estimation for truncated series, and the sequence lemma
//! that turns slice-norm recursions into vanishing theorems.
//!
//! Everything uniqueness-critical runs over exact Gaussian rationals;
//! floating point appears only in the measurement modules (`ks`, `growth`,
//! `seqlemma`), and even there the key quantities carry exact-arithmetic
//! cross-checks.

pub mod apolar;
pub mod certified;
pub mod fischer;
pub mod growth;
pub mod jacobi;
pub mod ks;
pub mod linalg;
pub mod poly;
pub mod scalar;
pub mod seqlemma;

pub use poly::{GradedSeries, MultiIndex, Polynomial};
pub use scalar::ComplexRational;
