//! Weighted arithmetic, geometric, and harmonic means of positive definite
//! matrices, and a seeded numerical verification suite for the identities,
//! Loewner-order bounds, and singular-value inequalities relating them.
//!
//! The crate is organized bottom-up:
//!
//! - [`cmatrix`]: dense square complex matrices (storage and arithmetic).
//! - [`hermitian`]: Hermitian/positive definite types, the Jacobi
//!   eigensolver, spectral calculus, Loewner margins, singular values.
//! - [`means`]: the three weighted means and two exact gap identities.
//! - [`scalar`]: the scalar inequalities behind the matrix results, checked
//!   on dense grids, with derivative cross-checks and a counterexample
//!   search for a bound that fails.
//! - [`catalog`]: every matrix-level check as a named, hypothesis-gated
//!   evaluation producing margins and per-index singular-value gaps.
//! - [`instances`]: deterministic seeded generation of positive definite
//!   test instances satisfying each check's hypothesis.
//! - [`suite`]: the run/replay orchestration and JSON/CSV reports.

pub mod catalog;
pub mod cmatrix;
pub mod error;
pub mod hermitian;
pub mod instances;
pub mod means;
pub mod scalar;
pub mod suite;

pub use error::{Error, Result};
