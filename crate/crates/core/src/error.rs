//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max conjugate-symmetry defect {defect:.3e} exceeds {tol:.3e}")]
    NotHermitian { defect: f64, tol: f64 },

    #[error("matrix has non-finite entries")]
    NonFiniteEntries,

    #[error("matrix is not positive definite: min eigenvalue {min_eig:.6e}")]
    NotPositiveDefinite { min_eig: f64 },

    #[error("dimension mismatch: {left}x{left} vs {right}x{right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error(
        "eigensolver did not converge: off-diagonal mass above threshold after {sweeps} sweeps \
         (Frobenius norm {frobenius:.6e})"
    )]
    EigNonConvergence { frobenius: f64, sweeps: usize },

    #[error("function undefined at eigenvalue {eigenvalue:.17e} (value {value})")]
    SpectralDomain { eigenvalue: f64, value: f64 },

    #[error("weight must lie in [0, 1], got {0}")]
    InvalidWeight(f64),

    #[error("grid point (x={x}, v={v:?}) lies outside the lemma's domain")]
    GridOutsideDomain { x: f64, v: Option<f64> },

    #[error("no closed-form derivatives are available for {0}")]
    NoDerivativeFormulas(&'static str),

    #[error("empty search range: {0}")]
    EmptyRange(&'static str),

    #[error("search range violates the required regime: {0}")]
    RangeOutsideRegime(&'static str),

    #[error("invalid generator spec: {0}")]
    InvalidGenSpec(String),

    #[error("generated pair failed order verification after {retries} retries (margin {margin:.3e})")]
    OrderVerification { retries: usize, margin: f64 },

    #[error("declared relation does not hold: margin {margin:.3e} below -{tol:.3e}")]
    DeclaredRelationViolated { margin: f64, tol: f64 },

    #[error("hypothesis not met: {0}")]
    HypothesisNotMet(String),

    #[error("invalid config field `{field}`: {reason}")]
    InvalidConfig { field: &'static str, reason: String },

    #[error("unknown check id `{0}`")]
    UnknownCheckId(String),

    #[error("cannot write report to {path}: {source}")]
    ReportWrite {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
