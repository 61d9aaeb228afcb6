//! Weighted arithmetic, geometric, and harmonic matrix means, plus the exact
//! identities for the arithmetic-geometric and arithmetic-harmonic gaps.
//!
//! For positive definite `A`, `B` and weight `v` in [0, 1]:
//!
//! - arithmetic: `(1-v) A + v B`
//! - geometric:  `A^{1/2} (A^{-1/2} B A^{-1/2})^v A^{1/2}`
//! - harmonic:   `((1-v) A^{-1} + v B^{-1})^{-1}`
//!
//! The geometric mean is computed by the defining formula (two square roots
//! and one fractional power), not iteratively; at these dimensions the direct
//! route is both faster and easier to reason about. The formula is kept in
//! its asymmetric written order (`A` outside); symmetry at `v = 1/2` is a
//! test, not an assumption.

use crate::error::{Error, Result};
use crate::hermitian::{
    congruence, eig_hermitian, power_from_eig, HermitianMatrix, PositiveDefiniteMatrix,
};

/// A mean weight `v` in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weight(f64);

impl Weight {
    pub const HALF: Weight = Weight(0.5);

    pub fn new(v: f64) -> Result<Self> {
        if v.is_finite() && (0.0..=1.0).contains(&v) {
            Ok(Self(v))
        } else {
            Err(Error::InvalidWeight(v))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// The coefficient `v (1 - v) / 2` appearing in every weighted bound.
    pub fn bound_coefficient(self) -> f64 {
        self.0 * (1.0 - self.0) / 2.0
    }
}

fn check_dims(a: &PositiveDefiniteMatrix, b: &PositiveDefiniteMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(())
}

/// `(1-v) A + v B`.
pub fn arithmetic_mean(
    a: &PositiveDefiniteMatrix,
    b: &PositiveDefiniteMatrix,
    v: Weight,
) -> Result<PositiveDefiniteMatrix> {
    check_dims(a, b)?;
    let mix = a
        .base()
        .scaled(1.0 - v.value())
        .add(&b.base().scaled(v.value()));
    PositiveDefiniteMatrix::new(mix)
}

/// `A^{1/2} (A^{-1/2} B A^{-1/2})^v A^{1/2}`.
pub fn geometric_mean(
    a: &PositiveDefiniteMatrix,
    b: &PositiveDefiniteMatrix,
    v: Weight,
) -> Result<PositiveDefiniteMatrix> {
    check_dims(a, b)?;
    let eig_a = eig_hermitian(a.base())?;
    let sqrt_a = power_from_eig(&eig_a, 0.5)?;
    let inv_sqrt_a = power_from_eig(&eig_a, -0.5)?;
    // inner = A^{-1/2} B A^{-1/2}; A^{-1/2} is Hermitian, so X* B X with
    // X = A^{-1/2} is exactly this congruence.
    let inner = congruence(inv_sqrt_a.matrix(), b.base())?;
    let powered = power_from_eig(&eig_hermitian(&inner)?, v.value())?;
    let result = congruence(sqrt_a.matrix(), powered.base())?;
    PositiveDefiniteMatrix::new(result)
}

/// `((1-v) A^{-1} + v B^{-1})^{-1}`, equal to `(A^{-1} nabla_v B^{-1})^{-1}`.
pub fn harmonic_mean(
    a: &PositiveDefiniteMatrix,
    b: &PositiveDefiniteMatrix,
    v: Weight,
) -> Result<PositiveDefiniteMatrix> {
    check_dims(a, b)?;
    let inv_a = power_from_eig(&eig_hermitian(a.base())?, -1.0)?;
    let inv_b = power_from_eig(&eig_hermitian(b.base())?, -1.0)?;
    let mix = inv_a
        .base()
        .scaled(1.0 - v.value())
        .add(&inv_b.base().scaled(v.value()));
    power_from_eig(&eig_hermitian(&mix)?, -1.0)
}

/// Right side of the exact arithmetic-geometric gap identity:
/// `(1/8) (A-B) ((A nabla B + A sharp B)/2)^{-1} (A-B)`, symmetrized.
///
/// Equals `A nabla B - A sharp B` up to roundoff.
pub fn ag_gap_identity_rhs(
    a: &PositiveDefiniteMatrix,
    b: &PositiveDefiniteMatrix,
) -> Result<HermitianMatrix> {
    check_dims(a, b)?;
    let nabla = arithmetic_mean(a, b, Weight::HALF)?;
    let sharp = geometric_mean(a, b, Weight::HALF)?;
    let mid = PositiveDefiniteMatrix::new(nabla.base().add(sharp.base()).scaled(0.5))?;
    let inv_mid = power_from_eig(&eig_hermitian(mid.base())?, -1.0)?;
    let diff = a.base().sub(b.base());
    // (A-B) M (A-B) is X* M X with Hermitian X = A-B.
    Ok(congruence(diff.matrix(), inv_mid.base())?.scaled(0.125))
}

/// Right side of the exact arithmetic-harmonic gap identity:
/// `(1/4) (A-B) (A nabla B)^{-1} (A-B)`, symmetrized.
///
/// Equals `A nabla B - A ! B` up to roundoff.
pub fn ah_gap_identity_rhs(
    a: &PositiveDefiniteMatrix,
    b: &PositiveDefiniteMatrix,
) -> Result<HermitianMatrix> {
    check_dims(a, b)?;
    let nabla = arithmetic_mean(a, b, Weight::HALF)?;
    let inv_nabla = power_from_eig(&eig_hermitian(nabla.base())?, -1.0)?;
    let diff = a.base().sub(b.base());
    Ok(congruence(diff.matrix(), inv_nabla.base())?.scaled(0.25))
}
