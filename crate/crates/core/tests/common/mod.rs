//! Shared helpers for the integration suites: an independent per-eigenvalue
//! scalar oracle for every catalog check, and builders for instances with
//! known joint spectra.
#![allow(dead_code)] // each test binary uses a different subset
//!
//! The oracle never touches the matrix code paths: it evaluates each check's
//! chain entrywise from the two spectra. On commuting instances the matrix
//! results must agree with it, which is what pins the functional-calculus
//! machinery end to end.

use matmean_core::catalog::{CheckResult, MatrixCheckId};
use matmean_core::cmatrix::ComplexMatrix;
use matmean_core::hermitian::{congruence, HermitianMatrix, PositiveDefiniteMatrix};
use matmean_core::instances::{random_unitary, DeclaredRelation, MatrixInstance, Relation};
use matmean_core::means::Weight;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `Q diag(spectrum) Q*` as a verified positive definite matrix.
pub fn pd_from_basis(q: &ComplexMatrix, spectrum: &[f64]) -> PositiveDefiniteMatrix {
    let base = congruence(&q.adjoint(), &HermitianMatrix::from_real_diag(spectrum)).unwrap();
    PositiveDefiniteMatrix::new(base).unwrap()
}

/// Commuting pair with known joint spectra in a shared random eigenbasis.
pub fn commuting_instance(
    q_seed: u64,
    a_spec: &[f64],
    b_spec: &[f64],
    v: f64,
    declared: DeclaredRelation,
) -> MatrixInstance {
    let mut r = rng(q_seed);
    let q = random_unitary(a_spec.len(), &mut r);
    MatrixInstance::new(
        pd_from_basis(&q, a_spec),
        pd_from_basis(&q, b_spec),
        Weight::new(v).unwrap(),
        declared,
        q_seed,
    )
    .unwrap()
}

/// Mirror of `CheckResult` computed entrywise from joint spectra. Entry
/// order matches `evaluate_check` exactly.
pub struct OracleCheck {
    /// `(margin, scale)` per Loewner comparison.
    pub margins: Vec<(f64, f64)>,
    /// `(per-index gaps, scale)` per singular-value comparison.
    pub sv_gaps: Vec<(Vec<f64>, f64)>,
    /// `(residual, scale)` for the identity, when the check has one.
    pub residual: Option<(f64, f64)>,
    /// Condition amplification of the comparison: 1 everywhere except the
    /// sandwich check, whose pivot inverts the mean gap and therefore
    /// magnifies last-bit differences between evaluation orders by
    /// mid-mean / gap.
    pub cond: f64,
}

fn scale_of(l: &[f64], r: &[f64]) -> f64 {
    let m = |xs: &[f64]| xs.iter().fold(0.0f64, |acc, &x| acc.max(x.abs()));
    m(l).max(m(r)).max(1.0)
}

fn margin(l: &[f64], r: &[f64]) -> (f64, f64) {
    let m = l
        .iter()
        .zip(r)
        .map(|(&li, &ri)| ri - li)
        .fold(f64::INFINITY, f64::min);
    (m, scale_of(l, r))
}

fn sv_gap(l: &[f64], r: &[f64]) -> (Vec<f64>, f64) {
    let sorted = |xs: &[f64]| {
        let mut s: Vec<f64> = xs.iter().map(|x| x.abs()).collect();
        s.sort_by(|a, b| b.partial_cmp(a).unwrap());
        s
    };
    let (sl, sr) = (sorted(l), sorted(r));
    let gaps = sr.iter().zip(&sl).map(|(r, l)| r - l).collect();
    (gaps, scale_of(&sl, &sr))
}

fn residual(l: &[f64], r: &[f64]) -> (f64, f64) {
    let res = l
        .iter()
        .zip(r)
        .map(|(&li, &ri)| (li - ri).abs())
        .fold(0.0f64, f64::max);
    (res, scale_of(l, r))
}

/// Builds an ordered commuting instance whose order and weight fit `check`,
/// returning it with its joint spectra. Gaps stay away from zero so the
/// sandwich pivot remains representable at double precision.
pub fn oracle_instance(
    check: MatrixCheckId,
    dim: usize,
    v: f64,
    seed: u64,
) -> (MatrixInstance, Vec<f64>, Vec<f64>) {
    let mut r = rng(seed);
    let low: Vec<f64> = (0..dim).map(|_| r.gen_range(0.05..20.0)).collect();
    let high: Vec<f64> = low.iter().map(|&x| x + r.gen_range(0.5..10.0)).collect();
    let a_leq_b = match matmean_core::suite::generation_relation(check, v) {
        Relation::ALeqB => true,
        Relation::BLeqA => false,
        // Order-free checks accept any declared relation; use B <= A.
        _ => false,
    };
    let (a_spec, b_spec, declared) = if a_leq_b {
        (low, high, DeclaredRelation::ALeqB)
    } else {
        (high, low, DeclaredRelation::BLeqA)
    };
    let inst = commuting_instance(seed, &a_spec, &b_spec, v, declared);
    (inst, a_spec, b_spec)
}

/// Asserts that a matrix-path result agrees with the per-eigenvalue oracle
/// entry by entry, margins and gaps within `tol * scale` (widened by the
/// sandwich pivot's condition number where applicable).
pub fn compare_with_oracle(r: &CheckResult, a_spec: &[f64], b_spec: &[f64], v: f64, tol: f64) {
    let o = scalar_oracle(r.check_id, a_spec, b_spec, v);
    let tol = tol.max(1e-13 * o.cond);
    assert_eq!(r.loewner_margins.len(), o.margins.len(), "{}", r.check_id);
    for (got, (want, scale)) in r.loewner_margins.iter().zip(&o.margins) {
        assert!(
            (got.margin - want).abs() <= tol * scale,
            "{} {}: {} vs {}",
            r.check_id,
            got.label,
            got.margin,
            want
        );
    }
    assert_eq!(r.sv_gaps.len(), o.sv_gaps.len(), "{}", r.check_id);
    for (got, (want, scale)) in r.sv_gaps.iter().zip(&o.sv_gaps) {
        assert_eq!(got.gaps.len(), want.len());
        for (j, (g, w)) in got.gaps.iter().zip(want).enumerate() {
            assert!(
                (g - w).abs() <= tol * scale,
                "{} {} j = {j}: {g} vs {w}",
                r.check_id,
                got.label
            );
        }
    }
    match (&r.identity_residual, &o.residual) {
        (Some(got), Some((want, scale))) => {
            assert!(
                (got.residual - want).abs() <= tol * scale,
                "{}: {} vs {}",
                r.check_id,
                got.residual,
                want
            );
        }
        (None, None) => {}
        other => panic!("{}: residual mismatch {other:?}", r.check_id),
    }
}

/// Per-eigenvalue evaluation of one catalog check on joint spectra `(a, b)`.
pub fn scalar_oracle(id: MatrixCheckId, a: &[f64], b: &[f64], v: f64) -> OracleCheck {
    let n = a.len();
    let c = v * (1.0 - v) / 2.0;
    let per = |f: &dyn Fn(f64, f64) -> f64| -> Vec<f64> {
        (0..n).map(|i| f(a[i], b[i])).collect()
    };
    let d2 = |a: f64, b: f64| (a - b) * (a - b);
    let nab = |a: f64, b: f64| (a + b) / 2.0;
    let geo = |a: f64, b: f64| (a * b).sqrt();
    let har = |a: f64, b: f64| 2.0 * a * b / (a + b);
    let nab_v = |a: f64, b: f64| (1.0 - v) * a + v * b;
    let geo_v = |a: f64, b: f64| a.powf(1.0 - v) * b.powf(v);
    let har_v = |a: f64, b: f64| 1.0 / ((1.0 - v) / a + v / b);

    let mut o = OracleCheck {
        margins: Vec::new(),
        sv_gaps: Vec::new(),
        residual: None,
        cond: 1.0,
    };
    match id {
        MatrixCheckId::Chain => {
            let (h, g, nn) = (per(&har_v), per(&geo_v), per(&nab_v));
            o.margins.push(margin(&h, &g));
            o.margins.push(margin(&g, &nn));
        }
        MatrixCheckId::Between => {
            let a_vals = a.to_vec();
            let b_vals = b.to_vec();
            for mean in [per(&har_v), per(&geo_v), per(&nab_v)] {
                o.margins.push(margin(&a_vals, &mean));
                o.margins.push(margin(&mean, &b_vals));
            }
        }
        MatrixCheckId::Gumus => {
            let gap = per(&|x, y| nab(x, y) - geo(x, y));
            let lower = per(&|x, y| 0.125 * d2(x, y) / x);
            let upper = per(&|x, y| 0.125 * d2(x, y) / y);
            o.sv_gaps.push(sv_gap(&lower, &gap));
            o.sv_gaps.push(sv_gap(&gap, &upper));
        }
        MatrixCheckId::Hirz | MatrixCheckId::SjV => {
            let gap = per(&|x, y| nab_v(x, y) - geo_v(x, y));
            let lower = per(&|x, y| c * d2(x, y) / x);
            let upper = per(&|x, y| c * d2(x, y) / y);
            o.sv_gaps.push(sv_gap(&lower, &gap));
            o.sv_gaps.push(sv_gap(&gap, &upper));
        }
        MatrixCheckId::Thm1 => {
            let gap = per(&|x, y| nab(x, y) - geo(x, y));
            let lower = per(&|x, y| 0.125 * d2(x, y) / nab(x, y));
            let upper = per(&|x, y| 0.125 * d2(x, y) / geo(x, y));
            o.margins.push(margin(&lower, &gap));
            o.margins.push(margin(&gap, &upper));
        }
        MatrixCheckId::Id1 => {
            let gap = per(&|x, y| nab(x, y) - geo(x, y));
            let rhs = per(&|x, y| 0.125 * d2(x, y) / ((nab(x, y) + geo(x, y)) / 2.0));
            o.residual = Some(residual(&gap, &rhs));
        }
        MatrixCheckId::SjAg => {
            let gap = per(&|x, y| nab(x, y) - geo(x, y));
            let lower = per(&|x, y| 0.125 * d2(x, y) / nab(x, y));
            let upper = per(&|x, y| 0.125 * d2(x, y) / geo(x, y));
            o.sv_gaps.push(sv_gap(&lower, &gap));
            o.sv_gaps.push(sv_gap(&gap, &upper));
        }
        MatrixCheckId::RefineAg => {
            let gap = per(&|x, y| nab(x, y) - geo(x, y));
            let g_bound = per(&|x, y| 0.125 * d2(x, y) / geo(x, y));
            let b_bound = per(&|x, y| 0.125 * d2(x, y) / y);
            let a_bound = per(&|x, y| 0.125 * d2(x, y) / x);
            let n_bound = per(&|x, y| 0.125 * d2(x, y) / nab(x, y));
            o.sv_gaps.push(sv_gap(&gap, &g_bound));
            o.sv_gaps.push(sv_gap(&g_bound, &b_bound));
            o.sv_gaps.push(sv_gap(&a_bound, &n_bound));
            o.sv_gaps.push(sv_gap(&n_bound, &gap));
        }
        MatrixCheckId::Sandwich => {
            let sharp = per(&geo);
            let nabla = per(&nab);
            let pivot = per(&|x, y| 0.125 * d2(x, y) / (nab(x, y) - geo(x, y)));
            o.cond = (0..n)
                .map(|i| (nabla[i] + sharp[i]) / 2.0 / (nabla[i] - sharp[i]).abs().max(1e-300))
                .fold(1.0f64, f64::max);
            o.margins.push(margin(&sharp, &pivot));
            o.margins.push(margin(&pivot, &nabla));
        }
        MatrixCheckId::Thm12 => {
            let gap = per(&|x, y| nab_v(x, y) - geo_v(x, y));
            let lower = per(&|x, y| c * d2(x, y) / y);
            let upper = per(&|x, y| c * d2(x, y) * har(x, y) / (x * x));
            o.margins.push(margin(&lower, &gap));
            o.margins.push(margin(&gap, &upper));
        }
        MatrixCheckId::Thm13 => {
            let gap = per(&|x, y| nab_v(x, y) - geo_v(x, y));
            let lower = per(&|x, y| c * d2(x, y) * har(x, y) / (x * x));
            let upper = per(&|x, y| c * d2(x, y) / y);
            o.margins.push(margin(&lower, &gap));
            o.margins.push(margin(&gap, &upper));
        }
        MatrixCheckId::Cor25 => {
            let gap = per(&|x, y| nab_v(x, y) - geo_v(x, y));
            let lower = per(&|x, y| c * d2(x, y) / nab(x, y));
            o.margins.push(margin(&lower, &gap));
        }
        MatrixCheckId::SjCor25 => {
            let gap = per(&|x, y| nab_v(x, y) - geo_v(x, y));
            let mid = per(&|x, y| c * d2(x, y) / nab(x, y));
            let a_bound = per(&|x, y| c * d2(x, y) / x);
            o.sv_gaps.push(sv_gap(&a_bound, &mid));
            o.sv_gaps.push(sv_gap(&mid, &gap));
        }
        MatrixCheckId::Gh => {
            let gap = per(&|x, y| geo(x, y) - har(x, y));
            let upper = per(&|x, y| 0.125 * d2(x, y) / geo(x, y));
            o.margins.push(margin(&gap, &upper));
        }
        MatrixCheckId::GhSj => {
            let gap = per(&|x, y| geo(x, y) - har(x, y));
            let mid = per(&|x, y| 0.125 * d2(x, y) / geo(x, y));
            let upper = per(&|x, y| 0.125 * d2(x, y) / y);
            o.sv_gaps.push(sv_gap(&gap, &mid));
            o.sv_gaps.push(sv_gap(&mid, &upper));
        }
        MatrixCheckId::GhV => {
            let gap = per(&|x, y| geo_v(x, y) - har_v(x, y));
            let upper = per(&|x, y| c * d2(x, y) / geo_v(x, y));
            o.margins.push(margin(&gap, &upper));
        }
        MatrixCheckId::GhVSj => {
            let gap = per(&|x, y| geo_v(x, y) - har_v(x, y));
            let mid = per(&|x, y| c * d2(x, y) / geo_v(x, y));
            let upper = per(&|x, y| c * d2(x, y) / x);
            o.sv_gaps.push(sv_gap(&gap, &mid));
            o.sv_gaps.push(sv_gap(&mid, &upper));
        }
        MatrixCheckId::Ah => {
            let gap = per(&|x, y| nab(x, y) - har(x, y));
            let rhs = per(&|x, y| 0.25 * d2(x, y) / nab(x, y));
            o.residual = Some(residual(&gap, &rhs));
            let lower = per(&|x, y| 0.25 * d2(x, y) / y);
            let upper = per(&|x, y| 0.25 * d2(x, y) / x);
            o.margins.push(margin(&lower, &gap));
            o.margins.push(margin(&gap, &upper));
            o.sv_gaps.push(sv_gap(&lower, &gap));
            o.sv_gaps.push(sv_gap(&gap, &upper));
        }
    }
    o
}
