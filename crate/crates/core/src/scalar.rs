//! The scalar inequalities and identities underlying the matrix results,
//! verified on dense grids, with the proofs' closed-form derivatives
//! cross-checked against finite differences, and a grid-plus-ascent search
//! for the one stated bound that fails.
//!
//! Each lemma is a statement `lower <= middle <= upper` (either side may be
//! absent; identities assert `middle == upper`) over a domain in `(x, v)`.
//! Grid checks use the relative tolerance `1e-12` against the local scale
//! `max(1, |lower|, |middle|, |upper|)`; roundoff near the degenerate point
//! `x = 1`, where every statement collapses to `0 <= 0`, stays well inside
//! that slack.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Relative tolerance for grid checks (inequalities and identities).
pub const GRID_TOL: f64 = 1e-12;
/// A counterexample must beat this gap to be certified.
pub const REMARK_VIOLATION_THRESHOLD: f64 = 1e-9;
/// Step for first-derivative central differences.
pub const FD_STEP_D1: f64 = 1e-5;
/// Relative step for second-derivative central differences (`h = 1e-3 x`).
/// Second differences at double precision lose about half the digits; at an
/// absolute 1e-5 step the roundoff term `eps |f| / h^2` alone reaches the
/// comparison tolerance. The functions here scale like powers of `x`, so a
/// step proportional to `x` keeps both the truncation term `h^2 f''''/12`
/// and roundoff near 1e-6 relative across the whole grid.
pub const FD_STEP_D2: f64 = 1e-3;
/// Relative tolerance for derivative cross-checks.
pub const FD_TOL: f64 = 1e-5;
/// Relative tolerance for the degree-8 polynomial identity.
pub const POLY_TOL: f64 = 1e-6;

/// One scalar statement from the catalog.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScalarLemmaId {
    /// `(a-b)^2/(8a) <= (a+b)/2 - sqrt(ab) <= (a-b)^2/(8b)` for `a >= b`,
    /// normalized to `b = 1`, `x = a/b >= 1`.
    #[serde(rename = "S_AMGM")]
    Amgm,
    /// Exact: `(1+x)/2 - sqrt(x) = (1/8)(1-x)^2 (((1+x)/2 + sqrt(x))/2)^{-1}`.
    #[serde(rename = "S_SQRT_ID")]
    SqrtId,
    /// `v(1-v)/(2x) (x-1)^2 <= (1-v)+vx-x^v <= v(1-v)/2 (x-1)^2 (2x/(x+1))`,
    /// `x >= 1`.
    #[serde(rename = "S_LEMMA_V")]
    LemmaV,
    /// The complement of the previous bounds on `0 < x <= 1` (reversed).
    #[serde(rename = "S_LEMMA_VI")]
    LemmaVi,
    /// `(1-v)+vx-x^v >= v(1-v)/2 (1-x)^2 ((1+x)/2)^{-1}` on
    /// (i) `x >= 1, v in [1/2, 1]` or (ii) `0 < x <= 1, v in [0, 1/2]`.
    #[serde(rename = "S_LEMMA_V2")]
    LemmaV2,
    /// `sqrt(x) - ((1 + 1/x)/2)^{-1} <= (1-x)^2 / (8 sqrt(x))`, `x > 0`.
    #[serde(rename = "S_GH")]
    Gh,
    /// `x^v - (1-v+v x^{-1})^{-1} <= v(1-v)/2 (1-x)^2 x^{-v}`, `x >= 1`.
    #[serde(rename = "S_GH_V")]
    GhV,
    /// Exact: `(1+x)/2 - ((1+x^{-1})/2)^{-1} = (1-x)^2/4 ((1+x)/2)^{-1}`.
    #[serde(rename = "S_AH_ID")]
    AhId,
    /// `(1-v)+vx-x^v <= v(1-v)/2 (x-1)^2/sqrt(x)` — expected to FAIL
    /// somewhere in both regimes of S_LEMMA_V2; see
    /// [`search_remark_counterexample`].
    #[serde(rename = "S_REMARK")]
    Remark,
}

/// A rectangle of validity in `(x, v)`. `x_lo == 0.0` means the interval is
/// open at zero; all other bounds are inclusive. `v` bounds are ignored by
/// weight-free lemmas.
#[derive(Debug, Clone, Copy)]
pub struct Regime {
    pub x_lo: f64,
    pub x_hi: f64,
    pub v_lo: f64,
    pub v_hi: f64,
}

impl Regime {
    pub fn contains(&self, x: f64, v: Option<f64>) -> bool {
        let x_ok = if self.x_lo == 0.0 { x > 0.0 } else { x >= self.x_lo } && x <= self.x_hi;
        let v_ok = match v {
            Some(v) => (self.v_lo..=self.v_hi).contains(&v),
            None => true,
        };
        x_ok && v_ok
    }
}

const FULL_POSITIVE: Regime = Regime { x_lo: 0.0, x_hi: f64::INFINITY, v_lo: 0.0, v_hi: 1.0 };
const X_GE_ONE: Regime = Regime { x_lo: 1.0, x_hi: f64::INFINITY, v_lo: 0.0, v_hi: 1.0 };
const X_LE_ONE: Regime = Regime { x_lo: 0.0, x_hi: 1.0, v_lo: 0.0, v_hi: 1.0 };
const REGIME_I: Regime = Regime { x_lo: 1.0, x_hi: f64::INFINITY, v_lo: 0.5, v_hi: 1.0 };
const REGIME_II: Regime = Regime { x_lo: 0.0, x_hi: 1.0, v_lo: 0.0, v_hi: 0.5 };

/// `lower <= middle <= upper` at one point; identities carry the right side
/// in `upper`.
#[derive(Debug, Clone, Copy)]
pub struct ScalarBounds {
    pub lower: Option<f64>,
    pub middle: f64,
    pub upper: Option<f64>,
}

impl ScalarLemmaId {
    pub const ALL: [ScalarLemmaId; 9] = [
        ScalarLemmaId::Amgm,
        ScalarLemmaId::SqrtId,
        ScalarLemmaId::LemmaV,
        ScalarLemmaId::LemmaVi,
        ScalarLemmaId::LemmaV2,
        ScalarLemmaId::Gh,
        ScalarLemmaId::GhV,
        ScalarLemmaId::AhId,
        ScalarLemmaId::Remark,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Amgm => "S_AMGM",
            Self::SqrtId => "S_SQRT_ID",
            Self::LemmaV => "S_LEMMA_V",
            Self::LemmaVi => "S_LEMMA_VI",
            Self::LemmaV2 => "S_LEMMA_V2",
            Self::Gh => "S_GH",
            Self::GhV => "S_GH_V",
            Self::AhId => "S_AH_ID",
            Self::Remark => "S_REMARK",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|id| id.name() == s)
    }

    /// Short label identifying the statement in reports.
    pub fn anchor(self) -> &'static str {
        match self {
            Self::Amgm => "simulate the scalar inequalities",
            Self::SqrtId => "it can be easily seen that",
            Self::LemmaV => "We prove the first inequality",
            Self::LemmaVi => "the complement of Lemma",
            Self::LemmaV2 => "we have the following estimates",
            Self::Gh => "Direct computations imply",
            Self::GhV => "the following generalization of Lemma",
            Self::AhId => "Noting the identity",
            Self::Remark => "does not hold in general",
        }
    }

    pub fn uses_weight(self) -> bool {
        matches!(
            self,
            Self::LemmaV | Self::LemmaVi | Self::LemmaV2 | Self::GhV | Self::Remark
        )
    }

    pub fn is_identity(self) -> bool {
        matches!(self, Self::SqrtId | Self::AhId)
    }

    pub fn regimes(self) -> &'static [Regime] {
        match self {
            Self::Amgm | Self::LemmaV | Self::GhV => &[X_GE_ONE],
            Self::SqrtId | Self::Gh | Self::AhId => &[FULL_POSITIVE],
            Self::LemmaVi => &[X_LE_ONE],
            Self::LemmaV2 | Self::Remark => &[REGIME_I, REGIME_II],
        }
    }

    pub fn in_domain(self, x: f64, v: Option<f64>) -> bool {
        let v = if self.uses_weight() { v } else { None };
        self.regimes().iter().any(|r| r.contains(x, v))
    }

    /// Evaluates the statement's sides at a point. `v` is ignored by
    /// weight-free lemmas.
    pub fn bounds(self, x: f64, v: f64) -> ScalarBounds {
        let c = v * (1.0 - v);
        match self {
            Self::Amgm => ScalarBounds {
                lower: Some((x - 1.0).powi(2) / (8.0 * x)),
                middle: (1.0 + x) / 2.0 - x.sqrt(),
                upper: Some((x - 1.0).powi(2) / 8.0),
            },
            Self::SqrtId => ScalarBounds {
                lower: None,
                middle: (1.0 + x) / 2.0 - x.sqrt(),
                upper: Some(
                    0.125 * (1.0 - x).powi(2) / (((1.0 + x) / 2.0 + x.sqrt()) / 2.0),
                ),
            },
            Self::LemmaV => ScalarBounds {
                lower: Some(c / (2.0 * x) * (x - 1.0).powi(2)),
                middle: weighted_power_gap(x, v),
                upper: Some(c / 2.0 * (x - 1.0).powi(2) * (2.0 * x / (x + 1.0))),
            },
            Self::LemmaVi => ScalarBounds {
                lower: Some(c / 2.0 * (x - 1.0).powi(2) * (2.0 * x / (x + 1.0))),
                middle: weighted_power_gap(x, v),
                upper: Some(c / (2.0 * x) * (x - 1.0).powi(2)),
            },
            Self::LemmaV2 => ScalarBounds {
                lower: Some(c / 2.0 * (1.0 - x).powi(2) * (2.0 / (1.0 + x))),
                middle: weighted_power_gap(x, v),
                upper: None,
            },
            Self::Gh => ScalarBounds {
                lower: None,
                middle: x.sqrt() - 2.0 * x / (x + 1.0),
                upper: Some((1.0 - x).powi(2) / (8.0 * x.sqrt())),
            },
            Self::GhV => ScalarBounds {
                lower: None,
                middle: x.powf(v) - 1.0 / ((1.0 - v) + v / x),
                upper: Some(c / 2.0 * (1.0 - x).powi(2) * x.powf(-v)),
            },
            Self::AhId => ScalarBounds {
                lower: None,
                middle: (1.0 + x) / 2.0 - 2.0 * x / (x + 1.0),
                upper: Some((1.0 - x).powi(2) / 4.0 * (2.0 / (1.0 + x))),
            },
            Self::Remark => ScalarBounds {
                lower: None,
                middle: weighted_power_gap(x, v),
                upper: Some(c / 2.0 * (x - 1.0).powi(2) / x.sqrt()),
            },
        }
    }
}

impl std::fmt::Display for ScalarLemmaId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// `(1-v) + v x - x^v`, the arithmetic-geometric gap of `(1, x)`.
fn weighted_power_gap(x: f64, v: f64) -> f64 {
    (1.0 - v) + v * x - x.powf(v)
}

/// Explicit evaluation points: the product `x` times `v` (`v` empty for
/// weight-free lemmas).
#[derive(Debug, Clone)]
pub struct GridSpec {
    pub x: Vec<f64>,
    pub v: Vec<f64>,
}

impl GridSpec {
    pub fn new(x: Vec<f64>, v: Vec<f64>) -> Self {
        Self { x, v }
    }

    pub fn log_spaced_x(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        if n <= 1 || lo == hi {
            return vec![lo];
        }
        let (llo, lhi) = (lo.ln(), hi.ln());
        (0..n)
            .map(|i| (llo + (lhi - llo) * i as f64 / (n - 1) as f64).exp())
            .collect()
    }

    /// `n` interior points of `(lo, hi)`, endpoints excluded: the statements
    /// degenerate to `0 <= 0` at the weight endpoints.
    pub fn uniform_open_v(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (1..=n)
            .map(|i| lo + (hi - lo) * i as f64 / (n + 1) as f64)
            .collect()
    }

    pub fn point_count(&self) -> usize {
        self.x.len() * self.v.len().max(1)
    }
}

/// The catalog's standard grids for one lemma: `x` log-spaced over
/// `[1e-3, 1e3]` intersected with the domain, `v` uniform over the regime's
/// interval with endpoints excluded. Multi-regime lemmas get one grid per
/// regime.
pub fn default_grids(id: ScalarLemmaId, nx: usize, nv: usize) -> Vec<GridSpec> {
    id.regimes()
        .iter()
        .map(|r| {
            let lo = if r.x_lo == 0.0 { 1e-3 } else { r.x_lo.max(1e-3) };
            let hi = r.x_hi.min(1e3);
            let x = GridSpec::log_spaced_x(lo, hi, nx);
            let v = if id.uses_weight() {
                GridSpec::uniform_open_v(r.v_lo, r.v_hi, nv)
            } else {
                Vec::new()
            };
            GridSpec::new(x, v)
        })
        .collect()
}

/// Outcome of one grid check.
#[derive(Debug, Clone, Serialize)]
pub struct ScalarCheckResult {
    pub id: ScalarLemmaId,
    pub points: usize,
    pub violations: usize,
    /// Most negative relative margin over the grid (inequality lemmas).
    pub worst_margin: Option<f64>,
    /// Largest relative residual over the grid (identity lemmas).
    pub max_residual: Option<f64>,
    pub worst_x: f64,
    pub worst_v: Option<f64>,
    pub tolerance: f64,
    pub passed: bool,
}

impl ScalarCheckResult {
    fn merge(mut self, other: ScalarCheckResult) -> ScalarCheckResult {
        self.points += other.points;
        self.violations += other.violations;
        let take_other = match (self.worst_margin, other.worst_margin) {
            (Some(a), Some(b)) => b < a,
            (None, Some(_)) => true,
            _ => match (self.max_residual, other.max_residual) {
                (Some(a), Some(b)) => b > a,
                (None, Some(_)) => true,
                _ => false,
            },
        };
        if take_other {
            self.worst_margin = other.worst_margin.or(self.worst_margin);
            self.max_residual = other.max_residual.or(self.max_residual);
            self.worst_x = other.worst_x;
            self.worst_v = other.worst_v;
        }
        self.passed = self.violations == 0;
        self
    }
}

/// Evaluates `lower <= middle <= upper` (or the identity residual) at every
/// grid point; every point must lie in the lemma's domain.
pub fn check_scalar_lemma(id: ScalarLemmaId, grid: &GridSpec) -> Result<ScalarCheckResult> {
    let v_axis: Vec<Option<f64>> = if id.uses_weight() {
        if grid.v.is_empty() {
            return Err(Error::InvalidConfig {
                field: "grid.v",
                reason: format!("{id} takes a weight; the v grid must be nonempty"),
            });
        }
        grid.v.iter().copied().map(Some).collect()
    } else {
        vec![None]
    };

    for &x in &grid.x {
        for &v in &v_axis {
            if !id.in_domain(x, v) {
                return Err(Error::GridOutsideDomain { x, v });
            }
        }
    }

    let mut points = 0usize;
    let mut violations = 0usize;
    let mut worst_margin: Option<f64> = None;
    let mut max_residual: Option<f64> = None;
    let mut worst_x = grid.x[0];
    let mut worst_v = v_axis[0];

    for &x in &grid.x {
        for &v in &v_axis {
            points += 1;
            let b = id.bounds(x, v.unwrap_or(0.5));
            let scale = b
                .lower
                .map_or(0.0, f64::abs)
                .max(b.middle.abs())
                .max(b.upper.map_or(0.0, f64::abs))
                .max(1.0);
            if id.is_identity() {
                let residual = (b.middle - b.upper.unwrap()).abs() / scale;
                if residual > GRID_TOL {
                    violations += 1;
                }
                if max_residual.is_none_or(|m| residual > m) {
                    max_residual = Some(residual);
                    worst_x = x;
                    worst_v = v;
                }
            } else {
                let mut margin = f64::INFINITY;
                if let Some(lo) = b.lower {
                    margin = margin.min((b.middle - lo) / scale);
                }
                if let Some(hi) = b.upper {
                    margin = margin.min((hi - b.middle) / scale);
                }
                if margin < -GRID_TOL {
                    violations += 1;
                }
                if worst_margin.is_none_or(|m| margin < m) {
                    worst_margin = Some(margin);
                    worst_x = x;
                    worst_v = v;
                }
            }
        }
    }

    Ok(ScalarCheckResult {
        id,
        points,
        violations,
        worst_margin,
        max_residual,
        worst_x,
        worst_v,
        tolerance: GRID_TOL,
        passed: violations == 0,
    })
}

/// Runs [`check_scalar_lemma`] over all of a lemma's default regime grids and
/// merges the outcomes by worst violation.
pub fn check_scalar_lemma_default(
    id: ScalarLemmaId,
    nx: usize,
    nv: usize,
) -> Result<ScalarCheckResult> {
    let mut merged: Option<ScalarCheckResult> = None;
    for grid in default_grids(id, nx, nv) {
        let r = check_scalar_lemma(id, &grid)?;
        merged = Some(match merged {
            Some(m) => m.merge(r),
            None => r,
        });
    }
    Ok(merged.expect("every lemma has at least one regime"))
}

/// Outcome of the derivative cross-checks for one lemma.
#[derive(Debug, Clone, Serialize)]
pub struct DerivativeCheckResult {
    pub id: ScalarLemmaId,
    pub points: usize,
    /// Worst relative disagreement between closed-form first derivatives and
    /// central differences at step [`FD_STEP_D1`].
    pub max_d1_rel_err: f64,
    /// Same for second derivatives at step [`FD_STEP_D2`].
    pub max_d2_rel_err: f64,
    /// Pointwise failures of the claimed derivative signs.
    pub sign_violations: usize,
    /// Largest `|value|` among quantities claimed to vanish (e.g. `g(1)`,
    /// `g'(1)`).
    pub value_check_max_abs: f64,
    /// Worst relative defect of the degree-8 polynomial identity (only for
    /// the geometric-harmonic lemma).
    pub poly_identity_max_rel: Option<f64>,
    pub passed: bool,
}

struct DerivativeAccumulator {
    points: usize,
    max_d1: f64,
    max_d2: f64,
    sign_violations: usize,
    value_max: f64,
}

impl DerivativeAccumulator {
    fn new() -> Self {
        Self {
            points: 0,
            max_d1: 0.0,
            max_d2: 0.0,
            sign_violations: 0,
            value_max: 0.0,
        }
    }

    fn d1(&mut self, fd: f64, closed: f64) {
        self.max_d1 = self.max_d1.max((fd - closed).abs() / closed.abs().max(1.0));
    }

    fn d2(&mut self, fd: f64, closed: f64) {
        self.max_d2 = self.max_d2.max((fd - closed).abs() / closed.abs().max(1.0));
    }

    /// `val` must satisfy `sign * val >= -slack`.
    fn sign(&mut self, val: f64, sign: f64) {
        if sign * val < -GRID_TOL * val.abs().max(1.0) {
            self.sign_violations += 1;
        }
    }

    fn vanishes(&mut self, val: f64) {
        self.value_max = self.value_max.max(val.abs());
    }
}

fn central_d1(f: impl Fn(f64) -> f64, x: f64) -> f64 {
    let h = FD_STEP_D1;
    (f(x + h) - f(x - h)) / (2.0 * h)
}

fn central_d2(f: impl Fn(f64) -> f64, x: f64) -> f64 {
    let h = FD_STEP_D2 * x;
    (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)
}

// Closed forms from the monotonicity proofs. `g` drives the lower bound of
// the weighted arithmetic-geometric lemma, `f` the upper bound.
fn lemma_v_g(x: f64, v: f64) -> f64 {
    2.0 * x.powf(v + 1.0) + v * (1.0 - v) * (x - 1.0).powi(2) - 2.0 * (1.0 - v) * x
        - 2.0 * v * x * x
}

fn lemma_v_g1(x: f64, v: f64) -> f64 {
    2.0 * (v + 1.0) * x.powf(v) - 2.0 * v * x - 2.0 * v * v * x + 2.0 * v * v - 2.0
}

fn lemma_v_g2(x: f64, v: f64) -> f64 {
    2.0 * v * (v + 1.0) * (x.powf(v - 1.0) - 1.0)
}

fn lemma_v_f(x: f64, v: f64) -> f64 {
    (1.0 - v) * (1.0 + 1.0 / x) + v * (x + 1.0) - x.powf(v - 1.0) * (x + 1.0)
        - v * (1.0 - v) * (x - 1.0).powi(2)
}

fn lemma_v_f1(x: f64, v: f64) -> f64 {
    (x.powf(v) + 2.0 * v * v * (x - 1.0) * x * x
        - 1.0
        - v * (x.powf(v + 1.0) + x.powf(v) + 2.0 * x.powi(3) - 3.0 * x * x - 1.0))
        / (x * x)
}

fn lemma_v_f2(x: f64, v: f64) -> f64 {
    (1.0 - v)
        * (2.0 * x.powi(-3) * (1.0 - x.powf(v)) + v * (x.powf(v - 2.0) + x.powf(v - 3.0) - 2.0))
}

// Deficit function of the refined lower bound and its curvature.
fn lemma_v2_f(x: f64, v: f64) -> f64 {
    weighted_power_gap(x, v) - v * (1.0 - v) * (1.0 - x).powi(2) / (1.0 + x)
}

fn lemma_v2_f2(x: f64, v: f64) -> f64 {
    v * (1.0 - v) * lemma_v2_gv(x, v)
}

fn lemma_v2_gv(x: f64, v: f64) -> f64 {
    x.powf(v - 2.0) - 8.0 / (1.0 + x).powi(3)
}

fn lemma_v2_gv1(x: f64, v: f64) -> f64 {
    x.powf(v - 2.0) * x.ln()
}

// Deficit function of the geometric-harmonic bound.
fn lemma_gh_f(x: f64) -> f64 {
    x.sqrt() - 2.0 * x / (x + 1.0) - (1.0 - x).powi(2) / (8.0 * x.sqrt())
}

fn lemma_gh_f2(x: f64) -> f64 {
    (128.0 / (1.0 + x).powi(3) - (3.0 + x) * (1.0 + 3.0 * x) / x.powf(2.5)) / 32.0
}

fn gh_poly_lhs(x: f64) -> f64 {
    ((3.0 + x) * (1.0 + 3.0 * x) * (1.0 + x).powi(3)).powi(2) - 128.0 * 128.0 * x.powi(5)
}

fn gh_poly_rhs(x: f64) -> f64 {
    (x - 1.0).powi(2)
        * (9.0
            + 132.0 * x
            + 868.0 * x * x
            + 3452.0 * x.powi(3)
            + 9510.0 * x.powi(4)
            + 3452.0 * x.powi(5)
            + 868.0 * x.powi(6)
            + 132.0 * x.powi(7)
            + 9.0 * x.powi(8))
}

/// Cross-checks the proofs' closed-form derivatives against central finite
/// differences and asserts the claimed signs pointwise on the grid. Only the
/// four lemmas whose proofs state closed forms are supported.
pub fn check_derivative_formulas(
    id: ScalarLemmaId,
    grid: &GridSpec,
) -> Result<DerivativeCheckResult> {
    if !matches!(
        id,
        ScalarLemmaId::LemmaV | ScalarLemmaId::LemmaVi | ScalarLemmaId::LemmaV2 | ScalarLemmaId::Gh
    ) {
        return Err(Error::NoDerivativeFormulas(id.name()));
    }

    let v_axis: Vec<Option<f64>> = if id.uses_weight() {
        if grid.v.is_empty() {
            return Err(Error::InvalidConfig {
                field: "grid.v",
                reason: format!("{id} takes a weight; the v grid must be nonempty"),
            });
        }
        grid.v.iter().copied().map(Some).collect()
    } else {
        vec![None]
    };
    for &x in &grid.x {
        for &v in &v_axis {
            if !id.in_domain(x, v) {
                return Err(Error::GridOutsideDomain { x, v });
            }
        }
    }

    let mut acc = DerivativeAccumulator::new();
    let mut poly_max: Option<f64> = None;

    for &x in &grid.x {
        for &vo in &v_axis {
            acc.points += 1;
            match id {
                ScalarLemmaId::LemmaV | ScalarLemmaId::LemmaVi => {
                    let v = vo.unwrap();
                    acc.d1(central_d1(|t| lemma_v_g(t, v), x), lemma_v_g1(x, v));
                    acc.d2(central_d2(|t| lemma_v_g(t, v), x), lemma_v_g2(x, v));
                    acc.d1(central_d1(|t| lemma_v_f(t, v), x), lemma_v_f1(x, v));
                    acc.d2(central_d2(|t| lemma_v_f(t, v), x), lemma_v_f2(x, v));
                    // Signs: concave on x >= 1, convex on 0 < x <= 1.
                    let orientation = if id == ScalarLemmaId::LemmaV { -1.0 } else { 1.0 };
                    acc.sign(lemma_v_g2(x, v), orientation);
                    acc.sign(lemma_v_f2(x, v), orientation);
                    // g and f vanish to first order at x = 1.
                    acc.vanishes(lemma_v_g(1.0, v));
                    acc.vanishes(lemma_v_g1(1.0, v));
                    acc.vanishes(lemma_v_f(1.0, v));
                    acc.vanishes(lemma_v_f1(1.0, v));
                }
                ScalarLemmaId::LemmaV2 => {
                    let v = vo.unwrap();
                    acc.d2(central_d2(|t| lemma_v2_f(t, v), x), lemma_v2_f2(x, v));
                    acc.d1(
                        central_d1(|w| lemma_v2_gv(x, w), v),
                        lemma_v2_gv1(x, v),
                    );
                    acc.sign(lemma_v2_f2(x, v), 1.0);
                    acc.sign(lemma_v2_gv(x, v), 1.0);
                    acc.vanishes(lemma_v2_f(1.0, v));
                }
                ScalarLemmaId::Gh => {
                    acc.d2(central_d2(lemma_gh_f, x), lemma_gh_f2(x));
                    acc.sign(lemma_gh_f2(x), -1.0);
                    acc.vanishes(lemma_gh_f(1.0));
                    acc.vanishes(central_d1(lemma_gh_f, 1.0));
                }
                _ => unreachable!(),
            }
        }
    }

    if id == ScalarLemmaId::Gh {
        // The factored form of ((3+x)(1+3x)(1+x)^3)^2 - 128^2 x^5 that proves
        // global nonnegativity.
        let mut worst = 0.0f64;
        for &x in &GridSpec::log_spaced_x(0.01, 100.0, 400) {
            let (p, q) = (gh_poly_lhs(x), gh_poly_rhs(x));
            worst = worst.max((p - q).abs() / p.abs().max(q.abs()).max(1.0));
        }
        poly_max = Some(worst);
    }

    // First-derivative checks at x = 1 above use finite differences, whose
    // own error dominates the exact-zero claim; allow the FD tolerance there.
    let values_ok = acc.value_max <= FD_TOL;
    let passed = acc.max_d1 <= FD_TOL
        && acc.max_d2 <= FD_TOL
        && acc.sign_violations == 0
        && values_ok
        && poly_max.is_none_or(|p| p <= POLY_TOL);

    Ok(DerivativeCheckResult {
        id,
        points: acc.points,
        max_d1_rel_err: acc.max_d1,
        max_d2_rel_err: acc.max_d2,
        sign_violations: acc.sign_violations,
        value_check_max_abs: acc.value_max,
        poly_identity_max_rel: poly_max,
        passed,
    })
}

/// Default grids for [`check_derivative_formulas`]: log-spaced `x` strictly
/// inside the domain, `v` uniform with endpoints excluded.
pub fn default_derivative_grids(id: ScalarLemmaId) -> Vec<GridSpec> {
    let nv = 19;
    match id {
        ScalarLemmaId::LemmaV => vec![GridSpec::new(
            GridSpec::log_spaced_x(1.02, 20.0, 40),
            GridSpec::uniform_open_v(0.0, 1.0, nv),
        )],
        ScalarLemmaId::LemmaVi => vec![GridSpec::new(
            GridSpec::log_spaced_x(0.05, 0.98, 40),
            GridSpec::uniform_open_v(0.0, 1.0, nv),
        )],
        ScalarLemmaId::LemmaV2 => vec![
            GridSpec::new(
                GridSpec::log_spaced_x(1.02, 20.0, 40),
                GridSpec::uniform_open_v(0.5, 1.0, nv),
            ),
            GridSpec::new(
                GridSpec::log_spaced_x(0.05, 0.98, 40),
                GridSpec::uniform_open_v(0.0, 0.5, nv),
            ),
        ],
        ScalarLemmaId::Gh => vec![GridSpec::new(
            GridSpec::log_spaced_x(0.05, 20.0, 60),
            Vec::new(),
        )],
        _ => Vec::new(),
    }
}

/// A certified point where the Remark's claimed bound fails.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CounterexamplePoint {
    pub x: f64,
    pub v: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
}

fn remark_gap(x: f64, v: f64) -> f64 {
    let b = ScalarLemmaId::Remark.bounds(x, v);
    b.middle - b.upper.unwrap()
}

fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, iters: usize) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d);
        }
    }
    if fc > fd {
        c
    } else {
        d
    }
}

/// Scans `gap = lhs - rhs` of the Remark's inequality on an inclusive grid,
/// then sharpens the best point by coordinate-wise golden-section ascent
/// (60 alternating passes over brackets of one grid cell).
///
/// Ranges must lie inside regime (i) `x >= 1, v in [1/2, 1]` or regime (ii)
/// `0 < x <= 1, v in [0, 1/2]`. Returns `None` when no grid point beats
/// [`REMARK_VIOLATION_THRESHOLD`].
pub fn search_remark_counterexample(
    x_range: (f64, f64),
    v_range: (f64, f64),
    resolution: (usize, usize),
) -> Result<Option<CounterexamplePoint>> {
    let (x_lo, x_hi) = x_range;
    let (v_lo, v_hi) = v_range;
    if !(x_lo.is_finite() && x_hi.is_finite() && x_lo <= x_hi) {
        return Err(Error::EmptyRange("x"));
    }
    if !(v_lo.is_finite() && v_hi.is_finite() && v_lo <= v_hi) {
        return Err(Error::EmptyRange("v"));
    }
    if resolution.0 == 0 || resolution.1 == 0 {
        return Err(Error::EmptyRange("resolution"));
    }
    let in_regime_i = x_lo >= 1.0 && v_lo >= 0.5 && v_hi <= 1.0;
    let in_regime_ii = x_lo > 0.0 && x_hi <= 1.0 && v_hi <= 0.5;
    if !(in_regime_i || in_regime_ii) {
        return Err(Error::RangeOutsideRegime(
            "need x >= 1 with v in [1/2, 1], or 0 < x <= 1 with v in [0, 1/2]",
        ));
    }

    let axis = |lo: f64, hi: f64, n: usize| -> Vec<f64> {
        if n == 1 || lo == hi {
            vec![lo]
        } else {
            (0..n)
                .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
                .collect()
        }
    };
    let xs = axis(x_lo, x_hi, resolution.0);
    let vs = axis(v_lo, v_hi, resolution.1);

    let mut best = (xs[0], vs[0], remark_gap(xs[0], vs[0]));
    for &x in &xs {
        for &v in &vs {
            let g = remark_gap(x, v);
            if g > best.2 {
                best = (x, v, g);
            }
        }
    }
    if best.2 <= REMARK_VIOLATION_THRESHOLD {
        return Ok(None);
    }

    // Local ascent around the best grid point, one grid cell per bracket.
    let cell_x = if xs.len() > 1 { xs[1] - xs[0] } else { 0.0 };
    let cell_v = if vs.len() > 1 { vs[1] - vs[0] } else { 0.0 };
    let (mut bx, mut bv, mut bg) = best;
    for pass in 0..60 {
        if pass % 2 == 0 && cell_x > 0.0 {
            let lo = (bx - cell_x).max(x_lo);
            let hi = (bx + cell_x).min(x_hi);
            let cand = golden_max(|x| remark_gap(x, bv), lo, hi, 40);
            if remark_gap(cand, bv) > bg {
                bx = cand;
                bg = remark_gap(bx, bv);
            }
        } else if cell_v > 0.0 {
            let lo = (bv - cell_v).max(v_lo);
            let hi = (bv + cell_v).min(v_hi);
            let cand = golden_max(|v| remark_gap(bx, v), lo, hi, 40);
            if remark_gap(bx, cand) > bg {
                bv = cand;
                bg = remark_gap(bx, bv);
            }
        }
    }

    let b = ScalarLemmaId::Remark.bounds(bx, bv);
    Ok(Some(CounterexamplePoint {
        x: bx,
        v: bv,
        lhs: b.middle,
        rhs: b.upper.unwrap(),
        gap: b.middle - b.upper.unwrap(),
    }))
}
