//! Closed forms of the limiting gap laws `g₁` and `g₂`.
//!
//! `g_k(λ₁,…,λ_k)` is the limiting proportion (as `Q → ∞`, averaged over
//! `α`) of positions where `k` consecutive gaps are at least `λ₁/Q, …, λ_k/Q`
//! long. `g₁` is piecewise elementary with breakpoints at `λ = 1, 2`;
//! `g₂(λ₁, λ₂)` is symmetric and piecewise built from dilogarithms on seven
//! plane regions `A–G` (ordered so `a = max λᵢ`, `b = min λᵢ`):
//!
//! * `A`: `a + b ≤ 1` — both thresholds small, the law is linear;
//! * `B`: `a + b ≥ 1`, `a ≤ 1`;
//! * `C`: `1 ≤ a ≤ 2`, `b ≤ 1`, `a + b ≤ 2`;
//! * `D`: `1 ≤ a ≤ 2`, `b ≤ 1`, `a + b ≥ 2`;
//! * `E`: `1 ≤ b`, `a ≤ 2`;
//! * `F`: `a ≥ 2`, `b ≤ 1`;
//! * `G`: `a ≥ 2`, `b ≥ 1` — no pair of consecutive gaps can be this long,
//!   so `g₂ = 0`.
//!
//! The region inequalities and the `D`, `E`, `F` expressions were
//! reconstructed symbolically from the defining word-measure integrals and
//! validated against adaptive quadrature of those integrals; the test suite
//! pins dozens of frozen reference values.
//!
//! Everything here is plain `f64`: these are limit laws, not exact
//! finite-`Q` quantities (those live in [`crate::arc_measure`]).

use std::fmt;

use crate::dilog::li2_real;
use crate::{Error, Result, INV_ZETA2, ZETA2};

/// Boundary-detection skin and the nudge used to keep formula evaluation
/// strictly inside an open region (avoids `0 · ln 0` at seam points).
const EPS: f64 = 1e-9;

fn ln(x: f64) -> f64 {
    x.ln()
}

const LN_2: f64 = std::f64::consts::LN_2;

// ---------------------------------------------------------------------------
// Lambda vectors
// ---------------------------------------------------------------------------

/// A validated vector of gap thresholds `(λ₁, …, λ_k)`, `k ≥ 1`.
///
/// Thresholds are finite and non-negative; `k` is the word length the vector
/// is paired with.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaVector {
    values: Vec<f64>,
}

impl LambdaVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter(
                "lambda vector must have at least one entry".into(),
            ));
        }
        for &v in &values {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "lambda entries must be finite and non-negative, got {v}"
                )));
            }
        }
        Ok(LambdaVector { values })
    }

    pub fn single(lambda: f64) -> Result<Self> {
        LambdaVector::new(vec![lambda])
    }

    pub fn k(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(0.0, f64::max)
    }

    /// The thresholds rounded to the exact-arithmetic grid of denominator
    /// `10⁶` used by the rational per-arc evaluations, as `(numerator, 10⁶)`
    /// pairs. Values cap at `10⁷` — beyond that every finite-order gap
    /// condition is already unsatisfiable for the supported orders.
    pub fn quantized_micro(&self) -> Vec<(i64, i64)> {
        self.values
            .iter()
            .map(|&v| ((v.min(1e7) * 1e6).round() as i64, 1_000_000i64))
            .collect()
    }
}

impl fmt::Display for LambdaVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

// ---------------------------------------------------------------------------
// g1
// ---------------------------------------------------------------------------

/// The limiting one-gap law: the asymptotic proportion of gaps of length at
/// least `λ/Q`.
///
/// Piecewise: `1 − λ/ζ(2)` on `[0,1]`, a dilogarithm expression on `[1,2]`,
/// and another on `[2,∞)`; continuous, strictly decreasing on `(0, ∞)` until
/// it vanishes only in the limit. `g1(λ) = 1` for `λ ≤ 0`; NaN propagates.
pub fn g1(lambda: f64) -> f64 {
    if lambda.is_nan() {
        return f64::NAN;
    }
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.0 {
        return INV_ZETA2 * (ZETA2 - lambda);
    }
    if lambda == 1.0 {
        return INV_ZETA2 * (ZETA2 - 1.0);
    }
    let l = lambda;
    if l < 2.0 {
        let br = LN_2 * LN_2 - 4.0 * ZETA2 - 1.0
            + (l / 2.0 - 2.0 / l) * ln((2.0 - l) / (l - 1.0))
            + 1.5 * l * ln(l / (l - 1.0))
            - ln(4.0 / l) * ln(l)
            + 4.0 * li2_real(1.0 / l)
            + 2.0 * li2_real(l / 2.0);
        return INV_ZETA2 * br;
    }
    if l == 2.0 {
        // Two-sided limit of the adjacent branches.
        return INV_ZETA2 * (3.0 * LN_2 - 2.0 * LN_2 * LN_2 - 1.0);
    }
    let br = -1.0
        + (l / 2.0 - 2.0 / l) * ln((l - 2.0) / (l - 1.0))
        + 1.5 * l * ln(l / (l - 1.0))
        + 4.0 * li2_real(1.0 / l)
        - 2.0 * li2_real(2.0 / l);
    INV_ZETA2 * br
}

/// The contribution of a single `A` (equivalently, by symmetry of the
/// underlying measure, a single `B`) gap type to `g1`:
/// `g1 = 2·(g1_piece_a + g1_piece_c)`.
pub fn g1_piece_a(lambda: f64) -> f64 {
    let l = lambda.max(0.0);
    if l <= 1.0 {
        return INV_ZETA2 * (ZETA2 - 1.0 - l / 2.0);
    }
    INV_ZETA2 * (-1.0 - 1.0 / (2.0 * l) + (1.0 - l) * ln(1.0 - 1.0 / l) + li2_real(1.0 / l))
}

/// The `C`-type companion piece of [`g1_piece_a`]; see there.
pub fn g1_piece_c(lambda: f64) -> f64 {
    let l = lambda.max(0.0);
    if l <= 1.0 {
        return INV_ZETA2 * (1.0 - ZETA2 / 2.0);
    }
    if l < 2.0 {
        return INV_ZETA2
            * (0.5 - 2.0 * ZETA2
                + LN_2 * LN_2 / 2.0
                + 1.0 / (2.0 * l)
                + l / 4.0 * ln(2.0 / l - 1.0)
                - (1.0 / l) * ln((2.0 - l) / (l - 1.0))
                - ln((l - 1.0) / l)
                + 0.5 * ln(l / 4.0) * ln(l)
                + li2_real(1.0 / l)
                + li2_real(l / 2.0));
    }
    if l == 2.0 {
        // Two-sided limit at the breakpoint.
        return INV_ZETA2 * (0.75 - ZETA2 / 2.0 - LN_2 * LN_2 / 2.0 + LN_2 / 2.0);
    }
    INV_ZETA2
        * (0.5 + 1.0 / (2.0 * l) + l / 4.0 * ln(1.0 - 2.0 / l) - ln(1.0 - 1.0 / l)
            + (1.0 / l) * ln((l - 1.0) / (l - 2.0))
            + li2_real(1.0 / l)
            - li2_real(2.0 / l))
}

/// The density of the limiting gap-length distribution at normalized length
/// `x`: `g1(λ) = ∫₀^{1/λ} density(x) x⁻² dx`, equivalently
/// `density(x) = −g1′(1/x)`.
///
/// Constant `6/π²` for `x ≥ 1`; errors on `x ≤ 0` or NaN.
pub fn g1_density(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "gap-length density requires x > 0, got {x}"
        )));
    }
    if x >= 1.0 {
        return Ok(INV_ZETA2);
    }
    // The two log factors vanish quadratically at their kinks; guard the
    // exact kink points where f64 would produce 0 · (-inf).
    let u = 1.0 - x;
    let v = 1.0 - 2.0 * x;
    let log_u = if u == 0.0 {
        0.0
    } else {
        2.0 * u * u * ln(u.abs())
    };
    let log_v = if v == 0.0 {
        0.0
    } else {
        0.5 * v * v * ln(v.abs())
    };
    Ok(INV_ZETA2 * (x + log_u - log_v))
}

/// Recovers `g1(λ)` by integrating the density: `∫₀^{1/λ} density(x)/x² dx`,
/// with adaptive Simpson quadrature split at the density kinks `x = ½, 1`.
///
/// Agrees with [`g1`] to well below `1e-8`; errors on `λ ≤ 0` or NaN.
pub fn g1_from_density(lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "density integration requires lambda > 0, got {lambda}"
        )));
    }
    let upper = 1.0 / lambda;
    let integrand = |x: f64| -> f64 {
        if x <= 0.0 {
            return 0.0; // integrand extends continuously by 0 (density = O(x³))
        }
        g1_density(x).unwrap_or(f64::NAN) / (x * x)
    };
    let mut knots = vec![0.0];
    for k in [0.5, 1.0] {
        if k < upper {
            knots.push(k);
        }
    }
    knots.push(upper);
    let mut total = 0.0;
    for w in knots.windows(2) {
        total += adaptive_simpson(&integrand, w[0], w[1], 1e-11);
    }
    Ok(total)
}

/// Adaptive Simpson with Richardson acceptance; `tol` is an absolute target
/// for the whole interval.
fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)] // carries the full Richardson state
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1)
            + recurse(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1)
    }
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, m, fm, whole, tol, 48)
}

// ---------------------------------------------------------------------------
// Region classification
// ---------------------------------------------------------------------------

/// The seven open regions of the ordered quadrant `a = max λᵢ ≥ b = min λᵢ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Region::A => "A",
            Region::B => "B",
            Region::C => "C",
            Region::D => "D",
            Region::E => "E",
            Region::F => "F",
            Region::G => "G",
        })
    }
}

/// Where a threshold pair `(λ₁, λ₂)` sits: its base region, whether it is
/// the mirrored (`λ₂ > λ₁`, displayed with a prime) copy, and whether it
/// lies within `1e-9` of a region boundary.
///
/// Displays as `"C"`, `"C'"`, `"boundary-of-C"`, or `"boundary-of-C'"`. The
/// diagonal `λ₁ = λ₂` is not a boundary (the formulas are analytic across
/// it); ties display unprimed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RegionLabel {
    region: Region,
    mirrored: bool,
    on_boundary: bool,
}

impl RegionLabel {
    pub fn region(&self) -> Region {
        self.region
    }

    /// True when `λ₂ > λ₁` strictly.
    pub fn mirrored(&self) -> bool {
        self.mirrored
    }

    pub fn on_boundary(&self) -> bool {
        self.on_boundary
    }
}

impl fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.on_boundary {
            write!(f, "boundary-of-")?;
        }
        write!(f, "{}", self.region)?;
        if self.mirrored {
            write!(f, "'")?;
        }
        Ok(())
    }
}

/// The region chain on ordered coordinates; boundaries (ties) resolve to the
/// earlier region in the chain.
fn base_region(a: f64, b: f64) -> Region {
    if a + b <= 1.0 {
        Region::A
    } else if a <= 1.0 {
        Region::B
    } else if b >= 1.0 {
        if a < 2.0 {
            Region::E
        } else {
            Region::G
        }
    } else if a >= 2.0 {
        Region::F
    } else if a + b >= 2.0 {
        Region::D
    } else {
        Region::C
    }
}

/// Classifies `(λ₁, λ₂)` into a region label; see [`RegionLabel`].
///
/// Errors on non-finite input. Negative thresholds clamp to `0` (the
/// constraint is vacuous there).
pub fn classify_region(lambda1: f64, lambda2: f64) -> Result<RegionLabel> {
    if !lambda1.is_finite() || !lambda2.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "thresholds must be finite, got ({lambda1}, {lambda2})"
        )));
    }
    let mirrored = lambda2 > lambda1;
    let a = lambda1.max(lambda2).max(0.0);
    let b = lambda1.min(lambda2).max(0.0);
    // Every seam of the region chain, in ordered coordinates. (The listed
    // ranges are automatic for 0 ≤ b ≤ a, so plain distance tests suffice;
    // the diagonal a = b is deliberately absent.)
    let on_boundary = b <= EPS
        || (a + b - 1.0).abs() <= EPS
        || (a - 1.0).abs() <= EPS
        || (a + b - 2.0).abs() <= EPS
        || (b - 1.0).abs() <= EPS
        || (a - 2.0).abs() <= EPS;
    Ok(RegionLabel {
        region: base_region(a, b),
        mirrored,
        on_boundary,
    })
}

// ---------------------------------------------------------------------------
// g2 region formulas (ordered arguments a ≥ b, strictly inside each region)
// ---------------------------------------------------------------------------

fn g2_region_a(a: f64, b: f64) -> f64 {
    INV_ZETA2 * (ZETA2 - a - b / 2.0)
}

fn g2_region_b(a: f64, b: f64) -> f64 {
    let br = ZETA2 - 2.0 + a + 1.5 * b - 2.0 * li2_real(a)
        + 2.0 * li2_real(1.0 - b)
        + (1.0 / b + 1.0 / a) * ln(a + b)
        + (1.0 / a - a) * ln((1.0 - a) / b)
        + ln((1.0 - b) / a) * (-b + 1.0 / b + 2.0 * ln(b));
    INV_ZETA2 * br
}

fn g2_region_c(a: f64, b: f64) -> f64 {
    let br = 1.5 * b - 2.0 * ZETA2 - 1.0
        + LN_2 * LN_2
        + (2.0 / a - 2.0 * a) * ln(a - 1.0)
        + (a / 2.0 - 2.0 / a) * ln(2.0 - a)
        + (a / 2.0 - 2.0 / b) * ln(a)
        + (1.0 / b + 1.0 / a) * ln(a + b)
        + (a - b + 1.0 / b - 1.0 / a) * ln(a - b)
        + ln(a) * ln(a)
        + (b - 2.0 * ln(2.0 * b)) * ln(a)
        + (2.0 * ln(a - b) - 2.0 * ln(1.0 - b)) * ln(b)
        + 2.0 * li2_real(1.0 / a)
        + 2.0 * li2_real(a / 2.0)
        - 2.0 * li2_real(b)
        + 2.0 * li2_real((b - 1.0) / (b - a))
        - 2.0 * li2_real(a * (b - 1.0) / (b - a));
    INV_ZETA2 * br
}

fn g2_region_d(a: f64, b: f64) -> f64 {
    let br = -5.0 * ZETA2 - a / 2.0
        + b
        + (-a + b + 2.0 / a) * LN_2
        + (3.0 / a - 3.0 * a) * ln(a - 1.0)
        + (2.0 / a - a / 2.0 - 2.0 * LN_2) * ln(b)
        + (a - 4.0 / a) * ln(2.0 - a)
        + 2.0 * (a - b + 1.0 / b - 1.0 / a) * ln(a - b)
        + (a / 2.0 + b - 2.0 / b) * ln(a)
        + (b - 1.0 / b) * ln(1.0 - b)
        + ln(a) * ln(a)
        - 2.0 * ln(2.0 - a + b) * ln(a)
        + 2.0 * ln(a - b) * ln(b)
        + 2.0 * LN_2 * ln(2.0 - a + b)
        + 4.0 * li2_real(1.0 / a)
        + 2.0 * li2_real(a / 2.0)
        + 2.0 * li2_real(1.0 - b)
        + 2.0 * li2_real(b)
        - 2.0 * li2_real(2.0 * b / (a * (2.0 - a + b)))
        + 2.0 * li2_real((b - 1.0) / (b - a))
        + 2.0 * li2_real(b / (2.0 - a + b))
        - 2.0 * li2_real((2.0 - a + b) / 2.0)
        - 2.0 * li2_real((a - a * b) / (a - b));
    INV_ZETA2 * br
}

fn g2_region_e(a: f64, b: f64) -> f64 {
    let br = (-3.0 * a - 12.0 * ZETA2 + 6.0) / 6.0 + (-a + b + 2.0 / a) * LN_2 - LN_2 * LN_2
        + ln(a) * ln(a)
        + (a / 2.0 - b + 1.0 / b - 2.0 / a + 2.0 * LN_2) * ln(2.0 * b - a)
        + (1.0 / a - a) * ln(a - 1.0)
        + (a / 2.0 - 2.0 / a) * ln(2.0 - a)
        + (a / 2.0 - 1.0 / b) * ln(a)
        + (b - 1.0 / b) * ln(b - 1.0)
        + 2.0 * LN_2 * (ln(2.0 - a + b) - ln(1.0 - a + b))
        + ln(b) * (-a / 2.0 + 2.0 / a - 2.0 * LN_2)
        + (2.0 * ln(b) + 2.0 * ln(1.0 - a + b)) * ln(a)
        - (2.0 * ln(2.0 - a + b) + 2.0 * ln(2.0 * b - a)) * ln(a)
        + 2.0 * li2_real(1.0 / a)
        + 2.0 * li2_real(a / 2.0)
        - 2.0 * li2_real((a - 2.0 * b) / (2.0 * (a - b - 1.0)))
        + 2.0 * li2_real((a - 2.0 * b) / (a * (a - b - 1.0)))
        - 2.0 * li2_real((a - b - 1.0) / (a - 2.0 * b))
        - 2.0 * li2_real(-2.0 * b / (a * (a - b - 2.0)))
        + 2.0 * li2_real((a - b - 1.0) * b / (a - 2.0 * b))
        + 2.0 * li2_real(b / (-a + b + 2.0))
        - 2.0 * li2_real((-a + b + 2.0) / 2.0);
    INV_ZETA2 * br
}

fn g2_region_f(a: f64, b: f64) -> f64 {
    let br = b - 3.0 * ZETA2 - 1.0
        + LN_2 * LN_2
        + 2.0 * LN_2 * ln(a - b - 1.0)
        + (2.0 / a - 2.0 * a) * ln(a - 1.0)
        + (a / 2.0 - 2.0 / a) * ln(a - 2.0)
        + 2.0 * (a - b + 1.0 / b - 1.0 / a) * ln(a - b)
        + (b - 1.0 / b) * ln(a)
        + ln(a - 2.0 * b) * (-a / 2.0 + b - 1.0 / b + 2.0 / a - 2.0 * LN_2)
        + 2.0 * ln(a) * (ln(a - 2.0 * b) - ln(a - b - 1.0) - ln(b))
        + 2.0 * ln(a - b) * ln(b)
        + 2.0 * li2_real(1.0 / a)
        + 2.0 * li2_real(1.0 - b)
        + 2.0 * li2_real((a - 2.0 * b) / (2.0 * (a - b - 1.0)))
        - 2.0 * li2_real((a - 2.0 * b) / (a * (a - b - 1.0)))
        + 2.0 * li2_real((a - b - 1.0) / (a - 2.0 * b))
        + 2.0 * li2_real(b)
        - 2.0 * li2_real((a - b - 1.0) * b / (a - 2.0 * b))
        + 2.0 * li2_real((b - 1.0) / (b - a))
        - 2.0 * li2_real((a - a * b) / (a - b));
    INV_ZETA2 * br
}

/// The limiting two-gap law `g₂(λ₁, λ₂)`: the asymptotic proportion of
/// positions whose gap is at least `λ₁/Q` long *and* whose successor gap is
/// at least `λ₂/Q` long.
///
/// Symmetric in its arguments (exactly, by construction); `g₂(λ, 0) = g1(λ)`
/// (a vacuous second constraint); identically `0` on region `G`. Negative
/// thresholds clamp to `0`; NaN propagates.
///
/// Seam points are evaluated by nudging `1e-9` into the adjacent open
/// region, which is far below the `f64` accuracy of the expressions
/// themselves; the result is clamped to `[0, 1]`.
pub fn g2(lambda1: f64, lambda2: f64) -> f64 {
    if lambda1.is_nan() || lambda2.is_nan() {
        return f64::NAN;
    }
    let a = lambda1.max(lambda2).max(0.0);
    let b = lambda1.min(lambda2).max(0.0);
    // Marginal shortcut: a vacuous second threshold reduces to g1 exactly
    // (the region-B expression also degenerates numerically as b → 0).
    if b <= EPS {
        return g1(a);
    }
    let value = match base_region(a, b) {
        Region::A => g2_region_a(a, b),
        Region::B => {
            let a2 = a.min(1.0 - EPS);
            let b2 = b.min(a2);
            g2_region_b(a2, b2)
        }
        Region::C => {
            let a2 = a.clamp(1.0 + EPS, 2.0 - EPS);
            let b2 = b.min(1.0 - EPS).min(2.0 - EPS - a2);
            g2_region_c(a2, b2)
        }
        Region::D => {
            let a2 = a.clamp(1.0 + EPS, 2.0 - EPS);
            let b2 = b.min(1.0 - EPS);
            g2_region_d(a2, b2)
        }
        Region::E => {
            let a2 = a.clamp(1.0 + 2.0 * EPS, 2.0 - EPS);
            let b2 = b.clamp(1.0 + EPS, a2);
            g2_region_e(a2, b2)
        }
        Region::F => {
            let a2 = a.max(2.0 + EPS);
            let b2 = b.min(1.0 - EPS);
            g2_region_f(a2, b2)
        }
        Region::G => 0.0,
    };
    value.clamp(0.0, 1.0)
}
