//! Real dilogarithm `Li₂(x) = Σ_{n≥1} xⁿ/n²`.
//!
//! The direct series converges fast only on `|x| ≤ 1/2`, so evaluation maps
//! every real argument into that disk with the standard functional equations:
//!
//! * reflection, for `x ∈ (1/2, 1)`:   `Li₂(x) = π²/6 − ln x · ln(1−x) − Li₂(1−x)`
//! * Landen, for `x ∈ (−1, −1/2)`:     `Li₂(x) = −Li₂(x/(x−1)) − ln²(1−x)/2`
//! * inversion, for `x < −1`:          `Li₂(x) = −π²/6 − ln²(−x)/2 − Li₂(1/x)`
//!
//! For `x > 1` the dilogarithm is complex; the real part of the analytic
//! continuation, `Re Li₂(x) = π²/3 − ln²x/2 − Li₂(1/x)`, is returned with an
//! explicit flag so that callers can reject accidental complex arguments.

use crate::{Error, Result};
use std::f64::consts::PI;

/// A dilogarithm evaluation: the argument, the value, and whether the value
/// is only the real part of a complex number (true exactly when `argument > 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DilogValue {
    /// The point at which `Li₂` was evaluated.
    pub argument: f64,
    /// `Li₂(argument)`, or its real part when `argument > 1`.
    pub value: f64,
    /// Set when `argument > 1` and the imaginary part `−π·ln(argument)` was dropped.
    pub real_part_only: bool,
}

/// Evaluates `Li₂(x)`, flagging arguments beyond 1 where only the real part
/// of the analytic continuation is returned.
///
/// Errors on NaN input; every other real argument (including infinities) is
/// accepted.
pub fn li2(x: f64) -> Result<DilogValue> {
    if x.is_nan() {
        return Err(Error::InvalidParameter("li2 argument is NaN".into()));
    }
    Ok(DilogValue {
        argument: x,
        value: li2_real(x),
        real_part_only: x > 1.0,
    })
}

/// Evaluates `Li₂(x)`, erroring when `x > 1` (where the value is complex).
pub fn li2_strict(x: f64) -> Result<f64> {
    let v = li2(x)?;
    if v.real_part_only {
        return Err(Error::ComplexDilog {
            argument: x,
            real_part: v.value,
        });
    }
    Ok(v.value)
}

/// Total real-valued evaluation: `Li₂(x)` for `x ≤ 1` and the real part of
/// the continuation for `x > 1`. NaN propagates. This is the workhorse used
/// by the closed-form module, whose region classification guarantees that
/// any argument beyond 1 appears only where imaginary parts cancel.
pub fn li2_real(x: f64) -> f64 {
    const PI2_6: f64 = PI * PI / 6.0;
    if x.is_nan() {
        return f64::NAN;
    }
    if x == 0.0 {
        0.0
    } else if x == 1.0 {
        PI2_6
    } else if x == -1.0 {
        -PI2_6 / 2.0
    } else if x.abs() <= 0.5 {
        series(x)
    } else if x > 1.0 {
        // Real part of the inversion x ↦ 1/x into (0, 1).
        2.0 * PI2_6 - 0.5 * x.ln().powi(2) - li2_real(1.0 / x)
    } else if x > 0.5 {
        // Reflection x ↦ 1−x into (0, 1/2).
        PI2_6 - x.ln() * (1.0 - x).ln() - series(1.0 - x)
    } else if x >= -1.0 {
        // Landen x ↦ x/(x−1); for x ∈ [−1, −1/2) the image lies in (1/3, 1/2].
        -series(x / (x - 1.0)) - 0.5 * (1.0 - x).ln().powi(2)
    } else {
        // Inversion x ↦ 1/x into (−1, 0), possibly followed by one Landen step.
        -PI2_6 - 0.5 * (-x).ln().powi(2) - li2_real(1.0 / x)
    }
}

/// Direct series on `|x| ≤ 1/2`: at worst ~60 terms to machine precision.
fn series(x: f64) -> f64 {
    let mut sum = 0.0;
    let mut power = 1.0;
    for n in 1..200u32 {
        power *= x;
        let term = power / f64::from(n * n);
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-3) {
            break;
        }
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    const PI2_6: f64 = PI * PI / 6.0;

    /// Slow but independent: sum the defining series until it is exhausted
    /// at machine precision (valid for |x| < 1).
    fn series_oracle(x: f64) -> f64 {
        let mut sum = 0.0;
        let mut power = 1.0;
        for n in 1..20_000u64 {
            power *= x;
            let term = power / ((n * n) as f64);
            sum += term;
            if term.abs() < 1e-20 {
                break;
            }
        }
        sum
    }

    #[test]
    fn special_values() {
        assert_eq!(li2_real(0.0), 0.0);
        assert!((li2_real(1.0) - PI2_6).abs() < 1e-15);
        assert!((li2_real(-1.0) + PI2_6 / 2.0).abs() < 1e-15);
        let half = PI * PI / 12.0 - 0.5 * std::f64::consts::LN_2.powi(2);
        assert!((li2_real(0.5) - half).abs() < 1e-15);
    }

    #[test]
    fn reference_values() {
        // 22-digit reference evaluations of Li2 (arbitrary-precision oracle).
        let table = [
            (-3.0, -1.939375420766708953077),
            (-1.0, -0.8224670334241132182362),
            (-0.9, -0.7521631792172616362083),
            (-0.5, -0.4484142069236462024431),
            (-0.25, -0.2359002976862634538211),
            (-0.1, -0.09760523522932158913188),
            (0.1, 0.1026177910993911369625),
            (0.25, 0.2676526390827326069192),
            (0.5, 0.5822405264650125059027),
            (0.9, 1.29971472300495878198),
            (0.99, 1.588625448076375285716),
            (1.0, 1.644934066848226436472),
        ];
        for (x, want) in table {
            let got = li2_real(x);
            assert!((got - want).abs() < 2e-15, "li2({x}) = {got}, want {want}");
        }
        // Real parts beyond 1 (continuation; imaginary part dropped).
        let continued = [
            (1.5, 2.374395270272480200677),
            (2.0, 2.467401100272339654709),
            (3.0, 2.320180423313098396406),
        ];
        for (x, want) in continued {
            let v = li2(x).unwrap();
            assert!(v.real_part_only, "li2({x}) must be flagged");
            assert!(
                (v.value - want).abs() < 2e-15,
                "Re li2({x}) = {}, want {want}",
                v.value
            );
        }
    }

    #[test]
    fn series_consistency() {
        // The implementation must agree with the defining series summed to
        // exhaustion (for ±0.9 the series needs well over 200 terms to reach
        // 1e-13, so the oracle runs until its terms vanish).
        for x in [-0.9, -0.5, -0.1, 0.1, 0.5, 0.9] {
            let want = series_oracle(x);
            assert!((li2_real(x) - want).abs() < 1e-13, "series mismatch at {x}");
        }
    }

    #[test]
    fn reflection_identity() {
        for i in 1..100 {
            let x = f64::from(i) / 100.0;
            let lhs = li2_real(x) + li2_real(1.0 - x);
            let rhs = PI2_6 - x.ln() * (1.0 - x).ln();
            assert!((lhs - rhs).abs() < 1e-12, "reflection fails at {x}");
        }
    }

    #[test]
    fn landen_identity() {
        // Li2(x) + Li2(x/(x−1)) = −ln²(1−x)/2 on x < 1, probing both the
        // series and the reflection branches.
        for x in [-0.95, -0.7, -0.3, 0.2, 0.45] {
            let lhs = li2_real(x) + li2_real(x / (x - 1.0));
            let rhs = -0.5 * (1.0 - x).ln().powi(2);
            assert!((lhs - rhs).abs() < 1e-14, "landen fails at {x}");
        }
    }

    #[test]
    fn monotone_on_unit_interval() {
        let mut prev = 0.0;
        for i in 1..=1000 {
            let v = li2_real(f64::from(i) / 1000.0);
            assert!(v > prev, "Li2 must increase on [0,1], broke at i={i}");
            prev = v;
        }
    }

    #[test]
    fn nan_rejected_infinities_pass_through() {
        assert!(li2(f64::NAN).is_err());
        assert_eq!(li2_real(f64::NEG_INFINITY), f64::NEG_INFINITY);
    }

    #[test]
    fn strict_mode_flags_continuation() {
        assert!(li2_strict(1.0).is_ok());
        assert!(li2_strict(0.3).is_ok());
        match li2_strict(2.0) {
            Err(Error::ComplexDilog { real_part, .. }) => {
                assert!((real_part - PI * PI / 4.0).abs() < 1e-14);
            }
            other => panic!("expected ComplexDilog, got {other:?}"),
        }
    }
}
