//! Exact finite-`Q` gap-word measures on Farey arcs and their assemblies.
//!
//! On the arc between consecutive Farey fractions `a₁/q₁ < a₂/q₂` of order
//! `Q`, the substitution `α = a₁/q₁ + t/(q₁q₂)` maps the arc to `t ∈ (0,1)`
//! and makes the normalized gap lengths affine in `t`: with `x = q₁/Q`,
//! `y = q₂/Q`,
//!
//! * `A`-gaps have length `t/q₂`, so `A ≥ λ/Q ⟺ t ≥ λy`,
//! * `B`-gaps have length `(1−t)/q₁`, so `B ≥ λ/Q ⟺ t ≤ 1 − λx`,
//! * `C = A + B`, giving a half-line whose side depends on `sign(x − y)`.
//!
//! The positions carrying each gap word do not move with `t`, so the arc
//! integral of "proportion of positions whose `k` consecutive gaps clear the
//! thresholds" is a finite sum `Σ_w freq(w) · |⋂ⱼ χ(wⱼ, λⱼ)| / (q₁q₂)` —
//! computed here in exact integer arithmetic (thresholds are first rounded
//! to the `10⁻⁶` grid so every interval endpoint is a fraction over one
//! common denominator).
//!
//! Summing over the arcs inside `[β, β+η]` and dividing by `η` gives the
//! finite-`Q` averages `g_k^{β,η}(λ; Q)`; the same quantities are estimated
//! independently by Monte Carlo over `α` ([`monte_carlo_gk`]), and their
//! `Q → ∞` limits are produced by adaptive quadrature of the word measures
//! against the `(6/π²)/(xy)` density on the triangle `x + y ≥ 1`
//! ([`quadrature_gk`]). [`lemma2_discrepancy`] measures how fast plain
//! Farey-pair sums approach that density — the mechanism behind the limit.

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::fmt;

use crate::closed_forms::LambdaVector;
use crate::dilog::li2_real;
use crate::farey::{covered_span, enumerate_farey_arcs, farey_neighbors, AlphaValue, FareyPair};
use crate::quadrature::{
    cut_triangles, integrate_triangles, pairwise_sum, QuadratureResult, Triangle,
};
use crate::three_gap::{gap_type_cycle, GapSymbol, GapWord};
use crate::{Error, Result, INV_ZETA2};

/// Threshold quantization denominator (see [`LambdaVector::quantized_micro`]).
const MICRO: i128 = 1_000_000;

/// Largest order for which the exact `i128` per-arc arithmetic is
/// guaranteed not to overflow (the worst-case common denominator is
/// `10⁶·Q⁵ < 2¹²⁶` up to here, with room to spare).
const MAX_EXACT_ORDER: u64 = 1_000_000;

/// Streaming chunk of arcs processed per parallel round.
const ARC_CHUNK: usize = 65_536;

/// Arcs summed sequentially per worker inside a chunk.
const ARC_SUB: usize = 512;

// ---------------------------------------------------------------------------
// Geometry types
// ---------------------------------------------------------------------------

/// An interval of the substitution variable `t`, measured inside `[0, 1]`.
///
/// Bounds may be infinite: a single gap condition contributes a half-line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitInterval1D {
    lower: f64,
    upper: f64,
}

impl UnitInterval1D {
    pub fn new(lower: f64, upper: f64) -> Self {
        UnitInterval1D { lower, upper }
    }

    /// The whole line (a vacuous condition).
    pub fn full() -> Self {
        UnitInterval1D::new(f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn intersect(&self, other: &UnitInterval1D) -> UnitInterval1D {
        UnitInterval1D::new(self.lower.max(other.lower), self.upper.min(other.upper))
    }

    /// Lebesgue measure of the interval clipped to `[0, 1]`.
    pub fn measure(&self) -> f64 {
        (self.upper.min(1.0) - self.lower.max(0.0)).max(0.0)
    }

    pub fn is_empty(&self) -> bool {
        self.measure() == 0.0
    }
}

impl fmt::Display for UnitInterval1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lower == f64::NEG_INFINITY {
            write!(f, "(-inf, ")?;
        } else {
            write!(f, "[{}, ", self.lower)?;
        }
        if self.upper == f64::INFINITY {
            write!(f, "inf)")
        } else {
            write!(f, "{}]", self.upper)
        }
    }
}

/// A point of the closed parameter triangle
/// `T = {(x, y) : 0 ≤ x, y ≤ 1, x + y ≥ 1}` of normalized denominators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrianglePoint {
    x: f64,
    y: f64,
}

impl TrianglePoint {
    /// Validates membership in `T` (with a `1e-12` slack for rounded
    /// coordinates like `q₁/Q`).
    pub fn new(x: f64, y: f64) -> Result<Self> {
        const SLACK: f64 = 1e-12;
        let inside = (-SLACK..=1.0 + SLACK).contains(&x)
            && (-SLACK..=1.0 + SLACK).contains(&y)
            && x + y >= 1.0 - SLACK;
        if !inside {
            return Err(Error::InvalidParameter(format!(
                "({x}, {y}) lies outside the triangle 0 <= x,y <= 1, x+y >= 1"
            )));
        }
        Ok(TrianglePoint { x, y })
    }

    /// The point `(q₁/Q, q₂/Q)` of an arc.
    pub fn from_pair(pair: &FareyPair) -> Self {
        let q = pair.order() as f64;
        TrianglePoint {
            x: pair.q1() as f64 / q,
            y: pair.q2() as f64 / q,
        }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }
}

// ---------------------------------------------------------------------------
// χ intervals and word frequencies (double precision)
// ---------------------------------------------------------------------------

/// The set of `t ∈ (0,1)` where a gap of the given type is at least `λ/Q`
/// long, as an interval (see the module doc for the three half-lines).
///
/// On the diagonal `x = y` the `C` length does not depend on `t` and the
/// half-line degenerates; callers must use the constant-length limit
/// (`C ≥ λ/Q ⟺ λx ≤ 1`) instead, so this returns
/// [`Error::DegenerateDiagonal`] there. Negative `λ` is a vacuous
/// condition; NaN is rejected.
pub fn chi_interval(
    symbol: GapSymbol,
    point: TrianglePoint,
    lambda: f64,
) -> Result<UnitInterval1D> {
    if lambda.is_nan() {
        return Err(Error::InvalidParameter("threshold lambda is NaN".into()));
    }
    let lam = lambda.max(0.0);
    let (x, y) = (point.x(), point.y());
    match symbol {
        GapSymbol::A => Ok(UnitInterval1D::new(lam * y, f64::INFINITY)),
        GapSymbol::B => Ok(UnitInterval1D::new(f64::NEG_INFINITY, 1.0 - lam * x)),
        GapSymbol::C => {
            let d = x - y;
            if d == 0.0 {
                return Err(Error::DegenerateDiagonal { x });
            }
            if d > 0.0 {
                Ok(UnitInterval1D::new(y * (lam * x - 1.0) / d, f64::INFINITY))
            } else {
                Ok(UnitInterval1D::new(
                    f64::NEG_INFINITY,
                    1.0 - x * (lam * y - 1.0) / (y - x),
                ))
            }
        }
    }
}

/// Core of [`gap_word_frequency`], on raw coordinates.
///
/// Positions (in sorted order, scaled to the unit circle) carry gap type
/// `A` on `[0, 1−x)`, `C` on `[1−x, y)` and `B` on `[y, 1)`; reading the
/// next gap advances the position by `+x`, `x−y`, `−y` respectively. The
/// frequency of a word is the measure of starting positions whose whole
/// walk stays in the prescribed classes.
fn word_frequency_xy(symbols: &[GapSymbol], x: f64, y: f64) -> f64 {
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    let mut shift = 0.0f64;
    for &sym in symbols {
        let (a, b, step) = match sym {
            GapSymbol::A => (0.0, 1.0 - x, x),
            GapSymbol::C => (1.0 - x, y, x - y),
            GapSymbol::B => (y, 1.0, -y),
        };
        lo = lo.max(a - shift);
        hi = hi.min(b - shift);
        if hi <= lo {
            return 0.0;
        }
        shift += step;
    }
    hi - lo
}

/// The limiting frequency (proportion of the `Q` circular positions) of a
/// gap word at parameter point `(x, y)`.
///
/// At the arc points `(q₁/Q, q₂/Q)` this equals the exact word count over
/// `Q`: all interval endpoints are multiples of `1/Q`, and the sorted
/// positions hit every multiple exactly once.
pub fn gap_word_frequency(word: &GapWord, point: TrianglePoint) -> f64 {
    word_frequency_xy(word.symbols(), point.x(), point.y())
}

// ---------------------------------------------------------------------------
// Exact per-arc contributions
// ---------------------------------------------------------------------------

/// The exact contribution of one arc to `Σ_arcs ∫_arc (passing proportion) dα`:
/// `Σ_w freq(w) · |⋂ⱼ χ(wⱼ, λⱼ)| / (q₁q₂)` as a rational number.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcContribution {
    pair: FareyPair,
    value: BigRational,
}

impl ArcContribution {
    pub fn pair(&self) -> FareyPair {
        self.pair
    }

    pub fn value(&self) -> &BigRational {
        &self.value
    }

    pub fn value_f64(&self) -> f64 {
        self.value.to_f64().unwrap_or(f64::NAN)
    }
}

/// Integer-endpoint workspace for one arc: all χ endpoints are fractions
/// over `P = 10⁶ · Q · D` with `D = max(|q₁−q₂|, 1)`.
struct ArcScale {
    q: i128,
    q1: i128,
    q2: i128,
    p: i128,
}

impl ArcScale {
    fn new(pair: &FareyPair) -> ArcScale {
        let (q, q1, q2) = (pair.order() as i128, pair.q1() as i128, pair.q2() as i128);
        let d = (q1 - q2).abs().max(1);
        ArcScale {
            q,
            q1,
            q2,
            p: MICRO * q * d,
        }
    }

    /// Intersects `[lo, hi]` (numerators over `P`) with the χ half-line of
    /// one symbol at threshold `micro/10⁶`.
    fn apply(&self, sym: GapSymbol, micro: i128, lo: &mut i128, hi: &mut i128) {
        let d = (self.q1 - self.q2).abs().max(1);
        match sym {
            GapSymbol::A => *lo = (*lo).max(micro * self.q2 * d),
            GapSymbol::B => *hi = (*hi).min(self.p - micro * self.q1 * d),
            GapSymbol::C => {
                if self.q1 > self.q2 {
                    *lo = (*lo).max(self.q2 * (micro * self.q1 - MICRO * self.q));
                } else if self.q1 < self.q2 {
                    *hi = (*hi).min(self.p - self.q1 * (micro * self.q2 - MICRO * self.q));
                } else {
                    // q₁ = q₂ (the order-2 arc): the C length is constant in
                    // t, so the condition is all-or-nothing.
                    if micro * self.q1 > MICRO * self.q {
                        *hi = *lo; // empty
                    }
                }
            }
        }
    }
}

/// The arc value as an exact fraction `numerator/denominator` in `i128`
/// (callers guarantee `Q ≤ MAX_EXACT_ORDER` and `k ≤ Q`).
fn arc_value_num_den(pair: &FareyPair, micros: &[i128]) -> (i128, i128) {
    let scale = ArcScale::new(pair);
    let k = micros.len();
    let mut num: i128 = 0;
    if k == 1 {
        let counts = [
            (GapSymbol::A, scale.q - scale.q1),
            (GapSymbol::B, scale.q - scale.q2),
            (GapSymbol::C, scale.q1 + scale.q2 - scale.q),
        ];
        for (sym, count) in counts {
            if count == 0 {
                continue;
            }
            let (mut lo, mut hi) = (0, scale.p);
            scale.apply(sym, micros[0], &mut lo, &mut hi);
            num += count * (hi.min(scale.p) - lo.max(0)).max(0);
        }
    } else {
        let types = gap_type_cycle(pair.q1(), pair.q2(), pair.order());
        let n = types.len();
        // Distinct circular windows (a three-distance word has only a
        // handful of distinct factors, so a linear scan is cheapest).
        let mut windows: Vec<(u64, usize, i128)> = Vec::new();
        for i in 0..n {
            let mut key = 0u64;
            for j in 0..k {
                key = key * 3 + types[(i + j) % n].index() as u64;
            }
            match windows.iter_mut().find(|w| w.0 == key) {
                Some(w) => w.2 += 1,
                None => windows.push((key, i, 1)),
            }
        }
        for (_, start, count) in windows {
            let (mut lo, mut hi) = (0, scale.p);
            for (j, &micro) in micros.iter().enumerate() {
                scale.apply(types[(start + j) % n], micro, &mut lo, &mut hi);
            }
            num += count * (hi.min(scale.p) - lo.max(0)).max(0);
        }
    }
    (num, scale.q * scale.p * scale.q1 * scale.q2)
}

/// Validates an order for the exact integer path.
fn check_exact_order(q: u64, k: usize) -> Result<()> {
    if q < 2 {
        return Err(Error::InvalidParameter(format!(
            "Q = {q} must be at least 2"
        )));
    }
    if q > MAX_EXACT_ORDER {
        return Err(Error::InvalidParameter(format!(
            "Q = {q} exceeds the exact-arithmetic limit {MAX_EXACT_ORDER}"
        )));
    }
    if k as u64 > q {
        return Err(Error::InvalidParameter(format!(
            "word length k = {k} exceeds the number of gaps Q = {q}"
        )));
    }
    if k > 24 {
        return Err(Error::InvalidParameter(format!(
            "word length k = {k} is not supported (limit 24)"
        )));
    }
    Ok(())
}

fn micros_i128(lambda: &LambdaVector) -> Vec<i128> {
    lambda
        .quantized_micro()
        .into_iter()
        .map(|(m, _)| m as i128)
        .collect()
}

/// Computes one arc's exact contribution for thresholds `λ` (quantized to
/// the `10⁻⁶` grid).
pub fn arc_contribution(pair: &FareyPair, lambda: &LambdaVector) -> Result<ArcContribution> {
    check_exact_order(pair.order(), lambda.k())?;
    let (num, den) = arc_value_num_den(pair, &micros_i128(lambda));
    Ok(ArcContribution {
        pair: *pair,
        value: BigRational::new(BigInt::from(num), BigInt::from(den)),
    })
}

// ---------------------------------------------------------------------------
// Window assemblies
// ---------------------------------------------------------------------------

fn rat_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn rat_big(r: Rational64) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

/// Streams the arcs of `[β, β+η]` in fixed 64k chunks and reduces
/// `per_arc` deterministically: arcs are summed sequentially in 512-arc
/// runs, runs pairwise within a chunk, chunks pairwise at the end — the
/// result is independent of thread count.
fn chunked_arc_sum<F>(beta: Rational64, eta: Rational64, q: u64, per_arc: F) -> Result<f64>
where
    F: Fn(&FareyPair) -> f64 + Sync,
{
    let mut arcs = enumerate_farey_arcs(beta, eta, q)?;
    let mut chunk_sums: Vec<f64> = Vec::new();
    let mut buf: Vec<FareyPair> = Vec::with_capacity(ARC_CHUNK);
    loop {
        buf.clear();
        while buf.len() < ARC_CHUNK {
            match arcs.next() {
                Some(pair) => buf.push(pair),
                None => break,
            }
        }
        if buf.is_empty() {
            break;
        }
        let partials: Vec<f64> = buf
            .par_chunks(ARC_SUB)
            .map(|sub| {
                let mut acc = 0.0;
                for pair in sub {
                    acc += per_arc(pair);
                }
                acc
            })
            .collect();
        chunk_sums.push(pairwise_sum(&partials));
        if buf.len() < ARC_CHUNK {
            break;
        }
    }
    Ok(pairwise_sum(&chunk_sums))
}

/// The finite-`Q` average `g_k^{β,η}(λ; Q)`: the proportion (averaged over
/// `α ∈ [β, β+η]`, restricted to the arcs lying fully inside) of positions
/// whose `k` consecutive gaps are at least `λ₁/Q, …, λ_k/Q`.
///
/// Per-arc values are exact (thresholds on the `10⁻⁶` grid); only the final
/// accumulation is floating point, with a deterministic summation order.
pub fn empirical_gk(
    beta: Rational64,
    eta: Rational64,
    q: u64,
    lambda: &LambdaVector,
) -> Result<f64> {
    check_exact_order(q, lambda.k())?;
    let micros = micros_i128(lambda);
    let total = chunked_arc_sum(beta, eta, q, |pair| {
        let (num, den) = arc_value_num_den(pair, &micros);
        num as f64 / den as f64
    })?;
    Ok(total / rat_f64(eta))
}

/// Fully exact variant of [`empirical_gk`] (serial; for cross-checks and
/// identities like the λ = 0 collapse on aligned windows).
pub fn empirical_gk_exact(
    beta: Rational64,
    eta: Rational64,
    q: u64,
    lambda: &LambdaVector,
) -> Result<BigRational> {
    check_exact_order(q, lambda.k())?;
    let micros = micros_i128(lambda);
    let mut total = BigRational::from(BigInt::from(0));
    for pair in enumerate_farey_arcs(beta, eta, q)? {
        let (num, den) = arc_value_num_den(&pair, &micros);
        total += BigRational::new(BigInt::from(num), BigInt::from(den));
    }
    Ok(total / rat_big(eta))
}

/// The `k = 1` curve `λ ↦ g₁^{β,η}(λ; Q)` over a whole threshold grid in
/// one pass over the arcs (per-arc work is a few flops per grid point).
pub fn empirical_g1_curve(
    beta: Rational64,
    eta: Rational64,
    q: u64,
    lambdas: &[f64],
) -> Result<Vec<f64>> {
    if q < 2 {
        return Err(Error::InvalidParameter(format!(
            "Q = {q} must be at least 2"
        )));
    }
    for &l in lambdas {
        if !l.is_finite() || l < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "lambda grid entries must be finite and non-negative, got {l}"
            )));
        }
    }
    let m = lambdas.len();
    let mut arcs = enumerate_farey_arcs(beta, eta, q)?;
    let mut totals = vec![0.0f64; m];
    let mut buf: Vec<FareyPair> = Vec::with_capacity(ARC_CHUNK);
    loop {
        buf.clear();
        while buf.len() < ARC_CHUNK {
            match arcs.next() {
                Some(pair) => buf.push(pair),
                None => break,
            }
        }
        if buf.is_empty() {
            break;
        }
        let partials: Vec<Vec<f64>> = buf
            .par_chunks(ARC_SUB)
            .map(|sub| {
                let mut acc = vec![0.0f64; m];
                for pair in sub {
                    let qf = pair.order() as f64;
                    let (q1, q2) = (pair.q1() as f64, pair.q2() as f64);
                    let (x, y) = (q1 / qf, q2 / qf);
                    let ca = qf - q1;
                    let cb = qf - q2;
                    let cc = q1 + q2 - qf;
                    let inv = 1.0 / (q1 * q2);
                    let d = x - y;
                    for (i, &lam) in lambdas.iter().enumerate() {
                        let ma = (1.0 - lam * y).clamp(0.0, 1.0);
                        let mb = (1.0 - lam * x).clamp(0.0, 1.0);
                        let mut t = ca * ma + cb * mb;
                        if cc > 0.0 {
                            // cc > 0 forces q₁ ≠ q₂, so d ≠ 0 here.
                            let mc = if d > 0.0 {
                                (1.0 - y * (lam * x - 1.0) / d).clamp(0.0, 1.0)
                            } else {
                                (1.0 - x * (lam * y - 1.0) / (y - x)).clamp(0.0, 1.0)
                            };
                            t += cc * mc;
                        }
                        acc[i] += t * inv;
                    }
                }
                acc
            })
            .collect();
        for part in partials {
            for (t, v) in totals.iter_mut().zip(part) {
                *t += v;
            }
        }
        if buf.len() < ARC_CHUNK {
            break;
        }
    }
    let norm = rat_f64(eta) * q as f64;
    Ok(totals.into_iter().map(|t| t / norm).collect())
}

// ---------------------------------------------------------------------------
// Monte Carlo
// ---------------------------------------------------------------------------

/// A seeded Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
}

/// Samples per RNG stream; streams are indexed by chunk, so results are
/// independent of thread count.
const MC_CHUNK: u64 = 1024;

/// Estimates `g_k^{β,η}(λ; Q)` by sampling `α` uniformly on the covered
/// span (the union of arcs fully inside the window) and counting, for each
/// sample, the positions whose `k` consecutive gaps clear the thresholds —
/// a direct simulation, independent of the per-arc integral machinery.
///
/// Deterministic for a fixed `seed` (ChaCha8, one stream per 1024-sample
/// chunk). Thresholds are quantized to the same `10⁻⁶` grid as
/// [`empirical_gk`], and all gap comparisons are exact rational arithmetic.
pub fn monte_carlo_gk(
    beta: Rational64,
    eta: Rational64,
    q: u64,
    lambda: &LambdaVector,
    samples: u64,
    seed: u64,
) -> Result<McEstimate> {
    check_exact_order(q, lambda.k())?;
    if samples < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 samples, got {samples}"
        )));
    }
    let (left, right) = covered_span(beta, eta, q)?;
    let left = left.to_rational();
    let width = right.to_rational() - &left;
    if !width.is_positive() {
        return Err(Error::InvalidParameter(
            "the window contains no complete arc at this order".into(),
        ));
    }
    let k = lambda.k();
    let thresholds: Vec<BigRational> = lambda
        .quantized_micro()
        .into_iter()
        .map(|(m, den)| BigRational::new(BigInt::from(m), BigInt::from(den) * BigInt::from(q)))
        .collect();
    let two_64 = BigInt::one() << 64u32;
    let scale = width.to_f64().unwrap_or(f64::NAN) / rat_f64(eta);

    let chunks = samples.div_ceil(MC_CHUNK);
    let moments: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| -> Result<(f64, f64)> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c + 1);
            let count = MC_CHUNK.min(samples - c * MC_CHUNK);
            let (mut s1, mut s2) = (0.0f64, 0.0f64);
            for _ in 0..count {
                let mut frac = None;
                for _attempt in 0..128 {
                    let z: u64 = rng.gen();
                    let alpha_val =
                        &left + &width * BigRational::new(BigInt::from(z), two_64.clone());
                    let Ok(alpha) = AlphaValue::from_big_rational(alpha_val) else {
                        continue;
                    };
                    // A sample can land exactly on a low-denominator
                    // fraction (probability ~ 2⁻⁶⁴ each); resample.
                    let Ok(pair) = farey_neighbors(&alpha, q) else {
                        continue;
                    };
                    let av = alpha.value();
                    let gap_a = av * BigRational::from(BigInt::from(pair.q1()))
                        - BigRational::from(BigInt::from(pair.a1()));
                    let gap_b = BigRational::from(BigInt::from(pair.a2()))
                        - av * BigRational::from(BigInt::from(pair.q2()));
                    let gap_c = &gap_a + &gap_b;
                    // pass[j][sym]: does gap type `sym` clear threshold j?
                    let pass: Vec<[bool; 3]> = thresholds
                        .iter()
                        .map(|t| [&gap_a >= t, &gap_b >= t, &gap_c >= t])
                        .collect();
                    let types = gap_type_cycle(pair.q1(), pair.q2(), q);
                    let n = types.len();
                    let hits = (0..n)
                        .filter(|&i| (0..k).all(|j| pass[j][types[(i + j) % n].index()]))
                        .count();
                    frac = Some(hits as f64 / q as f64);
                    break;
                }
                let f = frac.ok_or_else(|| {
                    Error::InvalidParameter("sampling repeatedly hit degenerate α".into())
                })?;
                s1 += f;
                s2 += f * f;
            }
            Ok((s1, s2))
        })
        .collect::<Result<Vec<_>>>()?;

    let firsts: Vec<f64> = moments.iter().map(|m| m.0).collect();
    let seconds: Vec<f64> = moments.iter().map(|m| m.1).collect();
    let (sum, sum2) = (pairwise_sum(&firsts), pairwise_sum(&seconds));
    let n = samples as f64;
    let mean = sum / n;
    let var = ((sum2 - sum * sum / n) / (n - 1.0)).max(0.0);
    Ok(McEstimate {
        estimate: scale * mean,
        std_error: scale * (var / n).sqrt(),
        samples,
        seed,
    })
}

// ---------------------------------------------------------------------------
// Limiting quadrature
// ---------------------------------------------------------------------------

/// The `Q → ∞` limit `g_k(λ)` by adaptive quadrature of
/// `(6/π²) Σ_w freq_w(x,y) · |⋂ⱼ χ(wⱼ, λⱼ)| / (xy)` over the parameter
/// triangle, at the default tolerance `1e-7` and cell budget `10⁶`.
pub fn quadrature_gk(lambda: &LambdaVector) -> Result<QuadratureResult> {
    quadrature_gk_with(lambda, 1e-7, 1_000_000)
}

/// [`quadrature_gk`] with explicit tolerance and cell budget.
pub fn quadrature_gk_with(
    lambda: &LambdaVector,
    tol: f64,
    budget: usize,
) -> Result<QuadratureResult> {
    let k = lambda.k();
    if k > 12 {
        return Err(Error::InvalidParameter(format!(
            "quadrature over 3^{k} words is not supported (limit k = 12)"
        )));
    }
    let lams: Vec<f64> = lambda.values().to_vec();
    let mut cuts: Vec<f64> = lams
        .iter()
        .map(|&l| 1.0 / l)
        .filter(|c| (0.0..1.0).contains(c))
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let words: Vec<Vec<GapSymbol>> = GapWord::all_of_length(k)
        .into_iter()
        .map(|w| w.symbols().to_vec())
        .collect();
    let integrand = move |x: f64, y: f64| -> f64 {
        let mut total = 0.0;
        'words: for w in &words {
            let f = word_frequency_xy(w, x, y);
            if f <= 0.0 {
                continue;
            }
            let mut lo = 0.0f64;
            let mut hi = 1.0f64;
            for (j, &sym) in w.iter().enumerate() {
                let lam = lams[j];
                if lam <= 0.0 {
                    continue;
                }
                match sym {
                    GapSymbol::A => lo = lo.max(lam * y),
                    GapSymbol::B => hi = hi.min(1.0 - lam * x),
                    GapSymbol::C => {
                        let d = x - y;
                        if d == 0.0 {
                            // Constant C length on the diagonal: the word is
                            // all-or-nothing in t.
                            if lam * x > 1.0 {
                                continue 'words;
                            }
                        } else if d > 0.0 {
                            lo = lo.max(y * (lam * x - 1.0) / d);
                        } else {
                            hi = hi.min(1.0 - x * (lam * y - 1.0) / (y - x));
                        }
                    }
                }
            }
            total += f * (hi.min(1.0) - lo.max(0.0)).max(0.0);
        }
        INV_ZETA2 * total / (x * y)
    };
    // Split at the diagonal so quadrature points never straddle the χ_C
    // case change (points are strictly interior to each cell), then cut
    // along every line x = 1/λⱼ and y = 1/λⱼ that crosses the triangle.
    // Those are exactly the lines where a word measure's clamping switches
    // branch — in particular where the integrand's support ends, which must
    // be a union of cell edges: a support sliver strictly inside a cell can
    // miss every sample point, and an all-zero cell is never refined.
    let base = [
        Triangle::new((1.0, 0.0), (1.0, 1.0), (0.5, 0.5)),
        Triangle::new((0.0, 1.0), (1.0, 1.0), (0.5, 0.5)),
    ];
    let cells = cut_triangles(&base, &cuts, &cuts);
    integrate_triangles(&integrand, &cells, tol, budget)
}

// ---------------------------------------------------------------------------
// Farey-sum discrepancies
// ---------------------------------------------------------------------------

/// Test integrands for [`lemma2_discrepancy`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TestFunction {
    /// `f ≡ 1` on the triangle `T`.
    One,
    /// `f(x, y) = x` on `T`.
    X,
    /// `f(x, y) = x·y` on `T`.
    Xy,
    /// `f(x, y) = 1/(xy)` on the shaved triangle
    /// `T_δ = {x + y ≥ 1 + δ, |x − y| > δ}` (the weight is not integrable
    /// on all of `T`'s corners without the shave). Requires `0 < δ < 1/2`.
    InvXy { delta: f64 },
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TestFunction::One => write!(f, "one"),
            TestFunction::X => write!(f, "x"),
            TestFunction::Xy => write!(f, "xy"),
            TestFunction::InvXy { delta } => write!(f, "invxy(delta={delta})"),
        }
    }
}

/// Closed form of `∬_{T_δ} dx dy/(xy)`.
fn invxy_integral(delta: f64) -> f64 {
    let f = |x: f64| {
        0.5 * x.ln().powi(2) + li2_real(delta / x) - (1.0 + delta).ln() * x.ln()
            + li2_real(x / (1.0 + delta))
    };
    2.0 * (f(1.0) - f(0.5 + delta))
}

/// How far the Farey-pair sum `(1/η) Σ_{arcs} f(q₁/Q, q₂/Q)/Q²` sits from
/// its limit `(6/π²) ∬ f` — the equidistribution mechanism driving all the
/// `Q → ∞` statements. Returns the absolute difference.
pub fn lemma2_discrepancy(
    test_fn: TestFunction,
    beta: Rational64,
    eta: Rational64,
    q: u64,
) -> Result<f64> {
    if q < 2 {
        return Err(Error::InvalidParameter(format!(
            "Q = {q} must be at least 2"
        )));
    }
    if let TestFunction::InvXy { delta } = test_fn {
        if !(delta > 0.0 && delta < 0.5) {
            return Err(Error::InvalidParameter(format!(
                "invxy requires 0 < delta < 1/2, got {delta}"
            )));
        }
    }
    let qf = q as f64;
    let sum = chunked_arc_sum(beta, eta, q, |pair| {
        let x = pair.q1() as f64 / qf;
        let y = pair.q2() as f64 / qf;
        match test_fn {
            TestFunction::One => 1.0,
            TestFunction::X => x,
            TestFunction::Xy => x * y,
            TestFunction::InvXy { delta } => {
                if x + y >= 1.0 + delta && (x - y).abs() > delta {
                    1.0 / (x * y)
                } else {
                    0.0
                }
            }
        }
    })? / (rat_f64(eta) * qf * qf);
    let integral = match test_fn {
        TestFunction::One => 0.5,
        TestFunction::X => 1.0 / 3.0,
        TestFunction::Xy => 5.0 / 24.0,
        TestFunction::InvXy { delta } => invxy_integral(delta),
    };
    Ok((sum - INV_ZETA2 * integral).abs())
}
