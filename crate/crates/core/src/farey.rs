//! Exact Farey-fraction arithmetic.
//!
//! A Farey fraction of order `Q` is a reduced `a/q ∈ [0,1]` with `q < Q`
//! (strict). Consecutive fractions `a₁/q₁ < a₂/q₂` satisfy the determinant
//! identity `a₂q₁ − a₁q₂ = 1` and `q₁ + q₂ ≥ Q`; the interval between them is
//! a *Farey arc*. This module locates the arc containing a given `α`
//! (a batched Stern–Brocot descent, promoted to big integers on overflow) and
//! enumerates all arcs covering a subinterval of `[0,1]` with the classical
//! next-term recurrence.

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;

use crate::{Error, Result};

// ---------------------------------------------------------------------------
// FareyFraction
// ---------------------------------------------------------------------------

/// A reduced fraction `a/q` with `0 ≤ a/q ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FareyFraction {
    num: u64,
    den: u64,
}

impl FareyFraction {
    /// See [`make_fraction`].
    pub fn new(numerator: u64, denominator: u64) -> Result<Self> {
        make_fraction(numerator, denominator)
    }

    pub fn numerator(&self) -> u64 {
        self.num
    }

    pub fn denominator(&self) -> u64 {
        self.den
    }

    /// The fraction as a double (exact for all arguments of practical size).
    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(BigInt::from(self.num), BigInt::from(self.den))
    }

    pub fn to_rational64(&self) -> Rational64 {
        Rational64::new(self.num as i64, self.den as i64)
    }

    fn new_unchecked(num: u64, den: u64) -> Self {
        debug_assert!(den > 0 && num <= den && gcd(num, den) == 1);
        FareyFraction { num, den }
    }
}

impl fmt::Display for FareyFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl PartialOrd for FareyFraction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FareyFraction {
    fn cmp(&self, other: &Self) -> Ordering {
        // Cross multiplication in 128 bits cannot overflow for u64 fields.
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

/// Builds the reduced fraction `numerator/denominator`.
///
/// Errors on a zero denominator or a numerator exceeding the denominator
/// (fractions live in `[0,1]`).
pub fn make_fraction(numerator: u64, denominator: u64) -> Result<FareyFraction> {
    if denominator == 0 {
        return Err(Error::InvalidParameter(
            "fraction denominator is zero".into(),
        ));
    }
    if numerator > denominator {
        return Err(Error::InvalidParameter(format!(
            "fraction {numerator}/{denominator} lies outside [0,1]"
        )));
    }
    // gcd(0, d) = d, so 0/d correctly reduces to 0/1.
    let g = gcd(numerator, denominator);
    Ok(FareyFraction {
        num: numerator / g,
        den: denominator / g,
    })
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

// ---------------------------------------------------------------------------
// FareyPair
// ---------------------------------------------------------------------------

/// Two consecutive Farey fractions `a₁/q₁ < a₂/q₂` of order `Q`, bracketing
/// one arc of the decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FareyPair {
    left: FareyFraction,
    right: FareyFraction,
    order: u64,
}

impl FareyPair {
    /// Validates all consecutiveness invariants: `left < right`, the
    /// determinant identity, denominators below `Q`, and `q₁ + q₂ ≥ Q`.
    pub fn new(left: FareyFraction, right: FareyFraction, order: u64) -> Result<Self> {
        let (a1, q1) = (left.num as u128, left.den as u128);
        let (a2, q2) = (right.num as u128, right.den as u128);
        let order_u = order as u128;
        if order < 2 {
            return Err(Error::InvalidParameter(
                "Farey order must be at least 2".into(),
            ));
        }
        if a2 * q1 != a1 * q2 + 1 {
            return Err(Error::InvalidParameter(format!(
                "{left} and {right} are not unimodular neighbors"
            )));
        }
        if q1 >= order_u || q2 >= order_u || q1 + q2 < order_u {
            return Err(Error::InvalidParameter(format!(
                "{left} and {right} are not consecutive at order {order}"
            )));
        }
        Ok(FareyPair { left, right, order })
    }

    fn new_unchecked(left: FareyFraction, right: FareyFraction, order: u64) -> Self {
        debug_assert!(FareyPair::new(left, right, order).is_ok());
        FareyPair { left, right, order }
    }

    pub fn left(&self) -> FareyFraction {
        self.left
    }

    pub fn right(&self) -> FareyFraction {
        self.right
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// Left numerator `a₁`.
    pub fn a1(&self) -> u64 {
        self.left.num
    }

    /// Left denominator `q₁`.
    pub fn q1(&self) -> u64 {
        self.left.den
    }

    /// Right numerator `a₂`.
    pub fn a2(&self) -> u64 {
        self.right.num
    }

    /// Right denominator `q₂`.
    pub fn q2(&self) -> u64 {
        self.right.den
    }

    /// Exact arc length `1/(q₁q₂)` (from the determinant identity).
    pub fn arc_length(&self) -> Rational64 {
        Rational64::new(1, (self.q1() * self.q2()) as i64)
    }
}

impl fmt::Display for FareyPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}; Q={})", self.left, self.right, self.order)
    }
}

// ---------------------------------------------------------------------------
// AlphaValue
// ---------------------------------------------------------------------------

/// The number `α`, stored as an exact rational in `(0,1)` together with how
/// much precision that rational is declared to carry.
///
/// A decimal string such as `"1.41421356237309504880"` becomes the rational
/// `p/10^d` reduced modulo 1; `d` decimal digits distinguish `α` from every
/// Farey fraction of order `Q` only when `10^d > Q²` (consecutive fractions
/// are at least `1/Q²` apart), and neighbor location enforces exactly that
/// guard. Rationals built with [`AlphaValue::from_rational`] are exact and
/// skip the guard.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaValue {
    value: BigRational,
    exact: bool,
    digits: usize,
}

impl AlphaValue {
    /// Parses a decimal string (e.g. `"0.41421356"`), reducing modulo 1.
    pub fn from_decimal_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let (sign, mag) = match t.strip_prefix('-') {
            Some(rest) => (-1, rest),
            None => (1, t),
        };
        let (int_part, frac_part) = match mag.split_once('.') {
            Some((i, f)) => (i, f),
            None => (mag, ""),
        };
        if (int_part.is_empty() && frac_part.is_empty())
            || !int_part.chars().all(|c| c.is_ascii_digit())
            || !frac_part.chars().all(|c| c.is_ascii_digit())
        {
            return Err(Error::InvalidParameter(format!(
                "cannot parse '{s}' as a decimal number"
            )));
        }
        let digits = frac_part.len();
        let mut num: BigInt = if int_part.is_empty() {
            BigInt::zero()
        } else {
            int_part.parse().expect("digits checked")
        };
        let scale = BigInt::from(10u32).pow(digits as u32);
        num = &num * &scale
            + frac_part
                .parse::<BigInt>()
                .unwrap_or_else(|_| BigInt::zero());
        let value = BigRational::new(BigInt::from(sign) * num, scale);
        Self::reduced_mod_one(value, false, digits)
    }

    /// Wraps an exact rational `num/den`, reducing modulo 1.
    pub fn from_rational(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidParameter("alpha denominator is zero".into()));
        }
        let value = BigRational::new(BigInt::from(num), BigInt::from(den));
        Self::reduced_mod_one(value, true, 0)
    }

    /// Wraps an exact big rational, reducing modulo 1 (used e.g. for sampled
    /// `α` with power-of-two denominators far beyond `i64`).
    pub fn from_big_rational(value: BigRational) -> Result<Self> {
        Self::reduced_mod_one(value, true, 0)
    }

    /// Parses either `"a/b"` (exact rational) or a decimal string.
    pub fn parse(s: &str) -> Result<Self> {
        match s.split_once('/') {
            Some((n, d)) => {
                let num: i64 = n.trim().parse().map_err(|_| {
                    Error::InvalidParameter(format!("cannot parse '{s}' as a rational"))
                })?;
                let den: i64 = d.trim().parse().map_err(|_| {
                    Error::InvalidParameter(format!("cannot parse '{s}' as a rational"))
                })?;
                Self::from_rational(num, den)
            }
            None => Self::from_decimal_str(s),
        }
    }

    fn reduced_mod_one(value: BigRational, exact: bool, digits: usize) -> Result<Self> {
        let reduced = &value - value.floor();
        if reduced.is_zero() {
            return Err(Error::InvalidParameter(
                "alpha reduces to an integer; the gap structure is trivial".into(),
            ));
        }
        Ok(AlphaValue {
            value: reduced,
            exact,
            digits,
        })
    }

    /// The exact rational representation, already reduced into `(0,1)`.
    pub fn value(&self) -> &BigRational {
        &self.value
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64().unwrap_or(f64::NAN)
    }

    /// Whether the value is exact (constructed from a rational) rather than a
    /// declared-precision decimal.
    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// Declared decimal digits (0 for exact rationals).
    pub fn digits(&self) -> usize {
        self.digits
    }

    /// Checks that this `α` can be classified at order `Q`: it must not equal
    /// a Farey fraction of denominator `< Q` (degenerate gaps), and a decimal
    /// representation must resolve beyond `1/Q²`.
    pub fn ensure_order(&self, q: u64) -> Result<()> {
        if q < 2 {
            return Err(Error::InvalidParameter(format!(
                "Q = {q} must be at least 2"
            )));
        }
        if self.value.denom() < &BigInt::from(q) {
            return Err(Error::DegenerateAlpha {
                alpha: self.value.to_string(),
                denominator: self.value.denom().to_u64().unwrap_or(u64::MAX),
                q,
            });
        }
        if !self.exact {
            // 10^digits must exceed Q²; digits ≥ 39 always suffices for u64 Q.
            let enough = self.digits >= 39 || {
                let precision = 10u128.pow(self.digits as u32);
                precision > (q as u128) * (q as u128)
            };
            if !enough {
                return Err(Error::InsufficientPrecision {
                    digits: self.digits,
                    q,
                });
            }
        }
        Ok(())
    }
}

impl fmt::Display for AlphaValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

// ---------------------------------------------------------------------------
// Neighbor location (Stern–Brocot descent with run batching)
// ---------------------------------------------------------------------------

/// Finds the unique consecutive pair `a₁/q₁ < α < a₂/q₂` of order `Q`.
///
/// The search walks the Stern–Brocot tree from `(0/1, 1/1)`, taking maximal
/// runs of same-direction steps in one batch (each batch is a continued-
/// fraction convergent jump, so the loop runs `O(log Q)` times). Arithmetic
/// uses checked 128-bit integers and retries in arbitrary precision when `α`'s
/// numerator or denominator is too large for the machine path.
pub fn farey_neighbors(alpha: &AlphaValue, q: u64) -> Result<FareyPair> {
    alpha.ensure_order(q)?;
    let p = alpha.value().numer();
    let r = alpha.value().denom();
    if let (Some(p64), Some(r64)) = (p.to_i128(), r.to_i128()) {
        if let Some((a, b, c, d)) = descent_i128(p64, r64, q) {
            return Ok(FareyPair::new_unchecked(
                FareyFraction::new_unchecked(a, b),
                FareyFraction::new_unchecked(c, d),
                q,
            ));
        }
    }
    let (a, b, c, d) = descent_big(p, r, q)?;
    Ok(FareyPair::new_unchecked(
        FareyFraction::new_unchecked(a, b),
        FareyFraction::new_unchecked(c, d),
        q,
    ))
}

/// Machine-integer descent; `None` signals overflow (or an exact mediant hit,
/// which the big-integer path re-detects and reports properly).
fn descent_i128(p: i128, r: i128, q: u64) -> Option<(u64, u64, u64, u64)> {
    let q = q as i128;
    let (mut a, mut b, mut c, mut d) = (0i128, 1i128, 1i128, 1i128);
    while b + d < q {
        let lhs = p.checked_mul(b + d)?;
        let rhs = r.checked_mul(a + c)?;
        match lhs.cmp(&rhs) {
            Ordering::Equal => return None,
            Ordering::Greater => {
                // α above the mediant: push the left endpoint right. The
                // largest valid multiplicity keeps a/b strictly below α and
                // the denominator below Q.
                let t_val = (p.checked_mul(b)? - r.checked_mul(a)? - 1)
                    / (r.checked_mul(c)? - p.checked_mul(d)?);
                let t_cap = (q - 1 - b) / d;
                let t = t_val.min(t_cap).max(1);
                a += t * c;
                b += t * d;
            }
            Ordering::Less => {
                let t_val = (r.checked_mul(c)? - p.checked_mul(d)? - 1)
                    / (p.checked_mul(b)? - r.checked_mul(a)?);
                let t_cap = (q - 1 - d) / b;
                let t = t_val.min(t_cap).max(1);
                c += t * a;
                d += t * b;
            }
        }
    }
    Some((a as u64, b as u64, c as u64, d as u64))
}

/// Arbitrary-precision descent, structurally identical to [`descent_i128`].
fn descent_big(p: &BigInt, r: &BigInt, q: u64) -> Result<(u64, u64, u64, u64)> {
    let qb = BigInt::from(q);
    let one = BigInt::one();
    let (mut a, mut b, mut c, mut d) =
        (BigInt::zero(), BigInt::one(), BigInt::one(), BigInt::one());
    while &b + &d < qb {
        let lhs = p * (&b + &d);
        let rhs = r * (&a + &c);
        match lhs.cmp(&rhs) {
            Ordering::Equal => {
                // α equals a mediant of denominator < Q: only possible for an
                // unreduced representation, which BigRational precludes; keep
                // the error anyway for defense in depth.
                return Err(Error::DegenerateAlpha {
                    alpha: format!("{p}/{r}"),
                    denominator: (&b + &d).to_u64().unwrap_or(u64::MAX),
                    q,
                });
            }
            Ordering::Greater => {
                let t_val = (p * &b - r * &a - &one) / (r * &c - p * &d);
                let t_cap = (&qb - &one - &b) / &d;
                let t = t_val.min(t_cap).max(one.clone());
                a += &t * &c;
                b += &t * &d;
            }
            Ordering::Less => {
                let t_val = (r * &c - p * &d - &one) / (p * &b - r * &a);
                let t_cap = (&qb - &one - &d) / &b;
                let t = t_val.min(t_cap).max(one.clone());
                c += &t * &a;
                d += &t * &b;
            }
        }
    }
    Ok((
        a.to_u64().expect("denominators stay below Q"),
        b.to_u64().expect("denominators stay below Q"),
        c.to_u64().expect("denominators stay below Q"),
        d.to_u64().expect("denominators stay below Q"),
    ))
}

// ---------------------------------------------------------------------------
// Successor / predecessor
// ---------------------------------------------------------------------------

/// Returns the Farey successor of `current` at order `Q`, given its
/// predecessor: `next = (k·a − a_prev, k·q − q_prev)` with
/// `k = ⌊(Q − 1 + q_prev)/q⌋`.
///
/// Errors when `current` is `1/1` (end of the sequence).
pub fn next_farey(
    current: FareyFraction,
    previous: FareyFraction,
    q: u64,
) -> Result<FareyFraction> {
    if current.num == current.den {
        return Err(Error::InvalidParameter("1/1 has no Farey successor".into()));
    }
    // The recurrence needs a genuine consecutive pair to be meaningful.
    FareyPair::new(previous, current, q)?;
    Ok(next_farey_raw(
        current,
        (previous.num as i128, previous.den as i128),
        q,
    ))
}

/// Next-term recurrence with the predecessor allowed to be the virtual
/// `(-1)/1` that precedes `0/1`.
fn next_farey_raw(current: FareyFraction, previous: (i128, i128), q: u64) -> FareyFraction {
    let (pa, pq) = previous;
    let (ca, cq) = (current.num as i128, current.den as i128);
    let k = (q as i128 - 1 + pq) / cq;
    FareyFraction::new_unchecked((k * ca - pa) as u64, (k * cq - pq) as u64)
}

/// Returns the Farey predecessor of `f` (which must not be `0/1`) at order
/// `Q`, via the modular inverse: the predecessor `p/r` satisfies
/// `a·r ≡ 1 (mod q)` with `r` in `[Q−q, Q)`.
fn farey_predecessor(f: FareyFraction, q: u64) -> FareyFraction {
    debug_assert!(f.num > 0, "0/1 has no predecessor");
    if f.num == f.den {
        // Predecessor of 1/1 is (Q−2)/(Q−1).
        return FareyFraction::new_unchecked(q - 2, q - 1);
    }
    let r0 = mod_inverse(f.num % f.den, f.den);
    let r = r0 + f.den * ((q - 1 - r0) / f.den);
    let p = (f.num as u128 * r as u128 - 1) / f.den as u128;
    FareyFraction::new_unchecked(p as u64, r)
}

/// Modular inverse of `a` modulo `m` for coprime `a, m` (extended Euclid).
fn mod_inverse(a: u64, m: u64) -> u64 {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let quo = old_r / r;
        (old_r, r) = (r, old_r - quo * r);
        (old_s, s) = (s, old_s - quo * s);
    }
    debug_assert_eq!(old_r, 1, "inputs must be coprime");
    old_s.rem_euclid(m as i128) as u64
}

// ---------------------------------------------------------------------------
// Arc enumeration
// ---------------------------------------------------------------------------

/// Streaming enumeration of the consecutive pairs of order `Q` with
/// `β ≤ a₁/q₁ < a₂/q₂ ≤ β+η`, in increasing order (see
/// [`enumerate_farey_arcs`]).
pub struct FareyArcs {
    prev: (i128, i128),
    current: FareyFraction,
    end_num: i128,
    end_den: i128,
    order: u64,
    done: bool,
}

impl Iterator for FareyArcs {
    type Item = FareyPair;

    fn next(&mut self) -> Option<FareyPair> {
        if self.done || self.current.num == self.current.den {
            self.done = true;
            return None;
        }
        let next = next_farey_raw(self.current, self.prev, self.order);
        // Stop once the right endpoint would overshoot β+η.
        if next.num as i128 * self.end_den > self.end_num * next.den as i128 {
            self.done = true;
            return None;
        }
        let pair = FareyPair::new_unchecked(self.current, next, self.order);
        self.prev = (self.current.num as i128, self.current.den as i128);
        self.current = next;
        Some(pair)
    }
}

/// Yields every consecutive pair (arc) of order `Q` lying inside
/// `[β, β+η]`, in increasing order. Arcs straddling either endpoint are
/// excluded, matching the summation convention of the arc decomposition.
pub fn enumerate_farey_arcs(beta: Rational64, eta: Rational64, q: u64) -> Result<FareyArcs> {
    validate_window(beta, eta)?;
    if q < 2 {
        return Err(Error::InvalidParameter(format!(
            "Q = {q} must be at least 2"
        )));
    }
    let (prev, current) = first_farey_geq(beta, q);
    let end = add_window(beta, eta);
    Ok(FareyArcs {
        prev,
        current,
        end_num: *end.numer(),
        end_den: *end.denom(),
        order: q,
        done: false,
    })
}

fn validate_window(beta: Rational64, eta: Rational64) -> Result<()> {
    if beta < Rational64::zero() || beta >= Rational64::one() {
        return Err(Error::InvalidParameter(format!(
            "beta = {beta} must lie in [0,1)"
        )));
    }
    if eta <= Rational64::zero() {
        return Err(Error::InvalidParameter(format!(
            "eta = {eta} must be positive"
        )));
    }
    if add_window(beta, eta) > (1, 1).into() {
        return Err(Error::InvalidParameter(format!(
            "beta + eta = {} exceeds 1",
            add_window(beta, eta)
        )));
    }
    Ok(())
}

/// `β + η` in 128-bit arithmetic (the i64 sum could overflow for extreme
/// denominators).
fn add_window(beta: Rational64, eta: Rational64) -> num_rational::Ratio<i128> {
    let b = num_rational::Ratio::new(*beta.numer() as i128, *beta.denom() as i128);
    let e = num_rational::Ratio::new(*eta.numer() as i128, *eta.denom() as i128);
    b + e
}

/// The smallest Farey fraction of order `Q` that is `≥ β`, along with its
/// predecessor (virtual `(-1)/1` when the fraction is `0/1`).
fn first_farey_geq(beta: Rational64, q: u64) -> ((i128, i128), FareyFraction) {
    if beta <= Rational64::zero() {
        return ((-1, 1), FareyFraction::new_unchecked(0, 1));
    }
    if *beta.denom() < q as i64 {
        // β itself is a Farey fraction of order Q.
        let f = FareyFraction::new_unchecked(*beta.numer() as u64, *beta.denom() as u64);
        let pred = farey_predecessor(f, q);
        return ((pred.num as i128, pred.den as i128), f);
    }
    let alpha = AlphaValue::from_rational(*beta.numer(), *beta.denom())
        .expect("0 < beta < 1 checked by caller");
    let pair = farey_neighbors(&alpha, q).expect("beta has denominator >= Q here");
    ((pair.left.num as i128, pair.left.den as i128), pair.right)
}

/// The largest Farey fraction of order `Q` that is `≤ x` (with `x ≤ 1`).
fn last_farey_leq(x: num_rational::Ratio<i128>, q: u64) -> FareyFraction {
    if x >= num_rational::Ratio::one() {
        return FareyFraction::new_unchecked(1, 1);
    }
    if x <= num_rational::Ratio::zero() {
        return FareyFraction::new_unchecked(0, 1);
    }
    if *x.denom() < q as i128 {
        return FareyFraction::new_unchecked(*x.numer() as u64, *x.denom() as u64);
    }
    let alpha = AlphaValue::from_rational(
        i64::try_from(*x.numer()).expect("window endpoints fit i64"),
        i64::try_from(*x.denom()).expect("window endpoints fit i64"),
    )
    .expect("0 < x < 1 checked above");
    farey_neighbors(&alpha, q)
        .expect("x has denominator >= Q here")
        .left
}

/// The exact span `[L, R] ⊆ [β, β+η]` actually covered by the complete arcs
/// of order `Q` inside the window: `L` is the first Farey fraction `≥ β` and
/// `R` the last one `≤ β+η`. When `L ≥ R` the window contains no complete
/// arc and the covered span is empty.
pub fn covered_span(
    beta: Rational64,
    eta: Rational64,
    q: u64,
) -> Result<(FareyFraction, FareyFraction)> {
    validate_window(beta, eta)?;
    if q < 2 {
        return Err(Error::InvalidParameter(format!(
            "Q = {q} must be at least 2"
        )));
    }
    let (_, first) = first_farey_geq(beta, q);
    let last = last_farey_leq(add_window(beta, eta), q);
    Ok((first, last))
}
