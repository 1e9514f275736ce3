//! The three-distance structure of `{nα}`, `0 ≤ n < Q`.
//!
//! With `a₁/q₁ < α < a₂/q₂` the consecutive Farey fractions of order `Q`,
//! the circle points `{nα}` split the circle into gaps of at most three
//! lengths,
//!
//! * `A = q₁α − a₁` (occurring `Q − q₁` times),
//! * `B = a₂ − q₂α` (occurring `Q − q₂` times),
//! * `C = A + B`    (occurring `q₁ + q₂ − Q` times),
//!
//! and the permutation `σ` sorting the points obeys a three-case recurrence:
//! starting from `σ₀ = 0`, add `q₁` while `σᵢ ∈ [0, Q−q₁)` (an `A` gap
//! follows the point), add `q₁ − q₂` on `[Q−q₁, q₂)` (a `C` gap), and
//! subtract `q₂` on `[q₂, Q)` (a `B` gap).
//!
//! Everything here is exact: `α` is an exact rational (possibly a declared-
//! precision stand-in for an irrational), and all lengths are rationals.
//! [`direct_gaps`] is the independent oracle: it sorts the points and
//! measures the gaps with no Farey machinery at all.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use std::fmt;

use crate::farey::{farey_neighbors, AlphaValue, FareyPair};
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Symbols and words
// ---------------------------------------------------------------------------

/// A gap type: the short gap `A`, the middle gap `B`, or the long gap `C = A+B`.
///
/// (`A` is shorter than `B` exactly when `q₂ < q₁`; the letters follow the
/// defining formulas, not the size order.)
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GapSymbol {
    A,
    B,
    C,
}

impl GapSymbol {
    /// Stable index (`A=0, B=1, C=2`), used to enumerate words.
    pub fn index(self) -> usize {
        match self {
            GapSymbol::A => 0,
            GapSymbol::B => 1,
            GapSymbol::C => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<Self> {
        match i {
            0 => Some(GapSymbol::A),
            1 => Some(GapSymbol::B),
            2 => Some(GapSymbol::C),
            _ => None,
        }
    }
}

impl fmt::Display for GapSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GapSymbol::A => "A",
            GapSymbol::B => "B",
            GapSymbol::C => "C",
        })
    }
}

/// A non-empty string over `{A, B, C}` recording the types of `k`
/// consecutive gaps.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GapWord {
    symbols: Vec<GapSymbol>,
}

impl GapWord {
    pub fn new(symbols: Vec<GapSymbol>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::InvalidParameter(
                "gap words must be non-empty".into(),
            ));
        }
        Ok(GapWord { symbols })
    }

    /// Parses a word like `"ACB"`.
    pub fn parse(s: &str) -> Result<Self> {
        let symbols = s
            .chars()
            .map(|c| match c {
                'A' | 'a' => Ok(GapSymbol::A),
                'B' | 'b' => Ok(GapSymbol::B),
                'C' | 'c' => Ok(GapSymbol::C),
                other => Err(Error::InvalidParameter(format!(
                    "'{other}' is not a gap symbol"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        GapWord::new(symbols)
    }

    pub fn symbols(&self) -> &[GapSymbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        false // words are non-empty by construction
    }

    /// All `3^k` words of length `k`, in lexicographic `A < B < C` order.
    pub fn all_of_length(k: usize) -> Vec<GapWord> {
        let mut out = Vec::with_capacity(3usize.pow(k as u32));
        let mut idx = vec![0usize; k];
        loop {
            out.push(GapWord {
                symbols: idx
                    .iter()
                    .map(|&i| GapSymbol::from_index(i).unwrap())
                    .collect(),
            });
            let mut pos = k;
            loop {
                if pos == 0 {
                    return out;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < 3 {
                    break;
                }
                idx[pos] = 0;
            }
        }
    }
}

impl fmt::Display for GapWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.symbols {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// GapTriple
// ---------------------------------------------------------------------------

/// The three gap lengths and their multiplicities for a given `(α, Q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GapTriple {
    pair: FareyPair,
    length_a: BigRational,
    length_b: BigRational,
    count_a: u64,
    count_b: u64,
    count_c: u64,
}

impl GapTriple {
    pub fn pair(&self) -> FareyPair {
        self.pair
    }

    pub fn length_a(&self) -> &BigRational {
        &self.length_a
    }

    pub fn length_b(&self) -> &BigRational {
        &self.length_b
    }

    /// `C = A + B`.
    pub fn length_c(&self) -> BigRational {
        &self.length_a + &self.length_b
    }

    pub fn count_a(&self) -> u64 {
        self.count_a
    }

    pub fn count_b(&self) -> u64 {
        self.count_b
    }

    pub fn count_c(&self) -> u64 {
        self.count_c
    }

    pub fn length_a_f64(&self) -> f64 {
        self.length_a.to_f64().unwrap_or(f64::NAN)
    }

    pub fn length_b_f64(&self) -> f64 {
        self.length_b.to_f64().unwrap_or(f64::NAN)
    }

    pub fn length_c_f64(&self) -> f64 {
        self.length_c().to_f64().unwrap_or(f64::NAN)
    }

    /// The tiling identity `countA·A + countB·B + countC·C = 1`, exactly.
    pub fn total_length(&self) -> BigRational {
        BigRational::from(BigInt::from(self.count_a)) * &self.length_a
            + BigRational::from(BigInt::from(self.count_b)) * &self.length_b
            + BigRational::from(BigInt::from(self.count_c)) * self.length_c()
    }
}

/// Computes the gap lengths `A = q₁α − a₁`, `B = a₂ − q₂α`, `C = A + B` and
/// the counts `(Q−q₁, Q−q₂, q₁+q₂−Q)`.
///
/// Two-gap degeneracies (`countC = 0`) are reported, not rejected.
pub fn gap_triple(alpha: &AlphaValue, q: u64) -> Result<GapTriple> {
    let pair = farey_neighbors(alpha, q)?;
    let a = alpha.value();
    let length_a =
        a * BigRational::from(BigInt::from(pair.q1())) - BigRational::from(BigInt::from(pair.a1()));
    let length_b =
        BigRational::from(BigInt::from(pair.a2())) - a * BigRational::from(BigInt::from(pair.q2()));
    debug_assert!(length_a.is_positive() && length_b.is_positive());
    Ok(GapTriple {
        pair,
        length_a,
        length_b,
        count_a: q - pair.q1(),
        count_b: q - pair.q2(),
        count_c: pair.q1() + pair.q2() - q,
    })
}

// ---------------------------------------------------------------------------
// σ permutation and gap words
// ---------------------------------------------------------------------------

/// The permutation of `{0,…,Q−1}` ordering the points `{nα}` increasingly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaPermutation {
    values: Vec<u64>,
}

impl SigmaPermutation {
    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Walks the three-case recurrence, yielding `σ` and the gap type that
/// follows each sorted position.
fn sigma_walk(q1: u64, q2: u64, q: u64) -> (Vec<u64>, Vec<GapSymbol>) {
    let (q1, q2, q) = (q1 as i64, q2 as i64, q as i64);
    let mut sigma = Vec::with_capacity(q as usize);
    let mut types = Vec::with_capacity(q as usize);
    let mut s = 0i64;
    for _ in 0..q {
        sigma.push(s as u64);
        if s < q - q1 {
            types.push(GapSymbol::A);
            s += q1;
        } else if s < q2 {
            types.push(GapSymbol::C);
            s += q1 - q2;
        } else {
            types.push(GapSymbol::B);
            s -= q2;
        }
    }
    debug_assert_eq!(s, 0, "the recurrence must close the circle");
    (sigma, types)
}

/// Computes `σ` for `(α, Q)` via the recurrence.
pub fn sigma_permutation(alpha: &AlphaValue, q: u64) -> Result<SigmaPermutation> {
    let pair = farey_neighbors(alpha, q)?;
    let (values, _) = sigma_walk(pair.q1(), pair.q2(), q);
    Ok(SigmaPermutation { values })
}

/// The circular sequence of gap types in sorted-position order, straight
/// from the neighbor denominators (for the per-arc machinery, which already
/// holds a [`FareyPair`] and does not need `α` itself).
pub(crate) fn gap_type_cycle(q1: u64, q2: u64, q: u64) -> Vec<GapSymbol> {
    sigma_walk(q1, q2, q).1
}

/// The circular list of `Q` gap words of length `k`: word `i` records the
/// types of the gaps at sorted positions `i, i+1, …, i+k−1 (mod Q)`.
///
/// Rejects `k = 0` and the degenerate wrap `k > Q`.
pub fn gap_word_list(alpha: &AlphaValue, q: u64, k: usize) -> Result<Vec<GapWord>> {
    if k == 0 {
        return Err(Error::InvalidParameter(
            "word length k must be at least 1".into(),
        ));
    }
    if (k as u64) > q {
        return Err(Error::InvalidParameter(format!(
            "word length k = {k} exceeds the number of gaps Q = {q}"
        )));
    }
    let pair = farey_neighbors(alpha, q)?;
    let (_, types) = sigma_walk(pair.q1(), pair.q2(), q);
    let n = types.len();
    Ok((0..n)
        .map(|i| GapWord {
            symbols: (0..k).map(|j| types[(i + j) % n]).collect(),
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Direct (sort-based) oracle
// ---------------------------------------------------------------------------

/// Sorted points and circular gaps, double precision.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectGaps {
    /// `{nα}` in increasing order.
    pub points: Vec<f64>,
    /// `points[i+1] − points[i]`, wrapping from the last point back to the
    /// first; same length as `points`.
    pub gaps: Vec<f64>,
}

/// Sorted points and circular gaps, exact rationals.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectGapsExact {
    pub points: Vec<BigRational>,
    pub gaps: Vec<BigRational>,
}

/// The independent oracle: sorts `{nα mod 1 : 0 ≤ n < Q}` and returns the
/// `Q` circular gaps in positional order. Works for any `α`, including
/// rationals of low height (where the Farey-based operations do not apply).
///
/// Points are computed exactly and rounded once at the end, so the only
/// float error is the final rounding.
pub fn direct_gaps(alpha: &AlphaValue, q: u64) -> Result<DirectGaps> {
    let exact = direct_gaps_exact(alpha, q)?;
    Ok(DirectGaps {
        points: exact
            .points
            .iter()
            .map(|p| p.to_f64().unwrap_or(f64::NAN))
            .collect(),
        gaps: exact
            .gaps
            .iter()
            .map(|p| p.to_f64().unwrap_or(f64::NAN))
            .collect(),
    })
}

/// Exact-rational variant of [`direct_gaps`].
pub fn direct_gaps_exact(alpha: &AlphaValue, q: u64) -> Result<DirectGapsExact> {
    if q == 0 {
        return Err(Error::InvalidParameter("Q must be at least 1".into()));
    }
    let a = alpha.value();
    let (p, r) = (a.numer(), a.denom());
    // {n·α} = (n·p mod r)/r — accumulate the numerator modularly. All points
    // share the denominator `r`, so sorting and differencing stay in `BigInt`
    // and nothing needs rational normalization until the results are built.
    let mut nums = Vec::with_capacity(q as usize);
    let mut acc = BigInt::zero();
    for _ in 0..q {
        nums.push(acc.clone());
        acc += p;
        acc %= r;
    }
    nums.sort_unstable();
    // Gap numerators repeat heavily (at most three distinct values), so each
    // reduced rational is constructed once and cloned for its repeats.
    let mut seen: Vec<(BigInt, BigRational)> = Vec::new();
    let mut gap_of = |num: BigInt| -> BigRational {
        if let Some((_, g)) = seen.iter().find(|(n, _)| *n == num) {
            return g.clone();
        }
        let g = BigRational::new(num.clone(), r.clone());
        seen.push((num, g.clone()));
        g
    };
    let gaps = (0..nums.len())
        .map(|i| {
            if i + 1 < nums.len() {
                gap_of(&nums[i + 1] - &nums[i])
            } else {
                gap_of(r - &nums[i] + &nums[0])
            }
        })
        .collect();
    let points = nums
        .into_iter()
        .map(|n| BigRational::new(n, r.clone()))
        .collect();
    Ok(DirectGapsExact { points, gaps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const SQRT2: &str = "1.41421356237309504880";

    fn words_to_string(words: &[GapWord]) -> String {
        words
            .iter()
            .map(|w| w.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    fn random_alpha(rng: &mut impl Rng) -> Option<AlphaValue> {
        let digits: String = (0..25)
            .map(|_| char::from(b'0' + rng.gen_range(0..10u8)))
            .collect();
        AlphaValue::from_decimal_str(&format!("0.{digits}")).ok()
    }

    #[test]
    fn sqrt2_gap_triple() {
        let alpha = AlphaValue::from_decimal_str(SQRT2).unwrap();
        let t = gap_triple(&alpha, 10).unwrap();
        assert!((t.length_a_f64() - 0.071067811865475).abs() < 1e-12);
        assert!((t.length_b_f64() - 0.100505063388335).abs() < 1e-12);
        assert!((t.length_c_f64() - 0.171572875253810).abs() < 1e-12);
        assert_eq!((t.count_a(), t.count_b(), t.count_c()), (5, 3, 2));
        assert_eq!(t.total_length(), BigRational::from(BigInt::from(1)));
    }

    #[test]
    fn small_alpha_two_gap_degeneracy() {
        let alpha = AlphaValue::from_decimal_str("0.001").unwrap();
        let t = gap_triple(&alpha, 10).unwrap();
        assert_eq!((t.count_a(), t.count_b(), t.count_c()), (9, 1, 0));
        assert!((t.length_a_f64() - 0.001).abs() < 1e-15);
        assert!((t.length_b_f64() - 0.991).abs() < 1e-15);
    }

    #[test]
    fn sqrt2_sigma() {
        let alpha = AlphaValue::from_decimal_str(SQRT2).unwrap();
        let sigma = sigma_permutation(&alpha, 10).unwrap();
        assert_eq!(sigma.values(), &[0, 5, 3, 8, 1, 6, 4, 9, 2, 7]);
    }

    #[test]
    fn small_alpha_identity_sigma() {
        let alpha = AlphaValue::from_decimal_str("0.001").unwrap();
        let sigma = sigma_permutation(&alpha, 5).unwrap();
        assert_eq!(sigma.values(), &[0, 1, 2, 3, 4]);
    }

    #[test]
    fn sqrt2_word_lists() {
        let alpha = AlphaValue::from_decimal_str(SQRT2).unwrap();
        let g1 = gap_word_list(&alpha, 10, 1).unwrap();
        assert_eq!(words_to_string(&g1), "A,C,A,B,A,C,A,B,A,B");
        let g2 = gap_word_list(&alpha, 10, 2).unwrap();
        assert_eq!(words_to_string(&g2), "AC,CA,AB,BA,AC,CA,AB,BA,AB,BA");
        let g3 = gap_word_list(&alpha, 10, 3).unwrap();
        assert_eq!(
            words_to_string(&g3),
            "ACA,CAB,ABA,BAC,ACA,CAB,ABA,BAB,ABA,BAC"
        );
    }

    #[test]
    fn word_length_bounds() {
        let alpha = AlphaValue::from_decimal_str(SQRT2).unwrap();
        assert!(gap_word_list(&alpha, 10, 0).is_err());
        assert!(gap_word_list(&alpha, 10, 11).is_err());
        assert!(gap_word_list(&alpha, 10, 10).is_ok());
    }

    #[test]
    fn sigma_matches_sort_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let q = rng.gen_range(2..300u64);
            let Some(alpha) = random_alpha(&mut rng) else {
                continue;
            };
            if alpha.ensure_order(q).is_err() {
                continue;
            }
            let sigma = sigma_permutation(&alpha, q).unwrap();
            // Oracle: sort the indices by their exact point values.
            let mut idx: Vec<u64> = (0..q).collect();
            let pts = direct_gaps_exact(&alpha, q).unwrap();
            let mut unsorted: Vec<BigRational> = Vec::new();
            {
                let a = alpha.value();
                let mut acc = BigInt::zero();
                for _ in 0..q {
                    unsorted.push(BigRational::new(acc.clone(), a.denom().clone()));
                    acc += a.numer();
                    acc %= a.denom();
                }
            }
            idx.sort_by(|&i, &j| unsorted[i as usize].cmp(&unsorted[j as usize]));
            assert_eq!(sigma.values(), &idx[..], "sigma mismatch at Q={q}");
            // While we are here: the sorted points must agree too.
            let sorted: Vec<&BigRational> = idx.iter().map(|&i| &unsorted[i as usize]).collect();
            assert!(sorted.iter().zip(pts.points.iter()).all(|(a, b)| *a == b));
        }
    }

    #[test]
    fn word_counts_match_triple_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..40 {
            let q = rng.gen_range(3..500u64);
            let Some(alpha) = random_alpha(&mut rng) else {
                continue;
            };
            if alpha.ensure_order(q).is_err() {
                continue;
            }
            let t = gap_triple(&alpha, q).unwrap();
            let words = gap_word_list(&alpha, q, 1).unwrap();
            let count = |s: GapSymbol| words.iter().filter(|w| w.symbols()[0] == s).count() as u64;
            assert_eq!(count(GapSymbol::A), t.count_a());
            assert_eq!(count(GapSymbol::B), t.count_b());
            assert_eq!(count(GapSymbol::C), t.count_c());

            // k = 2 words: each symbol leads exactly its k = 1 count of words.
            let words2 = gap_word_list(&alpha, q, 2).unwrap();
            let lead = |s: GapSymbol| words2.iter().filter(|w| w.symbols()[0] == s).count() as u64;
            assert_eq!(lead(GapSymbol::A), t.count_a());
            assert_eq!(lead(GapSymbol::B), t.count_b());
            assert_eq!(lead(GapSymbol::C), t.count_c());
        }
    }

    #[test]
    fn oracle_three_gap_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..30 {
            let q = rng.gen_range(2..400u64);
            let Some(alpha) = random_alpha(&mut rng) else {
                continue;
            };
            let d = direct_gaps_exact(&alpha, q).unwrap();
            let mut distinct: Vec<BigRational> = Vec::new();
            for g in &d.gaps {
                if !distinct.contains(g) {
                    distinct.push(g.clone());
                }
            }
            distinct.sort();
            assert!(distinct.len() <= 3, "more than three gaps at Q={q}");
            if distinct.len() == 3 {
                assert_eq!(&distinct[0] + &distinct[1], distinct[2]);
            }
            let total: BigRational = d.gaps.iter().sum();
            assert_eq!(total, BigRational::from(BigInt::from(1)));
        }
    }

    #[test]
    fn oracle_handles_rational_lattice() {
        let alpha = AlphaValue::from_rational(1, 4).unwrap();
        let d = direct_gaps_exact(&alpha, 4).unwrap();
        let quarter = BigRational::new(BigInt::from(1), BigInt::from(4));
        assert!(d.gaps.iter().all(|g| g == &quarter));
        // The Farey path agrees here: 1/4 is strictly inside the arc
        // (0/1, 1/3) of order 4, so the triple is well-defined and the four
        // gaps are 3 + 1 copies of length 1/4 (with no C gaps).
        let t = gap_triple(&alpha, 4).unwrap();
        assert_eq!((t.count_a(), t.count_b(), t.count_c()), (3, 1, 0));
        assert_eq!(t.length_a(), &quarter);
        assert_eq!(t.length_b(), &quarter);
    }

    #[test]
    fn word_enumeration_order() {
        let all = GapWord::all_of_length(2);
        assert_eq!(all.len(), 9);
        assert_eq!(all[0].to_string(), "AA");
        assert_eq!(all[1].to_string(), "AB");
        assert_eq!(all[8].to_string(), "CC");
        assert_eq!(GapWord::parse("acb").unwrap().to_string(), "ACB");
        assert!(GapWord::parse("axc").is_err());
        assert!(GapWord::new(vec![]).is_err());
    }
}
