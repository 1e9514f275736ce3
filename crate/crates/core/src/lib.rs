//! Gap statistics for the fractional parts `{n·α}`, `0 ≤ n < Q`.
//!
//! The points `{n·α mod 1}` partition the circle into gaps of at most three
//! distinct lengths `A`, `B` and `C = A + B` (the three-distance theorem).
//! Averaged over `α` in an interval `[β, β+η]`, the proportion of gaps of
//! (normalized) length at least `λ/Q` converges as `Q → ∞` to an explicit
//! limit law `g₁(λ)`, and the joint law of `k` consecutive gaps converges to
//! `g_k(λ₁,…,λ_k)`; `g₁` and `g₂` have closed forms built from dilogarithms.
//!
//! This crate provides the complete toolchain around those facts:
//!
//! * [`farey`] — exact Farey-fraction arithmetic: neighbor location for a
//!   given `α` and enumeration of all consecutive pairs (arcs) of order `Q`.
//! * [`three_gap`] — gap lengths and counts, the sorting permutation `σ`, the
//!   circular lists of gap words, and a direct sort-based oracle.
//! * [`dilog`] — the real dilogarithm `Li₂`.
//! * [`closed_forms`] — the limit laws: `g₁` (three pieces), its density
//!   representation, and `g₂` on its fourteen plane regions.
//! * [`arc_measure`] — the exact finite-`Q` averages: per-arc contributions
//!   via the substitution `α = a₁/q₁ + t/(q₁q₂)`, gap-word frequencies,
//!   assembly of `g_k^{β,η}(λ;Q)`, the limiting triangle integral by adaptive
//!   quadrature, a seeded Monte Carlo oracle, and Farey-sum discrepancies.
//! * [`quadrature`] — adaptive two-dimensional quadrature over triangles.
//!
//! Everything upstream of the closed forms is exact integer/rational
//! arithmetic; floating point enters only in final summaries and in the
//! quadrature/closed-form evaluations, which are independently cross-checked
//! by the exact paths in the test suite.

// `!(x > 0.0)` deliberately rejects NaN along with non-positive values, and
// reference constants are written with all digits of the values they pin.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::excessive_precision)]

pub mod arc_measure;
pub mod closed_forms;
pub mod dilog;
pub mod farey;
pub mod quadrature;
pub mod three_gap;

pub use arc_measure::{
    arc_contribution, chi_interval, empirical_g1_curve, empirical_gk, empirical_gk_exact,
    gap_word_frequency, lemma2_discrepancy, monte_carlo_gk, quadrature_gk, quadrature_gk_with,
    ArcContribution, McEstimate, TestFunction, TrianglePoint, UnitInterval1D,
};
pub use closed_forms::{
    classify_region, g1, g1_density, g1_from_density, g1_piece_a, g1_piece_c, g2, LambdaVector,
    Region, RegionLabel,
};
pub use dilog::{li2, li2_real, li2_strict, DilogValue};
pub use farey::{
    covered_span, enumerate_farey_arcs, farey_neighbors, make_fraction, next_farey, AlphaValue,
    FareyArcs, FareyFraction, FareyPair,
};
pub use quadrature::QuadratureResult;
pub use three_gap::{
    direct_gaps, direct_gaps_exact, gap_triple, gap_word_list, sigma_permutation, DirectGaps,
    DirectGapsExact, GapSymbol, GapTriple, GapWord, SigmaPermutation,
};

/// `ζ(2) = π²/6`, the normalization constant of the Farey-average weight.
pub const ZETA2: f64 = std::f64::consts::PI * std::f64::consts::PI / 6.0;

/// `1/ζ(2) = 6/π²`, the density of coprime pairs.
pub const INV_ZETA2: f64 = 1.0 / ZETA2;

/// Errors shared by all modules.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// `α` equals a Farey fraction of denominator below `Q`; the gap
    /// structure is degenerate and neighbor location is undefined.
    #[error(
        "alpha = {alpha} is a fraction of denominator {denominator} < Q = {q}; \
             the gap structure is degenerate"
    )]
    DegenerateAlpha {
        alpha: String,
        denominator: u64,
        q: u64,
    },

    /// A decimal `α` was given with too few digits to separate it from every
    /// Farey fraction of order `Q` (consecutive fractions are `≥ 1/Q²` apart).
    #[error(
        "alpha carries {digits} decimal digits, but order Q = {q} needs resolution \
             finer than 1/Q^2; supply more digits or an exact rational"
    )]
    InsufficientPrecision { digits: usize, q: u64 },

    /// A parameter is outside its documented domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// `χ_C` is requested on the diagonal `x = y`, where its case split is
    /// undefined (callers must use the degenerate-arc limit instead).
    #[error("chi_C is undefined on the diagonal x = y (got x = y = {x})")]
    DegenerateDiagonal { x: f64 },

    /// Adaptive quadrature exhausted its cell budget before reaching the
    /// requested tolerance; the achieved error bound is reported.
    #[error(
        "quadrature cell budget {budget} exhausted: achieved error bound {achieved:.3e} \
             exceeds tolerance {tolerance:.3e}"
    )]
    ToleranceNotMet {
        achieved: f64,
        tolerance: f64,
        budget: usize,
    },

    /// The dilogarithm was evaluated in strict mode at an argument `> 1`,
    /// where `Li₂` is complex; the real part is reported alongside.
    #[error("Li2({argument}) is complex for arguments > 1; real part = {real_part}")]
    ComplexDilog { argument: f64, real_part: f64 },
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
