//! Adaptive two-dimensional quadrature over triangles.
//!
//! The base rule is the classical 7-point degree-5 rule (centroid plus two
//! symmetric three-point orbits). Each cell stores the rule value of its
//! four midpoint-subdivision children; the difference between the cell's own
//! rule value and the children sum drives a greedy refinement of the worst
//! cells. Refinement is deterministic — the worst-cell heap breaks ties by
//! cell id, rounds of splits are evaluated in parallel but collected in
//! order, and the final value is a pairwise sum over cells in id order — so
//! repeated runs give bit-identical results regardless of thread count.
//!
//! Integrands are evaluated only at strictly interior points of each cell,
//! so integrable edge singularities (like the `1/(xy)` weight on the
//! triangle `x + y ≥ 1`) are handled by refinement alone.

use rayon::prelude::*;
use std::collections::BinaryHeap;

use crate::{Error, Result};

/// A plane triangle, by vertices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triangle {
    pub vertices: [(f64, f64); 3],
}

impl Triangle {
    pub fn new(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> Self {
        Triangle {
            vertices: [a, b, c],
        }
    }

    pub fn area(&self) -> f64 {
        let [(x0, y0), (x1, y1), (x2, y2)] = self.vertices;
        0.5 * ((x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0)).abs()
    }

    /// Midpoint subdivision into four similar triangles.
    fn subdivide(&self) -> [Triangle; 4] {
        let [a, b, c] = self.vertices;
        let mid = |p: (f64, f64), q: (f64, f64)| (0.5 * (p.0 + q.0), 0.5 * (p.1 + q.1));
        let (ab, bc, ca) = (mid(a, b), mid(b, c), mid(c, a));
        [
            Triangle::new(a, ab, ca),
            Triangle::new(ab, b, bc),
            Triangle::new(ca, bc, c),
            Triangle::new(ab, bc, ca),
        ]
    }
}

/// The 7-point degree-5 rule.
fn rule<F: Fn(f64, f64) -> f64 + ?Sized>(f: &F, t: &Triangle) -> f64 {
    let s15 = 15.0_f64.sqrt();
    let (ga, wa) = ((6.0 + s15) / 21.0, (155.0 + s15) / 1200.0);
    let (gb, wb) = ((6.0 - s15) / 21.0, (155.0 - s15) / 1200.0);
    let [(x0, y0), (x1, y1), (x2, y2)] = t.vertices;
    let eval =
        |b0: f64, b1: f64, b2: f64| f(b0 * x0 + b1 * x1 + b2 * x2, b0 * y0 + b1 * y1 + b2 * y2);
    let orbit = |g: f64| {
        let h = 1.0 - 2.0 * g;
        eval(h, g, g) + eval(g, h, g) + eval(g, g, h)
    };
    let third = 1.0 / 3.0;
    t.area() * (0.225 * eval(third, third, third) + wa * orbit(ga) + wb * orbit(gb))
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    /// The integral estimate (sum of the refined children rules per cell).
    pub value: f64,
    /// Sum over cells of the coarse-vs-refined discrepancy; an error
    /// *estimate*, reliable for integrable integrands but not a rigorous
    /// bound.
    pub error_bound: f64,
    /// Number of leaf cells in the final subdivision.
    pub cells: usize,
}

/// One leaf cell: its four children rule values (their sum is the cell's
/// value estimate) and the discrepancy against the cell's own rule value.
struct Cell {
    triangle: Triangle,
    child_rule: [f64; 4],
    err: f64,
    id: u64,
}

impl Cell {
    fn evaluate<F: Fn(f64, f64) -> f64 + Sync + ?Sized>(f: &F, t: Triangle, id: u64) -> Cell {
        let coarse = rule(f, &t);
        let children = t.subdivide();
        let child_rule = [
            rule(f, &children[0]),
            rule(f, &children[1]),
            rule(f, &children[2]),
            rule(f, &children[3]),
        ];
        let fine: f64 = child_rule.iter().sum();
        Cell {
            triangle: t,
            child_rule,
            err: (fine - coarse).abs(),
            id,
        }
    }

    fn fine(&self) -> f64 {
        self.child_rule.iter().sum()
    }

    /// Max-heap key: worst error first, ties broken by id (newest first) so
    /// the refinement order is a pure function of the inputs. Non-negative
    /// f64s order correctly by their bit patterns.
    fn key(&self) -> (u64, u64) {
        (self.err.to_bits(), self.id)
    }
}

/// Axis selector for [`cut_triangles`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    /// Cut along a vertical line `x = c`.
    X,
    /// Cut along a horizontal line `y = c`.
    Y,
}

/// Splits one triangle by the line `coord = c`, returning one to three
/// triangles whose union is the original. Intersection points are placed
/// exactly on the line, so the pieces never straddle it — after cutting, the
/// line is a union of cell edges and stays so under midpoint subdivision.
fn cut_one(t: Triangle, axis: Axis, c: f64, out: &mut Vec<Triangle>) {
    let coord = |p: (f64, f64)| match axis {
        Axis::X => p.0,
        Axis::Y => p.1,
    };
    let cross = |p: (f64, f64), q: (f64, f64)| {
        let s = (c - coord(p)) / (coord(q) - coord(p));
        match axis {
            Axis::X => (c, p.1 + s * (q.1 - p.1)),
            Axis::Y => (p.0 + s * (q.0 - p.0), c),
        }
    };
    let v = t.vertices;
    let pos: Vec<usize> = (0..3).filter(|&i| coord(v[i]) > c).collect();
    let neg: Vec<usize> = (0..3).filter(|&i| coord(v[i]) < c).collect();
    match (pos.len(), neg.len()) {
        // Entirely on one side (possibly touching the line): keep as is.
        (_, 0) | (0, _) => out.push(t),
        // One vertex on the line, the other two on opposite sides: the cut
        // runs from that vertex to the opposite edge.
        (1, 1) => {
            let z = 3 - pos[0] - neg[0];
            let m = cross(v[pos[0]], v[neg[0]]);
            out.push(Triangle::new(v[z], v[pos[0]], m));
            out.push(Triangle::new(v[z], m, v[neg[0]]));
        }
        // One vertex alone on its side: a triangle tip plus a quad, the quad
        // split along one of its diagonals.
        (1, 2) | (2, 1) => {
            let (lone, rest) = if pos.len() == 1 {
                (pos[0], neg)
            } else {
                (neg[0], pos)
            };
            let (b, d) = (rest[0], rest[1]);
            let mb = cross(v[lone], v[b]);
            let md = cross(v[lone], v[d]);
            out.push(Triangle::new(v[lone], mb, md));
            out.push(Triangle::new(mb, v[b], v[d]));
            out.push(Triangle::new(mb, v[d], md));
        }
        _ => unreachable!("three vertices cannot split 2+2"),
    }
}

/// Cuts every cell by every line `x = c` (`vertical`) and `y = c`
/// (`horizontal`). Used to align an initial mesh with the lines where an
/// integrand changes algebraic form: a region boundary lying strictly inside
/// a cell can hide from the rule's interior sample points, and a cell whose
/// samples all read zero is never refined. With the cuts, such boundaries
/// are unions of cell edges and every cell sees a single analytic piece.
pub fn cut_triangles(cells: &[Triangle], vertical: &[f64], horizontal: &[f64]) -> Vec<Triangle> {
    let mut mesh = cells.to_vec();
    let mut cut_all = |axis: Axis, c: f64| {
        let mut next = Vec::with_capacity(mesh.len() + 4);
        for &t in &mesh {
            cut_one(t, axis, c, &mut next);
        }
        mesh = next;
    };
    for &c in vertical {
        cut_all(Axis::X, c);
    }
    for &c in horizontal {
        cut_all(Axis::Y, c);
    }
    mesh
}

/// Deterministic pairwise summation (also used by the arc-sum assemblies:
/// the result does not depend on chunking or thread count, only on order).
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n => {
            let half = n / 2;
            pairwise_sum(&values[..half]) + pairwise_sum(&values[half..])
        }
    }
}

/// How many worst cells are refined per parallel round.
const ROUND_SIZE: usize = 64;

/// Adaptively integrates `f` over the union of `initial` triangles until the
/// summed cell-error estimate drops below `tol / 2`, refining at most
/// `budget` leaf cells.
///
/// Returns [`Error::ToleranceNotMet`] (with the achieved estimate) if the
/// budget runs out first. The cell `tol` is absolute.
pub fn integrate_triangles<F>(
    f: &F,
    initial: &[Triangle],
    tol: f64,
    budget: usize,
) -> Result<QuadratureResult>
where
    F: Fn(f64, f64) -> f64 + Sync + ?Sized,
{
    if initial.is_empty() {
        return Err(Error::InvalidParameter(
            "quadrature needs at least one initial triangle".into(),
        ));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "quadrature tolerance must be positive, got {tol}"
        )));
    }
    let mut next_id: u64 = 0;
    let mut heap: BinaryHeap<HeapEntry> = BinaryHeap::new();
    let seeds: Vec<Cell> = initial
        .par_iter()
        .enumerate()
        .map(|(i, &t)| Cell::evaluate(f, t, i as u64))
        .collect();
    next_id += seeds.len() as u64;
    let mut err_sum = 0.0;
    for c in seeds {
        err_sum += c.err;
        heap.push(HeapEntry(c));
    }

    while err_sum > 0.5 * tol {
        let leaves = heap.len();
        let headroom = (budget.saturating_sub(leaves)) / 3;
        if headroom == 0 {
            let (_, error_bound, _) = collect(heap);
            return Err(Error::ToleranceNotMet {
                achieved: error_bound,
                tolerance: tol,
                budget,
            });
        }
        let rounds = ROUND_SIZE.min(headroom).min(leaves);
        let mut popped = Vec::with_capacity(rounds);
        for _ in 0..rounds {
            let entry = heap.pop().expect("heap cannot be empty mid-refinement");
            err_sum -= entry.0.err;
            popped.push(entry.0);
        }
        // Split every popped cell; each child's rule value is already known
        // from the parent, so only the grandchildren rules are new work.
        let id_base = next_id;
        let children: Vec<Cell> = popped
            .par_iter()
            .enumerate()
            .flat_map_iter(|(k, cell)| {
                let kids = cell.triangle.subdivide();
                let base = id_base + 4 * k as u64;
                kids.into_iter()
                    .zip(cell.child_rule)
                    .enumerate()
                    .map(move |(i, (t, coarse))| {
                        let mut c = Cell::evaluate(f, t, base + i as u64);
                        // The parent already evaluated this cell's rule; the
                        // recomputation inside `evaluate` is bit-identical,
                        // so overriding the discrepancy keeps determinism.
                        c.err = (c.fine() - coarse).abs();
                        c
                    })
            })
            .collect();
        next_id += children.len() as u64;
        for c in children {
            err_sum += c.err;
            heap.push(HeapEntry(c));
        }
    }

    let (value, error_bound, cells) = collect(heap);
    Ok(QuadratureResult {
        value,
        error_bound,
        cells,
    })
}

/// Drains the heap and reduces it deterministically (id order, pairwise).
fn collect(heap: BinaryHeap<HeapEntry>) -> (f64, f64, usize) {
    let mut leaves: Vec<Cell> = heap.into_iter().map(|e| e.0).collect();
    leaves.sort_by_key(|c| c.id);
    let values: Vec<f64> = leaves.iter().map(|c| c.fine()).collect();
    let errs: Vec<f64> = leaves.iter().map(|c| c.err).collect();
    (pairwise_sum(&values), pairwise_sum(&errs), leaves.len())
}

struct HeapEntry(Cell);

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.0.key() == other.0.key()
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.key().cmp(&other.0.key())
    }
}
