//! Adaptive tensor-Gauss cubature on 3D boxes with worst-first refinement.
//! Used by the weighted norms and overlap integrals after symmetry reduction.

use crate::quad::QuadError;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

const GL4_X: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_3,
    0.339_981_043_584_856_3,
    0.861_136_311_594_052_6,
];
const GL4_W: [f64; 4] = [
    0.347_854_845_137_453_86,
    0.652_145_154_862_546_1,
    0.652_145_154_862_546_1,
    0.347_854_845_137_453_86,
];
const GL2_X: [f64; 2] = [-0.577_350_269_189_625_7, 0.577_350_269_189_625_7];
const GL2_W: [f64; 2] = [1.0, 1.0];

#[derive(Debug, Clone, Copy)]
pub struct Box3 {
    pub lo: [f64; 3],
    pub hi: [f64; 3],
}

impl Box3 {
    fn volume_scale(&self) -> f64 {
        (0..3).map(|d| 0.5 * (self.hi[d] - self.lo[d])).product()
    }
    fn map(&self, d: usize, t: f64) -> f64 {
        0.5 * (self.hi[d] + self.lo[d]) + 0.5 * (self.hi[d] - self.lo[d]) * t
    }
}

fn rule(f: &mut dyn FnMut(f64, f64, f64) -> f64, b: &Box3) -> (f64, f64) {
    let scale = b.volume_scale();
    let mut i4 = 0.0;
    for (ix, &x) in GL4_X.iter().enumerate() {
        for (iy, &y) in GL4_X.iter().enumerate() {
            for (iz, &z) in GL4_X.iter().enumerate() {
                let v = f(b.map(0, x), b.map(1, y), b.map(2, z));
                i4 += GL4_W[ix] * GL4_W[iy] * GL4_W[iz] * v;
            }
        }
    }
    let mut i2 = 0.0;
    for (ix, &x) in GL2_X.iter().enumerate() {
        for (iy, &y) in GL2_X.iter().enumerate() {
            for (iz, &z) in GL2_X.iter().enumerate() {
                let v = f(b.map(0, x), b.map(1, y), b.map(2, z));
                i2 += GL2_W[ix] * GL2_W[iy] * GL2_W[iz] * v;
            }
        }
    }
    (i4 * scale, (i4 - i2).abs() * scale)
}

struct Entry {
    err: f64,
    seq: usize,
    bx: Box3,
    value: f64,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err && self.seq == other.seq
    }
}
impl Eq for Entry {}
impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        // max-heap on error, deterministic tie-break on insertion order
        self.err
            .partial_cmp(&other.err)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CubatureBudget {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_boxes: usize,
}

impl Default for CubatureBudget {
    fn default() -> Self {
        CubatureBudget { rel_tol: 5e-4, abs_tol: 1e-300, max_boxes: 60_000 }
    }
}

/// Worst-first adaptive refinement over the initial boxes, splitting the
/// longest edge. Fails explicitly when the budget is exhausted before the
/// error target is met.
pub fn adaptive_boxes(
    mut f: impl FnMut(f64, f64, f64) -> f64,
    initial: &[Box3],
    budget: CubatureBudget,
) -> Result<(f64, f64), QuadError> {
    let mut heap = BinaryHeap::new();
    let mut seq = 0usize;
    let mut total = 0.0;
    let mut total_err = 0.0;
    for b in initial {
        let (v, e) = rule(&mut f, b);
        total += v;
        total_err += e;
        heap.push(Entry { err: e, seq, bx: *b, value: v });
        seq += 1;
    }
    let mut boxes = initial.len();
    loop {
        let target = budget.abs_tol.max(budget.rel_tol * total.abs());
        if total_err <= target || heap.peek().map(|e| e.err <= 0.0).unwrap_or(true) {
            return Ok((total, total_err));
        }
        if boxes >= budget.max_boxes {
            return Err(QuadError::BudgetExhausted {
                intervals: boxes,
                error: total_err,
                target,
            });
        }
        let worst = heap.pop().expect("nonempty heap");
        total -= worst.value;
        total_err -= worst.err;
        // split the longest edge
        let mut dim = 0;
        for d in 1..3 {
            if worst.bx.hi[d] - worst.bx.lo[d] > worst.bx.hi[dim] - worst.bx.lo[dim] {
                dim = d;
            }
        }
        let mid = 0.5 * (worst.bx.lo[dim] + worst.bx.hi[dim]);
        let mut left = worst.bx;
        left.hi[dim] = mid;
        let mut right = worst.bx;
        right.lo[dim] = mid;
        for half in [left, right] {
            let (v, e) = rule(&mut f, &half);
            total += v;
            total_err += e;
            heap.push(Entry { err: e, seq, bx: half, value: v });
            seq += 1;
        }
        boxes += 1;
    }
}

/// Breakpoint list -> boxes of the tensor grid.
pub fn grid_boxes(s_breaks: &[f64], p_breaks: &[f64], r_breaks: &[f64]) -> Vec<Box3> {
    let mut out = Vec::new();
    for i in 0..s_breaks.len() - 1 {
        for j in 0..p_breaks.len() - 1 {
            for l in 0..r_breaks.len() - 1 {
                out.push(Box3 {
                    lo: [s_breaks[i], p_breaks[j], r_breaks[l]],
                    hi: [s_breaks[i + 1], p_breaks[j + 1], r_breaks[l + 1]],
                });
            }
        }
    }
    out
}

/// Sorted, deduplicated, clamped breakpoints within [lo, hi].
pub fn clean_breaks(mut pts: Vec<f64>, lo: f64, hi: f64) -> Vec<f64> {
    pts.push(lo);
    pts.push(hi);
    pts.retain(|&x| x.is_finite());
    let mut out: Vec<f64> = pts.into_iter().map(|x| x.clamp(lo, hi)).collect();
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    out
}
