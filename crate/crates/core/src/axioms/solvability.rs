use serde::{Deserialize, Serialize};

use crate::grid::Grid2;
use crate::lawcore::{invert_in_first, linspace, BivariateCode};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct X0Candidate {
    pub x0: f64,
    pub range_lo: f64,
    pub range_hi: f64,
    /// Fraction of the probed range `H` reached by `r ↦ code(x0, r)`.
    pub coverage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolvabilityReport {
    /// Range of the code over the grid, `[min, max]`.
    pub probed_range: [f64; 2],
    /// Targets `p` with `code(x, t) < p` for some `x` in `J`.
    pub s1_targets: usize,
    /// Fraction of those targets reachable in `J`.
    pub s1_coverage: f64,
    /// Targets strictly inside the attainable range of `code(·, t)`.
    pub s1_interior_targets: usize,
    pub s1_interior_coverage: f64,
    pub candidates: Vec<X0Candidate>,
    pub best_x0: Option<f64>,
}

/// Probe [S1] on sampled `(p, t)` and [S2] at each candidate `x0`.
///
/// On a bounded rectangle [S1] generally holds only for targets inside the
/// attainable range of each section, so both the full and the interior
/// coverage are reported.
pub fn check_solvability(code: &BivariateCode, grid: &Grid2, x0_candidates: &[f64]) -> SolvabilityReport {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (y, r) in grid.points() {
        let v = code.eval(y, r);
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let targets = linspace(lo, hi, grid.ys.len().max(2) + 2);
    let targets = &targets[1..targets.len() - 1];

    let (mut full, mut full_ok, mut inner, mut inner_ok) = (0usize, 0usize, 0usize, 0usize);
    let j = code.first();
    for &t in &grid.rs {
        let floor = code.eval(j.lo, t);
        let ceil = code.eval(j.hi, t);
        for &p in targets {
            if p <= floor {
                continue;
            }
            full += 1;
            let ok = match invert_in_first(code, p, t) {
                Ok(w) => (code.eval(w, t) - p).abs() <= 1e-9 * p.abs().max(1.0),
                Err(_) => false,
            };
            if ok {
                full_ok += 1;
            }
            if p < ceil {
                inner += 1;
                if ok {
                    inner_ok += 1;
                }
            }
        }
    }
    let frac = |a: usize, b: usize| if b > 0 { a as f64 / b as f64 } else { 1.0 };

    let width = hi - lo;
    let candidates: Vec<X0Candidate> = x0_candidates
        .iter()
        .map(|&x0| {
            let (a, b) = code.section_range_second(x0);
            let overlap = (b.min(hi) - a.max(lo)).max(0.0);
            X0Candidate {
                x0,
                range_lo: a,
                range_hi: b,
                coverage: if width > 0.0 { overlap / width } else { 0.0 },
            }
        })
        .collect();
    let best_x0 = candidates
        .iter()
        .fold(None::<&X0Candidate>, |best, c| match best {
            Some(b) if b.coverage >= c.coverage => Some(b),
            _ => Some(c),
        })
        .map(|c| c.x0);

    SolvabilityReport {
        probed_range: [lo, hi],
        s1_targets: full,
        s1_coverage: frac(full_ok, full),
        s1_interior_targets: inner,
        s1_interior_coverage: frac(inner_ok, inner),
        candidates,
        best_x0,
    }
}
