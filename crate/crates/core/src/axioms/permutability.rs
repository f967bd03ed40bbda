use rayon::prelude::*;

use super::report::{relative_residual, CheckReport};
use crate::error::{Error, Result};
use crate::grid::Grid3;
use crate::lawcore::BivariateCode;

/// Largest tolerated fraction of skipped triples.
pub const MAX_SKIP_FRACTION: f64 = 0.9;

/// `|outer(inner(y,r), t) − outer(inner(y,t), r)|` over the grid, relative with
/// floor 1. Triples whose inner values leave `J` are skipped.
fn sweep(
    check: &str,
    outer: &BivariateCode,
    inner: &BivariateCode,
    grid: &Grid3,
    tol: f64,
) -> Result<CheckReport> {
    let j = outer.first();
    let samples: Vec<Option<(f64, Vec<f64>)>> = grid
        .points()
        .into_par_iter()
        .map(|(y, r, t)| {
            let a = inner.eval(y, r);
            let b = inner.eval(y, t);
            if !(j.contains(a) && j.contains(b)) {
                return None;
            }
            let lhs = outer.eval(a, t);
            let rhs = outer.eval(b, r);
            Some((relative_residual(lhs, rhs), vec![y, r, t]))
        })
        .collect();
    let total = samples.len();
    let skipped = samples.iter().filter(|s| s.is_none()).count();
    if total == 0 || skipped as f64 > MAX_SKIP_FRACTION * total as f64 {
        return Err(Error::DomainTooSmall { skipped, total });
    }
    Ok(CheckReport::reduce(check, grid.shape(), tol, samples).with_note("skipped", skipped as f64))
}

/// Residual of `G(G(y,r),t) = G(G(y,t),r)`.
pub fn check_permutability(code: &BivariateCode, grid: &Grid3, tol: f64) -> Result<CheckReport> {
    sweep("permutability", code, code, grid, tol)
}

/// Residual of `M(G(y,r),t) = M(G(y,t),r)`.
pub fn check_quasi_permutability(
    m: &BivariateCode,
    g: &BivariateCode,
    grid: &Grid3,
    tol: f64,
) -> Result<CheckReport> {
    sweep("quasi_permutability", m, g, grid, tol)
}
