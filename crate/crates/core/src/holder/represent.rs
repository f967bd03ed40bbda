use serde::{Deserialize, Serialize};

use super::construct::{construct_representation, ConstructionMeta};
use super::structure::HolderStructure;
use crate::axioms::{relative_residual, CheckReport};
use crate::error::{Error, Result};
use crate::grid::Grid2;
use crate::lawcore::{linspace, AdditiveRepresentation, BivariateCode, MonotoneFunction};

/// Largest tolerated spread of `f − g` in the symmetric case.
pub const CONSTANT_TOL: f64 = 1e-3;
/// Final halving ratio must be within this of 1.
pub const RATIO_TOL: f64 = 0.01;

/// Reconstruction residual of `rep` against `code` at grid points covered by
/// both `f` and `g`; uncovered points and clipped sums are skipped.
pub fn residual_report(
    rep: &AdditiveRepresentation,
    code: &BivariateCode,
    grid: &Grid2,
    tol: f64,
) -> CheckReport {
    let (fd, gd) = (rep.f.domain(), rep.g.domain());
    let mut clipped = 0usize;
    let samples: Vec<_> = grid
        .points()
        .into_iter()
        .map(|(y, r)| {
            if !(fd.contains(y) && gd.contains(r)) {
                return None;
            }
            match rep.reconstruct(y, r) {
                Ok(v) => Some((relative_residual(v, code.eval(y, r)), vec![y, r])),
                Err(_) => {
                    clipped += 1;
                    None
                }
            }
        })
        .collect();
    CheckReport::reduce("reconstruction", grid.shape(), tol, samples).with_note("clipped", clipped as f64)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SymmetricRepresentation {
    /// `h = f − K`, with `G(x, y) = h⁻¹(h(x) + h(y))`.
    pub h: MonotoneFunction,
    /// Mean of `f − g` over the common coverage.
    pub k: f64,
    /// Largest `|f − g − K|` there.
    pub max_deviation: f64,
    pub max_asymmetry: f64,
    pub meta: ConstructionMeta,
    pub pass: bool,
}

/// Single-function representation of a symmetric permutable code.
///
/// Fails with [`Error::NotSymmetric`] when `|G(x,y) − G(y,x)|` (relative)
/// exceeds `tol` somewhere on the grid. Otherwise `f` and `g` are constructed,
/// `f − g` is checked to be constant (to [`CONSTANT_TOL`]) and `f` is shifted
/// by that constant. The constant depends on the gauge.
pub fn symmetric_representation(
    hs: &HolderStructure,
    grid: &Grid2,
    tol: f64,
    r0: Option<f64>,
    depth: u32,
) -> Result<SymmetricRepresentation> {
    let code = hs.code();
    let (j, jp) = (code.first(), code.second());
    let mut max_asymmetry: f64 = 0.0;
    for (x, y) in grid.points() {
        if j.contains(y) && jp.contains(x) {
            max_asymmetry = max_asymmetry.max(relative_residual(code.eval(x, y), code.eval(y, x)));
        }
    }
    if max_asymmetry > tol {
        return Err(Error::NotSymmetric { max_asymmetry });
    }
    let (rep, c, _) = construct_representation(hs, r0, depth)?;
    let common = rep
        .f
        .domain()
        .intersect(&rep.g.domain())
        .ok_or_else(|| Error::DegenerateFit("f and g share no coverage".into()))?;
    let diffs: Vec<f64> = linspace(common.lo, common.hi, 513)
        .into_iter()
        .map(|x| rep.f.eval_unchecked(x) - rep.g.eval_unchecked(x))
        .collect();
    let k = diffs.iter().sum::<f64>() / diffs.len() as f64;
    let max_deviation = diffs.iter().map(|d| (d - k).abs()).fold(0.0, f64::max);
    let h = rep.f.affine(1.0, -k)?;
    Ok(SymmetricRepresentation {
        h,
        k,
        max_deviation,
        max_asymmetry,
        meta: c.meta,
        pass: max_deviation <= CONSTANT_TOL,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivativeSeries {
    pub points: Vec<f64>,
    pub steps: Vec<f64>,
    /// Central differences, one row per point, one column per step.
    pub estimates: Vec<Vec<f64>>,
    /// `est(h) / est(h/2)` for successive steps.
    pub ratios: Vec<Vec<f64>>,
    /// Largest `|ratio − 1|` over the points at the finest pair of steps.
    pub final_ratio_deviation: f64,
    /// Smallest `|estimate|` at the finest step.
    pub margin: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifferentiabilityReport {
    pub f: DerivativeSeries,
    pub g: DerivativeSeries,
    pub pass: bool,
}

/// Central-difference derivative estimates of `func` at interior points for
/// each step in `steps` (largest first).
pub fn derivative_series(func: &MonotoneFunction, points: &[f64], steps: &[f64]) -> DerivativeSeries {
    let estimates: Vec<Vec<f64>> = points
        .iter()
        .map(|&x| {
            steps
                .iter()
                .map(|&h| (func.eval_unchecked(x + h) - func.eval_unchecked(x - h)) / (2.0 * h))
                .collect()
        })
        .collect();
    let ratios: Vec<Vec<f64>> = estimates
        .iter()
        .map(|row| row.windows(2).map(|w| w[0] / w[1]).collect())
        .collect();
    let final_ratio_deviation = ratios
        .iter()
        .filter_map(|r| r.last())
        .map(|r| if r.is_finite() { (r - 1.0).abs() } else { f64::INFINITY })
        .fold(0.0, f64::max);
    let margin = estimates
        .iter()
        .filter_map(|r| r.last())
        .map(|e| e.abs())
        .fold(f64::INFINITY, f64::min);
    DerivativeSeries {
        points: points.to_vec(),
        steps: steps.to_vec(),
        pass: steps.len() >= 2 && !points.is_empty() && final_ratio_deviation <= RATIO_TOL && margin > 0.0,
        estimates,
        ratios,
        final_ratio_deviation,
        margin,
    }
}

fn interior_points(func: &MonotoneFunction, pad: f64, n: usize) -> Vec<f64> {
    let d = func.domain();
    let (lo, hi) = (d.lo + pad, d.hi - pad);
    if !(lo < hi) {
        return Vec::new();
    }
    let pts = linspace(lo, hi, n + 2);
    pts[1..=n].to_vec()
}

/// Finite-difference derivative check of `f` and `g` at 9 interior points of
/// their coverage, for the halving sequence `h0, h0/2, …` of `levels` steps.
pub fn check_differentiability(rep: &AdditiveRepresentation, h0: f64, levels: usize) -> DifferentiabilityReport {
    let steps: Vec<f64> = (0..levels).map(|k| h0 / (1u64 << k) as f64).collect();
    let f = derivative_series(&rep.f, &interior_points(&rep.f, h0, 9), &steps);
    let g = derivative_series(&rep.g, &interior_points(&rep.g, h0, 9), &steps);
    DifferentiabilityReport {
        pass: f.pass && g.pass,
        f,
        g,
    }
}
