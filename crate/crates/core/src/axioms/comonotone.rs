use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::permutability::{check_permutability, check_quasi_permutability};
use super::report::{relative_residual, CheckReport};
use crate::error::{Error, Result};
use crate::grid::{Grid2, Grid3};
use crate::lawcore::{BivariateCode, Direction, Interval, MonotoneFunction};

/// Values of `M` closer than this (relative, floor 1) are treated as one knot.
pub const TIE_TOL: f64 = 1e-12;

/// A pair of argument points `((x, s), (y, t))`.
pub type ArgPair = ([f64; 2], [f64; 2]);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComonotonicReport {
    pub pairs: usize,
    pub violations: usize,
    /// First violating pair in sample order, `[x, s, y, t]`.
    pub witness: Option<[f64; 4]>,
    pub tolerance: f64,
    pub pass: bool,
}

/// `M` together with the increasing `F` satisfying `F(M(x,s)) = G(x,s)`.
#[derive(Debug, Clone)]
pub struct ComonotonicPair {
    pub m: BivariateCode,
    pub g: BivariateCode,
    pub f: MonotoneFunction,
}

impl ComonotonicPair {
    /// Largest relative error of `F(M(x,s))` against `G(x,s)` at `points`.
    pub fn max_error(&self, points: &[(f64, f64)]) -> f64 {
        points
            .iter()
            .map(|&(x, s)| {
                let v = self.f.eval_unchecked(self.m.eval(x, s));
                relative_residual(v, self.g.eval(x, s))
            })
            .fold(0.0, f64::max)
    }
}

/// Rectangle on which both codes are defined, if non-empty.
pub fn shared_domain(m: &BivariateCode, g: &BivariateCode) -> Option<(Interval, Interval)> {
    Some((m.first().intersect(&g.first())?, m.second().intersect(&g.second())?))
}

/// `n` seeded uniform pairs of argument points in `first × second`.
pub fn sample_pairs(first: Interval, second: Interval, n: usize, seed: u64) -> Vec<ArgPair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let point = |rng: &mut ChaCha8Rng| {
        [
            rng.gen_range(first.lo..=first.hi),
            rng.gen_range(second.lo..=second.hi),
        ]
    };
    (0..n).map(|_| (point(&mut rng), point(&mut rng))).collect()
}

/// Count pairs on which `M` and `G` order the two points oppositely.
///
/// A pair only counts when both differences exceed `tol · max(1, |value|)`, so
/// near-ties never produce violations.
pub fn check_comonotonic(
    m: &BivariateCode,
    g: &BivariateCode,
    pairs: &[ArgPair],
    tol: f64,
) -> ComonotonicReport {
    let band = |a: f64, b: f64| tol * 1f64.max(a.abs()).max(b.abs());
    let flags: Vec<bool> = pairs
        .par_iter()
        .map(|&([x, s], [y, t])| {
            let (m1, m2) = (m.eval(x, s), m.eval(y, t));
            let (g1, g2) = (g.eval(x, s), g.eval(y, t));
            let dm = m1 - m2;
            let dg = g1 - g2;
            if !(dm.is_finite() && dg.is_finite()) {
                return true;
            }
            dm.abs() > band(m1, m2) && dg.abs() > band(g1, g2) && dm.signum() != dg.signum()
        })
        .collect();
    let violations = flags.iter().filter(|&&v| v).count();
    let witness = flags
        .iter()
        .position(|&v| v)
        .map(|i| [pairs[i].0[0], pairs[i].0[1], pairs[i].1[0], pairs[i].1[1]]);
    ComonotonicReport {
        pairs: pairs.len(),
        violations,
        witness,
        tolerance: tol,
        pass: violations == 0,
    }
}

/// Tabulate `F` from the sorted pairs `(M(x,s), G(x,s))` over `grid`.
///
/// `M` values equal within [`TIE_TOL`] are merged; their `G` values must agree
/// within `tol` (relative, floor 1), and the merged `G` values must be strictly
/// increasing, otherwise [`Error::NotComonotonic`].
pub fn construct_f_comonotone(
    m: &BivariateCode,
    g: &BivariateCode,
    grid: &Grid2,
    tol: f64,
) -> Result<ComonotonicPair> {
    let mut vals: Vec<(f64, f64)> = grid
        .points()
        .into_par_iter()
        .map(|(x, s)| (m.eval(x, s), g.eval(x, s)))
        .collect();
    if vals.iter().any(|(a, b)| !(a.is_finite() && b.is_finite())) {
        return Err(Error::NotComonotonic("non-finite value on the grid".into()));
    }
    vals.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let mut xs: Vec<f64> = Vec::with_capacity(vals.len());
    let mut ys: Vec<f64> = Vec::with_capacity(vals.len());
    let mut i = 0;
    while i < vals.len() {
        let (m0, g0) = vals[i];
        let mut j = i + 1;
        let (mut gmin, mut gmax) = (g0, g0);
        while j < vals.len() && relative_residual(vals[j].0, m0) <= TIE_TOL {
            gmin = gmin.min(vals[j].1);
            gmax = gmax.max(vals[j].1);
            j += 1;
        }
        if relative_residual(gmin, gmax) > tol {
            return Err(Error::NotComonotonic(format!(
                "M ≈ {m0} maps to G values {gmin} and {gmax}"
            )));
        }
        let gv = 0.5 * (gmin + gmax);
        if let Some(&last) = ys.last() {
            if gv <= last {
                return Err(Error::NotComonotonic(format!(
                    "G does not increase with M at M = {m0}"
                )));
            }
        }
        xs.push(m0);
        ys.push(gv);
        i = j;
    }
    if xs.len() < 2 {
        return Err(Error::NotComonotonic("fewer than two distinct M values".into()));
    }
    let f = MonotoneFunction::new(xs, ys, Direction::Increasing)?;
    Ok(ComonotonicPair {
        m: m.clone(),
        g: g.clone(),
        f,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpliedPermutabilityReport {
    pub quasi_permutability: CheckReport,
    pub comonotonic: ComonotonicReport,
    /// Permutability of `G`, checked at ten times the tolerance.
    pub g_permutability: CheckReport,
    pub preconditions_hold: bool,
    /// Fails only when the preconditions hold and `G` is not permutable.
    pub pass: bool,
}

/// If `M` is `G`-permutable and comonotonic with `G`, then `G` is permutable.
///
/// Comonotonicity is checked on 4000 seeded random pairs on the shared domain.
pub fn check_m_permutable_implies_g(
    m: &BivariateCode,
    g: &BivariateCode,
    grid: &Grid3,
    tol: f64,
) -> Result<ImpliedPermutabilityReport> {
    let quasi = check_quasi_permutability(m, g, grid, tol)?;
    let (first, second) = shared_domain(m, g).ok_or(Error::DomainTooSmall { skipped: 0, total: 0 })?;
    let pairs = sample_pairs(first, second, 4000, 0x5eed);
    let comonotonic = check_comonotonic(m, g, &pairs, tol);
    let g_permutability = check_permutability(g, grid, 10.0 * tol)?;
    let preconditions_hold = quasi.pass && comonotonic.pass;
    let pass = !preconditions_hold || g_permutability.pass;
    Ok(ImpliedPermutabilityReport {
        quasi_permutability: quasi,
        comonotonic,
        g_permutability,
        preconditions_hold,
        pass,
    })
}
