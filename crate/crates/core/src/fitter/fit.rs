use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::param::MonotoneParam;
use crate::error::{Error, Result};
use crate::grid::Grid2;
use crate::holder::{construct_representation, HolderStructure, DEFAULT_DEPTH};
use crate::lawcore::{
    invert_in_first, linspace, AdditiveRepresentation, BivariateCode, Direction, Gauge,
    MonotoneFunction,
};

/// Default knots per function.
pub const DEFAULT_KNOTS: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub max_iters: usize,
    /// Fail with `NonConvergence` when the final loss exceeds this.
    pub loss_threshold: Option<f64>,
    /// Stop early once the loss is at or below this.
    pub target_loss: f64,
    /// Seed for grid subsampling; only used with `max_points`.
    pub seed: u64,
    pub max_points: Option<usize>,
    /// Gauge point; midpoint of `J` by default.
    pub x0: Option<f64>,
    /// Gauge modifier; the end of `J′` with the larger `|g|` by default.
    pub r0: Option<f64>,
    /// Initialise from the orbit construction when it succeeds.
    pub constructive_init: bool,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            max_iters: 200,
            loss_threshold: Some(1e-8),
            target_loss: 1e-28,
            seed: 0,
            max_points: None,
            x0: None,
            r0: None,
            constructive_init: true,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitResult {
    pub rep: AdditiveRepresentation,
    pub loss: f64,
    /// Loss after each accepted step, starting with the initial loss.
    pub curve: Vec<f64>,
    pub iters: usize,
    pub points: usize,
    pub init: String,
}

/// `n` equally spaced knots across the interval.
pub fn uniform_knots(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    linspace(lo, hi, n.max(2))
}

/// Default knots: `f` spans `J` together with the code's values on the grid
/// (its inverse is evaluated there), `g` spans `J′`. With `log_spaced`,
/// knots are geometric when the span is positive.
pub fn default_knots(code: &BivariateCode, grid: &Grid2, n: usize, log_spaced: bool) -> (Vec<f64>, Vec<f64>) {
    let j = code.first();
    let (mut lo, mut hi) = (j.lo, j.hi);
    for (y, r) in grid.points() {
        let v = code.eval(y, r);
        if v.is_finite() {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    let jp = code.second();
    let spaced = |a: f64, b: f64| {
        if log_spaced && a > 0.0 {
            linspace(a.ln(), b.ln(), n.max(2)).into_iter().map(f64::exp).collect()
        } else {
            uniform_knots(a, b, n)
        }
    };
    (spaced(lo, hi), spaced(jp.lo, jp.hi))
}

struct Model {
    f: MonotoneParam,
    g: MonotoneParam,
    m: Option<MonotoneParam>,
}

impl Model {
    fn dof(&self) -> usize {
        self.f.dof(false) + self.g.dof(true) + self.m.as_ref().map_or(0, |m| m.dof(true))
    }

    fn params(&self) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.dof());
        self.f.write(false, &mut p);
        self.g.write(true, &mut p);
        if let Some(m) = &self.m {
            m.write(true, &mut p);
        }
        p
    }

    fn with_params(&self, p: &[f64]) -> Model {
        let mut out = Model {
            f: self.f.clone(),
            g: self.g.clone(),
            m: self.m.clone(),
        };
        let mut i = out.f.read(false, p);
        i += out.g.read(true, &p[i..]);
        if let Some(m) = &mut out.m {
            m.read(true, &p[i..]);
        }
        out
    }

    fn functions(&self) -> Option<(MonotoneFunction, MonotoneFunction, Option<MonotoneFunction>)> {
        let m = match &self.m {
            Some(m) => Some(m.to_function().ok()?),
            None => None,
        };
        Some((self.f.to_function().ok()?, self.g.to_function().ok()?, m))
    }
}

/// Scaled residuals: `(pred − value) / max(1, |value|) / √N`.
fn residuals(model: &Model, pts: &[(f64, f64, f64)]) -> Option<Vec<f64>> {
    let (f, g, m) = model.functions()?;
    let scale = 1.0 / (pts.len() as f64).sqrt();
    Some(
        pts.iter()
            .map(|&(y, r, v)| {
                let s = f.eval_unchecked(y) + g.eval_unchecked(r);
                let pred = match &m {
                    Some(m) => m.eval_unchecked(s),
                    None => f.invert_unchecked(s),
                };
                let e = (pred - v) / v.abs().max(1.0) * scale;
                if e.is_finite() {
                    e
                } else {
                    f64::MAX.sqrt()
                }
            })
            .collect(),
    )
}

fn loss_of(r: &[f64]) -> f64 {
    r.iter().map(|e| e * e).sum()
}

/// Initial `f` and `g` values at the knots.
fn initial_values(
    code: &BivariateCode,
    kf: &[f64],
    kg: &[f64],
    x0: f64,
    quasi: bool,
    constructive: bool,
) -> (Vec<f64>, Vec<f64>, &'static str) {
    if constructive && !quasi {
        let built = HolderStructure::new(code.clone(), x0)
            .and_then(|hs| construct_representation(&hs, None, DEFAULT_DEPTH));
        if let Ok((rep, _, _)) = built {
            let (fd, gd) = (rep.f.domain(), rep.g.domain());
            let gv: Vec<f64> = kg.iter().map(|&r| rep.g.eval_unchecked(r)).collect();
            // outside the coverage, step back into it with a known modifier
            let fv: Vec<f64> = kf
                .iter()
                .map(|&x| {
                    if fd.contains(x) {
                        return rep.f.eval_unchecked(x);
                    }
                    for &r in kg.iter().filter(|r| gd.contains(**r)) {
                        if let Ok(y) = invert_in_first(code, x, r) {
                            if fd.contains(y) {
                                return rep.f.eval_unchecked(y) + rep.g.eval_unchecked(r);
                            }
                        }
                    }
                    rep.f.eval_unchecked(x)
                })
                .collect();
            return (fv, gv, "constructive");
        }
    }
    let jp = code.second();
    let rm = jp.mid();
    let fv = kf.iter().map(|&y| code.eval(y, rm)).collect();
    let gv = kg.iter().map(|&r| code.eval(x0, r) - code.eval(x0, rm)).collect();
    (fv, gv, "slices")
}

/// Fit `code ≈ f⁻¹(f(y) + g(r))`, or `m(f(y) + g(r))` when `quasi`, over
/// `grid` with monotone piecewise-linear `f`, `g` (and `m`) on the given
/// knots.
///
/// Minimises the mean squared relative residual (floor 1) by damped
/// Gauss–Newton (Levenberg–Marquardt) steps on a finite-difference Jacobian;
/// only steps that lower the loss are accepted. The result is normalised to
/// `f(x0) = 0`, `|g(r0)| = 1`.
pub fn fit_additive(
    code: &BivariateCode,
    grid: &Grid2,
    knots_f: &[f64],
    knots_g: &[f64],
    knots_m: Option<usize>,
    quasi: bool,
    opts: &FitOptions,
) -> Result<FitResult> {
    if grid.ys.len() < 10 || grid.rs.len() < 10 {
        return Err(Error::InvalidParams("fitting needs at least a 10×10 grid".into()));
    }
    let j = code.first();
    let x0 = opts.x0.unwrap_or_else(|| j.mid());
    let mut pts: Vec<(f64, f64, f64)> = grid.points().into_iter().map(|(y, r)| (y, r, code.eval(y, r))).collect();
    if let Some(n) = opts.max_points.filter(|&n| n < pts.len()) {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        pts.shuffle(&mut rng);
        pts.truncate(n);
        pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    }

    let (fv, gv, init) = initial_values(code, knots_f, knots_g, x0, quasi, opts.constructive_init);
    let f = MonotoneParam::from_values(knots_f.to_vec(), &fv, Direction::Increasing)?;
    let g = MonotoneParam::from_values(knots_g.to_vec(), &gv, code.dir_second())?;
    let m = if quasi {
        // identity on the initial range of sums
        let (ff, gg) = (f.to_function()?, g.to_function()?);
        let sums: Vec<f64> = pts.iter().map(|&(y, r, _)| ff.eval_unchecked(y) + gg.eval_unchecked(r)).collect();
        let lo = sums.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = sums.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let pad = 0.05 * (hi - lo).max(1e-9);
        let ks = uniform_knots(lo - pad, hi + pad, knots_m.unwrap_or(DEFAULT_KNOTS));
        Some(MonotoneParam::from_values(ks.clone(), &ks, Direction::Increasing)?)
    } else {
        None
    };
    let mut model = Model { f, g, m };

    let mut p = model.params();
    let mut r = residuals(&model, &pts).ok_or_else(|| Error::DegenerateFit("invalid initial tables".into()))?;
    let mut loss = loss_of(&r);
    let mut curve = vec![loss];
    let mut lambda = 1e-3;
    let mut iters = 0;
    while iters < opts.max_iters && loss > opts.target_loss {
        iters += 1;
        let n = pts.len();
        let cols: Vec<Vec<f64>> = (0..p.len())
            .into_par_iter()
            .map(|k| {
                let h = 1e-7 * p[k].abs().max(1.0);
                let mut q = p.clone();
                q[k] += h;
                match residuals(&model.with_params(&q), &pts) {
                    Some(rq) => rq.iter().zip(&r).map(|(a, b)| (a - b) / h).collect(),
                    None => vec![0.0; n],
                }
            })
            .collect();
        let jac = DMatrix::from_fn(n, p.len(), |i, k| cols[k][i]);
        let jt = jac.transpose();
        let a = &jt * &jac;
        let b = &jt * DVector::from_column_slice(&r);
        let dmax = a.diagonal().max().max(1e-300);
        let mut accepted = false;
        for _ in 0..30 {
            let mut lhs = a.clone();
            for k in 0..p.len() {
                lhs[(k, k)] += lambda * (a[(k, k)] + 1e-12 * dmax);
            }
            let step = match lhs.clone().cholesky() {
                Some(c) => c.solve(&(-&b)),
                None => match lhs.lu().solve(&(-&b)) {
                    Some(s) => s,
                    None => {
                        lambda *= 4.0;
                        continue;
                    }
                },
            };
            let q: Vec<f64> = p.iter().zip(step.iter()).map(|(a, d)| a + d).collect();
            let cand = model.with_params(&q);
            if let Some(rq) = residuals(&cand, &pts) {
                let lq = loss_of(&rq);
                if lq < loss {
                    p = q;
                    model = cand;
                    r = rq;
                    loss = lq;
                    lambda = (lambda / 3.0).max(1e-15);
                    accepted = true;
                    break;
                }
            }
            lambda *= 4.0;
        }
        if !accepted {
            break;
        }
        curve.push(loss);
    }

    if let Some(t) = opts.loss_threshold {
        if !(loss <= t) {
            return Err(Error::NonConvergence { loss, iters, curve });
        }
    }
    let rep = normalise(&model, code, x0, opts.r0)?;
    Ok(FitResult {
        rep,
        loss,
        curve,
        iters,
        points: pts.len(),
        init: init.to_string(),
    })
}

/// Apply the gauge `f(x0) = 0`, `|g(r0)| = 1`.
fn normalise(model: &Model, code: &BivariateCode, x0: f64, r0: Option<f64>) -> Result<AdditiveRepresentation> {
    let (f, g, m) = model
        .functions()
        .ok_or_else(|| Error::DegenerateFit("fitted tables are not monotone".into()))?;
    let jp = code.second();
    let r0 = r0.unwrap_or_else(|| {
        if g.eval_unchecked(jp.lo).abs() >= g.eval_unchecked(jp.hi).abs() {
            jp.lo
        } else {
            jp.hi
        }
    });
    let gr0 = g.eval_unchecked(r0);
    if gr0 == 0.0 || !gr0.is_finite() {
        return Err(Error::UnitDegenerate(format!("fitted g vanishes at r0 = {r0}")));
    }
    let xi = 1.0 / gr0.abs();
    let theta = -xi * f.eval_unchecked(x0);
    let f2 = f.affine(xi, theta)?;
    let g2 = g.affine(xi, 0.0)?;
    // m(s) becomes m((s − θ) / ξ): move its knots accordingly
    let m2 = match m {
        Some(m) => {
            let xs = m.xs().iter().map(|s| xi * s + theta).collect();
            Some(MonotoneFunction::new(xs, m.ys().to_vec(), m.direction())?)
        }
        None => None,
    };
    AdditiveRepresentation::new(f2, g2, m2, Gauge { x0, r0, unit: 1.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{make_law, make_synthetic, LawName, LawSpec, Synthetic};
    use crate::holder::residual_report;
    use crate::lawcore::Interval;

    fn no_threshold() -> FitOptions {
        FitOptions {
            loss_threshold: None,
            ..FitOptions::default()
        }
    }

    #[test]
    fn additive_sum_is_identity() {
        let i = Interval::new(0.0, 4.0).unwrap();
        let code = BivariateCode::new("sum", i, i, Direction::Increasing, |y, r| y + r);
        let grid = Grid2::over(&code, 12, 12);
        // y + r maps [0,4]² onto [0,8]: f needs knots on [0, 8]
        let kf = uniform_knots(0.0, 8.0, 9);
        let kg = uniform_knots(0.0, 4.0, 5);
        let opts = FitOptions {
            loss_threshold: Some(1e-10),
            ..FitOptions::default()
        };
        let fit = fit_additive(&code, &grid, &kf, &kg, None, false, &opts).unwrap();
        assert!(fit.loss <= 1e-10);
        // gauge: f(2) = 0 and |g(4)| = 1 → f(x) = (x − 2)/4
        for x in [0.5, 3.0, 7.0] {
            assert!((fit.rep.f.eval(x).unwrap() - (x - 2.0) / 4.0).abs() < 1e-5);
        }
    }

    #[test]
    fn synthetic_with_generating_knots() {
        let s = Synthetic::random(3, 10).unwrap();
        let code = s.code();
        let grid = Grid2::over(&code, 25, 25);
        let fit = fit_additive(&code, &grid, s.f.xs(), s.g.xs(), None, false, &FitOptions::default()).unwrap();
        assert!(fit.loss <= 1e-8, "{}", fit.loss);
        assert!(fit.curve.windows(2).all(|w| w[1] < w[0]));
        let rr = residual_report(&fit.rep, &code, &grid, 1e-6);
        assert!(rr.pass, "{rr:?}");
    }

    #[test]
    fn quasi_fit_of_synthetic_outer() {
        let f = MonotoneFunction::from_fn(linspace(0.0, 2.0, 6), |x| x + 0.2 * x * x).unwrap();
        let g = MonotoneFunction::from_fn(linspace(0.0, 1.0, 6), |r| 0.5 * r).unwrap();
        let m = MonotoneFunction::from_fn(linspace(-1.0, 4.0, 11), |s| s.exp()).unwrap();
        let code = make_synthetic(f.clone(), g.clone(), Some(m.clone())).unwrap();
        let grid = Grid2::over(&code, 20, 20);
        let fit = fit_additive(&code, &grid, f.xs(), g.xs(), Some(11), true, &no_threshold()).unwrap();
        assert!(fit.rep.m.is_some());
        // m's knots differ from the generating ones, so the fit is not exact
        assert!(fit.loss < 1e-3, "{}", fit.loss);
        assert!(fit.loss < fit.curve[0]);
    }

    #[test]
    fn van_der_waals_keeps_a_floor() {
        let t = make_law(&LawSpec::new(LawName::Vanderwaals)).unwrap();
        let grid = Grid2::over(&t, 15, 15);
        let j = t.first();
        let kf = uniform_knots(j.lo, 60.0, DEFAULT_KNOTS);
        let kg = uniform_knots(t.second().lo, t.second().hi, DEFAULT_KNOTS);
        let err = fit_additive(&t, &grid, &kf, &kg, None, false, &FitOptions::default()).unwrap_err();
        match err {
            Error::NonConvergence { loss, curve, .. } => {
                assert!(loss > 1e-8);
                assert_eq!(curve.last().copied(), Some(loss));
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn small_grid_rejected() {
        let c = make_law(&LawSpec::new(LawName::Cylinder)).unwrap();
        let kf = uniform_knots(0.1, 10.0, 4);
        assert!(fit_additive(&c, &Grid2::over(&c, 5, 5), &kf, &kf, None, false, &no_threshold()).is_err());
    }
}
