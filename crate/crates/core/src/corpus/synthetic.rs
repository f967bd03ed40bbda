use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid2;
use crate::lawcore::{BivariateCode, Direction, Interval, MonotoneFunction};

/// Knot tables `(x, value)` for the functions of a synthetic law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticKnots {
    pub f: Vec<[f64; 2]>,
    pub g: Vec<[f64; 2]>,
    #[serde(default)]
    pub m: Option<Vec<[f64; 2]>>,
}

fn table(knots: &[[f64; 2]]) -> Result<MonotoneFunction> {
    let xs = knots.iter().map(|k| k[0]).collect();
    let ys: Vec<f64> = knots.iter().map(|k| k[1]).collect();
    let dir = match ys.len() {
        0 | 1 => Direction::Increasing,
        n => Direction::of(ys[n - 1] - ys[0])
            .ok_or_else(|| Error::NonMonotoneKnots("constant knot values".into()))?,
    };
    MonotoneFunction::new(xs, ys, dir)
}

impl SyntheticKnots {
    pub fn to_functions(
        &self,
    ) -> Result<(MonotoneFunction, MonotoneFunction, Option<MonotoneFunction>)> {
        let m = self.m.as_deref().map(table).transpose()?;
        Ok((table(&self.f)?, table(&self.g)?, m))
    }
}

/// A law `m(f(y) + g(r))` (or `f⁻¹(f(y) + g(r))`) built from monotone tables.
#[derive(Debug, Clone)]
pub struct Synthetic {
    pub f: MonotoneFunction,
    pub g: MonotoneFunction,
    pub m: Option<MonotoneFunction>,
    first: Interval,
}

impl Synthetic {
    pub fn new(f: MonotoneFunction, g: MonotoneFunction, m: Option<MonotoneFunction>) -> Result<Self> {
        if f.direction() != Direction::Increasing {
            return Err(Error::NonMonotoneKnots("f must be increasing".into()));
        }
        if let Some(m) = &m {
            if m.direction() != Direction::Increasing {
                return Err(Error::NonMonotoneKnots("m must be increasing".into()));
            }
        }
        // largest y-interval on which every sum f(y) + g(r) stays inside the
        // domain of the outer function; the full table when that is empty
        let outer = match &m {
            Some(m) => m.domain(),
            None => f.range(),
        };
        let gr = g.range();
        let pad = 1e-12 * (f.range().width() + gr.width());
        let lo = (outer.lo - gr.lo + pad).max(f.range().lo);
        let hi = (outer.hi - gr.hi - pad).min(f.range().hi);
        let first = if lo < hi {
            Interval::new(f.invert_unchecked(lo), f.invert_unchecked(hi))?
        } else {
            f.domain()
        };
        Ok(Self { f, g, m, first })
    }

    /// Random law `f⁻¹(f + g)` from strictly monotone `knots`-knot tables.
    pub fn random(seed: u64, knots: usize) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let knots = knots.max(2);
        let mut fx = vec![0.5];
        let mut fy = vec![rng.gen_range(-1.0..1.0)];
        for i in 1..knots {
            fx.push(fx[i - 1] + rng.gen_range(0.4..1.6));
            fy.push(fy[i - 1] + rng.gen_range(0.2..2.0));
        }
        let span = fy[knots - 1] - fy[0];
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let mut gx = vec![0.0];
        let mut gy = vec![rng.gen_range(-0.05..0.05) * span];
        for i in 1..knots {
            gx.push(gx[i - 1] + rng.gen_range(0.2..0.8));
            gy.push(gy[i - 1] + sign * rng.gen_range(0.1..1.0) * span / (3.0 * knots as f64));
        }
        let gdir = if sign > 0.0 { Direction::Increasing } else { Direction::Decreasing };
        let f = MonotoneFunction::new(fx, fy, Direction::Increasing)?;
        let g = MonotoneFunction::new(gx, gy, gdir)?;
        Self::new(f, g, None)
    }

    pub fn first(&self) -> Interval {
        self.first
    }

    fn outer_domain(&self) -> Interval {
        match &self.m {
            Some(m) => m.domain(),
            None => self.f.range(),
        }
    }

    pub fn code(&self) -> BivariateCode {
        let (f, g, m) = (self.f.clone(), self.g.clone(), self.m.clone());
        let outer = self.outer_domain();
        let name = if m.is_some() { "synthetic-quasi" } else { "synthetic" };
        BivariateCode::new(name, self.first, self.g.domain(), self.g.direction(), move |y, r| {
            let s = outer.clamp(f.eval_unchecked(y) + g.eval_unchecked(r));
            match &m {
                Some(m) => m.eval_unchecked(s),
                None => f.invert_unchecked(s),
            }
        })
    }

    /// Fraction of grid points whose sum had to be clamped into the outer
    /// function's domain.
    pub fn clipped_fraction(&self, grid: &Grid2) -> f64 {
        let outer = self.outer_domain();
        let pts = grid.points();
        if pts.is_empty() {
            return 0.0;
        }
        let clipped = pts
            .iter()
            .filter(|&&(y, r)| {
                let s = self.f.eval_unchecked(y) + self.g.eval_unchecked(r);
                !(s >= outer.lo && s <= outer.hi)
            })
            .count();
        clipped as f64 / pts.len() as f64
    }
}

/// Build the code `m(f(y) + g(r))`, with `m = f⁻¹` when `m` is `None`.
pub fn make_synthetic(
    f: MonotoneFunction,
    g: MonotoneFunction,
    m: Option<MonotoneFunction>,
) -> Result<BivariateCode> {
    Ok(Synthetic::new(f, g, m)?.code())
}
