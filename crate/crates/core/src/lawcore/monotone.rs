use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::code::Direction;
use super::interval::Interval;
use crate::error::{Error, Result};

/// A strictly monotone function tabulated at sorted abscissas and evaluated by
/// piecewise-linear interpolation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotoneFunction {
    xs: Vec<f64>,
    ys: Vec<f64>,
    direction: Direction,
}

impl MonotoneFunction {
    /// Build from samples; `xs` must be strictly increasing and `ys` strictly
    /// monotone in `direction`.
    pub fn new(xs: Vec<f64>, ys: Vec<f64>, direction: Direction) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::NonMonotoneKnots(format!(
                "{} abscissas but {} ordinates",
                xs.len(),
                ys.len()
            )));
        }
        if xs.len() < 2 {
            return Err(Error::NonMonotoneKnots("need at least two knots".into()));
        }
        if xs.iter().chain(&ys).any(|v| !v.is_finite()) {
            return Err(Error::NonMonotoneKnots("non-finite sample".into()));
        }
        let s = direction.sign();
        for i in 1..xs.len() {
            if xs[i] <= xs[i - 1] {
                return Err(Error::NonMonotoneKnots(format!(
                    "abscissa {} not above {}",
                    xs[i],
                    xs[i - 1]
                )));
            }
            if s * (ys[i] - ys[i - 1]) <= 0.0 {
                return Err(Error::NonMonotoneKnots(format!(
                    "value {} at x = {} breaks {} order",
                    ys[i], xs[i], direction
                )));
            }
        }
        Ok(Self { xs, ys, direction })
    }

    /// Tabulate a closed form at the given abscissas, inferring the direction.
    pub fn from_fn<F: Fn(f64) -> f64>(xs: Vec<f64>, f: F) -> Result<Self> {
        let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
        let dir = match ys.len() {
            0 | 1 => Direction::Increasing,
            n => Direction::of(ys[n - 1] - ys[0]).unwrap_or(Direction::Increasing),
        };
        Self::new(xs, ys, dir)
    }

    /// The identity map tabulated at two points.
    pub fn identity(lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo, hi], vec![lo, hi], Direction::Increasing)
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn domain(&self) -> Interval {
        Interval {
            lo: self.xs[0],
            hi: self.xs[self.xs.len() - 1],
            closed_lo: true,
            closed_hi: true,
        }
    }

    /// Closed hull of the tabulated values.
    pub fn range(&self) -> Interval {
        let (a, b) = (self.ys[0], self.ys[self.ys.len() - 1]);
        Interval {
            lo: a.min(b),
            hi: a.max(b),
            closed_lo: true,
            closed_hi: true,
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let d = self.domain();
        if !(x >= d.lo && x <= d.hi) {
            return Err(Error::OutOfDomain {
                x,
                lo: d.lo,
                hi: d.hi,
            });
        }
        Ok(self.eval_unchecked(x))
    }

    /// Linear interpolation inside the table, linear extrapolation from the
    /// end segments outside it.
    pub(crate) fn eval_unchecked(&self, x: f64) -> f64 {
        let n = self.xs.len();
        let i = self.xs.partition_point(|&k| k <= x).clamp(1, n - 1);
        let (x0, x1) = (self.xs[i - 1], self.xs[i]);
        let (y0, y1) = (self.ys[i - 1], self.ys[i]);
        if x == x1 {
            return y1;
        }
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    pub fn invert(&self, v: f64) -> Result<f64> {
        let r = self.range();
        if !(v >= r.lo && v <= r.hi) {
            return Err(Error::OutOfDomain {
                x: v,
                lo: r.lo,
                hi: r.hi,
            });
        }
        Ok(self.invert_unchecked(v))
    }

    pub(crate) fn invert_unchecked(&self, v: f64) -> f64 {
        let n = self.ys.len();
        let i = match self.direction {
            Direction::Increasing => self.ys.partition_point(|&k| k <= v),
            Direction::Decreasing => self.ys.partition_point(|&k| k >= v),
        }
        .clamp(1, n - 1);
        let (x0, x1) = (self.xs[i - 1], self.xs[i]);
        let (y0, y1) = (self.ys[i - 1], self.ys[i]);
        if v == y1 {
            return x1;
        }
        x0 + (x1 - x0) * (v - y0) / (y1 - y0)
    }

    /// `a·f + b`, keeping the tabulation. `a` must be nonzero.
    pub fn affine(&self, a: f64, b: f64) -> Result<Self> {
        let ys = self.ys.iter().map(|y| a * y + b).collect();
        let dir = if a > 0.0 {
            self.direction
        } else {
            self.direction.flip()
        };
        Self::new(self.xs.clone(), ys, dir)
    }

    /// Write as CSV with header `x,value`, rows in ascending `x`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["x", "value"])?;
        for (x, y) in self.xs.iter().zip(&self.ys) {
            wr.write_record([format!("{x:?}"), format!("{y:?}")])?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let headers = rd.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "x" || &headers[1] != "value" {
            return Err(Error::MalformedGrid("expected header `x,value`".into()));
        }
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for rec in rd.records() {
            let rec = rec?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::MalformedGrid(format!("bad number `{s}`: {e}")))
            };
            xs.push(parse(&rec[0])?);
            ys.push(parse(&rec[1])?);
        }
        let dir = match ys.len() {
            0 | 1 => Direction::Increasing,
            n => Direction::of(ys[n - 1] - ys[0]).unwrap_or(Direction::Increasing),
        };
        Self::new(xs, ys, dir)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lawcore::interval::linspace;
    use proptest::prelude::*;

    fn ln_table() -> MonotoneFunction {
        MonotoneFunction::from_fn(linspace(0.5, 4.0, 351), f64::ln).unwrap()
    }

    #[test]
    fn ln_table_examples() {
        let mf = ln_table();
        assert_eq!(mf.eval(1.0).unwrap(), 0.0);
        assert!((mf.invert(0.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn squares_interpolate_within_bound() {
        // dense table of x²; linear interpolation error is at most h²/8 · 2
        let n = 3001;
        let mf = MonotoneFunction::from_fn(linspace(0.0, 3.0, n), |x| x * x).unwrap();
        let h = 3.0 / (n - 1) as f64;
        assert!((mf.eval(1.5).unwrap() - 2.25).abs() <= h * h / 4.0 + 1e-15);
        assert!((mf.eval(1.5005).unwrap() - 1.5005f64.powi(2)).abs() <= h * h / 4.0);
    }

    #[test]
    fn out_of_domain() {
        let mf = ln_table();
        assert!(matches!(mf.eval(0.1), Err(Error::OutOfDomain { .. })));
        assert!(matches!(mf.invert(5.0), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn rejects_flat_or_reversed() {
        assert!(MonotoneFunction::new(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 1.0], Direction::Increasing).is_err());
        assert!(MonotoneFunction::new(vec![0.0, 2.0, 1.0], vec![0.0, 1.0, 2.0], Direction::Increasing).is_err());
        assert!(MonotoneFunction::new(vec![0.0, 1.0], vec![0.0, 1.0], Direction::Decreasing).is_err());
    }

    #[test]
    fn decreasing_inverse() {
        let mf = MonotoneFunction::from_fn(linspace(0.0, 5.0, 501), |y| -y / 2.0).unwrap();
        assert_eq!(mf.direction(), Direction::Decreasing);
        assert!((mf.invert(-1.0).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn csv_roundtrip_is_ordered() {
        let mf = ln_table();
        let mut buf = Vec::new();
        mf.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("x,value\n"));
        let back = MonotoneFunction::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back, mf);
    }

    fn strictly_monotone_table() -> impl Strategy<Value = (MonotoneFunction, f64)> {
        (
            prop::collection::vec(0.01f64..2.0, 2..30),
            prop::collection::vec(0.01f64..5.0, 2..30),
            any::<bool>(),
            -10.0f64..10.0,
            0.0f64..1.0,
        )
            .prop_map(|(dx, dy, inc, base, t)| {
                let n = dx.len().min(dy.len());
                let mut xs = vec![base];
                let mut ys = vec![-base];
                let s = if inc { 1.0 } else { -1.0 };
                for i in 1..n {
                    xs.push(xs[i - 1] + dx[i]);
                    ys.push(ys[i - 1] + s * dy[i]);
                }
                let dir = if inc { Direction::Increasing } else { Direction::Decreasing };
                let mf = MonotoneFunction::new(xs, ys, dir).unwrap();
                (mf, t)
            })
    }

    proptest! {
        #[test]
        fn eval_inverts_within_tolerance((mf, t) in strictly_monotone_table()) {
            let r = mf.range();
            let v = r.lo + t * r.width();
            let back = mf.eval(mf.invert(v).unwrap()).unwrap();
            prop_assert!((back - v).abs() <= 1e-10 * v.abs().max(1.0));
        }

        #[test]
        fn interpolation_preserves_order((mf, t) in strictly_monotone_table()) {
            let d = mf.domain();
            let a = d.lo + t * d.width();
            let b = (a + 1e-3 * d.width()).min(d.hi);
            prop_assume!(b > a);
            let s = mf.direction().sign();
            prop_assert!(s * (mf.eval(b).unwrap() - mf.eval(a).unwrap()) > 0.0);
        }
    }
}
