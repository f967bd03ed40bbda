use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lawcore::{Direction, MonotoneFunction};

/// Largest magnitude of a log-increment, keeping `exp` finite.
const MAX_LOG_INCREMENT: f64 = 700.0;
/// Smallest step relative to the running value, so that steps survive
/// rounding and later rescaling.
const MIN_RELATIVE_STEP: f64 = 1e-12;

/// Strictly monotone knot table parameterised by unconstrained reals:
/// `value_0 = base`, `value_{k+1} = value_k ± exp(increment_k)`, each step at
/// least `1e-12·max(1, |value_k|)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotoneParam {
    pub knot_xs: Vec<f64>,
    pub increments: Vec<f64>,
    pub base: f64,
    pub direction: Direction,
}

impl MonotoneParam {
    /// Parameters reproducing `values` at `knot_xs`. Non-monotone steps are
    /// replaced by a tiny positive increment.
    pub fn from_values(knot_xs: Vec<f64>, values: &[f64], direction: Direction) -> Result<Self> {
        if knot_xs.len() < 2 || knot_xs.len() != values.len() {
            return Err(Error::InvalidParams(format!(
                "need at least two knots with matching values, got {} and {}",
                knot_xs.len(),
                values.len()
            )));
        }
        if !knot_xs.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::NonMonotoneKnots("knot positions must increase".into()));
        }
        let span = values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
        let floor = 1e-9 * span;
        let increments = values
            .windows(2)
            .map(|w| (direction.sign() * (w[1] - w[0])).max(floor).ln())
            .collect();
        Ok(Self {
            knot_xs,
            increments,
            base: values[0],
            direction,
        })
    }

    pub fn values(&self) -> Vec<f64> {
        let s = self.direction.sign();
        let mut out = Vec::with_capacity(self.knot_xs.len());
        let mut v = self.base;
        out.push(v);
        for &inc in &self.increments {
            let step = inc.clamp(-MAX_LOG_INCREMENT, MAX_LOG_INCREMENT).exp();
            v += s * step.max(MIN_RELATIVE_STEP * v.abs().max(1.0));
            out.push(v);
        }
        out
    }

    pub fn to_function(&self) -> Result<MonotoneFunction> {
        MonotoneFunction::new(self.knot_xs.clone(), self.values(), self.direction)
    }

    /// Number of free parameters (`base` optionally excluded).
    pub fn dof(&self, with_base: bool) -> usize {
        self.increments.len() + usize::from(with_base)
    }

    pub(crate) fn write(&self, with_base: bool, out: &mut Vec<f64>) {
        if with_base {
            out.push(self.base);
        }
        out.extend_from_slice(&self.increments);
    }

    pub(crate) fn read(&mut self, with_base: bool, p: &[f64]) -> usize {
        let mut i = 0;
        if with_base {
            self.base = p[0];
            i = 1;
        }
        let n = self.increments.len();
        self.increments.copy_from_slice(&p[i..i + n]);
        i + n
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn round_trip() {
        let xs = vec![0.0, 1.0, 2.0, 3.0];
        let vals = [1.0, 0.5, -2.0, -2.25];
        let p = MonotoneParam::from_values(xs, &vals, Direction::Decreasing).unwrap();
        for (a, b) in p.values().iter().zip(vals) {
            assert!((a - b).abs() < 1e-14);
        }
        assert_eq!(p.dof(true), 4);
    }

    #[test]
    fn flat_steps_are_lifted() {
        let p = MonotoneParam::from_values(vec![0.0, 1.0, 2.0], &[0.0, 0.0, 1.0], Direction::Increasing).unwrap();
        assert!(p.to_function().is_ok());
    }

    proptest! {
        #[test]
        fn every_parameter_gives_a_monotone_table(
            incs in proptest::collection::vec(-800.0f64..300.0, 1..20),
            base in -1e6f64..1e6,
            dec in any::<bool>(),
        ) {
            let n = incs.len() + 1;
            let p = MonotoneParam {
                knot_xs: (0..n).map(|k| k as f64).collect(),
                increments: incs,
                base,
                direction: if dec { Direction::Decreasing } else { Direction::Increasing },
            };
            let v = p.values();
            let s = p.direction.sign();
            prop_assert!(v.windows(2).all(|w| s * (w[1] - w[0]) > 0.0));
        }
    }
}
