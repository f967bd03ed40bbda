use serde::{Deserialize, Serialize};

use super::monotone::MonotoneFunction;
use crate::error::{Error, Result};

/// Positive affine map `v ↦ ξ·v + θ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    xi: f64,
    theta: f64,
}

impl AffineMap {
    pub fn new(xi: f64, theta: f64) -> Result<Self> {
        if !(xi > 0.0 && xi.is_finite() && theta.is_finite()) {
            return Err(Error::DegenerateFit(format!(
                "scale must be positive and finite, got {xi}"
            )));
        }
        Ok(Self { xi, theta })
    }

    pub fn identity() -> Self {
        Self { xi: 1.0, theta: 0.0 }
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn apply(&self, v: f64) -> f64 {
        self.xi * v + self.theta
    }
}

/// Normalization fixing the affine freedom: `f(x0) = 0` and `|g(r0)| = unit`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gauge {
    pub x0: f64,
    pub r0: f64,
    pub unit: f64,
}

/// `M(y, r) = m(f(y) + g(r))`, or `G(y, r) = f⁻¹(f(y) + g(r))` when `m` is
/// absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdditiveRepresentation {
    pub f: MonotoneFunction,
    pub g: MonotoneFunction,
    pub m: Option<MonotoneFunction>,
    pub gauge: Gauge,
}

impl AdditiveRepresentation {
    pub fn new(
        f: MonotoneFunction,
        g: MonotoneFunction,
        m: Option<MonotoneFunction>,
        gauge: Gauge,
    ) -> Result<Self> {
        if f.direction() != super::Direction::Increasing {
            return Err(Error::NonMonotoneKnots("f must be increasing".into()));
        }
        if let Some(m) = &m {
            if m.direction() != super::Direction::Increasing {
                return Err(Error::NonMonotoneKnots("m must be increasing".into()));
            }
        }
        Ok(Self { f, g, m, gauge })
    }

    /// `f(y) + g(r)`.
    pub fn sum(&self, y: f64, r: f64) -> Result<f64> {
        Ok(self.f.eval(y)? + self.g.eval(r)?)
    }

    pub fn reconstruct(&self, y: f64, r: f64) -> Result<f64> {
        let s = self.sum(y, r)?;
        let outer = self.m.as_ref();
        let res = match outer {
            Some(m) => m.eval(s),
            None => self.f.invert(s),
        };
        res.map_err(|_| Error::RangeClipped { sum: s })
    }
}
