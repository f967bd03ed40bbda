use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A real interval with optional open endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    #[serde(default = "yes")]
    pub closed_lo: bool,
    #[serde(default = "yes")]
    pub closed_hi: bool,
}

fn yes() -> bool {
    true
}

impl Interval {
    /// Closed interval `[lo, hi]`.
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        Self::with_closure(lo, hi, true, true)
    }

    pub fn with_closure(lo: f64, hi: f64, closed_lo: bool, closed_hi: bool) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidInterval { lo, hi });
        }
        Ok(Self {
            lo,
            hi,
            closed_lo,
            closed_hi,
        })
    }

    /// Closed interval that must lie in the nonnegative reals.
    pub fn nonnegative(lo: f64, hi: f64) -> Result<Self> {
        if lo < 0.0 {
            return Err(Error::InvalidInterval { lo, hi });
        }
        Self::new(lo, hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.closed_lo { x >= self.lo } else { x > self.lo };
        let below = if self.closed_hi { x <= self.hi } else { x < self.hi };
        above && below
    }

    /// Intersection, or `None` when it has empty interior.
    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        if lo < hi {
            Some(Interval {
                lo,
                hi,
                closed_lo: true,
                closed_hi: true,
            })
        } else {
            None
        }
    }

    /// `n` equally spaced points covering both endpoints.
    pub fn linspace(&self, n: usize) -> Vec<f64> {
        linspace(self.lo, self.hi, n)
    }

    /// Clamp into the closed hull of the interval.
    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.lo, self.hi)
    }
}

pub(crate) fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.5 * (lo + hi)],
        _ => {
            let step = (hi - lo) / (n - 1) as f64;
            let mut v: Vec<f64> = (0..n).map(|i| lo + step * i as f64).collect();
            // pin the last point so the endpoint is hit exactly
            v[n - 1] = hi;
            v
        }
    }
}
