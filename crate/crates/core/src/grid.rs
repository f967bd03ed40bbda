//! Sample grids over `J × J′` and `J × J′ × J′`.

use serde::{Deserialize, Serialize};

use crate::lawcore::{BivariateCode, Interval};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid2 {
    pub ys: Vec<f64>,
    pub rs: Vec<f64>,
}

impl Grid2 {
    pub fn new(ys: Vec<f64>, rs: Vec<f64>) -> Self {
        Self { ys, rs }
    }

    pub fn uniform(first: Interval, second: Interval, ny: usize, nr: usize) -> Self {
        Self {
            ys: first.linspace(ny),
            rs: second.linspace(nr),
        }
    }

    /// Uniform grid over the domain of `code`.
    pub fn over(code: &BivariateCode, ny: usize, nr: usize) -> Self {
        Self::uniform(code.first(), code.second(), ny, nr)
    }

    pub fn shape(&self) -> Vec<usize> {
        vec![self.ys.len(), self.rs.len()]
    }

    pub fn len(&self) -> usize {
        self.ys.len() * self.rs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All `(y, r)` pairs in row-major order.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(self.len());
        for &y in &self.ys {
            for &r in &self.rs {
                out.push((y, r));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid3 {
    pub ys: Vec<f64>,
    pub rs: Vec<f64>,
    pub ts: Vec<f64>,
}

impl Grid3 {
    pub fn uniform(first: Interval, second: Interval, ny: usize, nr: usize, nt: usize) -> Self {
        Self {
            ys: first.linspace(ny),
            rs: second.linspace(nr),
            ts: second.linspace(nt),
        }
    }

    pub fn over(code: &BivariateCode, n: usize) -> Self {
        Self::uniform(code.first(), code.second(), n, n, n)
    }

    pub fn shape(&self) -> Vec<usize> {
        vec![self.ys.len(), self.rs.len(), self.ts.len()]
    }

    pub fn len(&self) -> usize {
        self.ys.len() * self.rs.len() * self.ts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn points(&self) -> Vec<(f64, f64, f64)> {
        let mut out = Vec::with_capacity(self.len());
        for &y in &self.ys {
            for &r in &self.rs {
                for &t in &self.ts {
                    out.push((y, r, t));
                }
            }
        }
        out
    }
}
