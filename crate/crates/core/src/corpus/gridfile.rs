//! Tabulated codes read from a CSV grid.
//!
//! Layout: the first row holds the `r` values after a blank top-left cell, the
//! first column holds the `y` values, and cell `(i, j)` is `G(y_i, r_j)`.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lawcore::{BivariateCode, Direction, Interval};

#[derive(Debug, Clone, PartialEq)]
pub struct GridTable {
    pub ys: Vec<f64>,
    pub rs: Vec<f64>,
    /// Row-major, `values[i * rs.len() + j] = G(ys[i], rs[j])`.
    pub values: Vec<f64>,
}

impl GridTable {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.rs.len() + j]
    }

    /// Bilinear interpolation, extrapolating linearly from the border cells.
    pub fn interpolate(&self, y: f64, r: f64) -> f64 {
        let i = cell(&self.ys, y);
        let j = cell(&self.rs, r);
        let ty = (y - self.ys[i]) / (self.ys[i + 1] - self.ys[i]);
        let tr = (r - self.rs[j]) / (self.rs[j + 1] - self.rs[j]);
        let a = self.at(i, j);
        let b = self.at(i, j + 1);
        let c = self.at(i + 1, j);
        let d = self.at(i + 1, j + 1);
        (1.0 - ty) * ((1.0 - tr) * a + tr * b) + ty * ((1.0 - tr) * c + tr * d)
    }

    /// Check strict monotonicity along every row and column and return the
    /// direction of the second variable.
    pub fn validate(&self) -> Result<Direction> {
        let (ny, nr) = (self.ys.len(), self.rs.len());
        if ny < 2 || nr < 2 {
            return Err(Error::MalformedGrid("need at least 2 × 2 values".into()));
        }
        strictly_increasing(&self.ys, "y header")?;
        strictly_increasing(&self.rs, "r header")?;
        let dir_first = Direction::of(self.at(1, 0) - self.at(0, 0))
            .ok_or_else(|| Error::NonMonotoneGrid("repeated value in first column".into()))?;
        if dir_first != Direction::Increasing {
            return Err(Error::NonMonotoneGrid(
                "code must be increasing in its first variable".into(),
            ));
        }
        let dir_second = Direction::of(self.at(0, 1) - self.at(0, 0))
            .ok_or_else(|| Error::NonMonotoneGrid("repeated value in first row".into()))?;
        let s = dir_second.sign();
        for i in 0..ny {
            for j in 0..nr {
                if i > 0 && self.at(i, j) - self.at(i - 1, j) <= 0.0 {
                    return Err(Error::NonMonotoneGrid(format!(
                        "column {j} not increasing at row {i}"
                    )));
                }
                if j > 0 && s * (self.at(i, j) - self.at(i, j - 1)) <= 0.0 {
                    return Err(Error::NonMonotoneGrid(format!(
                        "row {i} not {dir_second} at column {j}"
                    )));
                }
            }
        }
        Ok(dir_second)
    }

    pub fn into_code(self, name: impl Into<String>) -> Result<BivariateCode> {
        let dir = self.validate()?;
        let first = Interval::new(self.ys[0], self.ys[self.ys.len() - 1])?;
        let second = Interval::new(self.rs[0], self.rs[self.rs.len() - 1])?;
        let table = Arc::new(self);
        Ok(BivariateCode::new(name, first, second, dir, move |y, r| {
            table.interpolate(y, r)
        }))
    }

    pub fn sample(code: &BivariateCode, ys: Vec<f64>, rs: Vec<f64>) -> Self {
        let mut values = Vec::with_capacity(ys.len() * rs.len());
        for &y in &ys {
            for &r in &rs {
                values.push(code.eval(y, r));
            }
        }
        Self { ys, rs, values }
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let mut header = vec![String::new()];
        header.extend(self.rs.iter().map(|r| format!("{r:?}")));
        wr.write_record(&header)?;
        for (i, y) in self.ys.iter().enumerate() {
            let mut row = vec![format!("{y:?}")];
            row.extend((0..self.rs.len()).map(|j| format!("{:?}", self.at(i, j))));
            wr.write_record(&row)?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .from_reader(r);
        let mut rows = rd.records();
        let header = rows
            .next()
            .ok_or_else(|| Error::MalformedGrid("empty file".into()))??;
        if header.is_empty() || !header[0].trim().is_empty() {
            return Err(Error::MalformedGrid("top-left cell must be blank".into()));
        }
        let rs = header.iter().skip(1).map(number).collect::<Result<Vec<_>>>()?;
        let mut ys = Vec::new();
        let mut values = Vec::new();
        for (k, rec) in rows.enumerate() {
            let rec = rec?;
            if rec.len() != rs.len() + 1 {
                return Err(Error::MalformedGrid(format!(
                    "row {} has {} cells, expected {}",
                    k + 1,
                    rec.len(),
                    rs.len() + 1
                )));
            }
            ys.push(number(&rec[0])?);
            for cell in rec.iter().skip(1) {
                values.push(number(cell)?);
            }
        }
        Ok(Self { ys, rs, values })
    }
}

fn number(s: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|e| Error::MalformedGrid(format!("bad number `{s}`: {e}")))?;
    if !v.is_finite() {
        return Err(Error::MalformedGrid(format!("non-finite value `{s}`")));
    }
    Ok(v)
}

fn strictly_increasing(v: &[f64], what: &str) -> Result<()> {
    if v.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::NonMonotoneGrid(format!("{what} not strictly increasing")));
    }
    Ok(())
}

/// Index `i` of the cell `[v[i], v[i+1]]` used for `x`, clamped to the border.
fn cell(v: &[f64], x: f64) -> usize {
    v.partition_point(|&k| k <= x).clamp(1, v.len() - 1) - 1
}

/// Read a grid CSV and wrap it as a bilinear code.
pub fn load_grid(path: impl AsRef<Path>) -> Result<BivariateCode> {
    let path = path.as_ref();
    let table = GridTable::read_csv(File::open(path)?)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "grid".into());
    table.into_code(name)
}
