use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Residual statistics and verdict of one numerical check.
///
/// `pass` holds exactly when `max_residual <= tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub grid: Vec<usize>,
    pub max_residual: f64,
    pub mean_residual: f64,
    pub worst_point: Vec<f64>,
    pub skipped_fraction: f64,
    pub pass: bool,
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub notes: BTreeMap<String, f64>,
}

/// Relative residual with floor 1: `|a − b| / max(1, |a|, |b|)`.
pub fn relative_residual(a: f64, b: f64) -> f64 {
    let r = (a - b).abs() / 1f64.max(a.abs()).max(b.abs());
    if r.is_nan() {
        f64::MAX
    } else {
        r
    }
}

/// Lexicographic order on points, NaN-free by construction.
fn lex(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

impl CheckReport {
    /// Reduce `(residual, point)` samples; `None` entries are skipped points.
    ///
    /// The worst point is the one with the largest residual, ties broken by the
    /// lexicographically smallest point, so the result does not depend on the
    /// order the samples were produced in.
    pub fn reduce<I>(check: impl Into<String>, grid: Vec<usize>, tolerance: f64, samples: I) -> Self
    where
        I: IntoIterator<Item = Option<(f64, Vec<f64>)>>,
    {
        let mut total = 0usize;
        let mut skipped = 0usize;
        let mut sum = 0.0;
        let mut worst: Option<(f64, Vec<f64>)> = None;
        for s in samples {
            total += 1;
            let Some((r, p)) = s else {
                skipped += 1;
                continue;
            };
            sum += r;
            let better = match &worst {
                None => true,
                Some((wr, wp)) => r > *wr || (r == *wr && lex(&p, wp) == Ordering::Less),
            };
            if better {
                worst = Some((r, p));
            }
        }
        let evaluated = total - skipped;
        let (max_residual, worst_point) = worst.unwrap_or((0.0, Vec::new()));
        let mut notes = BTreeMap::new();
        notes.insert("evaluated".to_string(), evaluated as f64);
        CheckReport {
            check: check.into(),
            grid,
            max_residual,
            mean_residual: if evaluated > 0 { sum / evaluated as f64 } else { 0.0 },
            worst_point,
            skipped_fraction: if total > 0 { skipped as f64 / total as f64 } else { 0.0 },
            pass: max_residual <= tolerance,
            tolerance,
            notes,
        }
    }

    pub fn with_note(mut self, key: &str, value: f64) -> Self {
        self.notes.insert(key.to_string(), value);
        self
    }

    /// Number of points that were actually evaluated.
    pub fn evaluated(&self) -> usize {
        self.notes.get("evaluated").copied().unwrap_or(0.0) as usize
    }
}
