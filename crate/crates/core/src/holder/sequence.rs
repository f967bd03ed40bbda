use serde::{Deserialize, Serialize};

use super::structure::HolderStructure;
use crate::error::{Error, Result};
use crate::lawcore::invert_in_first_tol;

/// Default number of terms before an Archimedean count gives up.
pub const ARCHIMEDEAN_CAP: usize = 1_000_000;

/// Why a standard sequence stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SequenceEnd {
    /// The last term exceeds the cap `z`.
    ExceededCap,
    /// The next term does not exist in `J`.
    LeftDomain,
    /// The term budget ran out first.
    Truncated,
}

/// Terms `x_y^1 = x, x_y^2, …` with `y • x_y^{n−1} = x • x_y^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardSequence {
    pub x: f64,
    pub y: f64,
    pub terms: Vec<f64>,
    pub truncated: bool,
    pub end: SequenceEnd,
}

impl StandardSequence {
    pub fn is_strictly_increasing(&self) -> bool {
        self.terms.windows(2).all(|w| w[1] > w[0])
    }
}

/// Build the standard sequence of `x < y` until a term exceeds `z_cap`, the
/// next term leaves `J`, or `n_cap` terms exist.
///
/// Each step uses commutativity: with `ψ(v) = y` and `ψ(r) = x`, the defining
/// equation reads `G(x_y^{n−1}, v) = G(x_y^n, r)`, solved for `x_y^n` by
/// bisection in the first variable.
pub fn standard_sequence(
    hs: &HolderStructure,
    x: f64,
    y: f64,
    z_cap: f64,
    n_cap: usize,
) -> Result<StandardSequence> {
    if !(x < y) {
        return Err(Error::InvalidParams(format!("need x < y, got x = {x}, y = {y}")));
    }
    let v = hs.modifier_of(y).map_err(|_| Error::StepUndefined { step: 2 })?;
    let r = hs.modifier_of(x).map_err(|_| Error::StepUndefined { step: 2 })?;
    let code = hs.code();
    let j = code.first();
    let mut terms = vec![x];
    let end = loop {
        let last = *terms.last().unwrap();
        if last > z_cap {
            break SequenceEnd::ExceededCap;
        }
        if terms.len() >= n_cap {
            break SequenceEnd::Truncated;
        }
        let target = code.eval(last, v);
        match invert_in_first_tol(code, target, r, 0.0) {
            Ok(next) if j.contains(next) => terms.push(next),
            _ => break SequenceEnd::LeftDomain,
        }
    };
    Ok(StandardSequence {
        x,
        y,
        terms,
        truncated: end == SequenceEnd::Truncated,
        end,
    })
}

/// `|{n ≥ 1 : x_y^n ≤ z}|`, failing when [`ARCHIMEDEAN_CAP`] terms all stay
/// at or below `z`.
pub fn archimedean_count(hs: &HolderStructure, x: f64, y: f64, z: f64) -> Result<usize> {
    archimedean_count_capped(hs, x, y, z, ARCHIMEDEAN_CAP)
}

pub fn archimedean_count_capped(
    hs: &HolderStructure,
    x: f64,
    y: f64,
    z: f64,
    cap: usize,
) -> Result<usize> {
    if z < x {
        return Ok(0);
    }
    let seq = standard_sequence(hs, x, y, z, cap)?;
    if seq.truncated {
        return Err(Error::NotArchimedeanWithinCap { z, cap });
    }
    Ok(seq.terms.iter().filter(|&&t| t <= z).count())
}
