use crate::error::{Error, Result};
use crate::lawcore::{
    invert_in_second, linspace, BivariateCode, Direction, Interval, MonotoneFunction,
};

/// Knots used to tabulate `ψ(s) = G(x0, s)`.
const PSI_KNOTS: usize = 1025;

/// The partial operation `x•y = G(x, v)` with `G(x0, v) = y`, built on a
/// permutable code.
#[derive(Debug, Clone)]
pub struct HolderStructure {
    code: BivariateCode,
    x0: f64,
    psi: MonotoneFunction,
    reach: Interval,
}

impl HolderStructure {
    pub fn new(code: BivariateCode, x0: f64) -> Result<Self> {
        let j = code.first();
        if !j.contains(x0) {
            return Err(Error::OutOfDomain {
                x: x0,
                lo: j.lo,
                hi: j.hi,
            });
        }
        let jp = code.second();
        let psi = MonotoneFunction::from_fn(linspace(jp.lo, jp.hi, PSI_KNOTS), |s| code.eval(x0, s))?;
        let (a, b) = code.section_range_second(x0);
        let reach = Interval::new(a.max(j.lo), b.min(j.hi)).map_err(|_| {
            Error::UnitDegenerate(format!("G({x0}, ·) does not reach J"))
        })?;
        Ok(Self {
            code,
            x0,
            psi,
            reach,
        })
    }

    /// Structure at the midpoint of `J`.
    pub fn at_midpoint(code: BivariateCode) -> Result<Self> {
        let x0 = code.first().mid();
        Self::new(code, x0)
    }

    pub fn code(&self) -> &BivariateCode {
        &self.code
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    /// Tabulated `ψ(s) = G(x0, s)`.
    pub fn psi(&self) -> &MonotoneFunction {
        &self.psi
    }

    /// `ψ(J′) ∩ J`: the values admissible as right operand of `•`.
    pub fn reach(&self) -> Interval {
        self.reach
    }

    /// Modifier `v` with `G(x0, v) = y`.
    pub fn modifier_of(&self, y: f64) -> Result<f64> {
        invert_in_second(&self.code, self.x0, y).map_err(|_| Error::Undefined(y))
    }

    /// Side of `x0` on which `ψ` reaches furthest into `J`; `Increasing` means
    /// the cone `[x0, ·]` above `x0`.
    pub fn cone(&self) -> Direction {
        if self.reach.hi - self.x0 >= self.x0 - self.reach.lo {
            Direction::Increasing
        } else {
            Direction::Decreasing
        }
    }

    /// Reachable values on the side of [`HolderStructure::cone`].
    pub fn cone_interval(&self) -> Interval {
        let r = self.reach;
        match self.cone() {
            Direction::Increasing => Interval::new(r.lo.max(self.x0), r.hi),
            Direction::Decreasing => Interval::new(r.lo, r.hi.min(self.x0)),
        }
        .unwrap_or(r)
    }
}

/// `x•y = G(x, v)` where `G(x0, v) = y`; undefined when `y` is not reached by
/// `ψ` or the result leaves `J`.
pub fn bullet(hs: &HolderStructure, x: f64, y: f64) -> Result<f64> {
    let v = hs.modifier_of(y)?;
    let out = hs.code.eval(x, v);
    if hs.code.first().contains(out) && hs.code.first().contains(x) {
        Ok(out)
    } else {
        Err(Error::Undefined(y))
    }
}
