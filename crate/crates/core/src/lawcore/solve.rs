//! Inversion of monotone sections by bisection.

use super::code::{BivariateCode, Direction};
use crate::error::{Error, Result};

/// Absolute tolerance on the argument used by default for every inversion.
pub const INVERSION_TOL: f64 = 1e-12;
/// Iteration cap for bisection.
pub const MAX_BISECTIONS: usize = 200;

/// Solve `h(w) = target` for `w ∈ [lo, hi]` where `h` is strictly monotone in
/// direction `dir`. Fails with `RangeExceeded` when the target is not between
/// the endpoint values.
pub fn bisect<F>(h: F, lo: f64, hi: f64, target: f64, dir: Direction, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let h_lo = h(lo);
    let h_hi = h(hi);
    let (min, max) = match dir {
        Direction::Increasing => (h_lo, h_hi),
        Direction::Decreasing => (h_hi, h_lo),
    };
    if !(target >= min && target <= max) {
        return Err(Error::RangeExceeded {
            target,
            lo: min,
            hi: max,
        });
    }
    if target == h_lo {
        return Ok(lo);
    }
    if target == h_hi {
        return Ok(hi);
    }
    let s = dir.sign();
    let (mut a, mut b) = (lo, hi);
    for _ in 0..MAX_BISECTIONS {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let v = h(m);
        if v == target {
            return Ok(m);
        }
        if s * (v - target) < 0.0 {
            a = m;
        } else {
            b = m;
        }
        if b - a <= tol {
            break;
        }
    }
    // pick the endpoint whose value is closer
    let (va, vb) = (h(a), h(b));
    Ok(if (va - target).abs() <= (vb - target).abs() { a } else { b })
}

/// Bisection on a monotone predicate: `pred(lo)` false, `pred(hi)` true
/// (endpoints may be in either order). Returns the boundary point.
pub(crate) fn bisect_predicate<F>(pred: F, mut good: f64, mut bad: f64) -> f64
where
    F: Fn(f64) -> bool,
{
    for _ in 0..MAX_BISECTIONS {
        let m = 0.5 * (good + bad);
        if m == good || m == bad {
            break;
        }
        if pred(m) {
            bad = m;
        } else {
            good = m;
        }
    }
    good
}

/// Solve `M(w, t) = p` for `w ∈ J` (the [S1] solvability direction).
pub fn invert_in_first(code: &BivariateCode, p: f64, t: f64) -> Result<f64> {
    invert_in_first_tol(code, p, t, INVERSION_TOL)
}

pub fn invert_in_first_tol(code: &BivariateCode, p: f64, t: f64, tol: f64) -> Result<f64> {
    let j = code.first();
    bisect(|w| code.eval(w, t), j.lo, j.hi, p, Direction::Increasing, tol)
}

/// Solve `M(x, v) = p` for `v ∈ J′` (the [S2] solvability direction, at any
/// fixed first argument `x`).
pub fn invert_in_second(code: &BivariateCode, x: f64, p: f64) -> Result<f64> {
    invert_in_second_tol(code, x, p, INVERSION_TOL)
}

pub fn invert_in_second_tol(code: &BivariateCode, x: f64, p: f64, tol: f64) -> Result<f64> {
    let jp = code.second();
    bisect(|v| code.eval(x, v), jp.lo, jp.hi, p, code.dir_second(), tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lawcore::Interval;

    fn cylinder() -> BivariateCode {
        BivariateCode::new(
            "cylinder",
            Interval::new(0.1, 10.0).unwrap(),
            Interval::new(0.1, 3.0).unwrap(),
            Direction::Increasing,
            |l, r| l * std::f64::consts::PI * r * r,
        )
    }

    fn lorentz() -> BivariateCode {
        BivariateCode::new(
            "lorentz",
            Interval::new(0.0, 2.0).unwrap(),
            Interval::new(0.0, 0.99).unwrap(),
            Direction::Decreasing,
            |l, v| l * (1.0 - v * v).sqrt(),
        )
    }

    #[test]
    fn cylinder_inverts_in_first() {
        let w = invert_in_first(&cylinder(), 2.0 * std::f64::consts::PI, 1.0).unwrap();
        assert!((w - 2.0).abs() < 1e-11);
    }

    #[test]
    fn lorentz_out_of_range_in_first() {
        let err = invert_in_first(&lorentz(), 10.0, 0.99).unwrap_err();
        match err {
            Error::RangeExceeded { hi, .. } => assert!((hi - 2.0 * (1.0f64 - 0.9801).sqrt()).abs() < 1e-12),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn second_variable_inversions() {
        let pyth = BivariateCode::new(
            "pythagoras",
            Interval::new(0.5, 10.0).unwrap(),
            Interval::new(0.5, 10.0).unwrap(),
            Direction::Increasing,
            |x, y| (x * x + y * y).sqrt(),
        );
        let v = invert_in_second(&pyth, 1.0, 2f64.sqrt()).unwrap();
        assert!((v - 1.0).abs() < 1e-11);

        let l = lorentz();
        assert_eq!(invert_in_second(&l, 1.0, 1.0).unwrap(), 0.0);
        assert!(matches!(
            invert_in_second(&l, 1.0, 1.5),
            Err(Error::RangeExceeded { .. })
        ));
    }

    #[test]
    fn predicate_bisection_finds_boundary() {
        let b = bisect_predicate(|x| x * x > 2.0, 0.0, 2.0);
        assert!((b - 2f64.sqrt()).abs() < 1e-14);
        let b = bisect_predicate(|x| x < -1.0, 0.0, -3.0);
        assert!((b + 1.0).abs() < 1e-14);
    }
}
