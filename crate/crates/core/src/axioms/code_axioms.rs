use serde::{Deserialize, Serialize};

use super::report::CheckReport;
use crate::grid::Grid2;
use crate::lawcore::{linspace, BivariateCode, Direction};

/// Minimum factor by which the largest adjacent jump must shrink when the grid
/// is refined.
pub const CONTINUITY_RATIO: f64 = 1.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeAxiomsReport {
    pub monotone_first: CheckReport,
    pub monotone_second: CheckReport,
    pub continuity: CheckReport,
    pub dir_second: Direction,
    pub observed_dir_second: Option<Direction>,
    pub pass: bool,
}

/// Wrong-sign differences along grid lines. `axis` 0 moves `y`, 1 moves `r`.
fn monotone_sweep(code: &BivariateCode, grid: &Grid2, axis: usize, dir: Direction, tol: f64) -> CheckReport {
    let s = dir.sign();
    let mut samples = Vec::new();
    let mut ties = 0usize;
    let (ny, nr) = (grid.ys.len(), grid.rs.len());
    for i in 0..ny {
        for j in 0..nr {
            let (i2, j2) = if axis == 0 { (i + 1, j) } else { (i, j + 1) };
            if i2 >= ny || j2 >= nr {
                continue;
            }
            let (y0, r0) = (grid.ys[i], grid.rs[j]);
            let (y1, r1) = (grid.ys[i2], grid.rs[j2]);
            let a = code.eval(y0, r0);
            let b = code.eval(y1, r1);
            let delta = s * (b - a);
            if delta == 0.0 {
                ties += 1;
            }
            let viol = if delta.is_nan() { f64::MAX } else { (-delta).max(0.0) };
            samples.push(Some((viol, vec![y0, r0])));
        }
    }
    let name = if axis == 0 { "monotone_first" } else { "monotone_second" };
    CheckReport::reduce(name, grid.shape(), tol, samples).with_note("ties", ties as f64)
}

/// Largest absolute jump between neighbours along either axis, and where.
fn max_jump(code: &BivariateCode, ys: &[f64], rs: &[f64]) -> (f64, Vec<f64>) {
    let mut best = (0.0, Vec::new());
    for (i, &y) in ys.iter().enumerate() {
        for (j, &r) in rs.iter().enumerate() {
            let v = code.eval(y, r);
            if let Some(&y1) = ys.get(i + 1) {
                let d = (code.eval(y1, r) - v).abs();
                if d > best.0 {
                    best = (d, vec![y, r]);
                }
            }
            if let Some(&r1) = rs.get(j + 1) {
                let d = (code.eval(y, r1) - v).abs();
                if d > best.0 {
                    best = (d, vec![y, r]);
                }
            }
        }
    }
    best
}

fn refine(v: &[f64]) -> Vec<f64> {
    linspace(v[0], v[v.len() - 1], 2 * v.len() - 1)
}

/// Check that `code` is increasing in `y`, monotone in `r` in its declared
/// direction, and passes a grid-refinement continuity test.
///
/// Continuity is probed by comparing the largest jump between neighbouring
/// samples on the grid's bounding box at `n` and `2n − 1` points per axis; the
/// jump must shrink by at least [`CONTINUITY_RATIO`].
pub fn check_code_axioms(code: &BivariateCode, grid: &Grid2, tol: f64) -> CodeAxiomsReport {
    let monotone_first = monotone_sweep(code, grid, 0, Direction::Increasing, tol);
    let monotone_second = monotone_sweep(code, grid, 1, code.dir_second(), tol);

    let ys = linspace(grid.ys[0], grid.ys[grid.ys.len() - 1], grid.ys.len());
    let rs = linspace(grid.rs[0], grid.rs[grid.rs.len() - 1], grid.rs.len());
    let (coarse, _) = max_jump(code, &ys, &rs);
    let (fine, at) = max_jump(code, &refine(&ys), &refine(&rs));
    let ratio = if fine > 0.0 { coarse / fine } else { f64::MAX };
    let shortfall = (CONTINUITY_RATIO - ratio).max(0.0);
    let continuity = CheckReport::reduce("continuity", grid.shape(), 0.0, [Some((shortfall, at))])
        .with_note("refinement_ratio", ratio)
        .with_note("max_jump_coarse", coarse)
        .with_note("max_jump_fine", fine);

    let ym = ys[ys.len() / 2];
    let observed = Direction::of(code.eval(ym, rs[rs.len() - 1]) - code.eval(ym, rs[0]));
    let pass = monotone_first.pass && monotone_second.pass && continuity.pass;
    CodeAxiomsReport {
        monotone_first,
        monotone_second,
        continuity,
        dir_second: code.dir_second(),
        observed_dir_second: observed,
        pass,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{make_law, LawName, LawSpec};
    use crate::lawcore::Interval;

    #[test]
    fn corpus_laws_are_codes() {
        for name in [
            LawName::Lorentz,
            LawName::Beer,
            LawName::Cylinder,
            LawName::Pythagoras,
            LawName::Vanderwaals,
        ] {
            let code = make_law(&LawSpec::new(name)).unwrap();
            let rep = check_code_axioms(&code, &Grid2::over(&code, 25, 25), 1e-9);
            assert!(rep.pass, "{name}: {rep:?}");
            assert_eq!(rep.observed_dir_second, Some(code.dir_second()));
        }
        let l = make_law(&LawSpec::new(LawName::Lorentz)).unwrap();
        assert_eq!(check_code_axioms(&l, &Grid2::over(&l, 5, 5), 1e-9).dir_second, Direction::Decreasing);
    }

    #[test]
    fn oscillating_code_fails() {
        let code = BivariateCode::new(
            "ysinr",
            Interval::new(1.0, 2.0).unwrap(),
            Interval::new(0.0, 6.0).unwrap(),
            Direction::Increasing,
            |y, r| y * r.sin(),
        );
        let rep = check_code_axioms(&code, &Grid2::over(&code, 10, 30), 1e-9);
        assert!(!rep.pass);
        assert!(!rep.monotone_second.pass);
        assert_eq!(rep.monotone_second.worst_point.len(), 2);
        let [y, r] = [rep.monotone_second.worst_point[0], rep.monotone_second.worst_point[1]];
        assert!(r > 1.5 && r < 4.8, "violation where sin decreases, got r = {r}");
        assert_eq!(y, 2.0);
    }

    #[test]
    fn jump_discontinuity_fails_continuity() {
        let code = BivariateCode::new(
            "step",
            Interval::new(0.0, 1.0).unwrap(),
            Interval::new(0.0, 1.0).unwrap(),
            Direction::Increasing,
            |y, r| y + r + if y > 0.51 { 1.0 } else { 0.0 },
        );
        let rep = check_code_axioms(&code, &Grid2::over(&code, 11, 11), 1e-9);
        assert!(rep.monotone_first.pass && rep.monotone_second.pass);
        assert!(!rep.continuity.pass);
    }
}
