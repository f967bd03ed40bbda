use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sequence::{archimedean_count, standard_sequence, ARCHIMEDEAN_CAP};
use super::structure::{bullet, HolderStructure};
use crate::axioms::{relative_residual, CheckReport};
use crate::error::Error;
use crate::lawcore::{invert_in_first_tol, invert_in_second_tol, linspace, Direction};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchimedeanSummary {
    pub triples: usize,
    pub terminated: usize,
    pub max_count: usize,
    pub all_strictly_increasing: bool,
    /// Largest `|x_y^2 − y|`.
    pub max_second_term_error: f64,
    /// First triple `[x, y, z]` that failed, if any.
    pub witness: Option<[f64; 3]>,
    pub pass: bool,
}

/// Outcome of the five conditions plus associativity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderConditionsReport {
    pub x0: f64,
    pub cone: Direction,
    pub cone_interval: [f64; 2],
    /// (i) `x•y = y•x`.
    pub commutativity: CheckReport,
    /// (i) pairs where exactly one of `x•y`, `y•x` is defined.
    pub definedness_mismatches: usize,
    /// (ii) `y•y′ = z′•z` on sextuples satisfying the hypotheses.
    pub simplifiability: CheckReport,
    /// (iii) some `x` with `x•x` and `(x•x)•x` defined.
    pub square_witness: Option<f64>,
    /// (iv) residual of `y•w = z` (1 when no `w` exists).
    pub solvability: CheckReport,
    /// (v)
    pub archimedean: ArchimedeanSummary,
    pub associativity: CheckReport,
    pub pass: [bool; 5],
    pub all_pass: bool,
}

fn sample(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo..=hi)
}

/// Residual with its argument point, if the point could be evaluated.
type Sample = Option<(f64, Vec<f64>)>;
/// Count, strictly increasing, second-term error, triple.
type SequenceOutcome = (Result<usize, Error>, bool, f64, [f64; 3]);

/// Check conditions (i)–(v) on `n` seeded samples drawn from the cone of
/// `hs` (the side of `x0` on which `ψ` reaches furthest).
///
/// In a cone below `x0` the order is reversed for (iv), mirroring the usual
/// statement: `y•x > z` implies `y•w = z` for some `w`.
pub fn check_holder_conditions(
    hs: &HolderStructure,
    n: usize,
    seed: u64,
    tol: f64,
) -> HolderConditionsReport {
    let code = hs.code();
    let j = code.first();
    let cone = hs.cone_interval();
    let s = hs.cone().sign();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws: Vec<[f64; 4]> = (0..n)
        .map(|_| {
            [
                sample(&mut rng, cone.lo, cone.hi),
                sample(&mut rng, cone.lo, cone.hi),
                sample(&mut rng, cone.lo, cone.hi),
                sample(&mut rng, cone.lo, cone.hi),
            ]
        })
        .collect();
    let zs: Vec<f64> = (0..n).map(|_| sample(&mut rng, j.lo, j.hi)).collect();
    // compositions of several operands stay in J more often near x0
    let near = match hs.cone() {
        Direction::Increasing => [cone.lo, cone.lo + 0.3 * cone.width()],
        Direction::Decreasing => [cone.hi - 0.3 * cone.width(), cone.hi],
    };
    let close: Vec<[f64; 4]> = (0..n)
        .map(|_| std::array::from_fn(|_| sample(&mut rng, near[0], near[1])))
        .collect();
    let grid2 = vec![n];
    let at = |a: f64, b: f64| bullet(hs, a, b).ok();

    // (i)
    let pairs: Vec<(Sample, bool)> = draws
        .par_iter()
        .map(|&[x, y, _, _]| match (at(x, y), at(y, x)) {
            (Some(a), Some(b)) => (Some((relative_residual(a, b), vec![x, y])), false),
            (None, None) => (None, false),
            _ => (None, true),
        })
        .collect();
    let definedness_mismatches = pairs.iter().filter(|p| p.1).count();
    let commutativity = CheckReport::reduce("commutativity", grid2.clone(), tol, pairs.into_iter().map(|p| p.0));

    // (ii): solve for z and z′ so that both hypotheses hold
    let samples: Vec<_> = close
        .par_iter()
        .map(|&[y, x, w, yp]| {
            let yx = at(y, x)?;
            let vz = invert_in_second_tol(code, w, yx, 0.0).ok()?;
            let z = code.eval(hs.x0(), vz);
            let wyp = at(w, yp)?;
            let rx = hs.modifier_of(x).ok()?;
            let zp = invert_in_first_tol(code, wyp, rx, 0.0).ok()?;
            if !(j.contains(z) && j.contains(zp)) {
                return None;
            }
            let (h1, h2) = (at(w, z)?, at(zp, x)?);
            if relative_residual(h1, yx) > tol || relative_residual(h2, wyp) > tol {
                return None;
            }
            let lhs = at(y, yp)?;
            let rhs = at(zp, z)?;
            Some((relative_residual(lhs, rhs), vec![y, x, w, yp, z, zp]))
        })
        .collect();
    let simplifiability = CheckReport::reduce("simplifiability", grid2.clone(), tol, samples);

    // (iii)
    let square_witness = linspace(cone.lo, cone.hi, 257).into_iter().find(|&x| {
        at(x, x).and_then(|xx| at(xx, x)).is_some()
    });

    // (iv): the hypothesis is oriented along the cone
    let samples: Vec<_> = draws
        .par_iter()
        .zip(&zs)
        .map(|(&[y, x, _, _], &z)| {
            let yx = at(y, x)?;
            if !(s * (z - yx) > 0.0) {
                return None;
            }
            let ry = hs.modifier_of(y).ok()?;
            // y•w = G(w, ψ⁻¹(y)) by commutativity
            let res = match invert_in_first_tol(code, z, ry, 0.0) {
                Ok(w) if j.contains(w) => relative_residual(code.eval(w, ry), z),
                _ => 1.0,
            };
            Some((res, vec![y, x, z]))
        })
        .collect();
    let solvability = CheckReport::reduce("solvability", grid2.clone(), tol, samples);

    // (v)
    let results: Vec<SequenceOutcome> = draws
        .par_iter()
        .zip(&zs)
        .filter(|(d, _)| d[0] != d[1])
        .map(|(d, &z)| {
            let (x, y) = (d[0].min(d[1]), d[0].max(d[1]));
            let count = archimedean_count(hs, x, y, z);
            let (inc, err) = match standard_sequence(hs, x, y, z, ARCHIMEDEAN_CAP) {
                Ok(seq) => (
                    seq.is_strictly_increasing(),
                    seq.terms.get(1).map_or(0.0, |t| (t - y).abs()),
                ),
                Err(_) => (false, f64::MAX),
            };
            (count, inc, err, [x, y, z])
        })
        .collect();
    let terminated = results.iter().filter(|r| r.0.is_ok()).count();
    let max_count = results.iter().filter_map(|r| r.0.as_ref().ok()).copied().max().unwrap_or(0);
    let all_inc = results.iter().all(|r| r.1);
    let max_err = results.iter().map(|r| r.2).fold(0.0, f64::max);
    let witness = results.iter().find(|r| r.0.is_err() || !r.1 || r.2 > tol).map(|r| r.3);
    let archimedean = ArchimedeanSummary {
        triples: results.len(),
        terminated,
        max_count,
        all_strictly_increasing: all_inc,
        max_second_term_error: max_err,
        witness,
        pass: !results.is_empty() && terminated == results.len() && all_inc && max_err <= tol,
    };

    // associativity
    let samples: Vec<_> = close
        .par_iter()
        .map(|&[x, y, z, _]| {
            let left = at(x, at(y, z)?)?;
            let right = at(at(x, y)?, z)?;
            Some((relative_residual(left, right), vec![x, y, z]))
        })
        .collect();
    let associativity = CheckReport::reduce("associativity", grid2, tol, samples);

    let pass = [
        commutativity.pass && commutativity.evaluated() > 0 && definedness_mismatches == 0,
        simplifiability.pass && simplifiability.evaluated() > 0,
        square_witness.is_some(),
        solvability.pass && solvability.evaluated() > 0,
        archimedean.pass,
    ];
    HolderConditionsReport {
        x0: hs.x0(),
        cone: hs.cone(),
        cone_interval: [cone.lo, cone.hi],
        commutativity,
        definedness_mismatches,
        simplifiability,
        square_witness,
        solvability,
        archimedean,
        associativity,
        all_pass: pass.iter().all(|&p| p),
        pass,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{make_law, LawName, LawSpec};

    fn hs(n: LawName, x0: f64) -> HolderStructure {
        HolderStructure::new(make_law(&LawSpec::new(n)).unwrap(), x0).unwrap()
    }

    #[test]
    fn cylinder_and_pythagoras_satisfy_all() {
        for n in [LawName::Cylinder, LawName::Pythagoras] {
            let rep = check_holder_conditions(&hs(n, 1.0), 300, 11, 1e-9);
            assert!(rep.all_pass, "{n}: {rep:#?}");
            assert!(rep.associativity.pass);
            assert!(rep.simplifiability.evaluated() > 10, "{n}: {:?}", rep.simplifiability);
            assert!(rep.commutativity.max_residual <= 1e-10);
        }
    }

    #[test]
    fn lorentz_cone_below() {
        let rep = check_holder_conditions(&hs(LawName::Lorentz, 1.0), 200, 3, 1e-9);
        assert_eq!(rep.cone, Direction::Decreasing);
        assert!(rep.all_pass, "{rep:#?}");
    }

    #[test]
    fn van_der_waals_fails() {
        let t = make_law(&LawSpec::new(LawName::Vanderwaals)).unwrap();
        let rep = check_holder_conditions(&HolderStructure::at_midpoint(t).unwrap(), 300, 5, 1e-9);
        assert!(!(rep.pass[0] && rep.pass[1]), "{rep:#?}");
        let failing = if rep.pass[0] { &rep.simplifiability } else { &rep.commutativity };
        assert!(!failing.worst_point.is_empty());
    }
}
