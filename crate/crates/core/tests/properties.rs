use std::sync::OnceLock;

use proptest::prelude::*;

use permlaw_core::axioms::{check_permutability, relative_residual};
use permlaw_core::corpus::{analytic_reference, make_law, LawName, LawSpec, Synthetic};
use permlaw_core::fitter::MonotoneParam;
use permlaw_core::holder::{
    bullet, construct_representation, standard_sequence, HolderStructure, DEFAULT_DEPTH,
};
use permlaw_core::lawcore::{invert_in_first, invert_in_second};
use permlaw_core::{AdditiveRepresentation, BivariateCode, Direction, Grid2, Grid3};

const CLOSED: [LawName; 4] = [LawName::Lorentz, LawName::Beer, LawName::Cylinder, LawName::Pythagoras];

fn law(name: LawName) -> BivariateCode {
    make_law(&LawSpec::new(name)).unwrap()
}

fn cylinder() -> &'static (HolderStructure, AdditiveRepresentation) {
    static CELL: OnceLock<(HolderStructure, AdditiveRepresentation)> = OnceLock::new();
    CELL.get_or_init(|| {
        let hs = HolderStructure::new(law(LawName::Cylinder), 1.0).unwrap();
        let (rep, _, _) = construct_representation(&hs, None, DEFAULT_DEPTH).unwrap();
        (hs, rep)
    })
}

#[test]
fn analytic_references_reconstruct_their_laws() {
    for name in CLOSED {
        let spec = LawSpec::new(name);
        let (code, reference) = (make_law(&spec).unwrap(), analytic_reference(&spec).unwrap());
        for (y, r) in Grid2::over(&code, 30, 30).points() {
            let v = code.eval(y, r);
            assert!((reference.reconstruct(name, y, r) - v).abs() <= 1e-10 * v.abs(), "{name} {y} {r}");
        }
    }
}

#[test]
fn pythagoras_is_symmetric() {
    let p = law(LawName::Pythagoras);
    for (x, y) in Grid2::over(&p, 25, 25).points() {
        assert_eq!(p.eval(x, y), p.eval(y, x));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inversions_reevaluate_to_target(k in 0usize..4, u in 0.0f64..1.0, v in 0.0f64..1.0) {
        let code = law(CLOSED[k]);
        let (j, jp) = (code.first(), code.second());
        let (y, r) = (j.lo + u * j.width(), jp.lo + v * jp.width());
        let p = code.eval(y, r);
        let w = invert_in_first(&code, p, r).unwrap();
        prop_assert!(relative_residual(code.eval(w, r), p) <= 1e-9);
        let s = invert_in_second(&code, y, p).unwrap();
        prop_assert!(relative_residual(code.eval(y, s), p) <= 1e-9);
    }

    #[test]
    fn synthetic_codes_are_permutable(seed in 0u64..10_000, n in 4usize..10) {
        let s = Synthetic::random(seed, 8).unwrap();
        let code = s.code();
        let r = check_permutability(&code, &Grid3::over(&code, n), 1e-9).unwrap();
        prop_assert!(r.pass, "{:?}", r);
    }

    #[test]
    fn parameterisation_is_surjective(
        steps in proptest::collection::vec(1e-6f64..10.0, 1..15),
        base in -50.0f64..50.0,
        dec in any::<bool>(),
    ) {
        let dir = if dec { Direction::Decreasing } else { Direction::Increasing };
        let mut values = vec![base];
        for s in &steps {
            values.push(values.last().unwrap() + dir.sign() * s);
        }
        let xs: Vec<f64> = (0..values.len()).map(|k| k as f64).collect();
        let p = MonotoneParam::from_values(xs, &values, dir).unwrap();
        for (a, b) in p.values().iter().zip(&values) {
            prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
    }

    #[test]
    fn constructed_f_is_additive_under_bullet(u in 0.0f64..1.0, v in 0.0f64..1.0) {
        let (hs, rep) = cylinder();
        let reach = hs.reach();
        let (x, y) = (reach.lo + u * reach.width(), reach.lo + v * reach.width());
        if let Ok(z) = bullet(hs, x, y) {
            let (fd, f) = (rep.f.domain(), &rep.f);
            if fd.contains(x) && fd.contains(y) && fd.contains(z) {
                let d = f.eval(z).unwrap() - f.eval(x).unwrap() - f.eval(y).unwrap();
                prop_assert!(d.abs() <= 5e-3, "{x} {y} {z} {d}");
            }
        }
    }

    #[test]
    fn bullet_commutes(u in 0.0f64..1.0, v in 0.0f64..1.0) {
        let (hs, _) = cylinder();
        let reach = hs.reach();
        let (x, y) = (reach.lo + u * reach.width(), reach.lo + v * reach.width());
        if let (Ok(a), Ok(b)) = (bullet(hs, x, y), bullet(hs, y, x)) {
            prop_assert!(relative_residual(a, b) <= 1e-9);
        }
    }

    #[test]
    fn standard_sequences_increase(u in 0.0f64..1.0, v in 0.0f64..1.0) {
        let hs = HolderStructure::new(law(LawName::Pythagoras), 1.0).unwrap();
        let cone = hs.cone_interval();
        let (a, b) = (cone.lo + u * cone.width(), cone.lo + v * cone.width());
        prop_assume!(a != b);
        let (x, y) = (a.min(b), a.max(b));
        let seq = standard_sequence(&hs, x, y, 10.0, 10_000).unwrap();
        prop_assert!(seq.is_strictly_increasing());
        if seq.terms.len() > 1 {
            prop_assert!((seq.terms[1] - y).abs() <= 1e-9 * y);
        }
    }
}
