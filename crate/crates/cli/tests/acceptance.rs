//! One PASS/FAIL line per acceptance criterion; the test fails if any does.

use std::fs;
use std::io::Write;
use std::time::Instant;

use assert_cmd::Command;
use tempfile::tempdir;

use permlaw_core::axioms::{
    check_comonotonic, check_m_permutable_implies_g, check_permutability,
    check_quasi_permutability, construct_f_comonotone, sample_pairs, shared_domain,
};
use permlaw_core::corpus::{make_law, LawName, LawSpec, Synthetic};
use permlaw_core::fitter::{
    affine_align_fn, check_gauge_uniqueness, fit_additive, FitOptions, GaugeConfig,
};
use permlaw_core::holder::{
    archimedean_count, check_differentiability, check_holder_conditions,
    construct_representation, residual_report, standard_sequence, symmetric_representation,
    HolderStructure, ARCHIMEDEAN_CAP, DEFAULT_DEPTH,
};
use permlaw_core::{BivariateCode, Error, Grid2, Grid3, Interval};

type Outcome = (bool, String);
type Criterion = (usize, &'static str, fn() -> Outcome);

fn law(name: LawName) -> BivariateCode {
    make_law(&LawSpec::new(name)).unwrap()
}

const PERMUTABLE: [LawName; 4] = [LawName::Lorentz, LawName::Beer, LawName::Cylinder, LawName::Pythagoras];

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let mut detail = Vec::new();
    for name in PERMUTABLE {
        let c = law(name);
        let r = check_permutability(&c, &Grid3::over(&c, 20), 1e-9).unwrap();
        ok &= r.pass && r.max_residual <= 1e-9;
        detail.push(format!("{name} {:.1e}", r.max_residual));
    }
    let spec = LawSpec::new(LawName::Vanderwaals)
        .param("a", 3.0)
        .param("b", 0.5)
        .param("K", 1.0)
        .with_domain(Interval::new(0.5, 5.0).unwrap(), Interval::new(1.0, 3.0).unwrap());
    let v = make_law(&spec).unwrap();
    let r = check_permutability(&v, &Grid3::over(&v, 20), 1e-9).unwrap();
    // direct evaluation at (1, 1.5, 1.8)
    let (lhs, rhs) = (v.eval(v.eval(1.0, 1.5), 1.8), v.eval(v.eval(1.0, 1.8), 1.5));
    ok &= !r.pass && r.max_residual >= 0.1 && ((lhs - rhs).abs() - 0.4).abs() < 1e-9;
    let secs = start.elapsed().as_secs_f64();
    ok &= secs < 5.0;
    detail.push(format!("vanderwaals {:.3} (|{lhs:.4} - {rhs:.4}|)", r.max_residual));
    (ok, format!("{}; {secs:.2}s", detail.join(", ")))
}

fn closed_form(name: LawName) -> fn(f64) -> f64 {
    match name {
        LawName::Pythagoras => |x| x * x,
        _ => f64::ln,
    }
}

fn criterion_2() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for name in PERMUTABLE {
        let start = Instant::now();
        let c = law(name);
        let hs = HolderStructure::new(c.clone(), 1.0).unwrap();
        let (rep, _, _) = construct_representation(&hs, None, DEFAULT_DEPTH).unwrap();
        let cov = rep.f.domain().intersect(&c.first()).unwrap();
        let grid = Grid2::uniform(cov, rep.g.domain(), 30, 30);
        let recon = residual_report(&rep, &c, &grid, 1e-3);
        let (map, err) = affine_align_fn(&rep.f, closed_form(name), &cov.linspace(201)).unwrap();
        let secs = start.elapsed().as_secs_f64();
        ok &= recon.pass && map.xi() > 0.0 && err <= 1e-3 && secs < 10.0;
        detail.push(format!(
            "{name} resid {:.1e} align {:.1e} {secs:.1}s",
            recon.max_residual, err
        ));
    }
    (ok, detail.join(", "))
}

fn criterion_3() -> Outcome {
    let configs: Vec<_> = [0.5, 1.0, 2.0]
        .iter()
        .map(|&x0| GaugeConfig { x0, r0: None, depth: DEFAULT_DEPTH })
        .collect();
    let r = check_gauge_uniqueness(&law(LawName::Beer), &configs).unwrap();
    let ok = r.pass
        && r.pairs.iter().all(|p| p.xi > 0.0)
        && r.max_f_error <= 1e-3
        && r.max_g_consistency <= 1e-3;
    (ok, format!("max f err {:.1e}, max |ξ_g/ξ − 1| {:.1e}", r.max_f_error, r.max_g_consistency))
}

fn criterion_4() -> Outcome {
    let mut ok = true;
    let (mut worst_perm, mut worst_loss, mut worst_res) = (0.0f64, 0.0f64, 0.0f64);
    for seed in 0..25 {
        let s = Synthetic::random(1000 + seed, 10).unwrap();
        let code = s.code();
        let perm = check_permutability(&code, &Grid3::over(&code, 12), 1e-9).unwrap();
        let grid = Grid2::over(&code, 20, 20);
        let fit = fit_additive(&code, &grid, s.f.xs(), s.g.xs(), None, false, &FitOptions::default());
        match fit {
            Ok(fit) => {
                let rr = residual_report(&fit.rep, &code, &grid, 1e-6);
                ok &= perm.pass && fit.loss <= 1e-8 && rr.pass;
                worst_loss = worst_loss.max(fit.loss);
                worst_res = worst_res.max(rr.max_residual);
            }
            Err(e) => {
                ok = false;
                if let Error::NonConvergence { loss, .. } = e {
                    worst_loss = worst_loss.max(loss);
                }
            }
        }
        worst_perm = worst_perm.max(perm.max_residual);
    }
    (
        ok,
        format!("25 codes; worst permutability {worst_perm:.1e}, loss {worst_loss:.1e}, reconstruction {worst_res:.1e}"),
    )
}

fn criterion_5() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for name in [LawName::Cylinder, LawName::Pythagoras] {
        let hs = HolderStructure::new(law(name), 1.0).unwrap();
        let r = check_holder_conditions(&hs, 200, 11, 1e-9);
        ok &= r.all_pass && r.commutativity.max_residual <= 1e-9 && r.associativity.max_residual <= 1e-9;
        // 100 further triples, checked term by term
        let cone = hs.cone_interval();
        let j = hs.code().first();
        let pairs = sample_pairs(cone, j, 100, 17);
        let mut counted = 0;
        for (a, b) in pairs {
            let (x, y, z) = (a[0].min(b[0]), a[0].max(b[0]), a[1]);
            if x == y {
                continue;
            }
            // run at least to the second term
            let seq = match standard_sequence(&hs, x, y, z.max(y), ARCHIMEDEAN_CAP) {
                Ok(seq) => seq,
                Err(_) => {
                    ok = false;
                    continue;
                }
            };
            ok &= seq.is_strictly_increasing() && (seq.terms[1] - y).abs() <= 1e-9 * y.max(1.0);
            ok &= archimedean_count(&hs, x, y, z).is_ok();
            counted += 1;
        }
        ok &= counted == 100;
        detail.push(format!(
            "{name} {:?} comm {:.1e} assoc {:.1e}, {counted} sequences",
            r.pass, r.commutativity.max_residual, r.associativity.max_residual
        ));
    }
    (ok, detail.join("; "))
}

fn criterion_6() -> Outcome {
    let g = law(LawName::Cylinder);
    let m = g.map_output("ln cylinder", f64::ln);
    let g3 = Grid3::over(&g, 20);
    let quasi = check_quasi_permutability(&m, &g, &g3, 1e-9).unwrap();
    let (first, second) = shared_domain(&m, &g).unwrap();
    let como = check_comonotonic(&m, &g, &sample_pairs(first, second, 4000, 5), 1e-9);
    let pair = construct_f_comonotone(&m, &g, &Grid2::over(&g, 1000, 1000), 1e-9).unwrap();
    // held-out points off the construction grid
    let held = Grid2::uniform(first, second, 37, 41).points();
    let f_err = pair.max_error(&held);
    let implied = check_m_permutable_implies_g(&m, &g, &g3, 1e-9).unwrap();
    let ok = quasi.pass && como.pass && f_err <= 1e-6 && implied.preconditions_hold && implied.pass;
    (
        ok,
        format!(
            "quasi {:.1e}, comonotone violations {}, F error {f_err:.1e}, implied permutability {}",
            quasi.max_residual, como.violations, implied.g_permutability.pass
        ),
    )
}

fn criterion_7() -> Outcome {
    let p = HolderStructure::new(law(LawName::Pythagoras), 1.0).unwrap();
    let grid = Grid2::over(p.code(), 20, 20);
    let s = symmetric_representation(&p, &grid, 1e-9, None, DEFAULT_DEPTH);
    let c = HolderStructure::new(law(LawName::Cylinder), 1.0).unwrap();
    let rejected = matches!(
        symmetric_representation(&c, &Grid2::over(c.code(), 20, 20), 1e-9, None, DEFAULT_DEPTH),
        Err(Error::NotSymmetric { .. })
    );
    match s {
        Ok(s) => (
            s.pass && s.max_deviation <= 1e-3 && rejected,
            format!("K = {:.6}, spread {:.1e}, cylinder rejected {rejected}", s.k, s.max_deviation),
        ),
        Err(e) => (false, format!("pythagoras: {e}")),
    }
}

fn criterion_8() -> Outcome {
    let hs = HolderStructure::new(law(LawName::Lorentz), 1.0).unwrap();
    let (rep, _, _) = construct_representation(&hs, None, DEFAULT_DEPTH).unwrap();
    let d = check_differentiability(&rep, 0.1, 5).f;
    (
        d.pass && d.final_ratio_deviation <= 0.01 && d.margin > 0.0,
        format!("max |ratio − 1| {:.1e}, margin {:.3}", d.final_ratio_deviation, d.margin),
    )
}

fn criterion_9() -> Outcome {
    let run = |args: &[&str], out: Option<&std::path::Path>| {
        let mut cmd = Command::cargo_bin("permlaw").unwrap();
        cmd.args(args);
        if let Some(o) = out {
            cmd.arg("--out").arg(o);
        }
        cmd.output().unwrap().status.code()
    };
    let (a, b, v) = (tempdir().unwrap(), tempdir().unwrap(), tempdir().unwrap());
    let args = ["check", "--law", "pythagoras", "--seed", "7"];
    let codes = [
        run(&args, Some(a.path())),
        run(&args, Some(b.path())),
        run(&["check", "--law", "vanderwaals"], Some(v.path())),
        run(&["check", "--law", "nosuchlaw"], None),
        run(&["check", "--grid", "20"], None),
    ];
    let same = fs::read(a.path().join("report.json")).ok().is_some_and(|x| {
        fs::read(b.path().join("report.json")).ok().is_some_and(|y| x == y)
    });
    let ok = same && codes == [Some(0), Some(0), Some(1), Some(2), Some(2)];
    (ok, format!("identical reports {same}, exit codes {codes:?}"))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 9] = [
        (1, "permutability verdicts", criterion_1),
        (2, "constructive representation", criterion_2),
        (3, "gauge uniqueness", criterion_3),
        (4, "synthetic round trip", criterion_4),
        (5, "Hölder conditions", criterion_5),
        (6, "quasi-permutability and comonotone F", criterion_6),
        (7, "symmetric case", criterion_7),
        (8, "differentiability", criterion_8),
        (9, "CLI determinism and exit codes", criterion_9),
    ];
    let mut failed = Vec::new();
    // written past the test harness's capture so every line is always shown
    let mut out = std::io::stdout();
    for (n, title, run) in criteria {
        let (pass, detail) = run();
        writeln!(out, "{} criterion {n} ({title}): {detail}", if pass { "PASS" } else { "FAIL" }).unwrap();
        if !pass {
            failed.push(n);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
