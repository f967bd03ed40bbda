use std::fs;

use assert_cmd::Command;
use serde_json::Value;
use tempfile::tempdir;

fn permlaw() -> Command {
    Command::cargo_bin("permlaw").unwrap()
}

fn report(dir: &std::path::Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

#[test]
fn check_pythagoras_passes_and_is_deterministic() {
    let (a, b) = (tempdir().unwrap(), tempdir().unwrap());
    for d in [&a, &b] {
        permlaw()
            .args(["check", "--law", "pythagoras", "--seed", "7", "--out"])
            .arg(d.path())
            .assert()
            .code(0);
    }
    let ra = fs::read(a.path().join("report.json")).unwrap();
    assert_eq!(ra, fs::read(b.path().join("report.json")).unwrap());
    assert_eq!(report(a.path())["pass"], Value::Bool(true));
}

#[test]
fn check_van_der_waals_fails_with_witness() {
    let d = tempdir().unwrap();
    permlaw()
        .args(["check", "--law", "vanderwaals", "--out"])
        .arg(d.path())
        .assert()
        .code(1);
    let r = report(d.path());
    let perm = &r["permutability"];
    assert_eq!(perm["pass"], Value::Bool(false));
    assert!(perm["max_residual"].as_f64().unwrap() >= 0.1);
    assert_eq!(perm["worst_point"].as_array().unwrap().len(), 3);
}

#[test]
fn check_with_x0_runs_holder_conditions() {
    let d = tempdir().unwrap();
    permlaw()
        .args(["check", "--law", "cylinder", "--x0", "1", "--seed", "3", "--out"])
        .arg(d.path())
        .assert()
        .code(0);
    assert_eq!(report(d.path())["holder"]["all_pass"], Value::Bool(true));
}

#[test]
fn usage_errors_exit_2() {
    permlaw().arg("check").assert().code(2);
    permlaw().args(["check", "--law", "nope"]).assert().code(2);
    permlaw().args(["check", "--law", "beer", "--grid", "3x"]).assert().code(2);
    permlaw().args(["check", "--law", "beer", "--grid-file", "x.csv"]).assert().code(2);
    permlaw().args(["check", "--law", "beer", "--params", "[1]"]).assert().code(2);
    permlaw().args(["construct", "--law", "beer", "--x0", "100"]).assert().code(2);
    permlaw().arg("frobnicate").assert().code(2);
}

#[test]
fn params_override_constants() {
    let d = tempdir().unwrap();
    permlaw()
        .args(["check", "--law", "beer", "--params", r#"{"params":{"c":2.0}}"#, "--out"])
        .arg(d.path())
        .assert()
        .code(0);
    assert_eq!(report(d.path())["config"]["spec"]["params"]["c"], 2.0);
}

#[test]
fn construct_writes_tables() {
    let d = tempdir().unwrap();
    permlaw()
        .args(["construct", "--law", "beer", "--x0", "1", "--depth", "14", "--out"])
        .arg(d.path())
        .assert()
        .code(0);
    let f = fs::read_to_string(d.path().join("f.csv")).unwrap();
    assert!(f.starts_with("x,value\n"));
    assert!(d.path().join("g.csv").exists());
    let r = report(d.path());
    assert_eq!(r["construction"]["x0"], 1.0);
    assert!(r["reconstruction"]["max_residual"].as_f64().unwrap() <= 1e-3);
}

#[test]
fn fit_writes_loss_curve_even_when_failing() {
    let d = tempdir().unwrap();
    permlaw()
        .args(["fit", "--law", "vanderwaals", "--knots", "8", "--max-iters", "20", "--out"])
        .arg(d.path())
        .assert()
        .code(1);
    let loss = fs::read_to_string(d.path().join("loss.csv")).unwrap();
    assert!(loss.starts_with("iter,loss\n0,"));
    assert!(report(d.path())["loss"].as_f64().unwrap() > 1e-3);
}

#[test]
fn align_constructed_f_to_closed_form() {
    let d = tempdir().unwrap();
    permlaw()
        .args(["align", "--law", "pythagoras", "--x0", "1", "--out"])
        .arg(d.path())
        .assert()
        .code(0);
    let r = report(d.path());
    assert!(r["map"]["xi"].as_f64().unwrap() > 0.0);
    assert!(r["max_abs_err"].as_f64().unwrap() <= 1e-3);
}

#[test]
fn align_tables() {
    let d = tempdir().unwrap();
    let p1 = d.path().join("a.csv");
    let p2 = d.path().join("b.csv");
    fs::write(&p1, "x,value\n1,0\n2,1\n3,3\n").unwrap();
    fs::write(&p2, "x,value\n1,5\n2,7\n3,11\n").unwrap();
    permlaw()
        .args(["align", "--f1"])
        .arg(&p1)
        .arg("--f2")
        .arg(&p2)
        .arg("--out")
        .arg(d.path())
        .assert()
        .code(0);
    let r = report(d.path());
    assert!((r["map"]["xi"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    assert!((r["map"]["theta"].as_f64().unwrap() - 5.0).abs() < 1e-12);
}

#[test]
fn grid_file_input() {
    let d = tempdir().unwrap();
    let g = d.path().join("grid.csv");
    // tabulated y + r is permutable up to interpolation
    let mut text = String::from(",0,1,2,3,4,5\n");
    for i in 0..6 {
        text.push_str(&i.to_string());
        for j in 0..6 {
            text.push_str(&format!(",{}", i + j));
        }
        text.push('\n');
    }
    fs::write(&g, text).unwrap();
    let out = d.path().join("o");
    permlaw()
        .args(["check", "--grid", "5", "--tol", "1e-9", "--grid-file"])
        .arg(&g)
        .arg("--out")
        .arg(&out)
        .assert()
        .code(0);
}

#[test]
fn corpus_list_names_every_law() {
    let out = permlaw().arg("corpus-list").assert().code(0).get_output().stdout.clone();
    let text = String::from_utf8(out).unwrap();
    for name in ["lorentz", "beer", "cylinder", "pythagoras", "vanderwaals", "synthetic"] {
        assert!(text.contains(name), "{name}");
    }
}
