use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use permlaw_core::axioms::{check_code_axioms, check_permutability, check_solvability};
use permlaw_core::corpus::{analytic_reference, load_grid, make_law, LawName, LawSpec};
use permlaw_core::fitter::{
    affine_align, affine_align_fn, default_knots, fit_additive, shared_samples, FitOptions,
};
use permlaw_core::holder::{
    check_holder_conditions, construct_representation, residual_report, HolderStructure,
    DEFAULT_DEPTH,
};
use permlaw_core::{BivariateCode, Error, Grid2, Grid3, Interval, MonotoneFunction};

/// Numerical permutability checks and additive representations of
/// bivariate laws.
#[derive(Parser, Debug)]
#[command(name = "permlaw", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Code axioms, solvability and permutability (plus the Hölder
    /// conditions when --x0 is given).
    Check(Common),
    /// Orbit construction of f and g; writes f.csv, g.csv, report.json.
    Construct(Common),
    /// Monotone least-squares fit of f and g; writes f.csv, g.csv, loss.csv.
    Fit(FitArgs),
    /// Affine alignment of two tables, or of the constructed f to the law's
    /// closed form.
    Align(AlignArgs),
    /// List the built-in laws.
    CorpusList {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Built-in law name.
    #[arg(long, conflicts_with = "grid_file")]
    law: Option<String>,
    /// Law constants and domain as JSON, e.g. '{"params":{"c":2}}'.
    #[arg(long, requires = "law")]
    params: Option<String>,
    /// Tabulated law (CSV) instead of a built-in one.
    #[arg(long)]
    grid_file: Option<PathBuf>,
    /// Grid sizes `N[xM[xK]]`.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    x0: Option<f64>,
    #[arg(long)]
    r0: Option<f64>,
    #[arg(long)]
    depth: Option<u32>,
    /// Directory for artifacts; nothing is written without it.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct FitArgs {
    #[command(flatten)]
    common: Common,
    /// Knots per function.
    #[arg(long, default_value_t = 16)]
    knots: usize,
    /// Geometric instead of uniform knot spacing.
    #[arg(long)]
    log_knots: bool,
    /// Fit M = m(f + g) with a free outer function.
    #[arg(long)]
    quasi: bool,
    #[arg(long, default_value_t = 200)]
    max_iters: usize,
    /// Fit on a random subset of this many grid points.
    #[arg(long)]
    max_points: Option<usize>,
}

#[derive(Args, Debug)]
struct AlignArgs {
    #[command(flatten)]
    common: Common,
    /// First table (CSV `x,value`); requires --f2.
    #[arg(long, requires = "f2")]
    f1: Option<PathBuf>,
    #[arg(long, requires = "f1")]
    f2: Option<PathBuf>,
    #[arg(long, default_value_t = 201)]
    samples: usize,
}

enum Failure {
    Usage(String),
    Run(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e.to_string())
    }
}

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Command) -> Result<bool, Failure> {
    match cmd {
        Command::Check(c) => check(&c),
        Command::Construct(c) => construct(&c),
        Command::Fit(f) => fit(&f),
        Command::Align(a) => align(&a),
        Command::CorpusList { out } => corpus_list(out.as_deref()),
    }
}

struct Input {
    label: String,
    spec: Option<LawSpec>,
    code: BivariateCode,
}

fn load(c: &Common) -> Result<Input, Failure> {
    match (&c.law, &c.grid_file) {
        (Some(name), None) => {
            let mut spec = match &c.params {
                Some(text) => {
                    let mut v: Value = serde_json::from_str(text).map_err(usage)?;
                    v.as_object_mut()
                        .ok_or_else(|| usage("--params must be a JSON object"))?
                        .insert("name".into(), Value::String(name.clone()));
                    serde_json::from_value::<LawSpec>(v).map_err(usage)?
                }
                None => LawSpec::new(name.parse::<LawName>().map_err(usage)?),
            };
            spec.name = name.parse::<LawName>().map_err(usage)?;
            let code = make_law(&spec).map_err(usage)?;
            Ok(Input { label: name.clone(), spec: Some(spec), code })
        }
        (None, Some(path)) => Ok(Input {
            label: path.display().to_string(),
            spec: None,
            code: load_grid(path).map_err(usage)?,
        }),
        _ => Err(usage("exactly one of --law and --grid-file is required")),
    }
}

fn grid_sizes(c: &Common) -> Result<(usize, usize, usize), Failure> {
    let Some(text) = &c.grid else {
        return Ok((20, 20, 20));
    };
    let parts = text
        .split('x')
        .map(|p| p.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| usage(format!("--grid `{text}`: {e}")))?;
    let (n, m, k) = match parts.as_slice() {
        [n] => (*n, *n, *n),
        [n, m] => (*n, *m, *m),
        [n, m, k] => (*n, *m, *k),
        _ => return Err(usage(format!("--grid `{text}`: expected N[xM[xK]]"))),
    };
    if n < 2 || m < 2 || k < 2 {
        return Err(usage("grid sizes must be at least 2"));
    }
    Ok((n, m, k))
}

fn out_dir(c: &Common) -> Result<Option<&Path>, Failure> {
    if let Some(dir) = &c.out {
        fs::create_dir_all(dir).map_err(|e| usage(format!("--out {}: {e}", dir.display())))?;
    }
    Ok(c.out.as_deref())
}

fn write_json(dir: Option<&Path>, report: &Value) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(report).expect("reports serialise") + "\n";
    if let Some(dir) = dir {
        fs::write(dir.join("report.json"), &text).map_err(|e| Failure::Run(e.to_string()))?;
    }
    Ok(())
}

fn write_table(dir: Option<&Path>, name: &str, f: &MonotoneFunction) -> Result<(), Failure> {
    if let Some(dir) = dir {
        let file = fs::File::create(dir.join(name)).map_err(|e| Failure::Run(e.to_string()))?;
        f.write_csv(file)?;
    }
    Ok(())
}

fn write_loss(dir: Option<&Path>, curve: &[f64]) -> Result<(), Failure> {
    if let Some(dir) = dir {
        let mut text = String::from("iter,loss\n");
        for (i, l) in curve.iter().enumerate() {
            text.push_str(&format!("{i},{l:e}\n"));
        }
        fs::write(dir.join("loss.csv"), text).map_err(|e| Failure::Run(e.to_string()))?;
    }
    Ok(())
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialise")
}

/// One line per top-level entry carrying a `pass` flag, then the verdict.
fn summarise(command: &str, label: &str, report: &Value) {
    if let Some(map) = report.as_object() {
        for (k, v) in map {
            if let Some(p) = v.get("pass").and_then(Value::as_bool) {
                println!("{command} {label} {k}: {}", if p { "pass" } else { "FAIL" });
            }
        }
    }
    let pass = report.get("pass").and_then(Value::as_bool).unwrap_or(false);
    println!("{command} {label}: {}", if pass { "PASS" } else { "FAIL" });
}

fn config(c: &Common, input: &Input, sizes: (usize, usize, usize), tol: f64) -> Value {
    json!({
        "law": input.label,
        "spec": input.spec,
        "grid": [sizes.0, sizes.1, sizes.2],
        "tol": tol,
        "x0": c.x0,
        "r0": c.r0,
        "depth": c.depth,
        "seed": c.seed,
    })
}

/// `--x0`, or the candidate in the interior of `J` that reaches most values.
fn pick_x0(c: &Common, code: &BivariateCode, grid: &Grid2) -> Option<f64> {
    c.x0.or_else(|| {
        let j = code.first();
        let cands: Vec<f64> = (1..10).map(|k| j.lo + j.width() * k as f64 / 10.0).collect();
        check_solvability(code, grid, &cands).best_x0
    })
}

fn check(c: &Common) -> Result<bool, Failure> {
    let input = load(c)?;
    let sizes = grid_sizes(c)?;
    let tol = c.tol.unwrap_or(1e-9);
    let dir = out_dir(c)?;
    let code = &input.code;
    let g2 = Grid2::over(code, sizes.0, sizes.1);
    let g3 = Grid3::uniform(code.first(), code.second(), sizes.0, sizes.1, sizes.2);
    let axioms = check_code_axioms(code, &g2, tol);
    let j = code.first();
    let cands: Vec<f64> = (1..10).map(|k| j.lo + j.width() * k as f64 / 10.0).collect();
    let solvability = check_solvability(code, &g2, &cands);
    let perm = check_permutability(code, &g3, tol);
    let mut pass = axioms.pass && perm.as_ref().is_ok_and(|r| r.pass);
    let mut report = serde_json::Map::new();
    report.insert("command".into(), json!("check"));
    report.insert("config".into(), config(c, &input, sizes, tol));
    report.insert("code_axioms".into(), to_value(&axioms));
    report.insert("solvability".into(), to_value(&solvability));
    report.insert(
        "permutability".into(),
        match &perm {
            Ok(r) => to_value(r),
            Err(e) => json!({ "error": e.to_string(), "pass": false }),
        },
    );
    if let Some(x0) = c.x0 {
        let holder = HolderStructure::new(code.clone(), x0)
            .map_err(usage)
            .map(|hs| check_holder_conditions(&hs, 200, c.seed, tol));
        let holder = holder?;
        pass &= holder.all_pass;
        let mut v = to_value(&holder);
        v["pass"] = json!(holder.all_pass);
        report.insert("holder".into(), v);
    }
    report.insert("pass".into(), json!(pass));
    let report = Value::Object(report);
    write_json(dir, &report)?;
    summarise("check", &input.label, &report);
    Ok(pass)
}

fn construct(c: &Common) -> Result<bool, Failure> {
    let input = load(c)?;
    let sizes = grid_sizes(c)?;
    let tol = c.tol.unwrap_or(1e-3);
    let dir = out_dir(c)?;
    let code = &input.code;
    let x0 = pick_x0(c, code, &Grid2::over(code, sizes.0, sizes.1))
        .ok_or_else(|| Failure::Run("no admissible x0 found".into()))?;
    let hs = HolderStructure::new(code.clone(), x0).map_err(usage)?;
    let (rep, cons, gcons) = construct_representation(&hs, c.r0, c.depth.unwrap_or(DEFAULT_DEPTH))?;
    let covered = rep
        .f
        .domain()
        .intersect(&code.first())
        .ok_or_else(|| Failure::Run("construction does not cover J".into()))?;
    let grid = Grid2::uniform(covered, rep.g.domain(), sizes.0, sizes.1);
    let recon = residual_report(&rep, code, &grid, tol);
    let report = json!({
        "command": "construct",
        "config": config(c, &input, sizes, tol),
        "construction": cons.meta,
        "g": { "coverage": gcons.coverage, "clipped_fraction": gcons.clipped_fraction },
        "gauge": rep.gauge,
        "reconstruction": recon,
        "pass": recon.pass,
    });
    write_table(dir, "f.csv", &rep.f)?;
    write_table(dir, "g.csv", &rep.g)?;
    write_json(dir, &report)?;
    summarise("construct", &input.label, &report);
    Ok(recon.pass)
}

fn fit(a: &FitArgs) -> Result<bool, Failure> {
    let c = &a.common;
    let input = load(c)?;
    let sizes = grid_sizes(c)?;
    let tol = c.tol.unwrap_or(1e-8);
    let dir = out_dir(c)?;
    let code = &input.code;
    let grid = Grid2::over(code, sizes.0, sizes.1);
    let (kf, kg) = default_knots(code, &grid, a.knots, a.log_knots);
    let opts = FitOptions {
        max_iters: a.max_iters,
        loss_threshold: Some(tol),
        seed: c.seed,
        max_points: a.max_points,
        x0: pick_x0(c, code, &grid),
        r0: c.r0,
        ..FitOptions::default()
    };
    let mut report = json!({
        "command": "fit",
        "config": config(c, &input, sizes, tol),
        "knots": a.knots,
        "log_knots": a.log_knots,
        "quasi": a.quasi,
    });
    match fit_additive(code, &grid, &kf, &kg, Some(a.knots), a.quasi, &opts) {
        Ok(fit) => {
            let recon = residual_report(&fit.rep, code, &grid, 1e-6);
            report["loss"] = json!(fit.loss);
            report["iters"] = json!(fit.iters);
            report["points"] = json!(fit.points);
            report["init"] = json!(fit.init);
            report["gauge"] = to_value(&fit.rep.gauge);
            report["reconstruction"] = to_value(&recon);
            report["pass"] = json!(true);
            write_table(dir, "f.csv", &fit.rep.f)?;
            write_table(dir, "g.csv", &fit.rep.g)?;
            if let Some(m) = &fit.rep.m {
                write_table(dir, "m.csv", m)?;
            }
            write_loss(dir, &fit.curve)?;
        }
        Err(Error::NonConvergence { loss, iters, curve }) => {
            report["loss"] = json!(loss);
            report["iters"] = json!(iters);
            report["error"] = json!("loss above threshold");
            report["pass"] = json!(false);
            write_loss(dir, &curve)?;
        }
        Err(e) => return Err(e.into()),
    }
    write_json(dir, &report)?;
    summarise("fit", &input.label, &report);
    Ok(report["pass"] == json!(true))
}

fn read_table(path: &Path) -> Result<MonotoneFunction, Failure> {
    let file = fs::File::open(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    MonotoneFunction::read_csv(file).map_err(usage)
}

fn align(a: &AlignArgs) -> Result<bool, Failure> {
    let c = &a.common;
    let tol = c.tol.unwrap_or(1e-3);
    let dir = out_dir(c)?;
    let (label, map, err, target) = match (&a.f1, &a.f2) {
        (Some(p1), Some(p2)) => {
            let (f1, f2) = (read_table(p1)?, read_table(p2)?);
            let xs = shared_samples(&f1, &f2, a.samples)?;
            let (m, e) = affine_align(&f1, &f2, &xs)?;
            (format!("{} {}", p1.display(), p2.display()), m, e, "table")
        }
        _ => {
            let input = load(c)?;
            let spec = input
                .spec
                .as_ref()
                .ok_or_else(|| usage("aligning to a closed form needs --law"))?;
            let reference = analytic_reference(spec).map_err(usage)?;
            let code = &input.code;
            let sizes = grid_sizes(c)?;
            let x0 = pick_x0(c, code, &Grid2::over(code, sizes.0, sizes.1))
                .ok_or_else(|| Failure::Run("no admissible x0 found".into()))?;
            let hs = HolderStructure::new(code.clone(), x0).map_err(usage)?;
            let (rep, _, _) = construct_representation(&hs, c.r0, c.depth.unwrap_or(DEFAULT_DEPTH))?;
            let cov = rep
                .f
                .domain()
                .intersect(&code.first())
                .ok_or_else(|| Failure::Run("construction does not cover J".into()))?;
            let xs = Interval::linspace(&cov, a.samples);
            let (m, e) = affine_align_fn(&rep.f, |x| reference.f(x), &xs)?;
            (input.label, m, e, "closed_form")
        }
    };
    let pass = err <= tol;
    let report = json!({
        "command": "align",
        "inputs": label,
        "target": target,
        "map": map,
        "max_abs_err": err,
        "tol": tol,
        "pass": pass,
    });
    write_json(dir, &report)?;
    summarise("align", &label, &report);
    Ok(pass)
}

fn corpus_list(out: Option<&Path>) -> Result<bool, Failure> {
    let laws: Vec<Value> = LawName::ALL
        .iter()
        .map(|n| json!({ "name": n.as_str(), "formula": n.formula() }))
        .collect();
    for n in LawName::ALL {
        println!("{:<12} {}", n.as_str(), n.formula());
    }
    if let Some(dir) = out {
        fs::create_dir_all(dir).map_err(|e| usage(format!("--out {}: {e}", dir.display())))?;
        write_json(Some(dir), &json!({ "command": "corpus-list", "laws": laws, "pass": true }))?;
    }
    Ok(true)
}
