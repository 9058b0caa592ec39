use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use killing3::cli::Report;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_killing3"))
}

fn spec_file(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str], spec: &Path) -> Output {
    bin().arg(args[0]).arg("--spec").arg(spec).args(&args[1..]).output().unwrap()
}

#[test]
fn verify_hopf_passes() {
    let dir = tempfile::tempdir().unwrap();
    let spec = spec_file(dir.path(), "hopf.spec", "catalog = hopf\nR = 1\n");
    let out = run(&["verify", "--format", "jsonl"], &spec);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = Report::from_jsonl(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert!(report.summary.pass);
    assert!(report.summary.max_residuals.values().all(|v| *v < 1e-8));
    assert_eq!(report.resummarize(), report.summary.max_residuals);
}

#[test]
fn nil_is_not_flat_under_expect_flat() {
    let dir = tempfile::tempdir().unwrap();
    let spec = spec_file(dir.path(), "nil.spec", "catalog = nil\nomega0 = 1\n");
    let out = run(&["flatness", "--expect", "flat"], &spec);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("not-flat"), "{text}");
    assert_eq!(run(&["flatness", "--expect", "not-flat"], &spec).status.code(), Some(0));
}

#[test]
fn out_file_and_seed_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let spec = spec_file(dir.path(), "hyp.spec", "catalog = hyperbolic\n");
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    for path in [&a, &b] {
        let out = bin()
            .args(["geodesic", "--format", "jsonl", "--seed", "7", "--length", "5", "--grid", "0:2:3,0:6:3"])
            .arg("--spec")
            .arg(&spec)
            .arg("--out")
            .arg(path)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(std::fs::read_to_string(&a).unwrap(), std::fs::read_to_string(&b).unwrap());
}

#[test]
fn trajectories_are_written_as_csv() {
    let dir = tempfile::tempdir().unwrap();
    let spec = spec_file(dir.path(), "flat.spec", "catalog = flat\n");
    let prefix = dir.path().join("traj");
    let out = bin()
        .args(["geodesic", "--length", "2", "--grid", "0.5:2:2,0:3:2"])
        .arg("--spec")
        .arg(&spec)
        .arg("--trajectories")
        .arg(&prefix)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("traj_0.csv")).unwrap();
    assert!(csv.starts_with("s,t,r,theta,vt,vr,vtheta,c_drift,speed_drift"));
}

#[test]
fn config_errors_exit_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let good = spec_file(dir.path(), "flat.spec", "catalog = flat\n");
    assert_eq!(run(&["analyze", "--grid", "1:0:4,0:1:4"], &good).status.code(), Some(2));
    assert_eq!(run(&["analyze", "--tol", "spectrum"], &good).status.code(), Some(2));
    let unknown = spec_file(dir.path(), "bad.spec", "catalog = sphere\n");
    assert_eq!(run(&["analyze"], &unknown).status.code(), Some(2));
    let bad_key = spec_file(dir.path(), "key.spec", "catalog = hopf\nradius = 2\n");
    let out = run(&["analyze"], &bad_key);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    assert_eq!(run(&["analyze"], &dir.path().join("missing.spec")).status.code(), Some(2));
}

#[test]
fn degenerate_grid_exits_with_numeric_code() {
    let dir = tempfile::tempdir().unwrap();
    let spec = spec_file(dir.path(), "hopf.spec", "catalog = hopf\n");
    // φ = ½ sin 2r vanishes at r = π/2
    let out = run(&["analyze", "--grid", "1.0:1.5707963267948966:3,0:1:2"], &spec);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn grid_file_specs_resolve_relative_paths() {
    let dir = tempfile::tempdir().unwrap();
    let csv = killing3::metric::catalog_default("nil").unwrap().to_csv(40, 12).unwrap();
    std::fs::write(dir.path().join("nil.csv"), csv).unwrap();
    let spec = spec_file(dir.path(), "grid.spec", "grid_file = nil.csv\n");
    let out = run(&["flatness", "--grid", "0.8:2.2:4,1:5:4", "--expect", "not-flat"], &spec);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn family_and_lorentz_commands() {
    let dir = tempfile::tempdir().unwrap();
    let cf = spec_file(dir.path(), "cf.spec", "catalog = cf_family\nB = 0\nC = 1\nomega0 = 0\n");
    let out = run(&["family", "--format", "jsonl"], &cf);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let report = Report::from_jsonl(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(report.summary.verdicts.get("main").map(String::as_str), Some("flat"));
    let hopf = spec_file(dir.path(), "hopf.spec", "catalog = hopf\n");
    assert_eq!(run(&["lorentz"], &hopf).status.code(), Some(0));
}

#[test]
fn thread_cap_is_honoured() {
    let dir = tempfile::tempdir().unwrap();
    let spec = spec_file(dir.path(), "hopf.spec", "catalog = hopf\n");
    let out = bin()
        .env("KILLING3_THREADS", "1")
        .args(["analyze", "--format", "jsonl"])
        .arg("--spec")
        .arg(&spec)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}
