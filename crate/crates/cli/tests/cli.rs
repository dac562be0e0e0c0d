use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_proxplay"))
}

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
}

fn run(args: &[&str], file: &Path, out: &Path) -> Output {
    bin()
        .arg("run")
        .args(args)
        .arg("--output-dir")
        .arg(out)
        .arg(file)
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const RAMP: &str = r#"
name = "ramp"
z0 = [0.0]

[set]
kind = "Box"
lo = [-1.0]
hi = [1.0]

[input]
kind = "ramp"
t_end = 2.0
segments = 8
start = [0.0]
velocity = [1.0]
"#;

#[test]
fn catalog_lists_variants_stably() {
    let a = bin().arg("catalog").output().unwrap();
    let b = bin().arg("catalog").output().unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert!(text.contains("ComplementOfBall: prox_radius = radius"));
}

#[test]
fn scalar_scenario_passes() {
    let out = tempfile::tempdir().unwrap();
    let res = run(&[], &scenario("scalar_ramp.toml"), out.path());
    assert_eq!(
        res.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    let csv = std::fs::read_to_string(out.path().join("scalar_ramp_trajectory.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,u1,y1,x1,w1"));
    assert_eq!(lines.count(), 65);
    let report = std::fs::read_to_string(out.path().join("scalar_ramp_report.txt")).unwrap();
    assert!(report.starts_with("scenario = scalar_ramp\npass = true\n"));
    assert!(out.path().join("scalar_ramp_report.csv").exists());
}

#[test]
fn corrupted_solution_fails_with_code_2() {
    let out = tempfile::tempdir().unwrap();
    let res = run(&["--quiet"], &scenario("corrupted_ramp.toml"), out.path());
    assert_eq!(res.status.code(), Some(2));
    assert!(res.stdout.is_empty());
}

#[test]
fn initial_state_outside_set_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(
        dir.path(),
        "bad.toml",
        &RAMP.replace("z0 = [0.0]", "z0 = [1.5]"),
    );
    let res = run(&[], &file, dir.path());
    assert_eq!(res.status.code(), Some(1));
    let err = String::from_utf8(res.stderr).unwrap();
    assert!(
        err.contains("initial condition") && err.contains("u(0) - y(0) = z0 must lie in Z"),
        "{err}"
    );
}

#[test]
fn validate_reports_derived_quantities() {
    let res = bin()
        .arg("validate")
        .arg(scenario("sliding.toml"))
        .output()
        .unwrap();
    assert!(res.status.success());
    let text = String::from_utf8(res.stdout).unwrap();
    assert!(text.contains("prox_radius=1"));
    assert!(text.contains("grid: nodes=9"));
    assert!(text.contains("variation=0.70710678"));
}

#[test]
fn validate_names_missing_key() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "nokey.toml", &RAMP.replace("z0 = [0.0]", ""));
    let res = bin().arg("validate").arg(&file).output().unwrap();
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8(res.stderr).unwrap().contains("z0"));
}

#[test]
fn validate_rejects_crowded_union() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(scenario("two_disks.toml"))
        .unwrap()
        .replace("center = [2.0, 0.0]", "center = [2.5, 0.0]")
        .replace("gap = 2.0", "gap = 3.0");
    let file = write(dir.path(), "crowded.toml", &text);
    let res = bin().arg("validate").arg(&file).output().unwrap();
    assert_eq!(res.status.code(), Some(1));
    let err = String::from_utf8(res.stderr).unwrap();
    assert!(
        err.contains("union members 0 and 1") && err.contains("key `set`"),
        "{err}"
    );
}

#[test]
fn seed_override_keeps_trajectory() {
    let out = tempfile::tempdir().unwrap();
    let a = run(
        &["--quiet", "--seed", "1"],
        &scenario("two_disks.toml"),
        out.path(),
    );
    assert_eq!(a.status.code(), Some(0));
    let first = std::fs::read(out.path().join("two_disks_trajectory.csv")).unwrap();
    let b = run(
        &["--quiet", "--seed", "2"],
        &scenario("two_disks.toml"),
        out.path(),
    );
    assert_eq!(b.status.code(), Some(0));
    assert_eq!(
        first,
        std::fs::read(out.path().join("two_disks_trajectory.csv")).unwrap()
    );
}

#[test]
fn usage_errors_exit_with_1() {
    let res = bin().arg("frobnicate").output().unwrap();
    assert_eq!(res.status.code(), Some(1));
    let res = bin().args(["run"]).output().unwrap();
    assert_eq!(res.status.code(), Some(1));
}

#[test]
fn inline_samples_and_csv_inputs_agree() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("u.csv"), "t,v1\n0,0\n1,1\n2,2\n").unwrap();
    let inline = RAMP.replace(
        "kind = \"ramp\"\nt_end = 2.0\nsegments = 8\nstart = [0.0]\nvelocity = [1.0]",
        "kind = \"samples\"\ntimes = [0.0, 1.0, 2.0]\nvalues = [0.0, 1.0, 2.0]",
    );
    let from_csv = inline
        .replace(
            "kind = \"samples\"\ntimes = [0.0, 1.0, 2.0]\nvalues = [0.0, 1.0, 2.0]",
            "kind = \"csv\"\npath = \"u.csv\"",
        )
        .replace("name = \"ramp\"", "name = \"ramp_csv\"");
    let a = write(dir.path(), "inline.toml", &inline);
    let b = write(dir.path(), "csv.toml", &from_csv);
    assert!(run(&["--quiet"], &a, dir.path()).status.success());
    assert!(run(&["--quiet"], &b, dir.path()).status.success());
    let ta = std::fs::read(dir.path().join("ramp_trajectory.csv")).unwrap();
    let tb = std::fs::read(dir.path().join("ramp_csv_trajectory.csv")).unwrap();
    assert_eq!(ta, tb);
}
