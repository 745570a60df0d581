use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

use sphere_ricci::cli::{MARGIN_COLUMNS, ROSENAU_COLUMNS, SERIES_COLUMNS};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sphere-ricci"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn header(path: &Path) -> String {
    fs::read_to_string(path).unwrap().lines().next().unwrap().to_owned()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("scenario.cfg");
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

const PERTURBED: &str = "\
# second zonal harmonic
initial.kind = fourier
initial.coefficients = 2:0.1
grid.n = 32
flow.t_end = 0.6
flow.output_times = 0, 0.2, 0.4, 0.6
";

#[test]
fn simulate_writes_series_and_snapshots() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), PERTURBED);
    let out = run(dir.path(), &["--config", &cfg, "--out", "run", "--quiet", "simulate"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(out.stdout.is_empty());

    let run_dir = dir.path().join("run");
    assert_eq!(header(&run_dir.join("series.csv")), SERIES_COLUMNS.join(","));
    let rows = fs::read_to_string(run_dir.join("series.csv")).unwrap().lines().count();
    assert_eq!(rows, 5);
    assert!(run_dir.join("snapshots/metric_000.csv").exists());
    assert!(run_dir.join("snapshots/metric_003.csv").exists());
    assert!(run_dir.join("snapshots/profile_003.csv").exists());
}

#[test]
fn runs_are_bit_identical() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), PERTURBED);
    for name in ["a", "b"] {
        let out = run(dir.path(), &["--config", &cfg, "--out", name, "--quiet", "compare"]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
    }
    let a = fs::read(dir.path().join("a/margins.csv")).unwrap();
    let b = fs::read(dir.path().join("b/margins.csv")).unwrap();
    assert!(a == b, "margins.csv differs between runs");

    // The reports differ only in the echoed output directory.
    let report = |name: &str| {
        let text = fs::read_to_string(dir.path().join(name).join("report.json")).unwrap();
        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        v["config"]["output_dir"] = serde_json::Value::Null;
        serde_json::to_string(&v).unwrap()
    };
    assert_eq!(report("a"), report("b"));
}

#[test]
fn compare_round_sphere_has_infinite_offset() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &["--n", "32", "--out", "o", "compare"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("o/report.json")).unwrap()).unwrap();
    assert_eq!(report["t0"], "inf");
    assert_eq!(report["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(report["config"]["grid_n"], 32);
    assert_eq!(report["config"]["initial"]["kind"], "round");
    for monitor in [
        "profile",
        "profile_floor",
        "curvature_bound",
        "decay",
        "lower_barrier",
        "gauss_bonnet",
    ] {
        assert_eq!(report["summary"][monitor], "pass", "{monitor}");
    }
    assert_eq!(header(&dir.path().join("o/margins.csv")), MARGIN_COLUMNS.join(","));
}

#[test]
fn compare_perturbed_sphere_passes() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), PERTURBED);
    let out = run(dir.path(), &["--config", &cfg, "--out", "o", "compare"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("o/report.json")).unwrap()).unwrap();
    let t0 = report["t0"].as_f64().unwrap();
    assert!(t0 < 0.0 && t0 > -1.0, "{t0}");
    assert!(report["first_failure"].is_null());
}

#[test]
fn rosenau_table_ends_on_the_round_sphere() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &["--quiet", "rosenau", "--t", "0,inf", "--xi", "0.5"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = fs::read_to_string(dir.path().join("out/rosenau.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), ROSENAU_COLUMNS.join(","));
    let round: Vec<f64> = lines.nth(1).unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(round[0], f64::INFINITY);
    assert!((round[2] - 2.0 * std::f64::consts::PI).abs() < 1e-15);
    assert_eq!(&round[3..], &[1.0, 1.0, 1.0]);
}

#[test]
fn odd_grid_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &["--n", "33", "simulate"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("grid.n"), "{}", stderr(&out));
}

#[test]
fn config_errors_name_the_field() {
    let dir = TempDir::new().unwrap();
    for (text, field) in [
        ("grid.m = 64\n", "grid.m"),
        ("grid.n = 64\ngrid.n = 32\n", "grid.n"),
        ("flow.t_end = soon\n", "flow.t_end"),
        ("initial.kind = round\ninitial.s = 0.5\n", "initial.s"),
        ("initial.kind = fourier\ninitial.coefficients = 2:3\n", "initial"),
        ("just words\n", "line 1"),
    ] {
        let cfg = write_config(dir.path(), text);
        let out = run(dir.path(), &["--config", &cfg, "simulate"]);
        assert_eq!(code(&out), 1, "{text}");
        assert!(stderr(&out).contains(field), "{text}: {}", stderr(&out));
    }
}

#[test]
fn missing_config_file_exits_one() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &["--config", "nowhere.cfg", "simulate"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn unwritable_output_exits_one() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("blocker"), "").unwrap();
    for cmd in ["simulate", "verify", "rosenau"] {
        let out = run(dir.path(), &["--n", "16", "--out", "blocker/sub", "--quiet", cmd]);
        assert_eq!(code(&out), 1, "{cmd}: {}", stderr(&out));
    }
}

#[test]
fn usage_errors_exit_one_and_help_exits_zero() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&run(dir.path(), &["frobnicate"])), 1);
    assert_eq!(code(&run(dir.path(), &["simulate", "--n", "many"])), 1);
    assert_eq!(code(&run(dir.path(), &[])), 1);
    assert_eq!(code(&run(dir.path(), &["--help"])), 0);
}

#[test]
fn verify_passes_on_a_clean_build() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &["--out", "v", "verify"]);
    assert_eq!(
        code(&out),
        0,
        "{}\n{}",
        String::from_utf8_lossy(&out.stdout),
        stderr(&out)
    );
    let table = fs::read_to_string(dir.path().join("v/verify.csv")).unwrap();
    assert!(table.lines().count() > 40);
}
