//! End-to-end tests through the built binary: exit codes, report sections,
//! and byte-identical CSV reruns.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sl4"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn tmpdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("sl4-cli-test-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn solve_hinged_builtin_matches_beam_spectrum() {
    let dir = tmpdir("hinged");
    let out = bin()
        .args(["solve", "--builtin", "hinged", "--k", "0..2"])
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    for section in ["PROBLEM", "CLASSIFICATION", "METHOD", "RESULTS", "DIAGNOSTICS"] {
        assert!(text.contains(&format!("== {section} ==")), "missing section {section}");
    }
    // ((k+1) pi)^4: 97.409, 1558.5, 7890.1
    assert!(text.contains("lambda_0 = 9.74090"), "{text}");
    assert!(text.contains("lambda_1 = 1.55854"), "{text}");
    assert!(text.contains("lambda_2 = 7.89013"), "{text}");
    let csv = std::fs::read_to_string(dir.join("solve.csv")).unwrap();
    assert!(csv.starts_with("k,lambda_k\n"));
}

#[test]
fn solve_problem_file_agrees_with_builtin() {
    let dir = tmpdir("file");
    let out = bin()
        .args(["solve", "--problem"])
        .arg(fixture("beam_hinged.toml"))
        .args(["--k", "0..0"])
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("lambda_0 = 9.74090"));
}

#[test]
fn solve_weyl_file_runs() {
    let dir = tmpdir("weyl");
    let out = bin()
        .args(["solve", "--problem"])
        .arg(fixture("weyl_end.toml"))
        .args(["--k", "0..1"])
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn sweep_csv_reruns_are_byte_identical() {
    let d1 = tmpdir("rerun1");
    let d2 = tmpdir("rerun2");
    for dir in [&d1, &d2] {
        let out = bin()
            .args(["solve", "--problem"])
            .arg(fixture("quartic_well.toml"))
            .args(["--k", "0..1", "--schedule", "linear:3:1:5"])
            .arg("--out")
            .arg(dir)
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let c1 = std::fs::read(d1.join("sweep.csv")).unwrap();
    let c2 = std::fs::read(d2.join("sweep.csv")).unwrap();
    assert!(!c1.is_empty());
    assert_eq!(c1, c2, "identical runs must produce identical CSV bytes");
}

#[test]
fn classify_free_beam_reports_lim2() {
    let out = bin().args(["classify", "--builtin", "free-beam"]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("right: lim2"), "{}", stdout(&out));
}

#[test]
fn spurious_hinged_family_finds_doubled_interval() {
    // mu_0(beta) = (pi/beta)^4 equals lambda* = pi^4/16 at beta = 2
    let lambda_star = std::f64::consts::PI.powi(4) / 16.0;
    let out = bin()
        .args(["spurious", "--builtin", "hinged", "--k", "0", "--tol", "1e-10"])
        .args(["--lambda-star", &format!("{lambda_star}")])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let beta: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("beta_star = "))
        .expect("beta_star line")
        .parse()
        .unwrap();
    assert!((beta - 2.0).abs() < 1e-8, "beta_star = {beta}");
}

#[test]
fn interlace_clamped_passes() {
    let out = bin().args(["interlace", "--builtin", "clamped", "--k", "0..3"]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("interlacing: pass"));
}

#[test]
fn greens_distances_decay() {
    let dir = tmpdir("greens");
    let out = bin()
        .args(["greens", "--builtin", "clamped"])
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.join("distance.csv")).unwrap();
    let d: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert!(d.len() >= 5);
    assert!(d.last().unwrap() < &(0.01 * d[0]), "{d:?}");
    assert!(dir.join("kernel.csv").exists());
}

// exit-code contract ------------------------------------------------------

#[test]
fn missing_problem_is_config_error() {
    let out = bin().args(["solve"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unknown_key_is_config_error() {
    let out = bin()
        .args(["solve", "--problem"])
        .arg(fixture("unknown_key.toml"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("frobnicate") || err.contains("unknown"), "{err}");
}

#[test]
fn malformed_file_is_config_error() {
    let dir = tmpdir("badfile");
    let path = dir.join("broken.toml");
    std::fs::write(&path, "p = \"1\"\ninterval = [").unwrap();
    let out = bin().args(["solve", "--problem"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unknown_builtin_is_config_error() {
    let out = bin().args(["solve", "--builtin", "nonsense"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unbracketed_spurious_target_is_numerical_error() {
    // lambda* far above anything mu_0 reaches on the bracket
    let out = bin()
        .args(["spurious", "--builtin", "hinged", "--k", "0", "--lambda-star", "1e18"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}
