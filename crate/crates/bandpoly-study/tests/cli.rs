use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bandpoly"))
}

fn shipped(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const SMALL: &str = r#"
[measure]
bands = [{ a = -1.0, b = 1.0, alpha = 0.5, beta = 0.5, h = { plus_power = { gamma = 2.0 } } }]
[study]
n_min = 10
n_max = 40
fit_window = [10, 40]
audits = []
"#;

#[test]
fn validate_accepts_shipped_configs() {
    for name in ["two_band.toml", "point_mass.toml", "perturbed_gamma_1.5.toml", "perturbed_gamma_2.toml"] {
        let o = run(&["validate", s(&shipped(name))]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn config_errors_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.toml");
    assert_eq!(run(&["validate", s(&missing)]).status.code(), Some(3));
    let bad = write(dir.path(), "bad.toml", "[measure]\nbands = [{ a = 1.0, b = -1.0, alpha = 0.5, beta = 0.5 }]\n");
    let o = run(&["study", s(&bad), "--out", s(dir.path())]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
    let unknown = write(dir.path(), "unknown.toml", "[measure]\nbands = []\nsurprise = 1\n");
    assert_eq!(run(&["validate", s(&unknown)]).status.code(), Some(3));
}

#[test]
fn audit_two_band_passes_and_writes_json() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["audit", s(&shipped("two_band.toml")), "--out", s(dir.path())]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("audit.json")).unwrap()).unwrap();
    assert_eq!(v["suites"].as_array().unwrap().len(), 6);
}

#[test]
fn failing_audit_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "harsh.toml",
        "[measure]\nbands = [{ a = -1.0, b = 1.0, alpha = -0.9999, beta = 30.0 }]\n[study]\nn_min = 5\nn_max = 20\n",
    );
    let o = run(&["audit", s(&cfg), "--out", s(dir.path())]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stdout));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));
}

#[test]
fn study_writes_csv_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "small.toml", SMALL);
    let out = dir.path().join("out");
    let o = run(&["study", s(&cfg), "--out", s(&out), "--threads", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("study.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,a_exact,b_exact,a_pred,b_pred,err_a,err_b,skip_reason"));
    assert_eq!(lines.count(), 31);
    let rep: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(rep["schema"], 1);
}

#[test]
fn exact_and_predict_write_their_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "small.toml", SMALL);
    for (cmd, file) in [("exact", "exact.csv"), ("predict", "predict.csv")] {
        let o = run(&[cmd, s(&cfg), "--out", s(dir.path())]);
        assert_eq!(o.status.code(), Some(0));
        let text = std::fs::read_to_string(dir.path().join(file)).unwrap();
        assert_eq!(text.lines().count(), 32, "{file}");
    }
}

#[test]
fn figures_writes_both_gammas() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "small.toml", SMALL);
    let o = run(&["figures", s(&cfg), "--out", s(dir.path())]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for name in ["figure_gamma_1.5.csv", "figure_gamma_2.csv"] {
        let text = std::fs::read_to_string(dir.path().join(name)).unwrap();
        assert!(text.starts_with("n,a_exact,b_exact,a_pred,b_pred,err_a,err_b,skip_reason\n"), "{name}");
    }
}

#[test]
fn json_flag_prints_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "small.toml", SMALL);
    let o = run(&["study", s(&cfg), "--out", s(dir.path()), "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 31);
    let o = run(&["validate", s(&cfg), "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["study"]["n_max"], 40);
}

#[test]
fn seeded_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "small.toml", SMALL);
    let mut seen = Vec::new();
    for (k, threads) in ["1", "3"].into_iter().enumerate() {
        let out = dir.path().join(format!("o{k}"));
        let o = run(&["study", s(&cfg), "--out", s(&out), "--threads", threads, "--seed", "7"]);
        assert_eq!(o.status.code(), Some(0));
        seen.push(std::fs::read(out.join("study.csv")).unwrap());
    }
    assert_eq!(seen[0], seen[1]);
}
