use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rittkit"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, body).unwrap();
    path
}

fn run(command: &str, cfg: &Path, out: &Path, extra: &[&str]) -> Output {
    bin().arg(command).arg("--config").arg(cfg).arg("--out").arg(out).args(extra).output().unwrap()
}

#[test]
fn invalid_grid_exits_2_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"command":"analyze-measure","measure":{"atoms":[[0,0.5],[1,0.5]]},"grid":10,"seed":1}"#);
    let out = dir.path().join("out");
    let o = run("analyze-measure", &cfg, &out, &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("grid"));
    assert!(!out.exists());
}

#[test]
fn guard_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let weights = format!("[{}]", vec!["1"; 64].join(","));
    let cfg = write_config(dir.path(), &format!(r#"{{"command":"tensor-chain","group":[64],"measure":{{"weights":{weights}}},"nmax":4}}"#));
    let o = run("tensor-chain", &cfg, &dir.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn missing_config_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("sweep", &dir.path().join("absent.json"), &dir.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn command_mismatch_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("dilation", &config("coin.json"), &dir.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_seed_for_random_command() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"command":"transference","group":[8],"trials":3,"max_dim":2}"#);
    let out = dir.path().join("out");
    assert_eq!(run("transference", &cfg, &out, &[]).status.code(), Some(2));
    let o = run("transference", &cfg, &out, &["--seed", "5"]);
    assert!(o.status.success());
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["seed"], 5);
    assert_eq!(std::fs::read_to_string(out.join("trials.jsonl")).unwrap().lines().count(), 3);
}

#[test]
fn seed_override_changes_draws() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(run("transference", &config("transference.json"), &a, &["--seed", "1"]).status.success());
    assert!(run("transference", &config("transference.json"), &b, &["--seed", "2"]).status.success());
    assert_ne!(std::fs::read(a.join("trials.csv")).unwrap(), std::fs::read(b.join("trials.csv")).unwrap());
}

#[test]
fn thread_count_does_not_change_reports() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for (out, threads) in [(&a, "1"), (&b, "4")] {
        let o = bin()
            .env("RITTKIT_THREADS", threads)
            .args(["dilation", "--config"])
            .arg(config("dilation.json"))
            .arg("--out")
            .arg(out)
            .output()
            .unwrap();
        assert!(o.status.success());
    }
    assert_eq!(std::fs::read(a.join("report.json")).unwrap(), std::fs::read(b.join("report.json")).unwrap());
}

#[test]
fn reports_carry_version_and_certificates() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    assert!(run("analyze-measure", &config("coin.json"), &out, &[]).status.success());
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["toolkit"], "rittkit");
    assert_eq!(report["version"], env!("CARGO_PKG_VERSION"));
    let a = &report["results"]["analyze-measure"];
    assert_eq!(a["bar"]["constant"], 1.0);
    assert_eq!(a["bar"]["certificate"]["type"], "exact-finite");
    assert_eq!(a["angle"]["gamma_star"], 0.0);
    assert_eq!(a["ritt"]["c1_certificate"]["type"], "exact-finite");
    let timings: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("timings.json")).unwrap()).unwrap();
    assert!(timings["total_seconds"].as_f64().unwrap() >= 0.0);
    let csv = std::fs::read_to_string(out.join("symbol.csv")).unwrap();
    assert!(csv.starts_with("index,re,im,modulus\n") && !csv.contains('\r'));
}
