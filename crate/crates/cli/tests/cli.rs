use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hardy_cli::{run_verify, CliError, ProblemConfig};

fn shipped(name: &str) -> PathBuf {
    [env!("CARGO_MANIFEST_DIR"), "configs", name].iter().collect()
}

fn hardy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hardy")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn demo_text() -> String {
    std::fs::read_to_string(shipped("talenti_demo.toml")).unwrap()
}

#[test]
fn sigma_equal_to_c_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = demo_text().replace("sigma = 0.0", "sigma = 1.0");
    let path = write_config(dir.path(), "bad.toml", &text);
    let out = hardy(&["verify", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("`run.sigma`"), "{err}");
    assert!(err.contains("strictly below"), "{err}");
}

#[test]
fn constant_solution_fails_the_supersolution_check() {
    let text = demo_text().replace(
        "profile = \"talenti\"\nn = 3\np = 2.0\nbeta = 0.0\ngamma = 3.0",
        "profile = \"constant\"\nvalue = 0.5",
    );
    let mut cfg = ProblemConfig::from_toml_str(&text, ".").unwrap();
    cfg.run.grid_size = 400;
    let rep = run_verify(&cfg).unwrap();
    assert!(!rep.check("supersolution_strong").unwrap().passed());
    assert_eq!(rep.exit_code(), 1);
}

#[test]
fn parse_errors_name_the_field() {
    let text = demo_text().replace("grid_size = 4000", "grid_size = 4000\nbogus = 1");
    match ProblemConfig::from_toml_str(&text, ".") {
        Err(CliError::Config { path, .. }) => assert_eq!(path, "run.bogus"),
        other => panic!("{other:?}"),
    }
    let text = demo_text().replace("family = \"power\"\nalpha = 1.0", "family = \"nope\"");
    match ProblemConfig::from_toml_str(&text, ".") {
        Err(CliError::Config { path, message }) => assert!(path.starts_with("pair"), "{path}: {message}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn missing_blocks_and_files_are_config_errors() {
    let cfg = ProblemConfig::from_toml_str("seed = 1\n", ".").unwrap();
    match run_verify(&cfg) {
        Err(CliError::Config { path, .. }) => assert_eq!(path, "domain"),
        other => panic!("{other:?}"),
    }
    let text = demo_text().replace("{ family = \"constant\", value = 3.0 }", "{ family = \"csv\", path = \"missing.csv\" }");
    let cfg = ProblemConfig::from_toml_str(&text, "/nonexistent").unwrap();
    match run_verify(&cfg) {
        Err(CliError::Config { path, .. }) => assert_eq!(path, "weights.b.path"),
        other => panic!("{other:?}"),
    }
    let out = hardy(&["verify", "--config", "/nonexistent/config.toml"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tabulated_weight_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = String::from("r,value\n");
    for i in 0..=400 {
        let r = 1e-7 * 10f64.powf(i as f64 * 11.0 / 400.0);
        csv.push_str(&format!("{r},3\n"));
    }
    std::fs::write(dir.path().join("b.csv"), csv).unwrap();
    let text = demo_text().replace("{ family = \"constant\", value = 3.0 }", "{ family = \"csv\", path = \"b.csv\" }");
    let mut tab = ProblemConfig::from_toml_str(&text, dir.path()).unwrap();
    let mut closed = ProblemConfig::from_toml_str(&demo_text(), ".").unwrap();
    tab.run.grid_size = 600;
    closed.run.grid_size = 600;
    let (a, b) = (run_verify(&tab).unwrap(), run_verify(&closed).unwrap());
    assert_eq!(a.status, b.status);
    let (x, y) = (a.check("caccioppoli[0]").unwrap(), b.check("caccioppoli[0]").unwrap());
    assert!((x.lhs - y.lhs).abs() <= 1e-12 * y.lhs.abs());
}

#[test]
fn reports_are_deterministic_and_record_the_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = shipped("talenti_demo.toml");
    let mut reports = Vec::new();
    for run in ["a", "b"] {
        let out_dir = dir.path().join(run);
        let out = hardy(&["verify", "--config", cfg.to_str().unwrap(), "--seed", "11", "--out", out_dir.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        reports.push(std::fs::read(out_dir.join("report.json")).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
    let json: serde_json::Value = serde_json::from_slice(&reports[0]).unwrap();
    assert_eq!(json["provenance"]["seed"], 11);
    assert_eq!(json["environment"]["grid_size"], 4000);
    assert_eq!(json["provenance"]["config_sha256"].as_str().unwrap().len(), 64);
    let other = hardy(&["verify", "--config", cfg.to_str().unwrap(), "--seed", "12"]);
    let other: serde_json::Value = serde_json::from_slice(&other.stdout).unwrap();
    assert_ne!(other["provenance"]["config_sha256"], json["provenance"]["config_sha256"]);
    for check in json["checks"].as_array().unwrap() {
        let pass = check["margin"].as_f64().unwrap() >= -check["tolerance"].as_f64().unwrap();
        assert_eq!(check["status"] == "pass", pass);
    }
}

#[test]
fn sidecars_have_the_documented_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = hardy(&["minimize", "--config", shipped("poincare.toml").to_str().unwrap(), "--grid-size", "401", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let trace = std::fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert!(trace.starts_with("iteration,quotient\n0,"));
    let min = std::fs::read_to_string(dir.path().join("minimizer.csv")).unwrap();
    assert!(min.starts_with("r,value\n"));

    let vdir = dir.path().join("verify");
    let out = hardy(&["verify", "--config", shipped("talenti_demo.toml").to_str().unwrap(), "--out", vdir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let w = std::fs::read_to_string(vdir.join("weights.csv")).unwrap();
    assert!(w.starts_with("r,mu1,mu2\n"));
    assert_eq!(w.lines().count(), 4001);
    assert!(std::fs::read_to_string(vdir.join("residual.csv")).unwrap().starts_with("r,residual\n"));
}

#[test]
fn pairs_runs_without_config() {
    let out = hardy(&["pairs"]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["status"], "pass");
    assert_eq!(json["checks"].as_array().unwrap().len(), 10);
}

#[test]
fn failing_gap_gives_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(shipped("poincare.toml")).unwrap().replace("max_gap = 1e-3", "max_gap = 1e-3\nclaimed = 1.5");
    let path = write_config(dir.path(), "p.toml", &text);
    let out = hardy(&["minimize", "--config", path.to_str().unwrap(), "--grid-size", "201"]);
    assert_eq!(out.status.code(), Some(1));
}
