use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn pamd(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pamd"))
        .args(args)
        .current_dir(dir)
        .env_remove("PAMD_THREADS")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

#[test]
fn estimate_without_potential_is_exactly_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"gamma": 0, "L": 10, "t": 2}"#);
    let out = pamd(
        &["estimate-u", "--config", &cfg, "--replicas", "200"],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][3].parse::<f64>().unwrap(), 1.0);
    assert_eq!(rows[0][4].parse::<f64>().unwrap(), 0.0);
    assert!(text
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("params_hash,t,n,mean,stderr"));
}

#[test]
fn reruns_are_byte_identical_and_thread_independent() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"gamma": -0.5, "L": 12, "t": 3, "t_grid": [1, 2, 3]}"#,
    );
    let run = |threads: &str, out: &str| {
        let o = pamd(
            &[
                "estimate-u",
                "--config",
                &cfg,
                "--replicas",
                "3000",
                "--seed",
                "5",
                "--threads",
                threads,
                "--out",
                out,
            ],
            dir.path(),
        );
        assert!(o.status.success());
        std::fs::read(dir.path().join(out)).unwrap()
    };
    let a = run("1", "a.csv");
    let b = run("2", "b.csv");
    let c = run("1", "a.csv");
    assert_eq!(a, c);
    // the embedded config differs only in the out path
    let strip = |v: &[u8]| {
        String::from_utf8_lossy(v)
            .lines()
            .skip(1)
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn embedded_config_reparses() {
    let dir = tempfile::tempdir().unwrap();
    let out = pamd(
        &["estimate-u", "--replicas", "10", "--seed", "3"],
        dir.path(),
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let line = text
        .lines()
        .next()
        .unwrap()
        .strip_prefix("# config: ")
        .unwrap();
    let cfg_path = write(dir.path(), "again.json", line);
    let again = pamd(&["estimate-u", "--config", &cfg_path], dir.path());
    assert!(again.status.success());
    assert_eq!(String::from_utf8(again.stdout).unwrap(), text);
}

#[test]
fn spectral_shift_identity() {
    let dir = tempfile::tempdir().unwrap();
    let out = pamd(&["spectral"], dir.path());
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let defect = v["result"]["shift_defect"].as_f64().unwrap();
    assert!(defect.abs() <= 1e-8, "{defect}");
    assert_eq!(v["result"]["dimension"], 48);
    assert!(v["metadata"]["version"].is_string());
}

#[test]
fn validation_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = write(dir.path(), "u.json", r#"{"lambda": 2}"#);
    assert_eq!(
        pamd(&["spectral", "--config", &unknown], dir.path())
            .status
            .code(),
        Some(1)
    );
    let bad_p = write(dir.path(), "p.json", r#"{"p": 1.5}"#);
    assert_eq!(
        pamd(&["estimate-u", "--config", &bad_p], dir.path())
            .status
            .code(),
        Some(1)
    );
    let wrong_cmd = write(dir.path(), "w.json", r#"{"command": "fit"}"#);
    assert_eq!(
        pamd(&["spectral", "--config", &wrong_cmd], dir.path())
            .status
            .code(),
        Some(1)
    );
    let too_big = write(dir.path(), "b.json", r#"{"L": 40}"#);
    assert_eq!(
        pamd(&["spectral", "--config", &too_big], dir.path())
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn numerical_failure_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"tol": 1e-300, "L": 8, "t": 2, "gamma": 3}"#,
    );
    let out = pamd(&["solve-pam", "--config", &cfg], dir.path());
    assert_eq!(
        out.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn solve_pam_writes_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"L": 5, "t": 1, "gamma": 0}"#);
    let out = pamd(&["solve-pam", "--config", &cfg], dir.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 10);
    let mass: f64 = rows.iter().map(|r| r[2].parse::<f64>().unwrap()).sum();
    assert!((mass - 1.0).abs() < 1e-8);
}

#[test]
fn envelopes_and_fit() {
    let dir = tempfile::tempdir().unwrap();
    let env = pamd(&["envelopes"], dir.path());
    let v: Value = serde_json::from_slice(&env.stdout).unwrap();
    assert!(
        v["result"]["no_dormancy"]["lo"].as_f64().unwrap()
            < v["result"]["no_dormancy"]["hi"].as_f64().unwrap()
    );
    assert!(v["result"]["growth_d12"]["legendre"].as_f64().is_some());

    let d3 = write(dir.path(), "d3.json", r#"{"d": 3, "p": 0.5, "gamma": -1}"#);
    let v: Value =
        serde_json::from_slice(&pamd(&["envelopes", "--config", &d3], dir.path()).stdout).unwrap();
    assert!(
        (v["result"]["rate_bound_d3"]["no_dormancy"]
            .as_f64()
            .unwrap()
            - 0.39913)
            .abs()
            < 1e-4
    );

    let cfg = write(
        dir.path(),
        "s.json",
        r#"{"gamma": -1, "p": 0.3, "L": 60, "t": 16, "t_grid": [2, 4, 8, 12, 16], "estimator": "stirring"}"#,
    );
    let series = dir.path().join("series.csv");
    let o = pamd(
        &[
            "estimate-u",
            "--config",
            &cfg,
            "--replicas",
            "2000",
            "--out",
            series.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert!(o.status.success());
    let fit_cfg = write(
        dir.path(),
        "f.json",
        &format!(r#"{{"input": {:?}, "p": 0.3}}"#, series.to_str().unwrap()),
    );
    let fit = pamd(
        &["fit", "--config", &fit_cfg, "--out", "fit.json"],
        dir.path(),
    );
    assert!(
        fit.status.success(),
        "{}",
        String::from_utf8_lossy(&fit.stderr)
    );
    let v: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("fit.json")).unwrap())
            .unwrap();
    assert!(v["result"]["fit"]["slope"].as_f64().unwrap() > 0.0);
    let plot = std::fs::read_to_string(dir.path().join("fit.plot.csv")).unwrap();
    assert_eq!(data_rows(&plot).len(), 5);
}

#[test]
fn env_stats_conserves_particles() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"L": 50, "t": 5, "p": 0.3}"#);
    let out = pamd(
        &["env-stats", "--config", &cfg, "--replicas", "500"],
        dir.path(),
    );
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["count_violations"], 0);
}

#[test]
fn reproduce_quick_prints_table_and_matching_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = pamd(&["reproduce", "--quick", "--out", "suite.json"], dir.path());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text
        .lines()
        .filter(|l| l.starts_with("[PASS]") || l.starts_with("[FAIL]"))
        .collect();
    assert_eq!(lines.len(), 14, "{text}");
    let any_failed = lines.iter().any(|l| l.starts_with("[FAIL]"));
    assert_eq!(out.status.code(), Some(if any_failed { 3 } else { 0 }));
    let v: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("suite.json")).unwrap())
            .unwrap();
    assert_eq!(v["result"].as_array().unwrap().len(), 14);
    assert!(text.contains("printed closed form"));
}
