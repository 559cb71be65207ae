use std::path::Path;
use std::process::{Command, Output};
use std::time::Instant;

const BIN: &str = env!("CARGO_BIN_EXE_casimir-lab");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("CASIMIR_LAB_JOBS").output().expect("binary runs")
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn pressure_sweep_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    let args = |p: &Path| {
        vec![
            "plates".to_string(),
            "sweep".into(),
            "--observable".into(),
            "pressure".into(),
            "--sigma-bar".into(),
            "0.01".into(),
            "--ratio".into(),
            "0,0.5".into(),
            "--out".into(),
            p.display().to_string(),
        ]
    };
    let out_a = Command::new(BIN).args(args(&a)).arg("--jobs").arg("1").output().unwrap();
    let out_b = Command::new(BIN).args(args(&b)).arg("--jobs").arg("3").output().unwrap();
    assert_eq!(out_a.status.code(), Some(0), "{}", String::from_utf8_lossy(&out_a.stderr));
    assert_eq!(out_b.status.code(), Some(0));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let text = read(&a);
    assert_eq!(text.lines().count(), 5);
    assert!(text.starts_with("observable,pipeline,a,sigma0,sigma_x,sigma_y,sigma_bar,Sigma,ratio,rapidity,value,abs_err_est,converged\n"));

    let manifest: serde_json::Value = serde_json::from_str(&read(&dir.path().join("a.csv.manifest.json"))).unwrap();
    assert_eq!(manifest["tool"], "casimir-lab");
    assert_eq!(manifest["summary"]["rows"], 4);
    assert_eq!(manifest["spec"]["plates"]["ratio"], serde_json::json!([0.0, 0.5]));
    assert!(manifest["summary"]["max_cross_pipeline_deviation"].as_f64().unwrap() <= 1e-3);
}

#[test]
fn sphere_delta_e_rows() {
    let out = run(&["sphere", "delta-e", "--sigma", "0.1", "--ratio", "1", "--pipelines", "integral,closed_printed"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "observable,pipeline,a,sigma,Sigma,r,phi,l_max,value,abs_err_est,converged");
    assert_eq!(rows.len(), 3);
    let value = |row: &str| row.split(',').nth(8).unwrap().parse::<f64>().unwrap();
    assert!((value(rows[1]) + 0.29297).abs() < 1e-5);
    assert!((value(rows[2]) + 2.9296875).abs() < 1e-12);
}

#[test]
fn empty_grid_exits_1_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("none.csv");
    let out = run(&["plates", "sweep", "--out", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!p.exists());
    assert!(!dir.path().join("none.csv.manifest.json").exists());
}

#[test]
fn invalid_points_exit_1() {
    assert_eq!(run(&["plates", "sweep", "--sigma-bar", "0.01", "--ratio", "1.2"]).status.code(), Some(1));
    assert_eq!(run(&["plates", "residual", "--sigma-bar", "0.01", "--pipelines", "printed"]).status.code(), Some(1));
    assert_eq!(run(&["sphere", "esigma", "--sigma", "-0.1"]).status.code(), Some(1));
    assert_eq!(run(&["plates", "stress", "--sigma-bar", "0.1", "--pipeline", "oracle", "--subtract"]).status.code(), Some(1));
}

#[test]
fn tail_cap_exits_3_with_row_emitted() {
    let out = run(&["sphere", "esigma", "--sigma", "0.01", "--l-max", "10"]);
    assert_eq!(out.status.code(), Some(3));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().nth(1).unwrap().ends_with(",false"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "[plates]\na = 1, 2\nsigma_bar = 0.05\nratio = 0.25\npipelines = closed\n").unwrap();
    let out = run(&["plates", "sweep", "--config", cfg.to_str().unwrap(), "--a", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().nth(1).unwrap().starts_with("pressure,closed,3,0.05,"));
    std::fs::write(&cfg, "[plates]\nwidth = 2\n").unwrap();
    assert_eq!(run(&["plates", "sweep", "--config", cfg.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn json_and_stress_outputs() {
    let out = run(&["plates", "residual", "--sigma-bar", "0.02", "--ratio", "0,0.5", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
    assert_eq!(v[0]["observable"], "residual");

    let out = run(&["plates", "stress", "--sigma-bar", "0.3", "--ratio", "0.2", "--rapidity", "0.3", "--pipeline", "oracle"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 17);
}

#[test]
fn jobs_env_fallback_is_validated() {
    let out = Command::new(BIN)
        .args(["plates", "sweep", "--sigma-bar", "0.01"])
        .env("CASIMIR_LAB_JOBS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = Command::new(BIN)
        .args(["plates", "sweep", "--sigma-bar", "0.01"])
        .env("CASIMIR_LAB_JOBS", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn fast_verify_is_quick_and_repeatable() {
    let start = Instant::now();
    let first = run(&["verify", "--profile", "fast"]);
    assert!(start.elapsed().as_secs_f64() < 10.0);
    let second = run(&["verify", "--fast"]);
    assert_eq!(first.stdout, second.stdout);
    let text = String::from_utf8(first.stdout).unwrap();
    let lines: Vec<&str> = text.lines().filter(|l| l.starts_with("criterion")).collect();
    assert_eq!(lines.len(), 15);
    assert!(lines[2].contains(" SKIP "));
    let any_fail = lines.iter().any(|l| l.contains(" FAIL "));
    assert_eq!(first.status.code(), Some(if any_fail { 2 } else { 0 }));
}
