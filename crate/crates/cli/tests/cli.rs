use std::path::Path;
use std::process::{Command, Output};

fn hetc(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hetc-sim")).args(args).current_dir(cwd).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn upsilon_out_of_range_is_reported_by_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.toml", "trigger.upsilon = 1.5\n");
    let out = hetc(&["run", "--config", &cfg, "--out", "o"], dir.path());
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("ConfigInvalid") && err.contains("trigger.upsilon"), "{err}");
    assert!(!dir.path().join("o").exists());
}

#[test]
fn verify_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = hetc(&["verify"], dir.path());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{text}");
    assert!(text.contains("5 suites, 0 failed"), "{text}");
}

#[test]
fn run_writes_artifacts_and_single_value_sweep_matches() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "short.toml", "preset = \"paper_sec4\"\nsim.duration = 3.0\n");
    let out = hetc(&["run", "--config", &cfg, "--out", "run", "--plots"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["trace.csv", "events.csv", "summary.json", "tracking.svg", "control.svg", "intervals.svg", "observer_errors.svg"] {
        assert!(dir.path().join("run").join(f).exists(), "{f}");
    }
    let trace = std::fs::read_to_string(dir.path().join("run/trace.csv")).unwrap();
    assert_eq!(trace.lines().next(), Some("# schema_version=1"));
    assert_eq!(trace.lines().count(), 2 + 3001);

    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("run/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["status"], "completed");
    assert_eq!(summary["config"]["trigger"]["switch_t"], 1.0);
    assert_eq!(summary["config"]["differentiator"]["eps1"][0], 2.9);
    let s = &summary["summary"];

    let out = hetc(&["sweep", "--config", &cfg, "--param", "T", "--values", "1"], dir.path());
    assert!(out.status.success());
    let table = String::from_utf8_lossy(&out.stdout);
    let row: Vec<&str> = table.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "trigger.switch_t");
    assert_eq!(row[2], "ok");
    assert_eq!(row[3], s["events_total"].to_string());
    assert_eq!(row[4], s["events_relative"].to_string());
    assert_eq!(row[5], s["events_fixed"].to_string());
    assert_eq!(row[6].parse::<f64>().unwrap(), s["min_dwell_s"].as_f64().unwrap());
    assert_eq!(row[7].parse::<f64>().unwrap(), s["max_tracking_error"].as_f64().unwrap());
}

#[test]
fn sweep_flags_bad_rows_and_keeps_going() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "toy.toml", "preset = \"toy_linear_scalar\"\nsim.duration = 0.1\n");
    let out = Command::new(env!("CARGO_BIN_EXE_hetc-sim"))
        .args(["sweep", "--config", &cfg, "--param", "Upsilon", "--values", "0.3,0.5,1.0", "--out", "sw"])
        .env("HETC_SIM_THREADS", "2")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let table = std::fs::read_to_string(dir.path().join("sw/sweep.csv")).unwrap();
    let status: Vec<&str> = table.lines().skip(1).map(|l| l.split(',').nth(2).unwrap()).collect();
    assert_eq!(status, vec!["ok", "ok", "failed"]);
    assert!(table.lines().nth(3).unwrap().contains("trigger.upsilon"));
}
