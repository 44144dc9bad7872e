use std::fs;
use std::path::Path;
use std::process::Command;

fn backhaul() -> Command {
    Command::new(env!("CARGO_BIN_EXE_backhaul"))
}

fn run_ok(args: &[&str], out: &Path) -> String {
    let o = backhaul().args(args).arg("--out").arg(out).output().unwrap();
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap()
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let o = backhaul().arg("frobnicate").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    let o = backhaul().args(["sweep", "n2"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sweep_csv_layout_and_manifest_replay() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    run_ok(&["sweep", "n1", "--trials", "8", "--seed", "5"], &a);
    let csv = fs::read_to_string(a.join("sweep_n1.csv")).unwrap();
    assert!(csv.starts_with("n1,scheme,mean_rate_bps,ci95_bps,trials,"));
    assert_eq!(csv.lines().count(), 1 + 5 * 3);

    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(a.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 5);
    assert_eq!(manifest["config"]["trials"], 8);
    assert_eq!(manifest["command"], "sweep n1");
    assert!(manifest["version"].is_string());

    run_ok(&["sweep", "n1", "--config", a.join("manifest.json").to_str().unwrap()], &b);
    assert_eq!(csv, fs::read_to_string(b.join("sweep_n1.csv")).unwrap());
}

#[test]
fn config_file_with_flags_overriding() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("fig4.json");
    fs::write(
        &cfg,
        r#"{"sweep": {"k": {"num_stations": [4, 6], "demands_bps": [5e7]}}, "zeta_bps_per_unit": 1e6, "seed": 9, "trials": 50, "schemes": ["matching"]}"#,
    )
    .unwrap();
    run_ok(&["sweep", "k", "--config", cfg.to_str().unwrap(), "--trials", "4"], dir.path());
    let csv = fs::read_to_string(dir.path().join("sweep_k.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("4,50000000,matching,"));
    assert!(rows.iter().all(|r| r.split(',').nth(5) == Some("4")));
}

#[test]
fn invalid_config_fails_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{"sweep": {"n1": []}, "zeta_bps_per_unit": 1e6, "seed": 1}"#).unwrap();
    let o =
        backhaul().args(["sweep", "n1", "--config", cfg.to_str().unwrap(), "--out"]).arg(dir.path()).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no values"));

    fs::write(&cfg, r#"{"params": {"num_stations": 2, "num_anchors": 2}, "seed": 1}"#).unwrap();
    let o = backhaul().args(["generate", "--config", cfg.to_str().unwrap(), "--out"]).arg(dir.path()).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn generate_then_run_on_the_file() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&["generate", "--seed", "4", "--stations", "6"], dir.path());
    let scenario = dir.path().join("scenario.json");
    let s = backhaul::Scenario::load(&scenario).unwrap();
    assert_eq!(s.num_demanding(), 4);

    let out = dir.path().join("run");
    run_ok(&["run", "--scenario", scenario.to_str().unwrap(), "--schemes", "matching,best-effort"], &out);
    let metrics = fs::read_to_string(out.join("metrics.csv")).unwrap();
    let lines: Vec<&str> = metrics.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("matching,"));
    assert!(lines[2].starts_with("best_effort,"));
    let alloc = fs::read_to_string(out.join("allocation_matching.csv")).unwrap();
    assert!(alloc.starts_with("k2,k1,band,n,gamma,rate_bps,price\n"));
}

#[test]
fn stability_audit_reports_zero_blocking_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let stdout = run_ok(&["stability-audit", "--trials", "1000"], dir.path());
    assert!(stdout.contains("1000 trials, 0 blocking pairs"), "{stdout}");
}
