//! End-to-end tests of the binary: exit codes, report files, determinism,
//! seed handling, and the counterexample/replay subcommands.

use std::path::Path;
use std::process::{Command, Output};

fn matmean(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_matmean"))
        .args(args)
        .env_remove("MATMEAN_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn run_writes_json_report_and_exits_zero_on_sound_checks() {
    let dir = std::env::temp_dir().join("matmean-cli-json");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let out = matmean(&[
        "run",
        "--trials",
        "2",
        "--dims",
        "1,2",
        "--checks",
        "M_ID1,M_CHAIN,S_AMGM",
        "--seed",
        "7",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    let json: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(json["config"]["master_seed"], 7);
    assert_eq!(json["matrix_checks"][0]["check_id"], "M_ID1");
    assert_eq!(json["non_remark_failures"], 0);
    let anchors: Vec<&str> = json["matrix_checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["anchor"].as_str().unwrap())
        .collect();
    assert!(anchors.contains(&"We emphasize the identity"));
}

#[test]
fn run_exits_nonzero_when_a_check_fails() {
    // The weighted geometric-harmonic bound fails above v = 1/2; the exit
    // code contract makes that visible.
    let out = matmean(&[
        "run", "--trials", "5", "--dims", "2", "--v-grid", "0.8", "--checks", "M_GH_V",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("worst trial"));
}

#[test]
fn identical_configs_produce_identical_report_bytes() {
    let dir = std::env::temp_dir().join("matmean-cli-det");
    std::fs::create_dir_all(&dir).unwrap();
    let (p1, p2) = (dir.join("a.json"), dir.join("b.json"));
    for p in [&p1, &p2] {
        let out = matmean(&[
            "run",
            "--trials",
            "3",
            "--dims",
            "2",
            "--checks",
            "M_THM1,M_GUMUS,S_GH",
            "--seed",
            "11",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    assert_eq!(
        std::fs::read(&p1).unwrap(),
        std::fs::read(&p2).unwrap(),
        "reports must be byte-identical"
    );
}

#[test]
fn csv_report_has_documented_header() {
    let dir = std::env::temp_dir().join("matmean-cli-csv");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.csv");
    let out = matmean(&[
        "run",
        "--trials",
        "1",
        "--dims",
        "1",
        "--checks",
        "M_ID1",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with(
        "check_id,trials,applicable,failures,min_margin,min_sv_gap,max_residual,worst_seed\n"
    ));
    assert!(text.lines().nth(1).unwrap().starts_with("M_ID1,1,1,0,"));
}

#[test]
fn env_seed_overrides_default_but_flag_wins() {
    let dir = std::env::temp_dir().join("matmean-cli-env");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("env.json");
    let out = Command::new(env!("CARGO_BIN_EXE_matmean"))
        .args([
            "run", "--trials", "1", "--dims", "1", "--checks", "M_ID1", "--out",
            path.to_str().unwrap(),
        ])
        .env("MATMEAN_SEED", "123")
        .output()
        .unwrap();
    assert!(out.status.success());
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(json["config"]["master_seed"], 123);

    let out2 = Command::new(env!("CARGO_BIN_EXE_matmean"))
        .args([
            "run", "--trials", "1", "--dims", "1", "--checks", "M_ID1", "--seed", "77",
            "--out", path.to_str().unwrap(),
        ])
        .env("MATMEAN_SEED", "123")
        .output()
        .unwrap();
    assert!(out2.status.success());
    let json2: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(json2["config"]["master_seed"], 77);
}

#[test]
fn counterexample_subcommand_certifies_violation() {
    let out = matmean(&["counterexample"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("violation"), "{text}");
    assert!(text.contains("persists at 4x resolution: true"), "{text}");
}

#[test]
fn counterexample_reports_no_violation_on_half_weight_line() {
    let out = matmean(&[
        "counterexample",
        "--x-lo", "1", "--x-hi", "10", "--v-lo", "0.5", "--v-hi", "0.5",
        "--resolution", "2000,1",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("no violation"));
}

#[test]
fn replay_round_trips_a_reported_worst_seed() {
    let dir = std::env::temp_dir().join("matmean-cli-replay");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("r.json");
    let out = matmean(&[
        "run", "--trials", "4", "--dims", "3", "--checks", "M_THM1", "--seed", "5",
        "--out", path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let row = &json["matrix_checks"][0];
    let seed = row["worst_seed"].as_u64().unwrap().to_string();
    let dim = row["worst_dim"].as_u64().unwrap().to_string();

    let replayed = matmean(&["replay", "--check", "M_THM1", "--seed", &seed, "--dim", &dim]);
    assert!(replayed.status.success());
    let result: serde_json::Value = serde_json::from_str(&stdout(&replayed)).unwrap();
    assert_eq!(result["check_id"], "M_THM1");
    assert_eq!(result["passed"], true);
    // The recorded worst margin comes back exactly.
    let margins = result["loewner_margins"].as_array().unwrap();
    let min_rel = margins
        .iter()
        .map(|m| m["margin"].as_f64().unwrap() / m["scale"].as_f64().unwrap())
        .fold(f64::INFINITY, f64::min);
    assert_eq!(
        min_rel.to_bits(),
        row["min_margin"].as_f64().unwrap().to_bits()
    );
}

#[test]
fn scalar_subcommand_reports_refuted_lemma() {
    let out = matmean(&["scalar", "--x-points", "300", "--v-points", "19"]);
    // S_GH_V has genuine violations, so the subcommand exits nonzero.
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("S_AMGM"));
    assert!(text.contains("S_GH_V"));
}

#[test]
fn spectrum_override_is_applied_and_echoed() {
    let dir = std::env::temp_dir().join("matmean-cli-spectrum");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("s.json");
    let out = matmean(&[
        "run", "--trials", "2", "--dims", "2", "--checks", "M_CHAIN", "--spectrum",
        "0.5,2.0", "--out", path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(json["config"]["spectrum_range"][0], 0.5);
    assert_eq!(json["config"]["spectrum_range"][1], 2.0);

    let bad = matmean(&["run", "--spectrum", "1.0"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn unknown_check_id_is_a_usage_error() {
    let out = matmean(&["run", "--checks", "M_BOGUS"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("M_BOGUS"));
}

#[test]
fn replay_rejects_unknown_check() {
    let out = matmean(&["replay", "--check", "NOPE", "--seed", "1", "--dim", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn report_path_errors_are_reported() {
    let bad = Path::new("/nonexistent-dir/report.json");
    let out = matmean(&[
        "run", "--trials", "1", "--dims", "1", "--checks", "M_ID1", "--out",
        bad.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot write report"));
}
