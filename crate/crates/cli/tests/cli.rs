use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn metricat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_metricat")).args(args).env_remove("METRICAT_BUDGET_NODES").output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const TWO_POINT_PATH: &str = r#"{
  "spaces": {
    "P": {"points": 1, "dist": [[0]]},
    "I": {"points": 2, "dist": [[0, 1], [1, 0]]},
    "L": {"points": 3, "dist": [[0, 1, 2], [1, 0, 1], [2, 1, 0]]}
  },
  "k": "L",
  "f": {"dom": "P", "cod": "I", "map": [0]},
  "g": {"dom": "P", "cod": "I", "map": [1]}
}"#;

#[test]
fn validate_reports_every_violation_and_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "good.json", r#"{"points": 2, "dist": [[0, "1/2"], ["1/2", 0]]}"#);
    let out = metricat(&["space", "validate", &good]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["valid"], true);

    let bad = write(dir.path(), "bad.json", r#"{"points": 3, "dist": [[0, 1, 5], [2, 0, 1], [5, 1, 0]]}"#);
    let out = metricat(&["space", "validate", &bad]);
    assert_eq!(code(&out), 1);
    let v = stdout_json(&out);
    assert_eq!(v["valid"], false);
    assert!(v["violations"].as_array().unwrap().len() >= 2, "{v}");
}

#[test]
fn malformed_input_and_bad_flags_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let junk = write(dir.path(), "junk.json", "{not json");
    assert_eq!(code(&metricat(&["space", "validate", &junk])), 2);
    assert_eq!(code(&metricat(&["space", "canon", "/nonexistent/file.json"])), 2);
    let input = write(dir.path(), "in.json", TWO_POINT_PATH);
    assert_eq!(code(&metricat(&["colimit", "pushout", &input, "--eps", "-1"])), 2);
    assert_eq!(code(&metricat(&["colimit", "pushout", &input])), 2);
    assert_eq!(code(&metricat(&["fraisse", "enumerate"])), 2);
    assert_eq!(code(&metricat(&["no-such-command"])), 2);
}

#[test]
fn canon_is_invariant_under_relabelling() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.json", r#"{"points": 3, "dist": [[0, 1, 2], [1, 0, 1], [2, 1, 0]]}"#);
    let b = write(dir.path(), "b.json", r#"{"points": 3, "dist": [[0, 2, 1], [2, 0, 1], [1, 1, 0]]}"#);
    let ca = stdout_json(&metricat(&["space", "canon", &a]));
    let cb = stdout_json(&metricat(&["space", "canon", &b]));
    assert_eq!(ca["space"], cb["space"]);
}

#[test]
fn pushout_of_two_endpoints_glues_at_distance_eps() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "in.json", TWO_POINT_PATH);
    let out = metricat(&["colimit", "pushout", &input, "--eps", "1/2", "--verify", "--max-size", "2"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["apex"]["points"], 4);
    assert_eq!(v["verification"]["passed"], true);
    // leg_g leaves the codomain of f, leg_f that of g: f(a) = 0 meets g(a) = 1.
    let b = v["leg_g"][0].as_u64().unwrap() as usize;
    let c = v["leg_f"][1].as_u64().unwrap() as usize;
    let glued = &v["apex"]["dist"][b][c];
    assert_eq!(glued, &Value::from("1/2"));
}

#[test]
fn coequalizer_and_cylinder_run() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "in.json", TWO_POINT_PATH);
    let out = metricat(&["colimit", "coequalizer", &input, "--eps", "0", "--verify", "--max-size", "2"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout_json(&out)["apex"]["points"], 1);

    let cyl = write(dir.path(), "cyl.json", r#"{"points": 2, "dist": [[0, 1], [1, 0]]}"#);
    let out = metricat(&["colimit", "cylinder", &cyl, "--eps", "1"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["cylinder"]["points"], 4);
}

#[test]
fn checks_follow_the_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "in.json", TWO_POINT_PATH);
    // The endpoint inclusion into the unit interval splits; the 3-point path is
    // injective for it at every eps.
    let out = metricat(&["check", "split", &input, "--eps", "0"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["split"], true);
    assert_eq!(code(&metricat(&["check", "injective", &input, "--eps", "0"])), 0);
    assert_eq!(code(&metricat(&["check", "pure", &input, "--eps", "0", "--variant", "weak"])), 0);
    assert_eq!(code(&metricat(&["check", "mono", &input, "--eps", "0"])), 0);

    // Collapsing two points at distance 2 is not a 1-monomorphism.
    let collapse = write(
        dir.path(),
        "collapse.json",
        r#"{"f": {"dom": {"points": 2, "dist": [[0, 2], [2, 0]]}, "cod": {"points": 1, "dist": [[0]]}, "map": [0, 0]}}"#,
    );
    let out = metricat(&["check", "mono", &collapse, "--eps", "1"]);
    assert_eq!(code(&out), 1);
    assert!(!stdout_json(&out)["witness"].is_null());
}

#[test]
fn tiny_node_budget_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "in.json", TWO_POINT_PATH);
    let out = metricat(&["--budget-nodes", "1", "colimit", "pushout", &input, "--eps", "1", "--verify"]);
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
    let out = Command::new(env!("CARGO_BIN_EXE_metricat"))
        .args(["colimit", "pushout", &input, "--eps", "1", "--verify"])
        .env("METRICAT_BUDGET_NODES", "1")
        .output()
        .unwrap();
    assert_eq!(code(&out), 3);
}

#[test]
fn config_file_supplies_defaults_and_rejects_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "in.json", TWO_POINT_PATH);
    let cfg = write(dir.path(), "cfg.toml", "eps = \"1/2\"\n");
    let out = metricat(&["--config", &cfg, "colimit", "pushout", &input]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["eps"], "1/2");
    let bad = write(dir.path(), "bad.toml", "colour = 3\n");
    assert_eq!(code(&metricat(&["--config", &bad, "colimit", "pushout", &input, "--eps", "0"])), 2);
}

#[test]
fn laws_run_passes_and_writes_a_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("laws");
    let out = metricat(&["laws", "run", "--seed", "7", "--instances", "40", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let report = stdout_json(&out);
    assert_eq!(report["passed"], true);
    assert_eq!(report["seed"], 7);
    let manifest: Value = serde_json::from_str(&fs::read_to_string(out_dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["settings"]["seed"], 7);
    assert_eq!(manifest["outcome"]["passed"], true);
    assert!(manifest["wall_clock"]["elapsed_ms"].is_u64());
    let on_disk: Value = serde_json::from_str(&fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(on_disk, report);
}

#[test]
fn enumerate_counts_spaces() {
    let out = metricat(&["fraisse", "enumerate", "--grid", "1", "--max-size", "3"]);
    assert_eq!(code(&out), 0);
    // Over {1}: empty, point, 2_1 and the 3-point discrete space.
    assert_eq!(stdout_json(&out)["count"], 4);
}

#[test]
fn build_then_audit_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let run = dir.path().join("run");
    let run_s = run.to_str().unwrap();
    let out = metricat(&["fraisse", "build", "--grid", "1,2", "--max-size", "3", "--steps", "3", "--out", run_s]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout_json(&out)["stages"], serde_json::json!([0, 1, 7, 141]));
    assert!(run.join("manifest.json").exists());
    assert!(!run.join("manifest.json.tmp").exists());
    let out = metricat(&["fraisse", "audit", run_s]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(stdout_json(&out)["passed"], true);
    assert!(run.join("audit.json").exists());
}

#[test]
fn build_over_budget_keeps_partial_chain_and_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let run = dir.path().join("run");
    let run_s = run.to_str().unwrap();
    let out = metricat(&["fraisse", "build", "--grid", "1,2", "--max-size", "3", "--steps", "3", "--stage-points", "20", "--out", run_s]);
    assert_eq!(code(&out), 3);
    let v = stdout_json(&out);
    assert_eq!(v["completed"], false);
    assert_eq!(v["stages"], serde_json::json!([0, 1, 7]));
    let out = metricat(&["fraisse", "audit", run_s]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn pushout_accepts_in_and_out_flags() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "spans.json", TWO_POINT_PATH);
    let result = dir.path().join("result.json");
    let out = metricat(&["colimit", "pushout", "--eps", "1", "--in", &input, "--out", result.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let written: Value = serde_json::from_str(&fs::read_to_string(&result).unwrap()).unwrap();
    assert_eq!(written, stdout_json(&out));
    let manifest: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("result.json.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["settings"]["eps"], "1");
    assert_eq!(manifest["command"][1], "colimit");
}

#[test]
fn injectivity_reports_gap_and_grid_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    // Every non-expansive map from the 3-point path into two points at
    // distance 2 is constant, so extending the identity is off by 2.
    let input = write(
        dir.path(),
        "in.json",
        r#"{"spaces": {"D": {"points": 2, "dist": [[0, 2], [2, 0]]},
                       "M": {"points": 3, "dist": [[0, 1, 2], [1, 0, 1], [2, 1, 0]]}},
            "k": "D", "f": {"dom": "D", "cod": "M", "map": [0, 2]}}"#,
    );
    let out = metricat(&["check", "injective", &input, "--eps", "0"]);
    assert_eq!(code(&out), 1);
    assert_eq!(stdout_json(&out)["gap"], "2");
    assert_eq!(code(&metricat(&["check", "injective", &input, "--eps", "1"])), 1);
    assert_eq!(code(&metricat(&["check", "injective", &input, "--eps", "2"])), 0);
    let out = metricat(&["check", "injective", &input, "--eps-grid", "2,1,1/2"]);
    assert_eq!(code(&out), 1);
    let v = stdout_json(&out);
    assert_eq!(v["per_grid"], serde_json::json!([["2", true], ["1", false], ["1/2", false]]));
    assert_eq!(v["exact"], false);
    assert_eq!(code(&metricat(&["check", "injective", &input, "--eps-grid", "1,2"])), 2);
}

#[test]
fn explicit_family_file_replaces_the_grid_family() {
    let dir = tempfile::tempdir().unwrap();
    let collapse = write(
        dir.path(),
        "collapse.json",
        r#"{"f": {"dom": {"points": 2, "dist": [[0, 2], [2, 0]]}, "cod": {"points": 1, "dist": [[0]]}, "map": [0, 0]}}"#,
    );
    // Against the empty space alone there is nothing to separate.
    let empty = write(dir.path(), "empty.json", r#"{"family": [{"points": 0, "dist": []}]}"#);
    assert_eq!(code(&metricat(&["check", "mono", &collapse, "--eps", "1", "--family", &empty])), 0);
    let point = write(dir.path(), "point.json", r#"[{"points": 1, "dist": [[0]]}]"#);
    assert_eq!(code(&metricat(&["check", "mono", &collapse, "--eps", "1", "--family", &point])), 1);
}

#[test]
fn laws_budget_is_the_instance_count() {
    let out = metricat(&["laws", "run", "--seed", "3", "--budget", "5"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["instances"], 5);
}
