use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn glsieve(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_glsieve"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON document")
}

fn golden(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(path).expect("golden file")
}

#[test]
fn golden_lr_product() {
    let out = glsieve(&["lr", "product", "--n", "3", "--kappa", "1,0", "--kappa2", "0,1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), golden("lr_product_n3_1-0_0-1.json"));
}

#[test]
fn golden_schur_dim() {
    let out = glsieve(&["schur", "dim", "--n", "3", "--kappa", "1,1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), golden("schur_dim_n3_1-1.json"));
}

#[test]
fn malformed_kappa_exits_2_with_json_error() {
    let out = glsieve(&["schur", "dim", "--kappa", "1,x"]);
    assert_eq!(out.status.code(), Some(2));
    let v = stdout_json(&out);
    assert_eq!(v["schemaVersion"], 1);
    assert!(v["error"].as_str().unwrap().contains("1,x"));
}

#[test]
fn unknown_flag_exits_2_with_usage() {
    let out = glsieve(&["schur", "dim", "--kappa", "1,1", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert!(stdout_json(&out)["error"].is_string());
}

#[test]
fn unknown_verify_scope_exits_2() {
    let out = glsieve(&["verify", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
    let v = stdout_json(&out);
    assert_eq!(v["summary"]["skipped"], 1);
    assert_eq!(v["checks"][0]["status"], "skip");
}

#[test]
fn verify_module_scope_passes() {
    let out = glsieve(&["verify", "weights", "--quick"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["scope"], "weights");
    assert_eq!(v["summary"]["failed"], 0);
    assert!(v.get("wallTime").is_none());
}

#[test]
fn rank_mismatch_is_an_input_error() {
    let out = glsieve(&["schur", "eval", "--kappa", "1,0", "--n", "3", "--point", "1,0;1,0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn schur_eval_reports_value_and_method() {
    let out = glsieve(&["schur", "eval", "--kappa", "1", "--point", "2,0;0.5,0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert!((v["value"]["re"].as_f64().unwrap() - 2.5).abs() < 1e-12);
    assert_eq!(v["method"], "bialternant");
    assert_eq!(v["n"], 2);
}

#[test]
fn measure_both_methods_agree() {
    let out = glsieve(&[
        "measure", "integrate", "--n", "3", "--measure", "plancherel", "--p", "5", "--kappa", "1,1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["methodsAgree"], true);
    assert_eq!(v["method"], "both");
    assert!(v["tailBound"].is_number() && v["gridPoints"].is_number());
}

#[test]
fn sato_tate_series_is_rejected() {
    let out = glsieve(&["measure", "integrate", "--measure", "sato-tate", "--kappa", "1", "--method", "series"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_fills_missing_flags_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"n": 3, "kappa": "1,0"}"#).unwrap();
    let cfg = cfg.to_str().unwrap();
    let out = glsieve(&["schur", "dim", "--config", cfg]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["dimension"], 3);
    let out = glsieve(&["schur", "dim", "--kappa", "1,1", "--config", cfg]);
    assert_eq!(stdout_json(&out)["dimension"], 8);
}

#[test]
fn sieve_moment_warns_on_default_l() {
    let out = glsieve(&[
        "sieve", "moment", "--n", "3", "--kappa", "1,0", "--j", "1", "--P", "10", "--Q", "20", "--t", "1e6",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--L"));
    let v = stdout_json(&out);
    assert_eq!(v["L"], 1.0);
    assert_eq!(v["mainTermWithinBound"], true);
    assert!(v["rhs"]["second"].is_number());
}

#[test]
fn sieve_aj_table() {
    let out = glsieve(&["sieve", "aj", "--j", "2", "--P", "4", "--Q", "8"]);
    let v = stdout_json(&out);
    // primes 5 and 7: a_2(25) = 1, a_2(35) = 2, a_2(49) = 1
    let entries: Vec<(u64, u64)> = v["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| (e["n"].as_u64().unwrap(), e["count"].as_u64().unwrap()))
        .collect();
    assert_eq!(entries, vec![(25, 1), (35, 2), (49, 1)]);
}

#[test]
fn hecke_euler_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("local.json");
    std::fs::write(
        &data,
        r#"{"n": 2, "primes": [{"p": 2, "alphas": [{"re": 1, "im": 0}, {"re": 1, "im": 0}]},
                               {"p": 3, "alphas": [{"re": 1, "im": 0}, {"re": 1, "im": 0}]}]}"#,
    )
    .unwrap();
    let out = glsieve(&["hecke", "euler", "--z", "3", "--data", data.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    // (1 − 1/2)^{-2} (1 − 1/3)^{-2} = 4 · 9/4
    assert!((v["value"]["re"].as_f64().unwrap() - 9.0).abs() < 1e-12);
    let out = glsieve(&["hecke", "euler", "--z", "5", "--data", data.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn ensemble_run_dumps_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("forms.csv");
    let out = glsieve(&[
        "ensemble", "run", "--n", "3", "--kappa", "1,0", "--j", "1", "--P", "10", "--Q", "20", "--forms", "2000",
        "--L", "1", "--dump-csv", csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["model"], "iid-plancherel");
    assert_eq!(v["seed"], 42);
    let lines = std::fs::read_to_string(&csv).unwrap().lines().count();
    assert_eq!(lines, 2001);
}
