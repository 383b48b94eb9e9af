//! End-to-end CLI tests: exit-code contract, deterministic output, the
//! function-spec round trip, and the list enumeration.

use std::process::{Command, Output};

fn hardyv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hardyv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn exit_zero_on_passing_verification() {
    let out = hardyv(&["verify", "--case", "R1", "--p", "2", "--alpha", "1", "--ell", "1", "--f", "ind:0,0.5,1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let body: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let arr = body.as_array().unwrap();
    assert_eq!(arr.len(), 1);
    let ratio = arr[0]["ratio"].as_f64().unwrap();
    assert!((ratio - 1.0).abs() <= 1e-8, "equality family ratio {ratio}");
    assert_eq!(arr[0]["pass"], serde_json::Value::Bool(true));
    assert!(arr[0]["tool_version"].is_string());
    assert!(arr[0]["seed"].is_number());
}

#[test]
fn exit_one_on_failing_check() {
    // the as-printed log weight breaks the p = 1 identity: rhs = 1, lhs = 2
    let out = hardyv(&[
        "verify", "--case", "B1", "--p", "1", "--alpha", "1", "--ell", "1", "--f", "ind:0,1,1", "--log-weight",
        "as-printed",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn exit_two_on_invalid_parameters() {
    // alpha passed to a case that does not take it
    let out = hardyv(&["verify", "--case", "C2", "--p", "2", "--alpha", "5", "--ell", "1", "--f", "pow:1,1"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("does not take"), "{err}");
    // regime violation names the condition
    let out = hardyv(&["verify", "--case", "R1", "--p", "2", "--alpha", "7", "--ell", "1", "--f", "ind:0,0.5,1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("0 < alpha < p"));
    // unknown case id is rejected before any computation
    let out = hardyv(&["verify", "--case", "ZZ", "--p", "2", "--ell", "1", "--f", "pow:1,1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exit_three_on_divergence() {
    // averaging an indicator against dx/x diverges near zero
    let out = hardyv(&["verify", "--case", "C1", "--p", "2", "--ell", "inf", "--f", "ind:0,1,1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("diverge"));
}

#[test]
fn constants_prints_reference_value() {
    let out = hardyv(&["constants", "--id", "dual_pi", "--p", "0.5", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("1.5707963267948966"), "{}", stdout(&out));
    let out = hardyv(&["constants", "--id", "bennett_pair", "--p", "2", "--alpha", "3", "--format", "csv"]);
    assert!(stdout(&out).contains("bennett_pair,3,9"));
    let out = hardyv(&["constants", "--id", "nope", "--p", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn list_enumerates_all_cases() {
    let out = hardyv(&["list"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let ids: Vec<&str> = text.lines().map(|l| l.split('\t').next().unwrap()).collect();
    let want = [
        "H1", "H2", "H3", "C1", "C2", "E1", "E2", "L1", "L2", "R1", "R2", "R3", "R3inf", "TS", "LZ1", "LZ2",
        "LZ3", "DP", "B1", "B2", "PQ", "PQd", "D1",
    ];
    assert_eq!(ids, want);
    for line in text.lines() {
        assert!(line.split('\t').nth(1).unwrap().contains('('), "label missing in {line}");
    }
}

#[test]
fn output_is_byte_identical_across_runs() {
    let args = [
        "scan", "--case", "C2", "--p", "2", "--alpha", "0.5,1,2", "--ell", "1", "--f", "pow:1,@alpha", "--format",
        "csv", "--seed", "42",
    ];
    let a = hardyv(&args);
    let b = hardyv(&args);
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
    // header + 3 rows
    assert_eq!(stdout(&a).lines().count(), 4);
}

#[test]
fn function_specs_in_reports_reparse() {
    let out = hardyv(&["equality", "--case", "R2", "--p", "2", "--alpha", "2", "--ell", "1", "--c", "0.5"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let body: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let spec = body[0]["params"]["function"].as_str().unwrap();
    hardy_core::funcspace::parse_func(spec, 1.0).unwrap_or_else(|e| panic!("'{spec}' must reparse: {e}"));
}

#[test]
fn probe_and_lorentz_subcommands() {
    let out = hardyv(&["probe", "--case", "DP", "--p", "0.5", "--ell", "0", "--f", "ind:0,1,1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let body: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let sup = body["sup_ratio"].as_f64().unwrap();
    assert!((sup - 1.0).abs() < 1e-7, "sup {sup}");

    let out = hardyv(&["lorentz", "--which", "eq43", "--p", "2", "--q", "2", "--f", "step:[1:1;inf:0]"]);
    assert_eq!(out.status.code(), Some(0));
    let body: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(body.as_array().unwrap().len(), 2);
}

#[test]
fn equiv_subcommand_reports_factor() {
    let out = hardyv(&["equiv", "--which", "obs21", "--p", "2", "--f", "ind:0.25,1,1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let body: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    for row in body.as_array().unwrap() {
        assert_eq!(row["constant"].as_f64().unwrap(), 8.0);
        assert_eq!(row["pass"], serde_json::Value::Bool(true));
    }
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = std::env::temp_dir().join(format!("hardyv-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.json");
    std::fs::write(
        &cfg,
        r#"{"case":"R1","p":2.0,"alpha":1.0,"ell":"1","f":"ind:0,0.5,1","format":"csv","seed":7}"#,
    )
    .unwrap();
    let out = hardyv(&["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.starts_with("case_id,"), "config format=csv should apply: {text}");
    assert!(text.contains(",7\n") || text.trim_end().ends_with(",7"), "config seed echoes: {text}");
    // a flag overrides the config value
    let out = hardyv(&["verify", "--config", cfg.to_str().unwrap(), "--alpha", "1.5"]);
    let text = stdout(&out);
    assert!(text.lines().nth(1).unwrap().contains(",1.5,"), "{text}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn sampled_file_specs_load() {
    let dir = std::env::temp_dir().join(format!("hardyv-sampled-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let csv = dir.join("f.csv");
    std::fs::write(&csv, "0.5,1.0\n1.0,0.5\n").unwrap();
    let spec = format!("sampled:@{}", csv.display());
    let out = hardyv(&["verify", "--case", "R1", "--p", "2", "--alpha", "1", "--ell", "1", "--f", &spec]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("hardyv-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let out = hardyv(&[
        "verify", "--case", "C2", "--p", "2", "--ell", "1", "--f", "pow:1,1", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let body: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!((body[0]["ratio"].as_f64().unwrap() - 0.75).abs() < 1e-8);
    std::fs::remove_dir_all(&dir).ok();
}
