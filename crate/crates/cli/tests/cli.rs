use std::path::PathBuf;
use std::process::{Command, Output};

use proptest::prelude::*;
use serde_json::Value;

use qwx_cli::document::Q;
use qwx_cli::{parse_problem, validate, Status, INPUT_ERROR_EXIT};

fn problem(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../problems").join(name)
}

fn qwx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qwx")).args(args).output().expect("binary runs")
}

fn run_json(cmd: &str, file: &str, extra: &[&str]) -> Value {
    let path = problem(file);
    let mut args = vec![cmd, "--input", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    let out = qwx(&args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write_temp(text: &str) -> tempfile::NamedTempFile {
    let f = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(f.path(), text).unwrap();
    f
}

#[test]
fn critical_values_golden() {
    let v = run_json("critical", "jordan.json", &[]);
    assert_eq!(v["payload"]["walls"], serde_json::json!(["1", "3", "5"]));
    assert_eq!(v["status"], "ok");
}

#[test]
fn tau_max_flag_overrides_document() {
    let v = run_json("critical", "jordan.json", &["--tau-max", "3"]);
    assert_eq!(v["payload"]["walls"], serde_json::json!(["1", "3"]));
}

#[test]
fn chambers_golden() {
    let v = run_json("chambers", "jordan.json", &[]);
    let reps: Vec<&str> = v["payload"]["chambers"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["representative"].as_str().unwrap())
        .collect();
    assert_eq!(reps, ["1/2", "2", "4"]);
}

#[test]
fn ext_golden() {
    let v = run_json("ext", "jordan.json", &[]);
    let point = v["payload"]["pairs"]
        .as_array()
        .unwrap()
        .iter()
        .find(|p| p["left"] == "point" && p["right"] == "point")
        .unwrap();
    assert_eq!((point["hom"].as_u64(), point["ext1"].as_u64()), (Some(1), Some(2)));
}

#[test]
fn euler_golden() {
    let v = run_json("euler", "a2_wall.json", &[]);
    let chis: Vec<i64> = v["payload"]["pairs"].as_array().unwrap().iter().map(|p| p["chi"].as_i64().unwrap()).collect();
    assert_eq!(chis, [-1, 1, -1]);
}

#[test]
fn wallcross_golden() {
    let v = run_json("wallcross", "a2_wall.json", &[]);
    let chambers = v["payload"]["chambers"].as_array().unwrap();
    assert_eq!(chambers[0]["values"]["gamma"], "15");
    assert_eq!(chambers.last().unwrap()["values"]["gamma"], "5");
    assert_eq!(v["payload"]["round_trip_holds"], true);
}

#[test]
fn wallcross_genus_one_is_constant() {
    let v = run_json("wallcross", "a2_genus1.json", &[]);
    let chambers = v["payload"]["chambers"].as_array().unwrap();
    assert!(chambers.len() > 1);
    assert!(chambers.iter().all(|c| c["values"] == chambers[0]["values"]));
    assert_eq!(v["payload"]["genus_rule"]["zeroed"], serde_json::json!(["beta"]));
}

#[test]
fn invert_golden() {
    let v = run_json("invert", "a2_wall.json", &[]);
    assert_eq!(v["payload"]["plus_side"]["gamma"], "5");
}

#[test]
fn verify_hall_passes() {
    for file in ["jordan.json", "a2_wall.json"] {
        let v = run_json("verify-hall", file, &[]);
        assert_eq!(v["status"], "ok");
        assert!(v["payload"]["walls"].as_array().unwrap().iter().all(|w| w["log_lemma"]["holds"] == true));
    }
}

#[test]
fn validate_all_example_problems() {
    for file in ["jordan.json", "a2_wall.json", "a2_genus1.json"] {
        let v = run_json("validate", file, &[]);
        assert_eq!(v["payload"]["twist_pairing_holds"], true);
    }
}

fn expect_input_error(out: &Output, code: &str) {
    assert_eq!(out.status.code(), Some(i32::from(INPUT_ERROR_EXIT)));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains(code), "stderr lacks {code}: {err}");
}

#[test]
fn exit_code_contract() {
    let twist = problem("bad_twist.json");
    expect_input_error(&qwx(&["validate", "--input", twist.to_str().unwrap()]), "TWIST_PAIRING");
    let framing = problem("bad_framing.json");
    expect_input_error(&qwx(&["validate", "--input", framing.to_str().unwrap()]), "FRAMING_RANK");

    let jordan = problem("jordan.json");
    let out = qwx(&["frobnicate", "--input", jordan.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("possible values"));

    expect_input_error(&qwx(&["critical", "--input", "/nonexistent/problem.json"]), "IO_ERROR");
    expect_input_error(&qwx(&["critical", "--input", jordan.to_str().unwrap(), "--tau-max", "-1"]), "NON_POSITIVE_TAU");

    let broken = write_temp("{ \"format\": 1, ");
    expect_input_error(&qwx(&["validate", "--input", broken.path().to_str().unwrap()]), "PARSE_ERROR");

    let text = std::fs::read_to_string(&jordan).unwrap();
    let mut doc: Value = serde_json::from_str(&text).unwrap();
    doc["surprise"] = Value::Bool(true);
    let extra = write_temp(&doc.to_string());
    expect_input_error(&qwx(&["validate", "--input", extra.path().to_str().unwrap()]), "SCHEMA_VIOLATION");

    let mut doc: Value = serde_json::from_str(&text).unwrap();
    doc["run"]["tau_max"] = serde_json::json!(2.5);
    let float = write_temp(&doc.to_string());
    expect_input_error(&qwx(&["validate", "--input", float.path().to_str().unwrap()]), "SCHEMA_VIOLATION");

    let mut doc: Value = serde_json::from_str(&text).unwrap();
    doc["run"].as_object_mut().unwrap().remove("tau_max");
    let no_tau = write_temp(&doc.to_string());
    expect_input_error(&qwx(&["critical", "--input", no_tau.path().to_str().unwrap()]), "MISSING_TAU_MAX");

    let mut doc: Value = serde_json::from_str(&text).unwrap();
    doc["tables"]["unframed"]["nobody"] = serde_json::json!(1);
    let unknown = write_temp(&doc.to_string());
    expect_input_error(&qwx(&["validate", "--input", unknown.path().to_str().unwrap()]), "UNKNOWN_NAME");

    assert_eq!(Status::Ok.exit_code(), 0);
    assert_eq!(Status::VerificationFailed.exit_code(), 2);
}

#[test]
fn output_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let input = problem("a2_wall.json");
    let mut outputs = Vec::new();
    for threads in ["1", "4", "4"] {
        let path = dir.path().join(format!("out{}.json", outputs.len()));
        let out = qwx(&[
            "wallcross",
            "--input",
            input.to_str().unwrap(),
            "--output",
            path.to_str().unwrap(),
            "--threads",
            threads,
        ]);
        assert_eq!(out.status.code(), Some(0));
        assert!(String::from_utf8_lossy(&out.stdout).contains("framed invariants by chamber"));
        outputs.push(std::fs::read(&path).unwrap());
    }
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn problem_documents_round_trip() {
    for file in ["jordan.json", "a2_wall.json", "a2_genus1.json"] {
        let doc = parse_problem(&std::fs::read_to_string(problem(file)).unwrap()).unwrap();
        let again = parse_problem(&serde_json::to_string_pretty(&doc).unwrap()).unwrap();
        assert_eq!(doc, again);
        validate(again).unwrap();
    }
}

proptest! {
    #[test]
    fn rationals_round_trip_canonically(p in -10_000i64..10_000, q in 1i64..10_000) {
        let text = serde_json::to_string(&format!("{p}/{q}")).unwrap();
        let x: Q = serde_json::from_str(&text).unwrap();
        let printed = serde_json::to_string(&x).unwrap();
        let y: Q = serde_json::from_str(&printed).unwrap();
        prop_assert_eq!(&x, &y);
        prop_assert_eq!(printed, serde_json::to_string(&qwx_core::rational::format(&x.0)).unwrap());
        let int: Q = serde_json::from_str(&p.to_string()).unwrap();
        prop_assert_eq!(int.0, qwx_core::rational::int(p));
    }
}
