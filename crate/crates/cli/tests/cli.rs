use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn corpus(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_locbound"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn temp_file(name: &str, text: &str) -> String {
    let path = std::env::temp_dir().join(format!("locbound-cli-{}-{name}", std::process::id()));
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn distance_summary_and_json() {
    let five = corpus("five_qubit.code");
    let out = run(&["code", "distance", "--file", &five, "--summary"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "3");
    let out = run(&["code", "distance", "--file", &five]);
    let v = json(&out);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["report"]["distance"], 3);
    assert_eq!(v["report"]["exact"], true);
}

#[test]
fn code_check_and_correctable() {
    let code = corpus("four_two_two.code");
    let v = json(&run(&["code", "check", "--file", &code]));
    assert_eq!(v["report"]["n"], 4);
    assert_eq!(v["report"]["k"], 2);
    let one = run(&["code", "correctable", "--file", &code, "--region", "2", "--summary"]);
    assert_eq!(String::from_utf8_lossy(&one.stdout).trim(), "true");
    let two = run(&["code", "correctable", "--file", &code, "--region", "0,1", "--summary"]);
    assert_eq!(String::from_utf8_lossy(&two.stdout).trim(), "false");
}

#[test]
fn encode_is_an_isometry_shape() {
    let v = json(&run(&["code", "encode", "--file", &corpus("five_qubit.code")]));
    assert_eq!(v["report"]["rows"], 32);
    assert_eq!(v["report"]["cols"], 2);
    let entries = v["report"]["entries"].as_array().unwrap();
    let norm: f64 = entries
        .iter()
        .map(|row| {
            let z = &row[0];
            z[0].as_f64().unwrap().powi(2) + z[1].as_f64().unwrap().powi(2)
        })
        .sum();
    assert!((norm - 1.0).abs() < 1e-12);
}

#[test]
fn parse_errors_exit_two_with_line() {
    let bad = temp_file("bad.code", "# header\nXZZXI\nXXQXI\n");
    let out = run(&["code", "check", "--file", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
    let out = run(&["code", "check", "--file", &bad, "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["code", "check", "--file", "/definitely/missing.code"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn overhead_bound_value() {
    let out = run(&[
        "bound", "overhead", "--m", "100", "--k", "10", "--p", "0.25", "--delta", "0.00390625", "--depth", "1", "--dim",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["report"]["value"].as_f64().unwrap() - 0.0357143).abs() < 1e-7);
    assert_eq!(v["report"]["active"], "noise");
}

#[test]
fn encoding_bounds() {
    let v = json(&run(&["bound", "encoding", "--k", "1", "--boundaries", "4,3,3"]));
    assert!((v["report"]["value"].as_f64().unwrap() - 1.0 / 30.0).abs() < 1e-12);
    let v = json(&run(&["bound", "syndrome", "--k", "16", "--d", "5", "--m", "4", "--dim", "2"]));
    let enc = 16.0 * 2.0 / 12.0;
    assert!((v["report"]["value"].as_f64().unwrap() - (enc - 1.0)).abs() < 1e-12);
    let out = run(&["bound", "encoding", "--k", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sie_summary() {
    let out = run(&["verify", "sie", "--qubits", "6", "--layers", "50", "--seed", "7", "--summary"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("violations: 0"));
}

#[test]
fn reports_are_byte_identical() {
    let args = ["verify", "appendix", "--trials", "20", "--seed", "3"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["report"]["checks"], 60);
}

#[test]
fn code_lemmas() {
    let five = corpus("five_qubit.code");
    let v = json(&run(&["verify", "structure-code", "--file", &five, "--block", "0,1", "--block", "2,3", "--block", "4"]));
    assert!((v["report"]["parameters"]["sum"].as_f64().unwrap() - 5.0).abs() < 1e-8);
    let out = run(&["verify", "structure-code", "--file", &five, "--block", "0,1,2", "--block", "3,4"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["verify", "corr-max", "--file", &five, "--states", "5"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["report"]["pass"], true);
}

#[test]
fn module_checks() {
    let out = run(&["verify", "depth-bound", "--circuit", &corpus("swap_chain.circ"), "--gamma", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["report"]["parameters"]["boundary"], 2);
    let out = run(&[
        "verify",
        "overhead",
        "--circuit",
        &corpus("four_two_two.circ"),
        "--code",
        &corpus("four_two_two.code"),
        "--dim",
        "2",
        "--sweep",
        "0.5,0.25,0.1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["report"]["checks"], 3);
    let out = run(&["verify", "overhead", "--circuit", &corpus("trivial.circ"), "--code", &corpus("five_qubit.code")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn entropy_and_ree() {
    let v = json(&run(&["entropy", "--state", "bell", "--a", "0", "--b", "1"]));
    let values = &v["report"]["values"];
    assert!((values["entropy_a"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((values["coherent_info_a_to_b"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((values["mutual_info"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    let v = json(&run(&["entropy", "--state", "ghz:3", "--a", "0", "--b", "1", "--c", "2"]));
    assert!((v["report"]["values"]["cond_mutual_info"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let v = json(&run(&["ree", "--state", "werner:1", "--a", "0", "--restarts", "2", "--iterations", "300"]));
    let (lo, up) = (v["report"]["lower"].as_f64().unwrap(), v["report"]["upper"].as_f64().unwrap());
    assert!((lo - 1.0).abs() < 1e-9 && up >= lo - 1e-9 && up < 1.01);
    let out = run(&["entropy", "--state", "bell", "--a", "5"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["entropy", "--state", "tripod", "--a", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

const GRID: &str = "dim 2\nc 1\npoint a 0 0\npoint b 1 0\npoint c 0 1\npoint d 1 1\nedge a b\nedge a c\nedge b d\nedge c d\n";

#[test]
fn partition_report_and_violation() {
    let file = temp_file("grid.graph", GRID);
    let out = run(&["partition", "--file", &file, "--lambda", "2", "--blocks"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let blocks = v["report"]["blocks"].as_array().unwrap();
    let total: usize = blocks.iter().map(|b| b.as_array().unwrap().len()).sum();
    assert_eq!(total, 4);
    let out = run(&["partition", "--file", &file, "--lambda", "2", "--kappa", "0.1"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["report"]["guarantees"]["boundary_ok"], false);
}

#[test]
fn output_file_and_help() {
    let path = std::env::temp_dir().join(format!("locbound-cli-{}-out.json", std::process::id()));
    let out = run(&["code", "distance", "--file", &corpus("five_qubit.code"), "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["command"], "code distance");
    let help = run(&["verify", "--help"]);
    let text = String::from_utf8_lossy(&help.stdout);
    assert!(text.contains("Small incremental entangling"));
    assert!(text.contains("Main overhead theorem"));
}
