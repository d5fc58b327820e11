use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn nlqc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlqc")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn build(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name).to_string_lossy().into_owned();
    let mut all = vec!["build"];
    all.extend_from_slice(args);
    all.extend_from_slice(&["--out", &path]);
    let out = nlqc(&all);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    path
}

#[test]
fn and_gh_cds_has_three_random_bits_and_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let path = build(dir.path(), "and.json", &["--fn", "and1", "--chain", "gh,cds"]);
    let d: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(d["resources"]["shared_random_bits"], 3);

    let out = nlqc(&["verify", &path]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["verdict"], "pass");
    assert_eq!(r["classical"]["eps_hat"]["num"], 0);
    assert_eq!(r["classical"]["delta_pair"]["num"], 0);
    assert_eq!(r["bounds"][0]["lhs"], r["bounds"][0]["rhs"]);
}

#[test]
fn build_is_idempotent() {
    let a = nlqc(&["build", "--fn", "eq1", "--chain", "span,cds,cdqs"]);
    let b = nlqc(&["build", "--fn", "eq1", "--chain", "span,cds,cdqs"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn xor_routing_uses_three_epr_pairs() {
    let out = nlqc(&["build", "--fn", "xor1", "--chain", "gh,frouting"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["resources"]["epr_pairs"], 3);
}

#[test]
fn qr_chain_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let path = build(dir.path(), "qr.json", &["--fn", "qr", "--p", "7", "--chain", "dre,psm,cds"]);
    let out = nlqc(&["verify", &path, "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().nth(1).unwrap().starts_with("qr7,cds,cds_from_psm,pass"), "{text}");
}

#[test]
fn and_routing_verifies_within_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let path = build(dir.path(), "route.json", &["--fn", "and1", "--chain", "gh,frouting"]);
    let out = nlqc(&["verify", &path]);
    assert_eq!(out.status.code(), Some(0));
    let q = &json(&out)["quantum"];
    assert!(q["worst_correctness_infidelity"].as_f64().unwrap() <= 1e-9);
    assert_eq!(q["routing_side_ok"], true);
}

#[test]
fn corrupted_descriptor_fails_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let path = build(dir.path(), "and.json", &["--fn", "and1", "--chain", "gh,cds"]);
    let mut d: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let alice = &mut d["source"]["parameters"]["strategy"]["alice"];
    let (t0, t1) = (alice["0"]["tap"].clone(), alice["1"]["tap"].clone());
    alice["1"]["tap"] = t0;
    alice["0"]["tap"] = t1;
    std::fs::write(&path, d.to_string()).unwrap();

    let out = nlqc(&["verify", &path]);
    assert_eq!(out.status.code(), Some(1));
    let r = json(&out);
    assert_eq!(r["verdict"], "fail");
    let w = &r["classical"]["correctness_witness"];
    assert!(w["x"].is_u64() && w["y"].is_u64() && w["s"].is_u64(), "{w}");
}

#[test]
fn illegal_chain_is_a_usage_error_listing_edges() {
    let out = nlqc(&["build", "--fn", "and1", "--chain", "span,psm"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("legal chain edges") && err.contains("psqm -> cdqs"), "{err}");
}

#[test]
fn unknown_function_and_bad_descriptor_are_usage_errors() {
    assert_eq!(nlqc(&["build", "--fn", "nope", "--chain", "gh,cds"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("junk.json");
    std::fs::write(&path, "{\"kind\": \"cds\"}").unwrap();
    assert_eq!(nlqc(&["verify", path.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn budgets_exit_three_with_partial_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = build(dir.path(), "and.json", &["--fn", "and1", "--chain", "gh,cds"]);
    let out = nlqc(&["verify", &path, "--budget", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["verdict"], "budget_exceeded");

    let out = nlqc(&["build", "--fn", "and1", "--chain", "gh,frouting", "--max-qubits", "6"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn table_functions_are_accepted() {
    let out = nlqc(&["build", "--table", "6", "--chain", "gh,cds"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["function"]["table"], "6");
}

#[test]
fn one_bit_sweep_is_perfect_and_deterministic() {
    let a = nlqc(&["sweep", "--family", "one-bit", "--seed", "5"]);
    let b = nlqc(&["sweep", "--family", "one-bit", "--seed", "5"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let r = json(&a);
    assert_eq!(r["summary"]["rows"], 16);
    assert_eq!(r["summary"]["perfect_rows"], 16);
    assert!(r["summary"]["max_gh_pipes"].as_u64().unwrap() <= 3);

    let csv = nlqc(&["sweep", "--family", "one-bit", "--format", "csv"]);
    assert_eq!(String::from_utf8(csv.stdout).unwrap().lines().count(), 17);
}

#[test]
fn two_bit_generic_sweep_prefix_uses_eight_pipes() {
    let out = nlqc(&["sweep", "--family", "two-bit", "--limit", "64"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["summary"]["perfect_rows"], 64);
    assert!(r["rows"].as_array().unwrap().iter().all(|row| row["gh_pipes"] == 8));
}

#[test]
fn search_reports_minimal_pipes() {
    let out = nlqc(&["search", "--fn", "and1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["pipes"], 3);
    assert_eq!(nlqc(&["search", "--fn", "xor1", "--max-pipes", "2"]).status.code(), Some(1));
}

#[test]
fn chain_corpus_seeds_parse_as_labelled() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus/compiler_chain");
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let ok = nlqc_cli::chain::parse_chain(&text).is_ok();
        assert_eq!(ok, !path.ends_with("illegal.txt"), "{}", path.display());
    }
}
