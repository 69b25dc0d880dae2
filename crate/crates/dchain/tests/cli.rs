use std::process::{Command, Output};

use hopf_chains::algebras::{Forest, Permutation, Word};
use hopf_chains::chain::TransitionMatrix;
use hopf_chains::rational::{int, rat};
use hopf_chains::sim::SimReport;
use hopf_chains::spectral::{EigenFunction, SpectrumReport};
use hopf_chains::verify::SuiteReport;
use serde_json::Value;

fn dchain(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dchain")).args(args).env_remove("DCHAIN_STATE_CAP").output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = dchain(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

#[test]
fn tree_matrix_round_trips() {
    let v = json(&["matrix", "--chain", "tree", "--model", "binomial", "--q2", "1/3"]);
    let k = TransitionMatrix::<Forest>::from_json(&v).unwrap();
    assert_eq!(k.len(), 6);
    let boss = Forest::parse("*").unwrap();
    assert_eq!(k.entry(&boss, &boss), int(1));
    assert_eq!(k.to_json(), v);
}

#[test]
fn spectrum_round_trips() {
    let v = json(&["spectrum", "--chain", "rock", "--kind", "riffle", "--n", "3"]);
    let r = SpectrumReport::from_json(&v).unwrap();
    assert_eq!(r.values(), vec![int(1), rat(1, 2), rat(1, 4)]);
}

#[test]
fn eigenfunctions_round_trip() {
    let v = json(&["eigenbasis", "--chain", "todo", "--kind", "ter", "--n", "3"]);
    let fs: Vec<EigenFunction<Permutation>> =
        v["functions"].as_array().unwrap().iter().map(|f| EigenFunction::from_json(f).unwrap()).collect();
    assert_eq!(fs.len(), 6);
    assert!(fs.iter().any(|f| f.eigenvalue == rat(1, 3)));
}

#[test]
fn simulation_is_byte_deterministic() {
    let args = ["simulate", "--chain", "tree", "--t", "2", "--trials", "2000", "--seed", "7", "--observable", "team:1"];
    let a = dchain(&args);
    let b = dchain(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    let r = SimReport::from_json(&v["report"]).unwrap();
    assert_eq!((r.t, r.trials, r.seed), (2, 2000, 7));
    assert!(r.within(4.0));
    let other = dchain(&["simulate", "--chain", "tree", "--t", "2", "--trials", "2000", "--seed", "8", "--observable", "team:1"]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn verify_passes_and_round_trips() {
    let v = json(&["verify", "--suite", "lumping", "--suite", "absorption", "--format", "json"]);
    assert_eq!(v["passed"], Value::Bool(true));
    let suites: Vec<SuiteReport> = v["suites"].as_array().unwrap().iter().map(|s| SuiteReport::from_json(s).unwrap()).collect();
    assert_eq!(suites.len(), 2);
    assert!(suites.iter().all(SuiteReport::passed));
    let table = dchain(&["verify", "--suite", "lumping"]);
    assert!(String::from_utf8_lossy(&table.stdout).contains("ter_5"));
}

#[test]
fn bad_input_exits_2() {
    for args in [
        &["verify", "--suite", "nope"][..],
        &["matrix", "--chain", "tree", "--model", "binomial", "--q2", "0.5"],
        &["matrix", "--chain", "shuffle", "--kind", "ter", "--deck", "1,2,3", "--n", "4"],
        &["spectrum", "--chain", "todo", "--kind", "ter", "--n", "3", "--format", "table"],
    ] {
        let out = dchain(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    }
}

#[test]
fn state_cap_comes_from_the_environment() {
    let args = ["matrix", "--chain", "todo", "--kind", "ter", "--n", "4"];
    let capped = Command::new(env!("CARGO_BIN_EXE_dchain")).args(args).env("DCHAIN_STATE_CAP", "10").output().unwrap();
    assert_eq!(capped.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&capped.stderr).contains("cap"));
    assert_eq!(dchain(&args).status.code(), Some(0));
}

#[test]
fn config_file_supplies_parameters() {
    let dir = std::env::temp_dir().join(format!("dchain-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("run.json");
    std::fs::write(&path, r#"{"chain": "todo", "kind": "binter", "params": {"n": 4, "q2": "1/3"}}"#).unwrap();
    let p = path.to_str().unwrap();
    let from_file = json(&["matrix", "--config", p]);
    let from_flags = json(&["matrix", "--chain", "todo", "--kind", "binter", "--n", "4", "--q2", "1/3"]);
    assert_eq!(from_file, from_flags);
    // flags win over the file
    let overridden = TransitionMatrix::<Permutation>::from_json(&json(&["matrix", "--config", p, "--n", "3"])).unwrap();
    assert_eq!(overridden.len(), 6);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn identity_operator_fixes_every_deck() {
    let v = json(&["matrix", "--chain", "shuffle", "--kind", "identity", "--deck", "1,1,2"]);
    let k = TransitionMatrix::<Word>::from_json(&v).unwrap();
    assert_eq!(k.len(), 3);
    for x in k.states() {
        assert_eq!(k.entry(x, x), int(1));
    }
}

#[test]
fn csv_output_and_out_file() {
    let dir = std::env::temp_dir().join(format!("dchain-csv-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("k.csv");
    let out = dchain(&["matrix", "--chain", "tree", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.lines().any(|l| l.contains("3/8")));
    std::fs::remove_dir_all(&dir).unwrap();
}
