use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use trojan_forge::bench::read_key;

const DATA: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data");

fn forge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_forge")).args(args).env_remove("FORGE_SEED").output().unwrap()
}

fn data(name: &str) -> String {
    format!("{DATA}/{name}")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn find<'a>(v: &'a Value, key: &str) -> Option<&'a Value> {
    match v {
        Value::Object(m) => m.get(key).or_else(|| m.values().find_map(|x| find(x, key))),
        Value::Array(a) => a.iter().find_map(|x| find(x, key)),
        _ => None,
    }
}

fn bench(dir: &Path, extra: &[&str]) -> (Output, PathBuf) {
    let set = dir.join("set");
    let cfg = data("bench_small.json");
    let mut args = vec!["bench", "--config", &cfg, "-o", set.to_str().unwrap()];
    args.extend_from_slice(extra);
    (forge(&args), dir.join("set.key.json"))
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(forge(&[]).status.code(), Some(2));
    assert_eq!(forge(&["bench"]).status.code(), Some(2));
    assert_eq!(forge(&["parse", "/does/not/exist.v"]).status.code(), Some(2));
    assert_eq!(forge(&["--help"]).status.code(), Some(0));
}

#[test]
fn parse_summary_and_json() {
    let out = forge(&["parse", &data("c17.v")]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "c17: 5 inputs, 2 outputs, 6 gates, 11 nets");
    let v = json(&forge(&["parse", &data("c17.v"), "--json"]));
    assert_eq!(v["gates"].as_array().unwrap().len(), 6);
}

#[test]
fn equiv_exit_codes() {
    let ok = forge(&["equiv", &data("c17.v"), &data("c17.v")]);
    assert_eq!(ok.status.code(), Some(0));
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("c17_bad.v");
    fs::write(&bad, fs::read_to_string(data("c17.v")).unwrap().replacen("nand NAND2_6", "and NAND2_6", 1)).unwrap();
    let out = forge(&["equiv", &data("c17.v"), bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(find(&json(&out), "inputs").is_some(), "counterexample missing");
}

#[test]
fn bench_and_judge() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, key_path) = bench(&tmp.path().join("a"), &[]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let (b, _) = bench(&tmp.path().join("b"), &[]);
    let (va, vb) = (json(&a), json(&b));
    assert_eq!(va["manifest_checksum"], vb["manifest_checksum"]);
    assert_eq!(va["key_checksum"], vb["key_checksum"]);
    assert_eq!(va["entries"], 8);

    let key = read_key(&key_path).unwrap();
    let csv = tmp.path().join("sub.csv");
    let rows: Vec<String> = key
        .entries
        .iter()
        .map(|e| format!("{},{}", e.id, if e.k == 1 { "infected" } else { "clean" }))
        .collect();
    fs::write(&csv, format!("circuit_id,label\n{}\n", rows.join("\n"))).unwrap();
    let judge = |date: &str| {
        forge(&[
            "judge",
            "--key",
            key_path.to_str().unwrap(),
            "--submission",
            csv.to_str().unwrap(),
            "--alpha",
            "10",
            "--date",
            date,
        ])
    };
    let out = judge("2026-10-16");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(find(&v, "conf_val").and_then(Value::as_f64), Some(10.0));
    assert!(find(&v, "provenance").is_some());
    // the key expires 36 months after release
    assert_eq!(judge("2029-10-02").status.code(), Some(1));
}

#[test]
fn forge_seed_overrides_config() {
    let tmp = tempfile::tempdir().unwrap();
    let (base, _) = bench(&tmp.path().join("a"), &[]);
    let (flag, _) = bench(&tmp.path().join("b"), &["--seed", "7"]);
    let set = tmp.path().join("c").join("set");
    let cfg = data("bench_small.json");
    let env = Command::new(env!("CARGO_BIN_EXE_forge"))
        .args(["bench", "--config", &cfg, "-o", set.to_str().unwrap()])
        .env("FORGE_SEED", "7")
        .output()
        .unwrap();
    assert!(env.status.success());
    let (base, flag, env) = (json(&base), json(&flag), json(&env));
    assert_ne!(base["manifest_checksum"], flag["manifest_checksum"]);
    assert_eq!(flag["manifest_checksum"], env["manifest_checksum"]);
}

#[test]
fn game_reports_expectation() {
    let out = forge(&["game", "--nodes", "20", "--k", "2", "--trials", "2000", "--seed", "3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(find(&v, "expected").and_then(Value::as_f64), Some(2.0 * 21.0 / 3.0));
}
