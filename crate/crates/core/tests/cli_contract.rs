use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(cache: &Path, args: &[&str]) -> Run {
    let mut argv = vec!["charcensus".to_string(), "--cache-dir".into(), cache.display().to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = charcensus::cli::run(argv, &mut out, &mut err);
    Run {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn json_of(cache: &Path, args: &[&str]) -> Value {
    let r = run(cache, args);
    assert_eq!(r.code, 0, "{args:?}: {}", r.stderr);
    serde_json::from_str(&r.stdout).unwrap()
}

fn schema_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas")
}

fn validate(doc: &Value, name: &str) {
    let schema: Value =
        serde_json::from_str(&std::fs::read_to_string(schema_dir().join(format!("{name}.v1.json"))).unwrap())
            .unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{name}: {errors:?}\n{doc}");
}

fn validate_tagged(doc: &Value) {
    let tag = doc["schema"].as_str().unwrap();
    let name = tag.strip_prefix("charcensus.").unwrap().strip_suffix(".v1").unwrap();
    validate(doc, name);
}

const COMMANDS: &[&[&str]] = &[
    &["count", "p", "--n", "30"],
    &["count", "pt", "--t", "4", "--n", "30"],
    &["count", "core", "--t", "5", "--n", "7"],
    &["count", "core", "--t", "5", "--n", "7", "--brute"],
    &["char", "eval", "--lambda", "[2,1]", "--mu", "[3]"],
    &["char", "table", "--n", "5", "--format", "json"],
    &["zeros", "exact", "--n", "6"],
    &["zeros", "lower-bound", "--n", "30", "--t-lo", "3", "--t-hi", "9"],
    &["bounds", "t12", "--n", "10"],
    &["bounds", "t12", "--n", "100"],
    &["bounds", "t13", "--n", "2000", "--t", "10"],
    &["bounds", "t13", "--n", "2000", "--t", "200"],
    &["bounds", "p32", "--n", "2000", "--t", "10"],
    &["bounds", "p32", "--n", "2000", "--t", "300", "--regime", "P32_III"],
    &["bounds", "saddle", "--n", "1000", "--t", "25"],
    &["bounds", "saddle", "--n", "100", "--t", "200"],
    &["estimate", "density", "--n", "8", "--samples", "2000", "--seed", "3"],
    &["estimate", "density", "--n-list", "5,6", "--samples", "500", "--seed", "3"],
    &["sweep", "--n-list", "1,2,3,8", "--format", "json"],
];

#[test]
fn every_json_output_matches_its_schema() {
    let dir = tempfile::tempdir().unwrap();
    for args in COMMANDS {
        let doc = json_of(dir.path(), args);
        validate_tagged(&doc);
        assert!(doc["config"]["command"].as_str().unwrap().ends_with(&args.join(" ")), "{args:?}");
    }
}

#[test]
fn documented_examples() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(json_of(dir.path(), &["zeros", "exact", "--n", "3"])["Z"], "1");
    let brute = json_of(dir.path(), &["count", "core", "--t", "5", "--n", "7", "--brute"]);
    let fast = json_of(dir.path(), &["count", "core", "--t", "5", "--n", "7"]);
    assert_eq!(brute["value"], fast["value"]);
    let t12 = json_of(dir.path(), &["bounds", "t12", "--n", "100", "--format", "json"]);
    assert!(t12["log_bound"].is_f64());
    assert_eq!(t12["p_source"], "exact");
    let chi = json_of(dir.path(), &["char", "eval", "--lambda", "[2,1]", "--mu", "[3]"]);
    assert_eq!(chi["value"], "-1");
}

#[test]
fn exit_codes_and_error_objects() {
    let dir = tempfile::tempdir().unwrap();
    let cases: &[(&[&str], i32)] = &[
        (&["count"], 2),
        (&["frobnicate"], 2),
        (&["char", "eval", "--lambda", "[2,1", "--mu", "[3]"], 2),
        (&["char", "eval", "--lambda", "[2,1]", "--mu", "[2]"], 2),
        (&["zeros", "lower-bound", "--n", "5", "--t-lo", "4", "--t-hi", "2"], 2),
        (&["bounds", "p32", "--n", "100", "--t", "5", "--regime", "P99"], 2),
        (&["zeros", "exact", "--n", "21"], 3),
        (&["count", "core", "--t", "3", "--n", "41", "--brute"], 3),
        (&["estimate", "density", "--n", "70", "--samples", "10", "--seed", "1"], 3),
        (&["bounds", "saddle", "--n", "100", "--t", "5"], 3),
        (&["bounds", "saddle", "--n", "100", "--t", "10", "--tol", "1e-300"], 1),
    ];
    for (args, code) in cases {
        let r = run(dir.path(), args);
        assert_eq!(r.code, *code, "{args:?}: {}", r.stderr);
        assert!(r.stdout.is_empty(), "{args:?}");
        let err: Value = serde_json::from_str(r.stderr.trim()).unwrap();
        validate(&err, "error");
        assert_eq!(err["error"]["exit_code"], *code);
    }
    let raised = run(dir.path(), &["--max-table-n", "21", "zeros", "exact", "--n", "21"]);
    assert_ne!(raised.code, 3);
}

fn csv_rows(text: &str) -> Vec<Vec<(String, String)>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    reader
        .records()
        .map(|r| header.iter().cloned().zip(r.unwrap().iter().map(String::from)).collect())
        .collect()
}

fn json_cell(doc: &Value, key: &str) -> Value {
    key.split('.').fold(doc.clone(), |v, k| v[k].clone())
}

fn same_value(cell: &str, value: &Value, what: &str) {
    match value {
        Value::Null => assert_eq!(cell, "", "{what}"),
        Value::String(s) => assert_eq!(cell, s, "{what}"),
        Value::Number(n) if n.is_f64() => {
            let parsed: f64 = cell.parse().unwrap();
            assert_eq!(parsed.to_bits(), n.as_f64().unwrap().to_bits(), "{what}");
        }
        other => assert_eq!(cell, other.to_string(), "{what}"),
    }
}

#[test]
fn csv_and_json_encode_the_same_values() {
    let dir = tempfile::tempdir().unwrap();
    let cases: &[&[&str]] = &[
        &["zeros", "exact", "--n", "7"],
        &["bounds", "t13", "--n", "3000", "--t", "12"],
        &["bounds", "saddle", "--n", "400", "--t", "12"],
        &["estimate", "density", "--n", "7", "--samples", "900", "--seed", "8"],
        &["estimate", "density", "--n-list", "4,9", "--samples", "900", "--seed", "8"],
        &["sweep", "--n-list", "1,4,11"],
    ];
    for args in cases {
        let mut as_json = args.to_vec();
        as_json.extend(["--format", "json"]);
        let doc = json_of(dir.path(), &as_json);
        let mut as_csv = args.to_vec();
        as_csv.extend(["--format", "csv"]);
        let r = run(dir.path(), &as_csv);
        assert_eq!(r.code, 0);
        let config: Value = serde_json::from_str(r.stderr.trim()).unwrap();
        assert_eq!(config["config"]["format"], "csv");
        let rows = csv_rows(&r.stdout);
        let docs: Vec<Value> = match doc.get("rows") {
            Some(Value::Array(rs)) => rs.clone(),
            _ => vec![doc.clone()],
        };
        assert_eq!(rows.len(), docs.len(), "{args:?}");
        for (row, d) in rows.iter().zip(&docs) {
            for (key, cell) in row {
                same_value(cell, &json_cell(d, key), &format!("{args:?} {key}"));
            }
        }
    }

    let table = json_of(dir.path(), &["char", "table", "--n", "6", "--format", "json"]);
    let r = run(dir.path(), &["char", "table", "--n", "6"]);
    let mut reader = csv::Reader::from_reader(r.stdout.as_bytes());
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header[0], "lambda");
    assert_eq!(header[1..], table["partitions"].as_array().unwrap().iter().map(|v| v.as_str().unwrap().to_string()).collect::<Vec<_>>()[..]);
    for (rec, want) in reader.records().zip(table["values"].as_array().unwrap()) {
        let rec = rec.unwrap();
        let got: Vec<&str> = rec.iter().skip(1).collect();
        let want: Vec<&str> = want.as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
        assert_eq!(got, want);
    }
}

fn without_config(mut doc: Value) -> Value {
    doc.as_object_mut().unwrap().remove("config");
    doc
}

#[test]
fn thread_count_leaves_results_unchanged() {
    let dir = tempfile::tempdir().unwrap();
    let base = ["estimate", "density", "--n", "11", "--samples", "4321", "--seed", "77"];
    let reference = without_config(json_of(dir.path(), &base));
    for k in ["1", "2", "5"] {
        let mut args = base.to_vec();
        args.extend(["--threads", k]);
        assert_eq!(without_config(json_of(dir.path(), &args)), reference, "threads={k}");
    }
    let t1 = run(dir.path(), &["--threads", "1", "char", "table", "--n", "9"]);
    let t4 = run(dir.path(), &["--threads", "4", "char", "table", "--n", "9"]);
    assert_eq!(t1.stdout, t4.stdout);
}

#[test]
fn missing_seed_is_generated_and_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let r = run(dir.path(), &["estimate", "density", "--n", "5", "--samples", "100"]);
    assert_eq!(r.code, 0);
    let note: Value = serde_json::from_str(r.stderr.lines().next().unwrap()).unwrap();
    let doc: Value = serde_json::from_str(&r.stdout).unwrap();
    let seed = note["generated_seed"].as_u64().unwrap().to_string();
    assert_eq!(doc["config"]["seed"], seed.as_str());
    assert_eq!(doc["config"]["seed_generated"], true);
    assert_eq!(doc["seed"], seed.as_str());
    let again = json_of(dir.path(), &["estimate", "density", "--n", "5", "--samples", "100", "--seed", &seed]);
    assert_eq!(again["zeros_observed"], doc["zeros_observed"]);
}

#[test]
fn out_flag_writes_files_or_selects_encoding() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("sweep.csv");
    let r = run(dir.path(), &["sweep", "--n-list", "3,4", "--out", file.to_str().unwrap()]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.is_empty());
    let written = std::fs::read_to_string(&file).unwrap();
    let printed = run(dir.path(), &["sweep", "--n-list", "3,4", "--out", "csv"]);
    assert_eq!(printed.stdout, written);
    assert!(written.starts_with("N,p_N,lower_bound_sum,Z,"));
    let as_json = run(dir.path(), &["sweep", "--n-list", "3,4", "--out", "json"]);
    let doc: Value = serde_json::from_str(&as_json.stdout).unwrap();
    validate_tagged(&doc);
}

#[test]
fn cache_env_overrides_flag() {
    let flag_dir = tempfile::tempdir().unwrap();
    let env_dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_charcensus"))
        .args(["--cache-dir", flag_dir.path().to_str().unwrap(), "count", "p", "--n", "77"])
        .env("CHARCENSUS_CACHE", env_dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["value"], "10619863");
    assert_eq!(doc["config"]["cache_dir"], env_dir.path().display().to_string());
    assert!(env_dir.path().join("p-n77.v1.cct").exists());
    assert!(std::fs::read_dir(flag_dir.path()).unwrap().next().is_none());

    let bad = Command::new(env!("CARGO_BIN_EXE_charcensus"))
        .args(["zeros", "exact", "--n", "25"])
        .env("CHARCENSUS_CACHE", env_dir.path())
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(3));
}
