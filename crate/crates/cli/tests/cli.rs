use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn partlab(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_partlab"))
        .args(args)
        .env("PARTLAB_CACHE_DIR", cache)
        .output()
        .expect("binary runs")
}

fn stdout_ok(args: &[&str], cache: &Path) -> String {
    let out = partlab(args, cache);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn count_prints_p_100() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(stdout_ok(&["count", "--n", "100", "--format", "text"], dir.path()), "190569292\n");
    let v: Value = serde_json::from_str(&stdout_ok(&["count", "--n", "100"], dir.path())).unwrap();
    assert_eq!(v["result"]["count"], "190569292");
}

#[test]
fn bound_at_910() {
    let dir = tempfile::tempdir().unwrap();
    let s = stdout_ok(&["bound", "--n", "910", "--constant", "0.11", "--format", "text"], dir.path());
    assert!(s.starts_with("0.6766"), "{s}");
}

#[test]
fn wilf_910_monte_carlo() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["wilf", "--n", "910", "--samples", "1000000", "--seed", "42"];
    let v: Value = serde_json::from_str(&stdout_ok(&args, dir.path())).unwrap();
    let e = &v["result"]["estimate"];
    let (value, se) = (e["value"].as_f64().unwrap(), e["stderr"].as_f64().unwrap());
    assert_eq!(e["method"], "monte-carlo");
    assert!((value - 0.3264).abs() <= 3.0 * se, "{value} ± {se}");
    assert_eq!(v["provenance"]["table"]["n_max"], 910);
    assert!(dir.path().join("counts-v1-largest-part-910.bin").exists());
}

#[test]
fn reports_are_deterministic_across_threads() {
    let dir = tempfile::tempdir().unwrap();
    let runs = [
        vec!["wilf", "--n", "120", "--method", "mc", "--samples", "30000", "--seed", "7"],
        vec!["pk", "--k", "1,5", "--samples", "30000", "--seed", "7"],
        vec!["tv", "--n", "60", "--k", "2", "--samples", "20000", "--seed", "7"],
        vec!["sample", "--n", "50", "--samples", "20", "--seed", "7"],
    ];
    for args in runs {
        let one = stdout_ok(&[args.as_slice(), &["--threads", "1"]].concat(), dir.path());
        let two = stdout_ok(&[args.as_slice(), &["--threads", "3"]].concat(), dir.path());
        let again = stdout_ok(&args, dir.path());
        assert_eq!(one, two, "{args:?}");
        assert_eq!(one, again, "{args:?}");
    }
    let other = stdout_ok(&["sample", "--n", "50", "--samples", "20", "--seed", "8"], dir.path());
    let base = stdout_ok(&["sample", "--n", "50", "--samples", "20", "--seed", "7"], dir.path());
    assert_ne!(base, other);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let code = |args: &[&str], cache: &Path| partlab(args, cache).status.code();
    assert_eq!(code(&["wilf", "--n", "7"], dir.path()), Some(2));
    assert_eq!(code(&["count", "--n", "abc"], dir.path()), Some(2));
    assert_eq!(code(&["bound", "--n", "10"], dir.path()), Some(2));
    assert_eq!(code(&["pk", "--samples", "0"], dir.path()), Some(2));
    assert_eq!(code(&["freiman-sweep", "--tilt", "0.5"], dir.path()), Some(2));
    assert_eq!(code(&["sample", "--n", "10", "--format", "csv"], dir.path()), Some(2));
    let file = dir.path().join("plain");
    std::fs::write(&file, b"x").unwrap();
    assert_eq!(code(&["sample", "--n", "10"], &file.join("sub")), Some(3));
    let bad = dir.path().join("bad");
    std::fs::create_dir(&bad).unwrap();
    std::fs::write(bad.join("counts-v1-largest-part-10.bin"), b"nonsense").unwrap();
    assert_eq!(code(&["sample", "--n", "10"], &bad), Some(3));
}

#[test]
fn timing_goes_to_stderr() {
    let dir = tempfile::tempdir().unwrap();
    let out = partlab(&["count", "--n", "5", "--format", "text"], dir.path());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "7\n");
    assert!(String::from_utf8(out.stderr).unwrap().contains("wall_time="));
}

#[test]
fn band_sweep_csv_columns() {
    let dir = tempfile::tempdir().unwrap();
    let s = stdout_ok(&["asymptotic", "--n", "2500", "--h", "1,2", "--w", "0.5", "--format", "csv"], dir.path());
    let mut lines = s.lines();
    assert_eq!(lines.next(), Some("n,h,w,exact,asymptotic,ratio,band"));
    assert_eq!(lines.count(), 2);
}

#[test]
fn sample_stream_shape() {
    let dir = tempfile::tempdir().unwrap();
    for method in ["exact", "boltzmann"] {
        let s = stdout_ok(&["sample", "--n", "30", "--samples", "5", "--method", method], dir.path());
        let lines: Vec<Value> = s.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        assert_eq!(lines.len(), 6);
        assert_eq!(lines[0]["seed"], 1);
        for p in &lines[1..] {
            let parts: Vec<u64> = serde_json::from_value(p.clone()).unwrap();
            assert_eq!(parts.iter().sum::<u64>(), 30);
            assert!(parts.windows(2).all(|w| w[0] >= w[1]));
        }
    }
}

// Minimal JSON Schema validator covering the keywords used in schemas/.

fn schema_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas")
}

fn load(file: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(schema_dir().join(file)).unwrap()).unwrap()
}

fn resolve(reference: &str, base: &str) -> (String, Value) {
    let (file, pointer) = reference.split_once('#').unwrap_or((reference, ""));
    let file = if file.is_empty() { base } else { file };
    let doc = load(file);
    (file.to_string(), doc.pointer(pointer).expect("pointer resolves").clone())
}

fn type_matches(t: &str, v: &Value) -> bool {
    match t {
        "object" => v.is_object(),
        "array" => v.is_array(),
        "string" => v.is_string(),
        "number" => v.is_number(),
        "integer" => v.is_i64() || v.is_u64(),
        "boolean" => v.is_boolean(),
        "null" => v.is_null(),
        _ => panic!("unknown type {t}"),
    }
}

fn validate(schema: &Value, base: &str, v: &Value, path: &str, errs: &mut Vec<String>) {
    if let Some(r) = schema.get("$ref").and_then(Value::as_str) {
        let (file, s) = resolve(r, base);
        return validate(&s, &file, v, path, errs);
    }
    if let Some(t) = schema.get("type") {
        let ok = match t {
            Value::String(t) => type_matches(t, v),
            Value::Array(ts) => ts.iter().any(|t| type_matches(t.as_str().unwrap(), v)),
            _ => panic!("bad type keyword"),
        };
        if !ok {
            errs.push(format!("{path}: {v} is not {t}"));
            return;
        }
    }
    if let Some(c) = schema.get("const") {
        if c != v {
            errs.push(format!("{path}: {v} != {c}"));
        }
    }
    if let Some(Value::Array(options)) = schema.get("enum") {
        if !options.contains(v) {
            errs.push(format!("{path}: {v} not in enum"));
        }
    }
    if let (Some(min), Some(x)) = (schema.get("minimum").and_then(Value::as_f64), v.as_f64()) {
        if x < min {
            errs.push(format!("{path}: {x} < {min}"));
        }
    }
    if let (Some(p), Some(s)) = (schema.get("pattern").and_then(Value::as_str), v.as_str()) {
        assert_eq!(p, "^[0-9]+$", "validator only knows the decimal pattern");
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            errs.push(format!("{path}: {s:?} is not a decimal"));
        }
    }
    if let Some(Value::Array(branches)) = schema.get("anyOf") {
        let ok = branches.iter().any(|b| {
            let mut e = Vec::new();
            validate(b, base, v, path, &mut e);
            e.is_empty()
        });
        if !ok {
            errs.push(format!("{path}: matches no anyOf branch"));
        }
    }
    if let (Some(items), Some(arr)) = (schema.get("items"), v.as_array()) {
        for (i, x) in arr.iter().enumerate() {
            validate(items, base, x, &format!("{path}[{i}]"), errs);
        }
    }
    if let Some(obj) = v.as_object() {
        let props = schema.get("properties").and_then(Value::as_object);
        if let Some(Value::Array(req)) = schema.get("required") {
            for k in req {
                if !obj.contains_key(k.as_str().unwrap()) {
                    errs.push(format!("{path}: missing {k}"));
                }
            }
        }
        for (k, x) in obj {
            match props.and_then(|p| p.get(k)) {
                Some(s) => validate(s, base, x, &format!("{path}.{k}"), errs),
                None if schema.get("additionalProperties") == Some(&Value::Bool(false)) => {
                    errs.push(format!("{path}: unexpected {k}"))
                }
                None => {}
            }
        }
    }
}

fn assert_valid(file: &str, pointer: &str, v: &Value) {
    let schema = load(file);
    let schema = schema.pointer(pointer).unwrap();
    let mut errs = Vec::new();
    validate(schema, file, v, "$", &mut errs);
    assert!(errs.is_empty(), "{file}{pointer}: {errs:?}\n{v}");
}

#[test]
fn validator_rejects_bad_documents() {
    let good: Value = serde_json::json!({
        "tool": "partlab", "version": "0.1.0", "command": "count",
        "provenance": {"seed": 1, "samples": null, "table": null},
        "result": {"n": 5, "count": "7"}
    });
    assert_valid("count.schema.json", "", &good);
    for bad in [
        serde_json::json!({"n": 5, "count": 7}),
        serde_json::json!({"n": 5, "count": "7a"}),
        serde_json::json!({"n": 5}),
        serde_json::json!({"n": 5, "count": "7", "extra": 1}),
    ] {
        let mut doc = good.clone();
        doc["result"] = bad;
        let mut errs = Vec::new();
        validate(&load("count.schema.json"), "count.schema.json", &doc, "$", &mut errs);
        assert!(!errs.is_empty(), "{doc}");
    }
}

#[test]
fn every_subcommand_matches_its_schema() {
    let dir = tempfile::tempdir().unwrap();
    let runs: &[&[&str]] = &[
        &["count", "--n", "50"],
        &["count-restricted", "--n", "40", "--r", "5", "--s", "9"],
        &["count-restricted", "--n", "40", "--r", "5", "--s", "9", "--product"],
        &["count-restricted", "--n", "400", "--h", "1", "--w", "0.5"],
        &["asymptotic", "--n", "100,900"],
        &["asymptotic", "--n", "2500", "--h", "1", "--w", "1"],
        &["asymptotic", "--n", "2500", "--h", "1", "--w", "1", "--joint"],
        &["freiman-sweep", "--steps", "4", "--tilt", "-0.05"],
        &["lemma1-grid", "--r-steps", "3", "--theta-steps", "4"],
        &["bound", "--n", "910"],
        &["bound", "--n", "910", "--k", "12"],
        &["wilf", "--n", "20"],
        &["wilf", "--n", "12", "--series"],
        &["wilf", "--n", "100", "--method", "mc", "--samples", "5000"],
        &["macdonald", "--n", "8"],
        &["macdonald", "--n", "40", "--samples", "5000"],
        &["pk", "--samples", "5000"],
        &["chernoff", "--kind", "sum", "--j", "50", "--d", "0.3", "--samples", "5000"],
        &["chernoff", "--kind", "ratio", "--j", "20", "--beta", "1.5", "--samples", "5000"],
        &["chernoff", "--kind", "overflow", "--n", "10000", "--k", "10", "--samples", "5000"],
        &["chernoff", "--kind", "tie", "--n", "10000", "--k", "10", "--samples", "5000"],
        &["tv", "--n", "80"],
        &["tv", "--n", "80", "--k", "2", "--samples", "5000"],
    ];
    for args in runs {
        let v: Value = serde_json::from_str(&stdout_ok(args, dir.path())).unwrap();
        assert_valid(&format!("{}.schema.json", args[0]), "", &v);
    }
    let streams: &[&[&str]] = &[
        &["sample", "--n", "25", "--samples", "4"],
        &["sample", "--n", "25", "--samples", "4", "--method", "boltzmann"],
        &["sample-surrogate", "--n", "2500", "--k", "3", "--samples", "4"],
    ];
    for args in streams {
        let file = format!("{}.schema.json", args[0]);
        let s = stdout_ok(args, dir.path());
        for (i, line) in s.lines().enumerate() {
            let v: Value = serde_json::from_str(line).unwrap();
            let def = if i == 0 { "/$defs/header" } else { "/$defs/record" };
            assert_valid(&file, def, &v);
        }
    }
}
