use std::io::Write;
use std::process::Command;

use serde_json::Value;

const DATA: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data");

fn weilad(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_weilad")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

fn json(args: &[&str]) -> (i32, Value) {
    let (status, stdout, _) = weilad(args);
    let value = serde_json::from_str(&stdout).unwrap_or_else(|e| panic!("{args:?}: not one JSON document ({e}): {stdout}"));
    (status, value)
}

fn has_keys(v: &Value, keys: &[&str]) -> bool {
    keys.iter().all(|k| v.get(k).is_some())
}

#[test]
fn every_subcommand_emits_one_json_document() {
    let instance = format!("{DATA}/instances/z2_flip.json");
    let hyperdual = format!("{DATA}/algebras/hyperdual.txt");
    let cases: Vec<(Vec<&str>, &[&str])> = vec![
        (vec!["algebra", "info", "jet:3"], &["basis", "dim", "nilpotency", "multiplication_table"]),
        (vec!["algebra", "info", &hyperdual], &["basis", "dim", "nilpotency", "multiplication_table"]),
        (vec!["algebra", "tensor", "dual:1", "jet:2"], &["product", "left_inclusion", "right_inclusion"]),
        (vec!["jet", "--fn", "sin(x)", "--at", "0.5", "--order", "4"], &["values", "entries", "normalization"]),
        (vec!["partials", "--fn", "x*y^2", "--at", "1,2", "--orders", "1,2", "--scalar", "rational"], &["entries", "orders"]),
        (vec!["morphism", "apply", "--from", "dual:1", "--to", "jet:2", "--images", "x^2", "--value", "3 + 2*x"], &["image", "matrix"]),
        (vec!["model", "check", "--input", &instance, "--check", "exp-compat"], &["passed", "plain", "sliced"]),
    ];
    for (args, keys) in cases {
        let (status, v) = json(&args);
        assert_eq!(status, 0, "{args:?}: {v}");
        assert!(has_keys(&v, keys), "{args:?}: {v}");
    }
    let (status, v) = json(&["laws", "run", "--law", "L3", "--scalar", "rational"]);
    assert_eq!(status, 0);
    let reports = v.as_array().unwrap();
    assert_eq!(reports.len(), 2);
    for r in reports {
        assert!(has_keys(r, &["law_id", "model", "mode", "instances_run", "failures", "max_abs_error", "max_rel_error", "exact", "witnesses"]));
        assert_eq!(r["failures"], 0);
    }
}

#[test]
fn jet_of_exp_and_base_algebra() {
    let (status, v) = json(&["jet", "--fn", "exp(x)", "--at", "0", "--order", "3"]);
    assert_eq!(status, 0);
    assert_eq!(v["values"], serde_json::json!([1.0, 1.0, 1.0, 1.0]));
    let (status, v) = json(&["algebra", "info", "base"]);
    assert_eq!(status, 0);
    assert_eq!((v["dim"].as_u64(), v["nilpotency"].as_u64()), (Some(1), Some(1)));
}

#[test]
fn identical_arguments_give_identical_bytes() {
    for args in [
        vec!["laws", "run", "--seed", "7"],
        vec!["laws", "run", "--scalar", "float", "--seed", "3"],
        vec!["partials", "--fn", "exp(x)*cos(y)", "--at", "0.1,0.2", "--orders", "2,2"],
    ] {
        let first = weilad(&args);
        assert_eq!(first.0, 0);
        assert_eq!(first, weilad(&args), "{args:?}");
    }
}

#[test]
fn exit_codes() {
    assert_eq!(weilad(&["jet", "--fn", "x"]).0, 2);
    assert_eq!(weilad(&["jet", "--fn", "x", "--at", "1", "--order", "2", "--scalar", "decimal"]).0, 2);
    assert_eq!(weilad(&["frobnicate"]).0, 2);
    let (status, v) = json(&["jet", "--fn", "log(x)", "--at", "-1", "--order", "2"]);
    assert_eq!(status, 2);
    assert!(v["error"].as_str().unwrap().contains("log"));
    let (status, _, stderr) = weilad(&["model", "check", "--input", "/nonexistent.json", "--check", "ccc"]);
    assert_eq!(status, 2);
    assert!(!stderr.is_empty());
}

#[test]
fn failing_check_exits_one() {
    // collapsing `e` to the identity is a functor, but the comparison map is 8 -> 4
    let text = r#"{
        "objects": ["*"],
        "morphisms": [{"id": "e", "dom": "*", "cod": "*"}],
        "comp": {"e.e": "e"},
        "functors": {"M": {"sets": {"*": ["a", "b"]}, "maps": {"e": ["a", "a"]}}},
        "endofunctors": {"const": {"objects": {"*": "*"}, "morphisms": {"e": "id_*"}}},
        "checks": {"exp_compat": {"endofunctor": "const", "base": "M", "exponent": "M"}}
    }"#;
    let mut file = tempfile::NamedTempFile::new().unwrap();
    file.write_all(text.as_bytes()).unwrap();
    let path = file.path().to_str().unwrap().to_string();
    let (status, stdout, _) = weilad(&["model", "check", "--input", &path, "--check", "exp-compat"]);
    let v: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(status, 1);
    assert_eq!(v["passed"], Value::Bool(false));
    assert_eq!(v["plain"]["comparisons"][0]["isomorphism"], Value::Bool(false));
}

#[test]
fn multi_output_maps_come_from_function_files() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "vars u v\nu*v\nu + v^2").unwrap();
    let path = file.path().to_str().unwrap().to_string();
    let (status, v) = json(&["partials", "--fn", &path, "--at", "2,3", "--orders", "1,1", "--scalar", "rational"]);
    assert_eq!(status, 0, "{v}");
    let entries = v["entries"].as_array().unwrap();
    let at = |e: [u64; 2]| entries.iter().find(|x| x["exponents"] == serde_json::json!(e)).unwrap()["values"].clone();
    assert_eq!(at([0, 0]), serde_json::json!(["6", "11"]));
    assert_eq!(at([1, 0]), serde_json::json!(["3", "1"]));
    assert_eq!(at([0, 1]), serde_json::json!(["2", "6"]));
    assert_eq!(at([1, 1]), serde_json::json!(["1", "0"]));
}

#[test]
fn human_format_renders_tables() {
    let (status, stdout, _) = weilad(&["laws", "run", "--law", "L12", "--format", "human"]);
    assert_eq!(status, 0);
    assert!(stdout.starts_with("law"));
    assert!(stdout.contains("L12"));
    assert!(serde_json::from_str::<Value>(&stdout).is_err());
}
