use std::path::PathBuf;

use affine_planner::{run, Domain};
use serde_json::Value;

fn fixture() -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/lambda_x.json").display().to_string()
}

fn scratch(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn invoke(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(std::iter::once("affine-planner").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = invoke(args);
    assert_eq!(code, 0, "{err}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn eui_reports_exact_and_decimal_bounds() {
    let d = fixture();
    let v = json(&["eui", "-d", &d, "--plan", "px", "--world", "ab", "--rule", "3"]);
    assert_eq!(v["eui"], serde_json::json!(["12/5", "10"]));
    assert_eq!(v["decimal"][0].as_f64(), Some(2.4));
    let v = json(&["eui", "-d", &d, "--plan", "px", "--world", "ab", "--rule", "2"]);
    assert_eq!(v["eui"], serde_json::json!(["26/5", "10"]));
}

#[test]
fn project_reports_metrics_per_step() {
    let d = fixture();
    let v = json(&["project", "-d", &d, "--plan", "px", "--world", "ab", "--rule", "3"]);
    assert_eq!(v["steps"], serde_json::json!([{"action": "X", "depth": 1, "leaves": 2}]));
    assert_eq!(v["tree"]["star"][0]["child"], serde_json::json!({"ch": ["b", "c"]}));
    let v = json(&["project", "-d", &d, "--plan", "pxx", "--world", "ab", "--rule", "3"]);
    assert_eq!(v["steps"][1]["depth"], 2);
    assert!(v["steps"][1]["leaves"].as_u64().unwrap() <= 4);
    let v = json(&["project", "-d", &d, "--plan", "px", "--world", "ab", "--rule", "1"]);
    assert_eq!(v["steps"][0]["depth"], 2);
}

#[test]
fn first_rule_rejects_longer_plans() {
    let (code, _, err) = invoke(&["project", "-d", &fixture(), "--plan", "pxx", "--world", "ab", "--rule", "1"]);
    assert_eq!(code, 2);
    assert!(err.contains("unsupported"), "{err}");
}

#[test]
fn eliminate_keeps_undominated_plans_in_order() {
    let d = fixture();
    let v = json(&["eliminate", "-d", &d, "--plans", "pa,px,ps", "--world", "ab", "--rule", "3"]);
    assert_eq!(v["survivors"], serde_json::json!(["px", "ps"]));
    assert_eq!(v["eliminated"], serde_json::json!([{"plan": "pa", "dominated_by": "px"}]));
    let v = json(&["eliminate", "-d", &d, "--plans", "px,px", "--world", "ab", "--rule", "3"]);
    assert_eq!(v["survivors"], serde_json::json!(["px", "px"]));
}

#[test]
fn abstract_fragments_reload() {
    let d = fixture();
    let (code, out, err) = invoke(&["abstract", "-d", &d, "--op", "bundle", "--actions", "X", "--name", "XB"]);
    assert_eq!(code, 0, "{err}");
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["actions"]["XB"]["branches"][0]["prob"], serde_json::json!(["4/5", "1"]));
    let path = scratch("bundle_fragment.json");
    std::fs::write(&path, &out).unwrap();
    let merged = Domain::load_files(&[PathBuf::from(&d), path.clone()]).unwrap();
    assert!(merged.actions.contains_key("XB"));

    let v = json(&["abstract", "-d", &d, "--op", "compose", "--actions", "X,X"]);
    let branches = v["actions"]["compose_X_X"]["branches"].as_array().unwrap();
    assert_eq!(branches.len(), 4);
    assert_eq!(branches[0]["prob"], serde_json::json!(["9/25", "16/25"]));

    let v = json(&["abstract", "-d", &d, "--op", "combine", "--actions", "X,to_a"]);
    assert_eq!(v["actions"]["combine_X_to_a"]["branches"].as_array().unwrap().len(), 2);
}

#[test]
fn canonical_emission_is_a_fixed_point() {
    let (code, once, _) = invoke(&["validate", "-d", &fixture(), "--canonical"]);
    assert_eq!(code, 0);
    let path = scratch("canonical.json");
    std::fs::write(&path, &once).unwrap();
    let (_, twice, _) = invoke(&["validate", "-d", &path.display().to_string(), "--canonical"]);
    assert_eq!(once, twice);
}

#[test]
fn validation_errors_exit_one_and_name_the_rule() {
    let path = scratch("bad_sum.json");
    std::fs::write(
        &path,
        r#"{"states": ["a", "b"], "actions": {"go": [
            {"condition": ["a", "b"], "prob": "6/10"},
            {"condition": ["a"], "prob": "1/2", "effect": {"a": "b"}}
        ]}}"#,
    )
    .unwrap();
    let (code, _, err) = invoke(&["validate", "-d", &path.display().to_string()]);
    assert_eq!(code, 1);
    assert!(err.contains("sum rule") && err.contains("11/10") && err.contains("\"a\""), "{err}");

    let path = scratch("bad_ref.json");
    std::fs::write(&path, r#"{"states": ["a"], "plans": {"p": ["nowhere"]}}"#).unwrap();
    let (code, _, err) = invoke(&["validate", "-d", &path.display().to_string()]);
    assert_eq!(code, 1);
    assert!(err.contains("reference"), "{err}");

    let path = scratch("bad_json.json");
    std::fs::write(&path, "{\"states\": [\"a\"],,}").unwrap();
    let (code, _, err) = invoke(&["validate", "-d", &path.display().to_string()]);
    assert_eq!(code, 1);
    assert!(err.contains(":1:"), "{err}");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(invoke(&["eui", "-d", &fixture(), "--plan", "px", "--world", "ab", "--rule", "1"]).0, 2);
    assert_eq!(invoke(&["frobnicate"]).0, 2);
    assert_eq!(invoke(&["abstract", "-d", &fixture(), "--op", "compose", "--actions", "X"]).0, 2);
}

#[test]
fn belief_sugar_loads() {
    let d = fixture();
    let v = json(&["eui", "-d", &d, "--plan", "ps", "--world", "belief", "--rule", "3"]);
    assert_eq!(v["eui"], serde_json::json!(["2", "5"]));
}

#[test]
fn check_with_zero_cases_is_empty_and_passes() {
    let (code, out, _) = invoke(&["check", "--suite", "all", "--cases", "0", "--seed", "5"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["seed"], 5);
    assert!(v["properties"].as_array().unwrap().iter().all(|p| p["cases"] == 0));
}

#[test]
fn check_writes_to_output_file() {
    let path = scratch("report.json");
    let (code, out, _) =
        invoke(&["check", "--suite", "lemmas", "--cases", "2", "--output", &path.display().to_string()]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["suite"], "lemmas");
}

#[test]
fn binary_exit_codes() {
    let exe = env!("CARGO_BIN_EXE_affine-planner");
    let status = std::process::Command::new(exe).args(["validate", "-d", &fixture()]).output().unwrap();
    assert_eq!(status.status.code(), Some(0));
    let status = std::process::Command::new(exe).args(["validate"]).output().unwrap();
    assert_eq!(status.status.code(), Some(2));
}
