use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

use selab::schema::{csv_header, report_schema, scenario_schema};
use selab::Kind;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn selab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_selab"))
        .args(args)
        .env_remove("SELAB_OUT_DIR")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn validate(schema: &Value, doc: &Value) {
    let compiled = jsonschema::JSONSchema::compile(schema).unwrap();
    let msgs: Vec<String> = match compiled.validate(doc) {
        Ok(()) => Vec::new(),
        Err(errors) => errors.map(|e| format!("{e} at {}", e.instance_path)).collect(),
    };
    assert!(msgs.is_empty(), "schema violations: {msgs:?}");
}

/// Run a scenario document from a temp dir and return (exit code, report, csv).
fn run_doc(doc: &Value, extra: &[&str]) -> (i32, Option<Value>, Option<String>, tempfile::TempDir) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    fs::write(&path, serde_json::to_string(doc).unwrap()).unwrap();
    let out = dir.path().join("out");
    let mut args = vec!["run", path.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = selab(&args);
    let id = doc["id"].as_str().unwrap_or("x");
    let json = fs::read_to_string(out.join(format!("{id}.json"))).ok().map(|t| serde_json::from_str(&t).unwrap());
    let csv = fs::read_to_string(out.join(format!("{id}.csv"))).ok();
    (code(&o), json, csv, dir)
}

fn check_report(kind: Kind, json: &Value, csv: &str) {
    validate(&report_schema(kind), json);
    let header = csv_header(kind);
    let mut r = csv::Reader::from_reader(csv.as_bytes());
    assert_eq!(r.headers().unwrap().iter().collect::<Vec<_>>(), header);
    for rec in r.records() {
        assert_eq!(rec.unwrap().len(), header.len());
    }
}

#[test]
fn committed_schemas_are_current() {
    for k in Kind::ALL {
        for (suffix, v) in [("scenario", scenario_schema(k)), ("report", report_schema(k))] {
            let path = root().join(format!("schemas/{}.{suffix}.json", k.name()));
            let text = fs::read_to_string(&path).unwrap_or_default();
            let expected = serde_json::to_string_pretty(&v).unwrap() + "\n";
            assert!(text == expected, "{} is stale; regenerate with `selab schema`", path.display());
        }
    }
}

#[test]
fn suite_scenarios_match_their_schemas() {
    let mut n = 0;
    for e in fs::read_dir(root().join("scenarios")).unwrap() {
        let path = e.unwrap().path();
        let doc: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        let kind = Kind::parse(doc["kind"].as_str().unwrap()).unwrap();
        validate(&scenario_schema(kind), &doc);
        selab::Scenario::load(&path).unwrap();
        n += 1;
    }
    assert!(n >= Kind::ALL.len());
}

#[test]
fn passing_run_writes_valid_reports() {
    let doc: Value = serde_json::from_str(&fs::read_to_string(root().join("scenarios/growth-quadratic-r3.json")).unwrap()).unwrap();
    let (c, json, csv, _d) = run_doc(&doc, &[]);
    assert_eq!(c, 0);
    let json = json.unwrap();
    assert_eq!(json["status"], "pass");
    assert_eq!(json["result"]["k1"], 2.0);
    assert_eq!(json["result"]["lambda"], 1.0);
    check_report(Kind::GrowthOrder, &json, &csv.unwrap());

    for name in ["gauss-cplx-z3", "volume-catenoid", "annulus-flat-r3-dx1"] {
        let doc: Value = serde_json::from_str(&fs::read_to_string(root().join(format!("scenarios/{name}.json"))).unwrap()).unwrap();
        let kind = Kind::parse(doc["kind"].as_str().unwrap()).unwrap();
        let (c, json, csv, _d) = run_doc(&doc, &[]);
        assert_eq!(c, 0, "{name}");
        check_report(kind, &json.unwrap(), &csv.unwrap());
    }
}

#[test]
fn failed_expectation_exits_one() {
    let doc = serde_json::json!({
        "id": "wrong-lambda", "kind": "growth-order",
        "params": {
            "chart": "flat-R3", "exhaustion": {"type": "quadratic", "a": [1, 1, 1]}, "p": 1, "growth": "real",
            "sample": {"type": "grid", "lower": [-1, -1, -1], "upper": [1, 1, 1], "n": 3},
            "expect": {"lambda": {"value": 2}}
        }
    });
    let (c, json, csv, _d) = run_doc(&doc, &[]);
    assert_eq!(c, 1);
    let json = json.unwrap();
    assert_eq!(json["status"], "fail");
    assert_eq!(json["first_failure"], "lambda");
    check_report(Kind::GrowthOrder, &json, &csv.unwrap());
}

#[test]
fn failed_certification_exits_one() {
    let doc = serde_json::json!({
        "id": "rotation", "kind": "ratio-scan",
        "params": {"form": "rotation-R2", "lambda": 1, "radii": [1, 2], "certify": true}
    });
    let (c, json, csv, _d) = run_doc(&doc, &[]);
    assert_eq!(c, 1);
    let json = json.unwrap();
    assert_eq!(json["first_failure"], "conservation-certified");
    assert!(json["result"].is_null());
    check_report(Kind::RatioScan, &json, &csv.unwrap());
}

#[test]
fn computation_error_is_reported() {
    let doc = serde_json::json!({
        "id": "too-far", "kind": "volume-scan", "params": {"immersion": "enneper", "radii": [20]}
    });
    let (c, json, csv, _d) = run_doc(&doc, &[]);
    assert_eq!(c, 1);
    let json = json.unwrap();
    assert_eq!(json["status"], "error");
    assert!(json["error"].as_str().unwrap().contains("window"), "{json}");
    let csv = csv.unwrap();
    check_report(Kind::VolumeScan, &json, &csv);
    assert_eq!(csv.lines().count(), 1);
}

#[test]
fn configuration_errors_exit_two() {
    let bad = [
        serde_json::json!({"id": "a", "kind": "no-such-kind", "params": {}}),
        serde_json::json!({"id": "a", "kind": "integral-formula", "params": {"form": "dx1-R3", "t": 1, "typo": 0}}),
        serde_json::json!({"id": "a", "kind": "integral-formula", "params": {"form": "no-such-form", "t": 1}}),
        serde_json::json!({"id": "../a", "kind": "integral-formula", "params": {"form": "dx1-R3", "t": 1}}),
        serde_json::json!({"id": "a", "kind": "volume-scan", "params": {"immersion": "plane", "radii": [-1]}}),
        serde_json::json!({"id": "a", "kind": "gauss-energy", "params": {"immersion": "catenoid", "points": [[0, 0]]}}),
        serde_json::json!({"id": "a", "kind": "growth-order", "params": {
            "chart": "flat-R2", "exhaustion": {"type": "quadratic", "a": [1, 1, 1]}, "p": 1, "growth": "real",
            "sample": {"type": "points", "points": [[0, 0]]}}}),
    ];
    for doc in &bad {
        let (c, json, _, _d) = run_doc(doc, &[]);
        assert_eq!(c, 2, "{doc}");
        assert!(json.is_none());
    }
    let doc = serde_json::json!({"id": "a", "kind": "integral-formula", "params": {"form": "dx1-R3", "t": 1}});
    assert_eq!(run_doc(&doc, &["--threads", "0"]).0, 2);
    assert_eq!(code(&selab(&["run", "/nonexistent/scenario.json"])), 2);
    assert_eq!(code(&selab(&["schema", "nope"])), 2);
}

#[test]
fn output_directory_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let doc = serde_json::json!({
        "id": "g", "kind": "gauss-energy", "params": {"immersion": "cplx-z2", "points": [[0.1, 0.2]]},
        "output": {"dir": "reports"}
    });
    let path = dir.path().join("s.json");
    fs::write(&path, doc.to_string()).unwrap();
    assert_eq!(code(&selab(&["run", path.to_str().unwrap()])), 0);
    assert!(dir.path().join("reports/g.json").exists());

    let env_dir = dir.path().join("env");
    let plain = dir.path().join("p.json");
    fs::write(&plain, doc.to_string().replace(r#","output":{"dir":"reports"}"#, "")).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_selab"))
        .args(["run", plain.to_str().unwrap()])
        .env("SELAB_OUT_DIR", &env_dir)
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(env_dir.join("g.csv").exists());
    // no temp files left behind
    assert_eq!(fs::read_dir(&env_dir).unwrap().count(), 2);
}

#[test]
fn thread_count_does_not_change_reports() {
    let doc: Value = serde_json::from_str(&fs::read_to_string(root().join("scenarios/volume-catenoid.json")).unwrap()).unwrap();
    let (_, a, ac, _d1) = run_doc(&doc, &["--threads", "1"]);
    let (_, b, bc, _d2) = run_doc(&doc, &["--threads", "3"]);
    assert_eq!(a, b);
    assert_eq!(ac, bc);
}

#[test]
fn resolution_flag_is_recorded() {
    let doc: Value = serde_json::from_str(&fs::read_to_string(root().join("scenarios/volume-plane.json")).unwrap()).unwrap();
    let (c, json, _, _d) = run_doc(&doc, &["--resolution", "120"]);
    assert_eq!(c, 0);
    assert_eq!(json.unwrap()["quadrature"]["grid_resolution"], 120);
}

#[test]
fn warp_profile_and_listing() {
    let o = selab(&["warp-profile", "warped-hyperbolic-R2", "--every", "100"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let mut r = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(r.headers().unwrap().iter().collect::<Vec<_>>(), ["r", "f", "f_prime", "K_r"]);
    for rec in r.records() {
        let rec = rec.unwrap();
        let v: Vec<f64> = rec.iter().map(|s| s.parse().unwrap()).collect();
        assert!((v[1] - v[0].sinh()).abs() < 1e-6 * v[0].cosh(), "{v:?}");
        assert!((v[3] + 1.0).abs() < 1e-9);
    }
    assert_eq!(code(&selab(&["warp-profile", "flat-R3"])), 2);

    let o = selab(&["list-catalog"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("immersion\tcatenoid\t")));
    assert!(text.lines().any(|l| l.starts_with("chart\tflat-C2\t")));
}
