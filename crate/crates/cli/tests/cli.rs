use std::io::Write;
use std::process::{Command, Output, Stdio};

use gkmkit::admissible_tuples::TupleJson;
use gkmkit::fibrations_bundles::{BundleJson, FibrationJson};
use gkmkit::gkm_graph::GraphJson;
use serde_json::Value;

fn gkmkit(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_gkmkit"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(stdin.unwrap_or("").as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Typed re-parse followed by re-serialization gives back the same JSON value.
fn round_trips<T: serde::de::DeserializeOwned + serde::Serialize>(text: &str) {
    let raw: Value = serde_json::from_str(text).unwrap();
    let typed: T = serde_json::from_str(text).unwrap();
    assert_eq!(serde_json::to_value(&typed).unwrap(), raw);
}

#[test]
fn cube_swap_is_not_realizable() {
    let o = gkmkit(&["bundle", "realizable", "fixture:cube-swap"], None);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o).trim(), "NotRealizable: Type-2 residual = factor swap (1 3)");
}

#[test]
fn su3_pipeline_is_realizable() {
    let t = gkmkit(&["tuple", "su3", "--b", "2", "--n", "4", "--l", "2"], None);
    assert_eq!(t.status.code(), Some(0));
    round_trips::<TupleJson>(&stdout(&t));
    let b = gkmkit(&["tuple", "build-bundle"], Some(&stdout(&t)));
    assert_eq!(b.status.code(), Some(0), "{}", String::from_utf8_lossy(&b.stderr));
    round_trips::<BundleJson>(&stdout(&b));
    let r = gkmkit(&["bundle", "realizable"], Some(&stdout(&b)));
    assert_eq!(r.status.code(), Some(0));
    assert_eq!(stdout(&r).trim(), "Realizable");
}

#[test]
fn negative_b_is_accepted() {
    let t = gkmkit(&["tuple", "su3", "--b", "-3", "--n", "5", "--l", "3"], None);
    assert_eq!(t.status.code(), Some(0));
}

#[test]
fn cube_dot() {
    let o = gkmkit(&["flag", "build", "A1xA1xA1", "--format", "dot"], None);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("graph"));
    assert_eq!(text.lines().filter(|l| l.contains(" -- ")).count(), 12);
}

#[test]
fn flag_graph_json_round_trips_and_validates() {
    let o = gkmkit(&["flag", "build", "A2"], None);
    let text = stdout(&o);
    round_trips::<GraphJson>(&text);
    let v = gkmkit(&["--json", "graph", "validate"], Some(&text));
    assert_eq!(v.status.code(), Some(0));
    let report: Value = serde_json::from_str(&stdout(&v)).unwrap();
    assert_eq!(report["valid"], Value::Bool(true));
    assert_eq!(report["connection_checked"], Value::Bool(true));
    let h = gkmkit(&["--json", "cohomology", "h2"], Some(&text));
    let h: Value = serde_json::from_str(&stdout(&h)).unwrap();
    assert_eq!(h["ordinary_rank"], 2);
    assert_eq!(h["edge_restriction_injective"], true);
}

#[test]
fn automorphism_counts() {
    for (desc, count) in [("A2", 12), ("A1xA1xA1", 48)] {
        let o = gkmkit(&["--json", "auto", "list", desc, "--signed"], None);
        let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(v["count"], count, "{desc}");
    }
}

#[test]
fn automorphism_decomposition_round_trip() {
    let o = gkmkit(&["--json", "auto", "list", "A2", "--signed"], None);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    for item in v["automorphisms"].as_array().unwrap() {
        let auto = serde_json::to_string(&item["auto"]).unwrap();
        let d = gkmkit(&["--json", "auto", "decompose", "A2"], Some(&auto));
        assert_eq!(d.status.code(), Some(0));
        let d: Value = serde_json::from_str(&stdout(&d)).unwrap();
        assert_eq!(d["w"], item["w"]);
        assert_eq!(d["outer"], item["outer"]);
    }
}

#[test]
fn fibration_fixtures() {
    let triple = gkmkit(&["--json", "bundle", "check", "fixture:triple-edge"], None);
    assert_eq!(triple.status.code(), Some(1));
    let v: Value = serde_json::from_str(&stdout(&triple)).unwrap();
    assert_eq!(v["gkm_fibration"], true);
    assert_eq!(v["fiber_bundle"]["verdict"], "NoLatticeAuto");
    assert_eq!(v["p2_fails_at"], Value::Array(vec![]));

    let o = gkmkit(&["--json", "bundle", "check", "fixture:hexagon-swap"], None);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["fiber_bundle"]["verdict"], "NotGraphIso");

    let shown = gkmkit(&["fixture", "show", "triple-edge"], None);
    round_trips::<FibrationJson>(&stdout(&shown));
    let again = gkmkit(&["--json", "bundle", "check"], Some(&stdout(&shown)));
    assert_eq!(stdout(&again), stdout(&triple));
}

#[test]
fn assembled_bundle_is_a_fiber_bundle() {
    let shown = gkmkit(&["fixture", "show", "cube-swap"], None);
    round_trips::<BundleJson>(&stdout(&shown));
    let o = gkmkit(&["--json", "bundle", "check"], Some(&stdout(&shown)));
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["fiber_bundle"]["verdict"], "Bundle");
    let a = gkmkit(&["bundle", "assemble", "fixture:cube-swap"], None);
    round_trips::<FibrationJson>(&stdout(&a));
}

#[test]
fn malformed_input_exits_2() {
    assert_eq!(gkmkit(&["bundle", "check"], Some("{}")).status.code(), Some(2));
    assert_eq!(gkmkit(&["bundle", "check"], Some("not json")).status.code(), Some(2));
    assert_eq!(gkmkit(&["flag", "build", "E6"], None).status.code(), Some(2));
    assert_eq!(gkmkit(&["bundle", "realizable", "fixture:unknown"], None).status.code(), Some(2));
    assert_eq!(gkmkit(&["tuple", "su3", "--b", "0", "--n", "4", "--l", "3"], None).status.code(), Some(2));
    assert_eq!(gkmkit(&["no-such-verb"], None).status.code(), Some(2));
}

#[test]
fn tuple_completion_and_enumeration() {
    let input = r#"{"a_list": [[[1,0],[0,1]], [[1,1],[0,1]], [[1,0],[-3,1]], [[1,2],[0,1]]],
                   "ad_w": [[-5,-3],[-3,-2]]}"#;
    let o = gkmkit(&["tuple", "complete"], Some(input));
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["psis"].as_array().unwrap().len(), 4);

    let e = r#"{"a": [[-5,-3],[-3,-2]], "kernel_vectors": [[1,-1],[1,0],[0,1],[1,0]]}"#;
    let o = gkmkit(&["--json", "tuple", "enumerate", "--bound", "3"], Some(e));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["count"].as_u64().unwrap() >= 1);
    assert_eq!(gkmkit(&["tuple", "enumerate", "--bound", "99"], Some(e)).status.code(), Some(2));
}

#[test]
fn unsigned_automorphisms_are_listed_without_a_decomposition() {
    let o = gkmkit(&["--json", "auto", "list", "A1"], None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let items = v["automorphisms"].as_array().unwrap();
    assert!(items.iter().any(|a| a["w"].is_null()));
    assert!(items.iter().any(|a| a["w"] == "e"));
}
