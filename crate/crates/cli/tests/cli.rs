use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn m0n(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_m0n"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .display()
        .to_string()
}

#[test]
fn cross_ratio() {
    let out = m0n(&["cross-ratio", "0,1,inf,2"]);
    assert!(out.status.success());
    assert_eq!(json_of(&out), serde_json::json!({ "value": "2" }));
    let out = m0n(&["cross-ratio", "-1,1,inf,2/3"]);
    assert!(out.status.success());
}

#[test]
fn hilbert_poly_of_two_vertex_tree() {
    let out = m0n(&[
        "hilbert-poly",
        "--tree",
        &data("twovertex5.json"),
        "--eval",
        "1,1,1,1,1",
    ]);
    assert!(out.status.success());
    assert_eq!(json_of(&out)["value"], 26);
    let out = m0n(&["hilbert-poly", "--n", "4", "--eval", "1,1,1,1"]);
    assert_eq!(json_of(&out)["value"], 15);
    let out = m0n(&["hilbert-poly", "--type", "1,2|3|4", "--eval", "1,1,1,1"]);
    assert_eq!(json_of(&out)["value"], 12);
    let out = m0n(&["hilbert-poly", "--type", "1,2|3"]);
    assert_eq!(json_of(&out)["error"], "TooDegenerateType");
}

#[test]
fn domain_errors_are_structured() {
    let out = m0n(&["cross-ratio", "0,0,1,2"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json_of(&out)["error"], "CoincidentPoints");
    let out = m0n(&["chow-class", "--type", "1,2|3,4"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json_of(&out)["error"], "TooDegenerateType");
    let out = m0n(&["enumerate-trees", "--n", "12"]);
    assert_eq!(json_of(&out)["error"], "OutOfRange");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(m0n(&["bogus"]).status.code(), Some(2));
    assert_eq!(
        m0n(&["verify", "operads", "--max-n"]).status.code(),
        Some(2)
    );
    assert_eq!(m0n(&["cross-ratio"]).status.code(), Some(2));
}

#[test]
fn chow_class_and_signature() {
    let out = m0n(&["chow-class", "--type", "1,2|3|4|5"]);
    assert_eq!(json_of(&out)["terms"].as_array().unwrap().len(), 7);
    let out = m0n(&["chow-class", "--tree", &data("twovertex5.json")]);
    assert_eq!(json_of(&out)["terms"].as_array().unwrap().len(), 10);
    let out = m0n(&["signature", "--tree", &data("twovertex5.json")]);
    let v = json_of(&out);
    assert_eq!(v["1,2,3,4"], "boundary 12|34");
    assert!(v["1,3,4,5"].as_str().unwrap().starts_with("interior"));
}

#[test]
fn stabilize_and_glue_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = m0n(&[
        "stabilize",
        "--tree",
        &data("twovertex5.json"),
        "--keep",
        "1,3,4,5",
    ]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["vertices"].as_array().unwrap().len(), 1);
    // marking 1 sits where the node was
    assert_eq!(v["vertices"][0]["marks"]["1"], "inf");

    let left = dir.path().join("left.json");
    let right = dir.path().join("right.json");
    std::fs::write(
        &left,
        r#"{"vertices":[{"marks":{"1":"0","2":"1","*":"inf"}}],"edges":[]}"#,
    )
    .unwrap();
    std::fs::write(
        &right,
        r#"{"vertices":[{"marks":{"3":"0","4":"1","5":"2","*":"inf"}}],"edges":[]}"#,
    )
    .unwrap();
    let out = m0n(&[
        "glue",
        "--left",
        left.to_str().unwrap(),
        "--right",
        right.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let glued = dir.path().join("glued.json");
    std::fs::write(&glued, &out.stdout).unwrap();
    let expected = m0n(&[
        "stabilize",
        "--tree",
        &data("twovertex5.json"),
        "--keep",
        "1,2,3,4,5",
    ]);
    let again = m0n(&[
        "stabilize",
        "--tree",
        glued.to_str().unwrap(),
        "--keep",
        "1,2,3,4,5",
    ]);
    assert_eq!(json_of(&again), json_of(&expected));
}

#[test]
fn enumerate_counts() {
    for (n, count) in [(4, 4), (5, 26), (6, 236)] {
        let out = m0n(&["enumerate-trees", "--n", &n.to_string()]);
        assert_eq!(json_of(&out)["count"], count);
    }
}

#[test]
fn verify_suites_pass_and_are_deterministic() {
    let out = m0n(&["verify", "operads", "--max-n", "6"]);
    assert!(out.status.success());
    assert_eq!(json_of(&out)["violations"], 0);
    for args in [
        vec!["verify", "hilbert", "--n", "4", "--seed", "3"],
        vec!["verify", "chow", "--n", "5"],
        vec!["verify", "degeneration", "--n", "4", "--samples", "50"],
        vec!["verify", "boundary", "--n", "5", "--samples", "50"],
    ] {
        let a = m0n(&args);
        let b = m0n(&args);
        assert!(a.status.success(), "{args:?}");
        assert_eq!(json_of(&a)["passed"], true);
        assert_eq!(a.stdout, b.stdout, "{args:?} is not deterministic");
    }
}

#[test]
fn orbit_form_output() {
    let out = m0n(&["orbit-form", "0,1,inf,2"]);
    let v = json_of(&out);
    assert_eq!(v["coeffs"].as_object().unwrap().len(), 6);
    let out = m0n(&["orbit-form", "0,0,1,inf,2"]);
    assert_eq!(json_of(&out)["forms"].as_object().unwrap().len(), 5);
    let out = m0n(&["type-of", "0,0,1,inf"]);
    assert_eq!(json_of(&out)["type"], "1,2|3|4");
}
