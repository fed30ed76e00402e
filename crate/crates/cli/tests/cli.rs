//! End-to-end runs of the binary against the fixture documents.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn mesa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mesa"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn validate_passes_on_fixtures() {
    for name in [
        "tacnode.json",
        "elliptic_two_tails.json",
        "non_gorenstein.json",
        "zero_section.json",
    ] {
        let out = mesa(&["validate", fixture(name).to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", stdout(&out));
        assert!(stdout(&out).contains("PASS"));
    }
}

#[test]
fn contract_tacnode_document() {
    let out = mesa(&[
        "contract",
        fixture("tacnode.json").to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let sing = &report["payload"]["singularities"][0];
    assert_eq!(sing["genus"], 1);
    assert_eq!(sing["branches"], 2);
    assert_eq!(sing["delta"], 2);
    assert_eq!(sing["elliptic_gorenstein"], "Yes");
    assert_eq!(sing["type"], "tacnode");
    // the jet relation carries the gluing unit a = 2
    let pres = sing["presentation"].as_str().unwrap();
    assert!(pres.contains("2*f'(p1) = f'(p2)"), "{pres}");
}

#[test]
fn contract_non_gorenstein_document() {
    let out = mesa(&[
        "contract",
        fixture("non_gorenstein.json").to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let sing = &report["payload"]["singularities"][0];
    assert_eq!(sing["elliptic_gorenstein"], "No");
    assert_eq!(
        sing["type"],
        "cusp glued transversally to a smooth rational curve"
    );
}

#[test]
fn strata_on_one_parameter_family() {
    let out = mesa(&[
        "strata",
        fixture("elliptic_two_tails.json").to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let strata = report["payload"]["strata"].as_array().unwrap();
    assert_eq!(strata.len(), 2);
    assert_eq!(strata[0]["mesas"], 1);
    assert_eq!(strata[1]["mesas"], 0);
    assert_eq!(report["payload"]["overall"], "Yes");
}

#[test]
fn strata_single_face_inspection() {
    let out = mesa(&[
        "strata",
        fixture("zero_section.json").to_str().unwrap(),
        "--face",
        "1",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["payload"]["vertices"], 1);
    assert_eq!(report["payload"]["mesas"], 0);
}

#[test]
fn degrees_of_zero_section_are_zero() {
    let out = mesa(&[
        "degrees",
        fixture("zero_section.json").to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["payload"]["total"], "0");
    for (_v, d) in report["payload"]["per_vertex"].as_object().unwrap() {
        assert_eq!(d, "0");
    }
}

#[test]
fn cohomology_exact_on_tacnode() {
    let out = mesa(&[
        "cohomology",
        fixture("tacnode.json").to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let mesa0 = &report["payload"]["mesas"][0];
    assert_eq!(mesa0["h1"], 0);
    assert_eq!(mesa0["h0"], 2);
    assert_eq!(mesa0["verdict"], "Yes");
}

#[test]
fn bad_input_exits_2() {
    let out = mesa(&["validate", "/nonexistent/x.json"]);
    assert_eq!(out.status.code(), Some(2));

    // schema violation: delta length mismatch
    let dir = std::env::temp_dir().join("mesa-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(
        &bad,
        r#"{"format_version":1,"monoid_rank":2,
           "vertices":[{"id":0,"genus":0},{"id":1,"genus":0}],
           "edges":[{"id":0,"ends":[0,1],"delta":[1]}],
           "pl":{"vertex_values":{"0":[0,0],"1":[0,0]}}}"#,
    )
    .unwrap();
    let out = mesa(&["validate", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("edges[0].delta"), "{err}");
}

#[test]
fn failing_check_exits_1() {
    // a PL section that is not a sum of mesas: boundary slope 2
    let dir = std::env::temp_dir().join("mesa-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let doubled = dir.join("doubled.json");
    std::fs::write(
        &doubled,
        r#"{"format_version":1,"monoid_rank":1,
           "vertices":[{"id":0,"genus":1},{"id":1,"genus":0}],
           "edges":[{"id":0,"ends":[0,1],"delta":[1]}],
           "pl":{"vertex_values":{"0":[2],"1":[0]}}}"#,
    )
    .unwrap();
    let out = mesa(&["mesa", doubled.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1), "{}", stdout(&out));
    assert!(stdout(&out).contains("FAIL"));
}

#[test]
fn dot_export() {
    let dir = std::env::temp_dir().join("mesa-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let dot = dir.join("graph.dot");
    let out = mesa(&[
        "validate",
        fixture("zero_section.json").to_str().unwrap(),
        "--dot",
        dot.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&dot).unwrap();
    assert!(text.contains("graph dual"));
    assert!(text.contains("g=1"));
    assert!(text.contains("(1,0)"));
}

/// A genus-2 all-rational support: the guaranteed engine cannot settle it,
/// the generic engine (the document's default mode) says yes.
#[test]
fn mode_flag_overrides_document_option() {
    let path = fixture("genus2_chain.json");
    let generic = mesa(&["cohomology", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(generic.status.code(), Some(0), "{}", stdout(&generic));
    let report: serde_json::Value = serde_json::from_str(&stdout(&generic)).unwrap();
    assert_eq!(report["payload"]["mesas"][0]["verdict"], "Yes");

    let guaranteed = mesa(&[
        "cohomology",
        path.to_str().unwrap(),
        "--mode",
        "guaranteed",
        "--format",
        "json",
    ]);
    let report: serde_json::Value = serde_json::from_str(&stdout(&guaranteed)).unwrap();
    assert_eq!(report["payload"]["mesas"][0]["verdict"], "Indeterminate");
}

#[test]
fn truncation_flag_reaches_the_ring_model() {
    let out = mesa(&[
        "contract",
        fixture("tacnode.json").to_str().unwrap(),
        "--truncation",
        "9",
        "--format",
        "json",
    ]);
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["payload"]["singularities"][0]["pole_bound"], 9);
}

#[test]
fn reports_are_deterministic() {
    for cmd in ["mesa", "degrees", "cohomology", "contract", "strata"] {
        let a = mesa(&[cmd, fixture("tacnode.json").to_str().unwrap(), "--format", "json"]);
        let b = mesa(&[cmd, fixture("tacnode.json").to_str().unwrap(), "--format", "json"]);
        assert_eq!(stdout(&a), stdout(&b), "{cmd} output differs between runs");
    }
}

#[test]
fn stdin_input() {
    use std::io::Write;
    use std::process::Stdio;
    let doc = std::fs::read(fixture("zero_section.json")).unwrap();
    let mut child = Command::new(env!("CARGO_BIN_EXE_mesa"))
        .args(["validate", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.as_mut().unwrap().write_all(&doc).unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
}
