//! Black-box tests of the `classext` binary: exit-code contract and
//! byte-determinism of reports.

use std::process::Command;

fn classext(args: &[&str]) -> (String, String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_classext"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
        out.status.code().unwrap_or(-1),
    )
}

#[test]
fn classgroup_reports_order_and_factors() {
    let (stdout, _, code) = classext(&["classgroup", "-D", "-20"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["order"], "2");
    assert_eq!(v["factors"][0], "2");
    let (stdout, _, code) = classext(&["classgroup", "-D", "-4"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["order"], "1");
}

#[test]
fn malformed_input_exits_2() {
    let (_, stderr, code) = classext(&["classgroup", "-D", "not-a-number"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("error"));
    let (_, _, code) = classext(&["frobnicate"]);
    assert_eq!(code, 2);
    // Valid integer, invalid discriminant.
    let (_, _, code) = classext(&["classgroup", "-D", "-6"]);
    assert_eq!(code, 2);
}

#[test]
fn verify_pic_sequence_passes() {
    let (stdout, _, code) = classext(&["verify", "pic-seq", "--A", "-36", "--B", "-4", "-v"]);
    assert_eq!(code, 0, "{stdout}");
    assert!(stdout.contains("\"pass\""));
    assert!(stdout.contains("Z/2"));
}

#[test]
fn verify_tower_from_file() {
    let dir = std::env::temp_dir().join("classext-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("z3i_tower.json");
    std::fs::write(&path, r#"{"kind":"tower","DA":"-36","DB":"-4"}"#).unwrap();
    let (stdout, _, code) = classext(&["verify", "tower", "--file", path.to_str().unwrap()]);
    assert_eq!(code, 0, "{stdout}");
    assert!(stdout.contains("\"pass\""));
}

#[test]
fn principalize_exit_codes() {
    // Principal ideal: exit 0 with a generator.
    let (stdout, _, code) = classext(&[
        "principalize",
        "--json",
        r#"{"ext":{"kind":"quad_extension","DA":"-20"},"den":"1","hnf":[["2","0"],["0","2"]]}"#,
    ]);
    assert_eq!(code, 0);
    assert!(stdout.contains("\"principal\""));
    // Non-principal but invertible: verdict with the reduced form, exit 0.
    let (stdout, _, code) = classext(&[
        "principalize",
        "--json",
        r#"{"ext":{"kind":"quad_extension","DA":"-20"},"den":"1","hnf":[["2","0"],["11","1"]]}"#,
    ]);
    assert_eq!(code, 0);
    assert!(stdout.contains("non-principal"));
    assert!(stdout.contains("reduced_form"));
    // Not invertible at all: exit 1.
    let (stdout, _, code) = classext(&[
        "principalize",
        "--json",
        r#"{"ext":{"kind":"quad_extension","DA":"-36"},"den":"1","hnf":[["3","0"],["0","3"]]}"#,
    ]);
    assert_eq!(code, 1, "{stdout}");
}

#[test]
fn semilocal_principalize_finite_fixture() {
    let (stdout, _, code) = classext(&[
        "principalize",
        "--json",
        r#"{"ext":{"kind":"extension","ambient":{"kind":"zn","n":"6"},
            "subring":[["1"]]},"rows":[["5"]]}"#,
    ]);
    assert_eq!(code, 0, "{stdout}");
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["construction"], "semilocal");
    assert_eq!(v["generator"][0], "5");
}

#[test]
fn paper_examples_suite_is_byte_deterministic() {
    let first = classext(&["paper-examples", "--seed", "3", "-v"]);
    assert_eq!(first.2, 0);
    let second = classext(&["paper-examples", "--seed", "3", "-v"]);
    assert_eq!(first.0, second.0, "reports differ between identical runs");
}

#[test]
fn classgroup_tower_leg() {
    let dir = std::env::temp_dir().join("classext-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("leg_tower.json");
    std::fs::write(&path, r#"{"kind":"tower","DA":"-36","DB":"-4"}"#).unwrap();
    let (stdout, _, code) =
        classext(&["classgroup", "--ext", path.to_str().unwrap(), "--leg", "AB"]);
    assert_eq!(code, 0, "{stdout}");
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["order"], "2");
    // BC leg: the maximal order has trivial kernel group here.
    let (stdout, _, code) =
        classext(&["classgroup", "--ext", path.to_str().unwrap(), "--leg", "BC"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["order"], "1");
}

#[test]
fn enumeration_bound_env_override() {
    // With the bound forced below the ring size the enumeration must fail
    // loudly instead of sampling.
    let out = Command::new(env!("CARGO_BIN_EXE_classext"))
        .args(["verify", "units-seq", "--instance", "f2f4"])
        .env("CLASSEXT_MAX_ENUM", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("size bound"));
}

#[test]
fn out_flag_writes_the_same_bytes() {
    let dir = std::env::temp_dir().join("classext-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let (stdout, _, code) = classext(&[
        "verify",
        "pic-seq",
        "--A",
        "-20",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let written = std::fs::read_to_string(&path).unwrap();
    assert_eq!(stdout.trim_end(), written);
}

#[test]
fn retraction_extension_descriptor() {
    let (stdout, _, code) = classext(&[
        "verify",
        "retraction",
        "--json",
        r#"{"kind":"retraction_extension","base":{"kind":"zn","n":"4"},"shape":{"trunc_poly":"3"}}"#,
    ]);
    assert_eq!(code, 0, "{stdout}");
    assert!(stdout.contains("\"pass\""));
}
