use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bframe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bframe"))
        .args(args)
        .output()
        .unwrap()
}

fn instance(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "instances", name]
        .iter()
        .collect();
    p.to_str().unwrap().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn bounds_on_e2() {
    let o = bframe(&["bounds", &instance("E2.json"), "--family", "y"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("A_opt=2 B_opt=4"), "{}", stdout(&o));
}

#[test]
fn k_frame_check_on_e4() {
    let o = bframe(&[
        "check",
        &instance("E4.json"),
        "--family",
        "x",
        "--K",
        "K",
        "--A",
        "1",
        "--B",
        "4",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("K-b-frame: PASS"), "{}", stdout(&o));
}

#[test]
fn too_large_lower_bound_fails_with_one() {
    let o = bframe(&[
        "check",
        &instance("E2.json"),
        "--family",
        "y",
        "--A",
        "3",
        "--B",
        "4",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("b-frame: FAIL"));
}

#[test]
fn reverse_problem_on_e5_is_infeasible() {
    let o = bframe(&["badjoint", &instance("E5.json"), "--solve-u", "--V", "V"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    let line = out
        .lines()
        .find(|l| l.starts_with("INFEASIBLE"))
        .expect("verdict line");
    let r: f64 = line
        .strip_prefix("INFEASIBLE residual=")
        .unwrap()
        .parse()
        .unwrap();
    assert!((r - 1.25f64.sqrt()).abs() < 1e-9);
}

#[test]
fn adjoint_on_e6_matches_basis_formula() {
    let o = bframe(&["badjoint", &instance("E6.json"), "--U", "U", "--basis", "f"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("basis_formula_diff=0"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(bframe(&[]).status.code(), Some(2));
    assert_eq!(
        bframe(&["bounds", &instance("E2.json")]).status.code(),
        Some(2)
    );
    assert_eq!(bframe(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        bframe(&["bounds", &instance("E2.json"), "--family", "nope"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        bframe(&[
            "check",
            &instance("E2.json"),
            "--family",
            "y",
            "--A",
            "5",
            "--B",
            "1"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        bframe(&[
            "--tol",
            "-1",
            "bounds",
            &instance("E2.json"),
            "--family",
            "y"
        ])
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn malformed_instance_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, "{ \"name\": ").unwrap();
    let o = bframe(&["bounds", p.to_str().unwrap(), "--family", "y"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));
}

#[test]
fn json_report_carries_every_printed_number() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("r.json");
    let o = bframe(&[
        "--json",
        p.to_str().unwrap(),
        "stability",
        &instance("E6.json"),
        "--family",
        "f",
        "--transform",
        "U",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["command"], "stability");
    assert_eq!(report["seed"], 0xBF4A7E);
    let values = report["checks"][0]["values"].as_object().unwrap();
    for token in stdout(&o).split_whitespace().filter(|t| t.contains('=')) {
        let (k, _) = token.split_once('=').unwrap();
        assert!(values.contains_key(k), "{k} missing from JSON");
    }
}

#[test]
fn seed_is_recorded_and_changes_samples() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("r.json");
    let o = bframe(&[
        "--seed",
        "7",
        "--json",
        p.to_str().unwrap(),
        "reconstruct",
        &instance("E4.json"),
        "--family",
        "x",
        "--K",
        "K",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
    assert_eq!(report["seed"], 7);
}

#[test]
fn omega_and_douglas_run() {
    let o = bframe(&[
        "stability",
        &instance("E6.json"),
        "--family",
        "f",
        "--omega",
        "f",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let o = bframe(&[
        "stability",
        &instance("E4.json"),
        "--family",
        "x",
        "--K",
        "K",
        "--douglas",
        "K",
        "--A",
        "1",
        "--B",
        "4",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("lambda=1"));
    // douglas without bounds is a usage error
    let o = bframe(&[
        "stability",
        &instance("E4.json"),
        "--family",
        "x",
        "--douglas",
        "K",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn non_orthonormal_basis_exits_one() {
    let o = bframe(&["badjoint", &instance("E2.json"), "--U", "U", "--basis", "y"]);
    // E2 carries no U
    assert_eq!(o.status.code(), Some(2));
    let o = bframe(&[
        "stability",
        &instance("E2.json"),
        "--family",
        "y",
        "--omega",
        "y",
    ]);
    assert_eq!(o.status.code(), Some(1));
}
