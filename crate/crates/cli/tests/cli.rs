//! End-to-end tests of the binary: exit codes, report determinism and the
//! CSV sidecar contract.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pluriharm"))
}

fn maps_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../maps")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

fn mask_timestamp(text: &str) -> String {
    let mut doc: serde_json::Value = serde_json::from_str(text).expect("report parses");
    doc["timestamp_ms"] = serde_json::json!(0);
    doc.to_string()
}

#[test]
fn constants_reports_known_values() {
    let out = run(&["constants"]);
    assert!(out.status.success());
    let doc = stdout_json(&out);
    assert_eq!(doc["status"], "pass");
    let psi0 = doc["result"]["psi0"].as_f64().unwrap();
    assert!((psi0 - 11.090169943749475).abs() < 1e-12);
    let r0 = doc["result"]["r0"].as_f64().unwrap();
    assert!((r0 - 0.6180339887498949).abs() < 1e-15);
}

#[test]
fn exit_code_zero_on_clean_scan() {
    let spec = maps_dir().join("identity.json");
    let out = run(&[
        "verify-univalence",
        "--spec",
        spec.to_str().unwrap(),
        "--pairs",
        "2000",
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn exit_code_one_on_violation() {
    let spec = maps_dir().join("square.json");
    let out = run(&[
        "verify-univalence",
        "--spec",
        spec.to_str().unwrap(),
        "--pairs",
        "5000",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let doc = stdout_json(&out);
    assert_eq!(doc["status"], "violation");
    assert_eq!(doc["result"]["witness"]["kind"], "collision");
}

#[test]
fn exit_code_two_on_hypothesis_violation() {
    // g = 2 z: the dilatation has norm 2 everywhere.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("expanding.json");
    std::fs::write(
        &path,
        r#"{"schema":1,"n":1,
            "h":[{"component":0,"exponents":[1],"re":1.0,"im":0.0}],
            "g":[{"component":0,"exponents":[1],"re":2.0,"im":0.0}]}"#,
    )
    .unwrap();
    let out = run(&["volume", "--spec", path.to_str().unwrap(), "--samples", "1000"]);
    assert_eq!(out.status.code(), Some(2));
    let doc = stdout_json(&out);
    assert_eq!(doc["status"], "hypothesis-violated");
    assert!(doc["result"]["witness"].is_array());
}

#[test]
fn exit_code_three_on_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{not json").unwrap();
    let out = run(&["info", "--spec", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty());
}

#[test]
fn exit_code_three_on_unknown_flag() {
    let out = run(&["constants", "--definitely-not-a-flag"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn exit_code_three_on_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("too_high.json");
    std::fs::write(
        &path,
        r#"{"schema":1,"n":1,"h":[{"component":0,"exponents":[17],"re":1.0,"im":0.0}],"g":[]}"#,
    )
    .unwrap();
    let out = run(&["info", "--spec", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn reports_are_deterministic_modulo_timestamp() {
    let spec = maps_dir().join("quad_half.json");
    let spec = spec.to_str().unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["constants"],
        vec!["eval", "--spec", spec, "--point", "[[0.2,0.1]]"],
        vec!["derivs", "--spec", spec, "--point", "[[0.2,0.1]]"],
        vec![
            "volume", "--spec", spec, "--samples", "2000", "--budget", "4", "--seed", "7",
        ],
        vec![
            "verify-univalence",
            "--spec",
            spec,
            "--pairs",
            "3000",
            "--seed",
            "9",
        ],
        vec![
            "connectivity",
            "--spec",
            spec,
            "--grid-points",
            "200",
            "--seed",
            "3",
        ],
        vec![
            "demo-counterexample",
            "--k",
            "5",
            "--samples",
            "1000",
            "--targets",
            "50",
        ],
    ];
    for args in cases {
        let a = run(&args);
        let b = run(&args);
        assert_eq!(
            mask_timestamp(&String::from_utf8_lossy(&a.stdout)),
            mask_timestamp(&String::from_utf8_lossy(&b.stdout)),
            "report differs for {args:?}"
        );
    }
}

#[test]
fn reports_do_not_depend_on_worker_count() {
    let spec = maps_dir().join("quad_half.json");
    let spec = spec.to_str().unwrap();
    let one = run(&[
        "volume", "--spec", spec, "--samples", "4000", "--workers", "1",
    ]);
    let four = run(&[
        "volume", "--spec", spec, "--samples", "4000", "--workers", "4",
    ]);
    let mut a = stdout_json(&one);
    let mut b = stdout_json(&four);
    a["timestamp_ms"] = serde_json::json!(0);
    b["timestamp_ms"] = serde_json::json!(0);
    // worker count is echoed in params; results must match exactly
    assert_eq!(a["result"], b["result"]);
    a["params"]["workers"] = serde_json::json!(0);
    b["params"]["workers"] = serde_json::json!(0);
    assert_eq!(a, b);
}

#[test]
fn csv_sidecar_matches_report_values() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("report.json");
    let csv_path = dir.path().join("report.csv");
    let spec = maps_dir().join("quad_half.json");
    let out = run(&[
        "volume",
        "--spec",
        spec.to_str().unwrap(),
        "--samples",
        "2000",
        "--budget",
        "4",
        "--out",
        out_path.to_str().unwrap(),
        "--csv",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let sup = report["result"]["profile"]["sup_estimate"].as_f64().unwrap();
    let expected_row = format!(
        "profile.sup_estimate,{}",
        serde_json::to_string(&serde_json::json!(sup)).unwrap()
    );
    assert!(
        csv.lines().any(|l| l == expected_row),
        "row `{expected_row}` missing from CSV:\n{csv}"
    );
    // every numeric leaf of the report appears verbatim
    let value_row = format!(
        "inequality_checks.0.k_r_pow_n,{}",
        serde_json::to_string(&report["result"]["inequality_checks"][0]["k_r_pow_n"]).unwrap()
    );
    assert!(csv.lines().any(|l| l == value_row));
}

#[test]
fn canonical_round_trip_through_info() {
    // duplicate monomials in the file merge on load
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dup.json");
    std::fs::write(
        &path,
        r#"{"schema":1,"n":1,
            "h":[{"component":0,"exponents":[2],"re":1.0,"im":0.0},
                 {"component":0,"exponents":[2],"re":2.0,"im":0.0}],
            "g":[]}"#,
    )
    .unwrap();
    let out = run(&["info", "--spec", path.to_str().unwrap()]);
    let doc = stdout_json(&out);
    assert_eq!(doc["result"]["h"]["terms"], 1);
}

#[test]
fn shear_flag_scans_the_counterpart() {
    // h = z, g = z^2: f itself has det J < 0 far out, but with --shear the
    // scan targets F = h - g = z - z^2, which collides at z1 + z2 = 1.
    let spec = maps_dir().join("quad_transfer.json");
    let out = run(&[
        "verify-univalence",
        "--spec",
        spec.to_str().unwrap(),
        "--pairs",
        "10000",
        "--shear",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let doc = stdout_json(&out);
    let z1 = doc["result"]["witness"]["z1"][0].as_array().unwrap();
    let z2 = doc["result"]["witness"]["z2"][0].as_array().unwrap();
    let sum_re = z1[0].as_f64().unwrap() + z2[0].as_f64().unwrap();
    let sum_im = z1[1].as_f64().unwrap() + z2[1].as_f64().unwrap();
    assert!(
        (sum_re - 1.0).abs() < 1e-6 && sum_im.abs() < 1e-6,
        "collision pair should satisfy z1 + z2 = 1, got {sum_re} + {sum_im} i"
    );
}

#[test]
fn wrong_dimension_point_is_a_usage_error() {
    let spec = maps_dir().join("quad_half.json");
    let out = run(&[
        "eval",
        "--spec",
        spec.to_str().unwrap(),
        "--point",
        "[[0.1,0.2],[0.3,0.4]]",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn bloch_checks_flag_adds_grid_verdicts() {
    let spec = maps_dir().join("quad_half.json");
    let out = run(&[
        "bloch",
        "--spec",
        spec.to_str().unwrap(),
        "--samples",
        "2000",
        "--pairs",
        "2000",
        "--targets",
        "20",
        "--budget",
        "5",
        "--checks",
        "--grid-points",
        "200",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    assert_eq!(doc["result"]["checks"]["schwarz"]["pass"], true);
    assert_eq!(doc["result"]["checks"]["growth"]["pass"], true);
    assert!(doc["result"]["checks"]["bounded_map"].is_null());
}

#[test]
fn demo_counterexample_shows_the_phenomenon() {
    let out = run(&[
        "demo-counterexample",
        "--k",
        "10",
        "--samples",
        "2000",
        "--targets",
        "100",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    assert_eq!(doc["result"]["demonstrates_no_absolute_constant"], true);
    assert_eq!(doc["result"]["covering_inner"]["status"], "no-violation");
    assert_eq!(doc["result"]["covering_outer"]["status"], "violation");
    // |det J| = 1: the real volume is exactly r^{2n} = 0.9^4
    let vol = doc["result"]["real_volume"]["value"].as_f64().unwrap();
    assert!((vol - 0.9f64.powi(4)).abs() < 1e-12);
}
