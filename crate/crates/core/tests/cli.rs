use std::path::Path;
use std::process::{Command, Output};

use conic_argyris::interp::Spline;

fn cli(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conic-argyris"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn mesh_interpolate_check_round() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = cli(&["mesh", "--domain", "unit-disk", "-n", "16", "--out", "m.json"], d);
    assert!(o.status.success(), "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["passed"], true);

    let o = cli(&["interpolate", "--mesh", "m.json", "--fn", "circle_sin", "--out", "s.json"], d);
    assert!(o.status.success(), "{}", stderr(&o));
    let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(r["residuals"]["vertex"].as_f64().unwrap() <= 1e-8);

    let o = cli(&["check", "--mesh", "m.json", "--spline", "s.json"], d);
    assert!(o.status.success(), "{}", stderr(&o));

    // perturb one coefficient of an interior piece
    let mut s = Spline::from_json(&std::fs::read_to_string(d.join("s.json")).unwrap()).unwrap();
    let t = s.classes.iter().rposition(|c| *c == conic_argyris::TriangleClass::Ordinary).unwrap();
    let mut c = s.pieces[t].poly.coeffs().to_vec();
    c[0] += 1e-3;
    s.pieces[t].poly = conic_argyris::Poly2::from_coeffs(s.pieces[t].degree(), c).unwrap();
    std::fs::write(d.join("bad.json"), s.to_json().unwrap()).unwrap();
    let o = cli(&["check", "--mesh", "m.json", "--spline", "bad.json"], d);
    assert_eq!(o.status.code(), Some(1));
    let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(!r["offending_edges"].as_array().unwrap().is_empty());
}

#[test]
fn zero_function_gives_zero_spline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(cli(&["mesh", "--domain", "unit-disk", "-n", "8", "--out", "m.json"], d).status.success());
    let o = cli(&["interpolate", "--mesh", "m.json", "--fn", "zero", "--out", "z.json"], d);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = Spline::from_json(&std::fs::read_to_string(d.join("z.json")).unwrap()).unwrap();
    assert!(s.pieces.iter().all(|p| p.poly.max_abs_coeff() == 0.0));
    assert!(cli(&["check", "--mesh", "m.json", "--spline", "z.json"], d).status.success());
}

#[test]
fn nonvanishing_function_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(cli(&["mesh", "--domain", "unit-disk", "-n", "8", "--out", "m.json"], d).status.success());
    let o = cli(&["interpolate", "--mesh", "m.json", "--fn", "one", "--out", "s.json"], d);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("does not vanish"), "{}", stderr(&o));
    assert!(!d.join("s.json").exists());
}

#[test]
fn small_n_explains_condition_f() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(&["mesh", "--domain", "unit-disk", "-n", "4", "--out", "m.json"], dir.path());
    assert!(!o.status.success());
    assert!(stderr(&o).contains("condition F"));
}

#[test]
fn malformed_domain_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.json"), "{\n  \"conics\": [\n    [1, 0,\n").unwrap();
    let o = cli(&["mesh", "--domain", "bad.json", "-n", "16", "--out", "m.json"], dir.path());
    assert!(!o.status.success());
    assert!(stderr(&o).contains("line"), "{}", stderr(&o));
}

#[test]
fn domain_file_and_mismatched_spline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    // ellipse x²/4 + y² = 1 given unnormalized, witness at the centre
    let spec = r#"{
        "conics": [[-1.0, 0.0, -4.0, 0.0, 0.0, 4.0]],
        "arcs": [{"conic": 0, "start": [2.0, 0.0], "end": [2.0, 0.0]}],
        "witness": [0.0, 0.0]
    }"#;
    std::fs::write(d.join("ellipse.json"), spec).unwrap();
    let o = cli(&["mesh", "--domain", "ellipse.json", "-n", "24", "--out", "e.json"], d);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = cli(&["interpolate", "--mesh", "e.json", "--fn", "conic_exp", "--out", "s.json"], d);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(cli(&["mesh", "--domain", "unit-disk", "-n", "16", "--out", "m.json"], d).status.success());
    let o = cli(&["check", "--mesh", "m.json", "--spline", "s.json"], d);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("pieces"), "{}", stderr(&o));
}

#[test]
fn convergence_json_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = cli(&["convergence", "--levels", "16,32", "--fn", "circle_exp", "--format", "json"], d);
    assert!(o.status.code().is_some());
    let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["rows"].as_array().unwrap().len(), 2);
    let o = cli(&["convergence", "--levels", "32"], d);
    assert_eq!(o.status.code(), Some(2));
    let o = cli(&["--threads", "2", "convergence", "--levels", "16,32", "--out", "c.csv"], d);
    assert!(o.status.code().is_some());
    let csv = std::fs::read_to_string(d.join("c.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert_eq!(
        csv.lines().next().unwrap(),
        "level,n_boundary,h,e_L2,e_H1,e_H2,order_L2,order_H1,order_H2"
    );
}
