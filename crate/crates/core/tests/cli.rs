//! End-to-end checks of the command-line front-end and its exit codes.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use lagloci::exact::GaussianRational;
use lagloci::germ::{Comps, CurveGerm, Germ, SiegelPoint, SurfaceGerm};
use lagloci::series::{BiSeries, UniSeries, Var};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_lagloci")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("binary runs")
}

fn worked_model_file(dir: &Path) -> std::path::PathBuf {
    let germ = Germ::Surface(SurfaceGerm {
        base: SiegelPoint::i_identity(),
        order: 8,
        comps: Comps {
            z11: BiSeries::var(Var::U1, 8),
            z12: BiSeries::zero(8),
            z22: BiSeries::var(Var::U2, 8),
        },
    });
    let path = dir.join("surface.json");
    fs::write(&path, serde_json::to_string(&germ).unwrap()).unwrap();
    path
}

fn non_null_curve_file(dir: &Path) -> std::path::PathBuf {
    // s(t) = (t, 0, t): tangent quadratic X^2 + Y^2
    let g1 = GaussianRational::from_int(1);
    let germ = Germ::Curve(CurveGerm {
        base: SiegelPoint::i_identity(),
        order: 8,
        comps: Comps {
            z11: UniSeries::from_terms(8, &[(1, g1.clone())]),
            z12: UniSeries::zero(8),
            z22: UniSeries::from_terms(8, &[(1, g1)]),
        },
    });
    let path = dir.join("curve.json");
    fs::write(&path, serde_json::to_string(&germ).unwrap()).unwrap();
    path
}

#[test]
fn verify_surface_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let germ = worked_model_file(dir.path());
    let cert = dir.path().join("cert.json");

    let out = run(&[
        "verify-surface",
        germ.to_str().unwrap(),
        "--output",
        cert.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("certified_order"));

    // reruns are byte-identical
    let first = fs::read(&cert).unwrap();
    let out = run(&[
        "verify-surface",
        germ.to_str().unwrap(),
        "--output",
        cert.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(fs::read(&cert).unwrap(), first);

    // the emitted certificate passes verify-cert
    let out = run(&["verify-cert", cert.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    // a perturbed certificate fails with the mathematical-negative code
    let mut value: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&cert).unwrap()).unwrap();
    value["psi"]["a"]["coeffs"]
        .as_array_mut()
        .unwrap()
        .push(serde_json::json!([4, 0, "7"]));
    let bad = dir.path().join("bad_cert.json");
    fs::write(&bad, serde_json::to_string(&value).unwrap()).unwrap();
    let out = run(&["verify-cert", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn null_check_reports_the_discriminant() {
    let dir = tempfile::tempdir().unwrap();
    let curve = non_null_curve_file(dir.path());
    let out = run(&["null-check", curve.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("discriminant = -4 at order 0"), "got: {stdout}");

    let out = run(&["verify-curve", curve.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn classify_cubic_accepts_integer_coefficients() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cubic.json");
    fs::write(&path, r#"{"a":1,"b":1,"c":0,"e":0}"#).unwrap();
    let out = run(&["classify-cubic", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("SmoothOrbit, chi_hat = (9, 0, 0)"), "got: {stdout}");

    let out = run(&["chi", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("chi_hat = (9, 0, 0)"));
}

#[test]
fn invalid_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("garbage.json");
    fs::write(&path, "{ not json").unwrap();
    let out = run(&["verify-surface", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["verify-surface", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    // kind mismatch
    let curve = non_null_curve_file(dir.path());
    let out = run(&["verify-surface", curve.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    // order below the minimum
    let germ = worked_model_file(dir.path());
    let out = run(&["verify-surface", germ.to_str().unwrap(), "--order", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn jobs_fan_out_processes_all_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let germ = worked_model_file(dir.path());
    let second = dir.path().join("surface2.json");
    fs::copy(&germ, &second).unwrap();
    let out = run(&[
        "verify-surface",
        germ.to_str().unwrap(),
        second.to_str().unwrap(),
        "--jobs",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}
