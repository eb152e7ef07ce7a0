use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn trilap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trilap")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let o = trilap(args);
    assert!(o.status.success(), "{args:?} failed: {}", stderr(&o));
    stdout(&o)
}

/// Parses `x,y,value` style rows after the header (and an optional `#` line).
fn rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

fn entries(json: &str) -> Vec<(String, u32, u32, f64)> {
    let v: Value = serde_json::from_str(json).unwrap();
    v["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| {
            (
                e["family"].as_str().unwrap().to_string(),
                e["m"].as_u64().unwrap() as u32,
                e["n"].as_u64().unwrap() as u32,
                e["value"].as_f64().unwrap(),
            )
        })
        .collect()
}

#[test]
fn basis_metadata_carries_the_eigenvalue() {
    let out = ok(&["basis", "--domain", "equilateral", "--family", "antisym", "-m", "1", "-n", "3", "--grid", "64"]);
    let meta = out.lines().next().unwrap();
    let lambda: f64 = meta.split(',').find_map(|kv| kv.strip_prefix("eigenvalue=")).unwrap().parse().unwrap();
    assert!((lambda - 28.0 * PI * PI / 3.0).abs() < 1e-12);
    let norm: f64 = meta.split(',').find_map(|kv| kv.strip_prefix("norm_sq=")).unwrap().parse().unwrap();
    assert!((norm - 3f64.sqrt()).abs() < 1e-15);
    assert!(rows(&out).len() > 1000);
}

#[test]
fn basis_rejects_zero_and_folded_indices() {
    let o = trilap(&["basis", "--family", "antisym", "-m", "2", "-n", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("Zero: u_{m,m} ≡ 0"), "{}", stderr(&o));

    let o = trilap(&["basis", "--family", "sym", "-m", "3", "-n", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("FoldsTo"));
}

#[test]
fn basis_vanishes_on_the_horizontal_edges() {
    let out = ok(&["basis", "--family", "sym", "-m", "0", "-n", "2", "--grid", "2"]);
    let r = rows(&out);
    assert!(r.iter().any(|row| row[0] == 0.0 && row[1] == 0.0));
    for row in r.iter().filter(|row| row[1] == 0.0 || row[1] == 1.0) {
        assert!(row[2].abs() < 1e-15, "{row:?}");
    }
}

#[test]
fn expand_single_mode() {
    let json = ok(&["expand", "--function", "u13", "--N", "5"]);
    for (fam, m, n, v) in entries(&json) {
        assert_eq!(fam, "equi-antisym");
        let want = if (m, n) == (1, 3) { 1.0 } else { 0.0 };
        assert!((v - want).abs() < 1e-10, "({m}, {n}): {v}");
    }
}

#[test]
fn expand_backends_agree_and_synth_is_finite() {
    let q = ok(&["expand", "--function", "one-square", "--N", "8"]);
    let t = ok(&["expand", "--function", "one-square", "--N", "8", "--backend", "transform"]);
    let (eq, et) = (entries(&q), entries(&t));
    assert_eq!(eq.len(), et.len());
    for (a, b) in eq.iter().zip(&et) {
        assert_eq!((a.1, a.2), (b.1, b.2));
        assert!((a.3 - b.3).abs() < 1e-8);
    }

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("one.json");
    std::fs::write(&path, &q).unwrap();
    let o = trilap(&["synth", "--coeffs", path.to_str().unwrap(), "--grid", "32", "--function", "one-square"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let note = stderr(&o);
    let worst: f64 = note.rsplit(": ").next().unwrap().trim().parse().unwrap();
    assert!(worst.is_finite() && worst > 0.0, "{note}");
    assert!(rows(&stdout(&o)).iter().all(|r| r.len() == 4 && r.iter().all(|v| v.is_finite())));
}

#[test]
fn expand_errors_map_to_exit_codes() {
    assert_eq!(trilap(&["expand", "--function", "no-such-thing"]).status.code(), Some(2));
    let o = trilap(&["expand", "--function", "bump-hemi", "--backend", "transform", "--tol", "1e-30", "--N", "8"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("folded copy"));
    let o = trilap(&["synth", "--coeffs", "/nonexistent/coeffs.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn converge_outputs_decreasing_errors() {
    let out = ok(&["converge", "--function", "bump-equilateral", "--p", "2", "--N", "4,8,16,32", "--no-timing"]);
    assert!(out.starts_with("function,p,N,error,seconds\n"));
    let errs: Vec<f64> = out.lines().skip(1).map(|l| l.split(',').nth(3).unwrap().parse().unwrap()).collect();
    assert_eq!(errs.len(), 4);
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");

    let out = ok(&["converge", "--function", "one-square", "--p", "1.5", "--no-timing"]);
    let errs: Vec<f64> = out.lines().skip(1).map(|l| l.split(',').nth(3).unwrap().parse().unwrap()).collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
}

#[test]
fn converge_rejects_p_of_one() {
    let o = trilap(&["converge", "--function", "one-square", "--p", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("p must lie in (1,∞)"));
}

#[test]
fn verify_suites_pass() {
    for (suite, band) in [("orthogonality", "8"), ("fold", "24"), ("eigen", "8")] {
        let out = ok(&["verify", "--suite", suite, "--band", band]);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["passed"], Value::Bool(true));
        let r = &v["suites"][0];
        assert_eq!(r["suite"], suite);
        assert!(r["metric"].as_f64().unwrap() <= r["tolerance"].as_f64().unwrap());
    }
    let v: Value = serde_json::from_str(&ok(&["verify", "--suite", "orthogonality", "--band", "8"])).unwrap();
    assert!(v["suites"][0]["metric"].as_f64().unwrap() < 1e-10);
}

#[test]
fn verify_rejects_unknown_suites() {
    assert_eq!(trilap(&["verify", "--suite", "vibes"]).status.code(), Some(2));
}

#[test]
fn outputs_are_deterministic() {
    let args = ["converge", "--function", "bump-square", "--p", "1.5,3", "--N", "4,8", "--no-timing"];
    assert_eq!(ok(&args), ok(&args));
    let args = ["verify", "--suite", "commute,norms", "--band", "4", "--seed", "7"];
    assert_eq!(ok(&args), ok(&args));
}

#[test]
fn config_file_fills_unset_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# study\nfunction = bump-square\nN = 4,8\np = 2\nno-timing = true\n").unwrap();
    let out_path = dir.path().join("out.csv");
    let cfg_s = cfg.to_str().unwrap();
    ok(&["converge", "--config", cfg_s, "--N", "4,8,16", "--out", out_path.to_str().unwrap()]);
    let text = std::fs::read_to_string(Path::new(&out_path)).unwrap();
    let ns: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(2).unwrap()).collect();
    assert_eq!(ns, ["4", "8", "16"]);
    assert!(text.lines().skip(1).all(|l| l.starts_with("bump-square,") && l.ends_with(",0.0000000000000000e0")));
}
