use std::path::{Path, PathBuf};
use std::process::Command;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn preset(name: &str) -> String {
    root().join("presets").join(name).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["weyllab"];
    full.extend_from_slice(args);
    let code = weyllab_cli::run(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn validate(schema: &str, text: &str) {
    let schema: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(root().join("schemas").join(format!("{schema}.schema.json"))).unwrap(),
    )
    .unwrap();
    let value: serde_json::Value = serde_json::from_str(text).unwrap();
    let v = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = v.iter_errors(&value).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{schema}: {errors:?}");
}

#[test]
fn unit_torus_count() {
    let (code, out, _) = run(&["count", "--model", &preset("torus_unit.json"), "--lmax", "100"]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("lambda,left,right"));
    let last: Vec<f64> = lines.last().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    // lattice points of Z² within radius 100/2π
    let r = 100.0 / (2.0 * std::f64::consts::PI);
    let mut brute = 0;
    for a in -16i32..=16 {
        for b in -16i32..=16 {
            if ((a * a + b * b) as f64).sqrt() <= r {
                brute += 1;
            }
        }
    }
    assert_eq!(last[2], brute as f64);
    assert!((last[2] - 100.0f64.powi(2) / (4.0 * std::f64::consts::PI)).abs() < 20.0);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let singular = dir.path().join("singular.json");
    std::fs::write(&singular, r#"{"type":"torus","basis":[[1.0,2.0],[0.5,1.0]]}"#).unwrap();
    let (code, _, err) = run(&["spectrum", "--model", singular.to_str().unwrap(), "--lmax", "10"]);
    assert_eq!(code, weyllab_cli::EXIT_CONFIG);
    validate("error", err.trim());

    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[psi]\nsmax = 3\n").unwrap();
    let (code, _, _) = run(&["--config", cfg.to_str().unwrap(), "spectrum", "--model", &preset("sphere2.json"), "--lmax", "5"]);
    assert_eq!(code, weyllab_cli::EXIT_CONFIG);

    let (code, _, err) = run(&[
        "orbit", "--group", &preset("octagon.json"), "--x=0.1,1.1", "--y=0.0,1.0", "--tmax", "8", "--cap", "10",
    ]);
    assert_eq!(code, weyllab_cli::EXIT_RESOURCE);
    assert!(err.contains("resource"));

    // the spectrum cutoff cannot reach this t
    let (code, _, err) = run(&[
        "heat", "--model", &preset("sphere2.json"), "--tmin", "1e-4", "--tmax", "1e-2", "--lmax", "20",
    ]);
    assert_eq!(code, weyllab_cli::EXIT_RESOURCE, "{err}");

    let (code, _, _) = run(&["nonsense"]);
    assert_eq!(code, weyllab_cli::EXIT_CONFIG);
    let (code, out, _) = run(&["verify", "--only", "11"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("[PASS] 11"));
}

#[test]
fn json_outputs_match_schemas() {
    let torus = preset("torus_unit.json");
    let s2 = preset("sphere2.json");
    let oct = preset("octagon.json");
    let cases: Vec<(&str, Vec<&str>)> = vec![
        ("spectrum", vec!["spectrum", "--model", &s2, "--lmax", "20", "--format", "json"]),
        ("series", vec!["count", "--model", &torus, "--lmax", "20", "--format", "json"]),
        ("series", vec!["remainder", "--model", &s2, "--lmax", "20", "--x", "0,0,1", "--format", "json"]),
        ("probe_report", vec!["probe", "--model", &torus, "--lmax", "200", "--format", "json"]),
        (
            "heat_report",
            vec!["heat", "--model", &s2, "--tmin", "0.005", "--tmax", "0.1", "--fit", "2", "--format", "json"],
        ),
        (
            "orbit_report",
            vec!["orbit", "--group", &oct, "--x=0.1,1.1", "--y=0.0,0.9", "--tmax", "7", "--format", "json"],
        ),
        ("geodesic_report", vec!["geodesics", "--group", &oct, "--tmax", "7", "--format", "json"]),
        ("verify_report", vec!["verify", "--only", "10,11", "--format", "json"]),
    ];
    for (schema, args) in cases {
        let (code, out, err) = run(&args);
        assert_eq!(code, 0, "{args:?}: {err}");
        validate(schema, &out);
    }
    let dir = tempfile::tempdir().unwrap();
    let radii = dir.path().join("radii.csv");
    std::fs::write(&radii, "radius\n1.0\n1.4142135623730951\n").unwrap();
    let (code, out, _) = run(&["boxsearch", "--radii", radii.to_str().unwrap(), "--Y", "10"]);
    assert_eq!(code, 0);
    validate("alignment_result", &out);
    for (file, schema) in [
        ("octagon.json", "group"),
        ("schottky.json", "group"),
        ("torus_unit.json", "model"),
        ("sphere3.json", "model"),
    ] {
        validate(schema, &std::fs::read_to_string(preset(file)).unwrap());
    }
}

#[test]
fn output_file_and_config_override() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("k.csv");
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "[psi]\ns_max = 300\n[Q]\nn2 = 0.3989422804014327\n").unwrap();
    let (code, stdout, err) = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "pretrace",
        "--model",
        &preset("torus_unit.json"),
        "--T",
        "1.5",
        "--lambdas",
        "40,60",
        "--x",
        "0.1,0.2",
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("lambda,k_spectral,K_geodesic,k_tilde,K_leading_sum"));
    for line in lines {
        let v: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        assert!((v[1] - v[2]).abs() < 1e-4 * (1.0 + v[1].abs()));
        assert!(v[4].is_finite());
    }
}

#[test]
fn byte_stable_across_threads() {
    let bin = env!("CARGO_BIN_EXE_weyllab");
    let args = [
        "pretrace",
        "--model",
        &preset("torus_skew.json"),
        "--T",
        "1.2",
        "--lambdas",
        "30,50,70",
        "--x",
        "0.1,0.3",
        "--y",
        "0.4,0.2",
    ];
    let outputs: Vec<Vec<u8>> = ["1", "4", "1"]
        .iter()
        .map(|t| {
            let o = Command::new(bin).args(args).env("WEYLLAB_THREADS", t).output().unwrap();
            assert!(o.status.success());
            o.stdout
        })
        .collect();
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);

    let geo = ["geodesics", "--group", &preset("octagon.json"), "--tmax", "6"];
    let a = Command::new(bin).args(geo).output().unwrap();
    let b = Command::new(bin).args(geo).env("WEYLLAB_THREADS", "3").output().unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}
