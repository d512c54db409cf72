use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn willmore(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_willmore"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn spheroid_reports_figure_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let o = willmore(&["spheroid", "--N", "3", "--eps", "0.2"], dir.path());
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let s = json(&dir.path().join("summary.json"));
    assert_eq!(s["schema_version"], 1);
    let r = &s["result"];
    assert!((r["b"].as_f64().unwrap() - 4.038).abs() <= 0.01);
    assert!((r["c"].as_f64().unwrap() - 0.980).abs() <= 0.005);
    assert_eq!(r["crossings"], 3);
    let svg = std::fs::read_to_string(dir.path().join("geodesic.svg")).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
    assert!(svg.contains("class=\"geodesic\""));
}

#[test]
fn glued_pieces_sum_to_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let o = willmore(&["glued", "--a", "0.1", "--cyl-height", "2a"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let r = json(&dir.path().join("summary.json"))["result"].clone();
    let pi = std::f64::consts::PI;
    let closed = 2.0 * pi * (1.0 + 0.9f64.sqrt()) + pi + 2.0 * pi;
    assert!((r["totals"]["willmore"].as_f64().unwrap() - closed).abs() < 1e-8);
    let pieces = r["pieces"].as_array().unwrap();
    assert_eq!(pieces.len(), 4);
    let cyl = pieces
        .iter()
        .find(|p| p["name"].as_str().unwrap().contains("cylinder"))
        .unwrap();
    assert!((cyl["willmore"].as_f64().unwrap() - pi).abs() < 1e-8);
    assert!((cyl["area"].as_f64().unwrap() - 2.0 * pi * 0.1 * 0.2).abs() < 1e-8);
}

#[test]
fn seeded_audits_pass_and_reproduce() {
    let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = [
        "audits", "--suite", "section2", "--seed", "7", "--count", "10",
    ];
    for d in [&d1, &d2] {
        let o = willmore(&args, d.path());
        assert_eq!(o.status.code(), Some(0));
    }
    let csv = std::fs::read(d1.path().join("patches.csv")).unwrap();
    assert_eq!(csv, std::fs::read(d2.path().join("patches.csv")).unwrap());
    let text = String::from_utf8(csv).unwrap();
    assert_eq!(text.lines().count(), 1 + 30);
    assert!(text.lines().skip(1).all(|l| l.contains(",true,")));
    // the manifests differ only in the echoed output directory
    let strip = |d: &Path| {
        let mut m = json(&d.join("manifest.json"));
        m["config"]["out"] = Value::Null;
        m
    };
    assert_eq!(strip(d1.path()), strip(d2.path()));
    let s1 = std::fs::read(d1.path().join("summary.json")).unwrap();
    assert_eq!(s1, std::fs::read(d2.path().join("summary.json")).unwrap());
}

#[test]
fn svg_timestamp_is_optional() {
    let (d1, d2, d3) = (
        tempfile::tempdir().unwrap(),
        tempfile::tempdir().unwrap(),
        tempfile::tempdir().unwrap(),
    );
    willmore(&["spheroid", "--no-timestamp"], d1.path());
    willmore(&["spheroid", "--no-timestamp"], d2.path());
    willmore(&["spheroid"], d3.path());
    let read =
        |d: &tempfile::TempDir| std::fs::read_to_string(d.path().join("geodesic.svg")).unwrap();
    assert_eq!(read(&d1), read(&d2));
    assert!(!read(&d1).contains("generated"));
    assert!(read(&d3).contains("generated at unix time"));
}

#[test]
fn manifest_lists_used_tolerances() {
    let dir = tempfile::tempdir().unwrap();
    let o = willmore(&["spheroid", "--tol-scale", "0.5"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let m = json(&dir.path().join("manifest.json"));
    let t = &m["tolerances"];
    for key in [
        "tol_scale",
        "ode.tol",
        "ode.h_max",
        "root.tol",
        "closure.tol",
        "drift.tol",
    ] {
        assert!(t[key].is_number(), "missing {key}");
    }
    assert_eq!(t["tol_scale"], 0.5);
    assert_eq!(t["ode.tol"], 0.5e-12);
    assert_eq!(m["config"]["command"], "spheroid");
    assert_eq!(m["config"]["spheroid"]["n"], 3);
}

#[test]
fn config_file_and_flags_merge() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "seed = 3\n[invert]\nlambda = 0.2\ndeltas = [0.1]\nrandom = 2\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = willmore(
        &["invert", "--config", cfg.to_str().unwrap(), "--seed", "4"],
        &out,
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let m = json(&out.join("manifest.json"));
    assert_eq!(m["config"]["seed"], 4);
    assert_eq!(m["config"]["invert"]["lambda"], 0.2);
    let s = json(&out.join("summary.json"));
    assert_eq!(s["result"]["cases"].as_array().unwrap().len(), 3);
}

#[test]
fn bad_config_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[spheroid]\nn = 3\nepsilon = 0.2\n").unwrap();
    let out = dir.path().join("out");
    let o = willmore(&["spheroid", "--config", cfg.to_str().unwrap()], &out);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("epsilon"));
    assert!(!out.exists());

    std::fs::write(&cfg, "command = \"toro\"\n").unwrap();
    let o = willmore(&["spheroid", "--config", cfg.to_str().unwrap()], &out);
    assert_eq!(o.status.code(), Some(2));

    let o = willmore(&["spheroid", "--eps", "1.5"], &out);
    assert_eq!(o.status.code(), Some(2));
    let o = willmore(&["csf", "--scenario", "nope"], &out);
    assert_eq!(o.status.code(), Some(2));
    let o = willmore(&["frobnicate"], &out);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn numeric_failure_writes_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let o = willmore(&["spheroid", "--N", "40", "--eps", "0.001"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    let e = json(&dir.path().join("error.json"));
    assert_eq!(e["pass"], false);
    assert_eq!(e["error"]["stage"], "verify");
    assert!(dir.path().join("manifest.json").exists());
    assert!(!dir.path().join("summary.json").exists());
}

#[test]
fn csf_writes_one_svg_per_snapshot() {
    let dir = tempfile::tempdir().unwrap();
    let o = willmore(
        &["csf", "--scenario", "opposite-latitudes", "--t-end", "2"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let r = json(&dir.path().join("summary.json"))["result"]["scenarios"][0].clone();
    assert!(r["min_d"].as_f64().unwrap() > 0.0);
    let n = r["flow"]["snapshots"].as_u64().unwrap() as usize;
    let svgs = std::fs::read_dir(dir.path().join("opposite-latitudes"))
        .unwrap()
        .filter(|e| {
            e.as_ref()
                .unwrap()
                .path()
                .extension()
                .is_some_and(|x| x == "svg")
        })
        .count();
    assert_eq!(svgs, n);
}
