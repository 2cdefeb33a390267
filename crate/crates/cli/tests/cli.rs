use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn finsler(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_finsler"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &TempDir, name: &str, body: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

const EUCLID_KLEIN: &str = r#"
schema_version = 1
dimension = 2
[pair.base]
kind = "euclidean"
[pair.comparison]
kind = "klein"
"#;

#[test]
fn evaluate_scaled_pair() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "scaled.toml",
        r#"
schema_version = 1
dimension = 3
[pair.base]
kind = "klein"
[pair.comparison]
kind = "scaled"
factor = 2.0
inner = { kind = "klein" }
[[points]]
x = [0.1, -0.2, 0.05]
y = [0.3, 1.0, -0.5]
"#,
    );
    let out = finsler(&["evaluate", "--config", &cfg]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&out);
    let f = floats(&report["points"][0]["first_integrals"]);
    for (got, want) in f.iter().zip([4.0, 4.0, 1.0]) {
        assert!((got - want).abs() < 1e-12);
    }
}

#[test]
fn evaluate_at_origin_and_identity_pair() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "origin.toml",
        &format!("{EUCLID_KLEIN}\n[[points]]\nx = [0.0, 0.0]\ny = [0.0, 1.0]\n"),
    );
    let report = json(&finsler(&["evaluate", "--config", &cfg]));
    let p = &report["points"][0];
    assert!((p["first_integrals"][0].as_f64().unwrap() - 1.0).abs() < 1e-15);
    assert!((p["mu"].as_f64().unwrap() - 1.0).abs() < 1e-15);

    let cfg = write_config(
        &dir,
        "identity.toml",
        "schema_version = 1\ndimension = 4\n[pair.base]\nkind = \"funk\"\n[pair.comparison]\nkind = \"funk\"\n",
    );
    let out = finsler(&["evaluate", "--config", &cfg, "--seed", "3"]);
    assert_eq!(code(&out), 0);
    for p in json(&out)["points"].as_array().unwrap() {
        let f = floats(&p["first_integrals"]);
        for (got, want) in f.iter().zip([1.0, 3.0, 3.0, 1.0]) {
            assert!((got - want).abs() < 1e-11);
        }
    }
}

#[test]
fn geodesic_conservation_passes() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "ek.toml", EUCLID_KLEIN);
    let out = finsler(&["geodesic", "--config", &cfg, "--seed", "17"]);
    assert_eq!(code(&out), 0);
    let report = json(&out);
    let trajectories = report["trajectories"].as_array().unwrap();
    assert_eq!(trajectories.len(), 20);
    assert!(report["max_drift"].as_f64().unwrap() <= 1e-6);
    for t in trajectories {
        assert_eq!(t["termination"]["status"], "completed");
        assert!(t["energy"]["max_rel"].as_f64().unwrap() >= 0.0);
    }
}

#[test]
fn geodesic_negative_control_fails() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "warped.toml",
        r#"
schema_version = 1
[pair.base]
kind = "euclidean"
[pair.comparison]
kind = "riemannian"
field = { name = "warped" }
"#,
    );
    let out = finsler(&["geodesic", "--config", &cfg]);
    assert_eq!(code(&out), 1);
    assert!(json(&out)["max_drift"].as_f64().unwrap() >= 1e-3);
}

#[test]
fn geodesic_identity_pair_is_flat() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "ff.toml",
        "schema_version = 1\n[pair.base]\nkind = \"klein\"\n[pair.comparison]\nkind = \"klein\"\n",
    );
    let out = finsler(&["geodesic", "--config", &cfg, "--tolerance", "1e-10"]);
    assert_eq!(code(&out), 0);
    assert!(json(&out)["max_drift"].as_f64().unwrap() <= 1e-10);
}

#[test]
fn geodesic_csv_columns() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "csv.toml",
        &format!("{EUCLID_KLEIN}\n[sampling]\ncount = 2\n"),
    );
    let path = dir.path().join("traj.csv");
    let out = finsler(&["geodesic", "--config", &cfg, "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let mut reader = csv::Reader::from_path(&path).unwrap();
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["trajectory", "t", "x1", "x2", "y1", "y2", "f1", "f2", "energy"]);
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert!(rows.len() > 4);
    assert_eq!(&rows[0][0], "0");
    assert_eq!(&rows.last().unwrap()[0], "1");
}

#[test]
fn geodesic_along_another_metric_of_the_class() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "flow.toml",
        &format!("{EUCLID_KLEIN}\n[pair.flow]\nkind = \"funk\"\n"),
    );
    let out = finsler(&["geodesic", "--config", &cfg]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["flow"], "funk(2)");
}

#[test]
fn verify_verdicts() {
    let dir = TempDir::new().unwrap();
    let ef = write_config(
        &dir,
        "ef.toml",
        "schema_version = 1\n[pair.base]\nkind = \"euclidean\"\n[pair.comparison]\nkind = \"funk\"\n",
    );
    let out = finsler(&["verify", "--config", &ef]);
    assert_eq!(code(&out), 0);
    assert!(json(&out)["max_norm"].as_f64().unwrap() <= 1e-8);

    let shear = write_config(
        &dir,
        "shear.toml",
        r#"
schema_version = 1
[pair.base]
kind = "euclidean"
[pair.comparison]
kind = "randers"
alpha = { name = "identity" }
beta = { form = "shear", strength = 0.5 }
"#,
    );
    assert_eq!(code(&finsler(&["verify", "--config", &shear])), 1);

    let ff = write_config(
        &dir,
        "ff.toml",
        "schema_version = 1\n[pair.base]\nkind = \"funk\"\n[pair.comparison]\nkind = \"funk\"\n",
    );
    let out = finsler(&["verify", "--config", &ff]);
    assert!(json(&out)["max_norm"].as_f64().unwrap() <= 1e-10);
    // an impossible tolerance turns the verdict
    assert_eq!(code(&finsler(&["verify", "--config", &ef, "--tolerance", "1e-300"])), 1);
}

#[test]
fn oracle_reports() {
    let dir = TempDir::new().unwrap();
    for (n, expect_skip) in [(2, false), (3, false), (4, true)] {
        let cfg = write_config(
            &dir,
            &format!("o{n}.toml"),
            &format!(
                "schema_version = 1\ndimension = {n}\n[pair.base]\nkind = \"euclidean\"\n[pair.comparison]\nkind = \"klein\"\n[sampling]\ncount = 5\n"
            ),
        );
        let out = finsler(&["oracle", "--config", &cfg]);
        assert_eq!(code(&out), 0, "n={n}");
        let report = json(&out);
        let delta = report["summary"]
            .as_array()
            .unwrap()
            .iter()
            .find(|s| s["check"] == "delta_combinatorial")
            .unwrap()
            .clone();
        if expect_skip {
            assert_eq!(delta["skipped"], 5);
            assert_eq!(delta["count"], 0);
        } else {
            assert_eq!(delta["count"], 5 * n);
            assert!(delta["max_gap"].as_f64().unwrap() <= 1e-8);
        }
    }
}

#[test]
fn identical_inputs_give_identical_bytes() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "ek.toml", EUCLID_KLEIN);
    for cmd in ["evaluate", "geodesic", "verify", "oracle"] {
        let a = dir.path().join(format!("{cmd}-a.json"));
        let b = dir.path().join(format!("{cmd}-b.json"));
        for p in [&a, &b] {
            finsler(&[cmd, "--config", &cfg, "--seed", "99", "--out", p.to_str().unwrap()]);
        }
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap(), "{cmd}");
    }
    let c = dir.path().join("c.json");
    finsler(&["verify", "--config", &cfg, "--seed", "100", "--out", c.to_str().unwrap()]);
    assert_ne!(
        std::fs::read(dir.path().join("verify-a.json")).unwrap(),
        std::fs::read(&c).unwrap()
    );
}

fn assert_structured_error(out: &Output, code_expected: i32, kind: &str) {
    assert_eq!(code(out), code_expected);
    assert!(out.stdout.is_empty());
    let err: Value = serde_json::from_slice(
        out.stderr.split(|b| *b == b'\n').next().unwrap(),
    )
    .unwrap();
    assert_eq!(err["error"], kind);
}

#[test]
fn config_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let broken = write_config(&dir, "broken.toml", "schema_version = 1\ndimension = [\n");
    let out = finsler(&["evaluate", "--config", &broken]);
    assert_structured_error(&out, 2, "config");
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));

    let unknown = write_config(
        &dir,
        "unknown.toml",
        "schema_version = 1\n[pair.base]\nkind = \"hyperbolic\"\n[pair.comparison]\nkind = \"klein\"\n",
    );
    assert_structured_error(&finsler(&["verify", "--config", &unknown]), 2, "config");

    let missing = dir.path().join("nope.toml");
    assert_structured_error(
        &finsler(&["verify", "--config", missing.to_str().unwrap()]),
        2,
        "config",
    );
    assert_eq!(code(&finsler(&["verify", "--format", "xml"])), 2);
    assert_eq!(code(&finsler(&["frobnicate"])), 2);
}

#[test]
fn runtime_errors_exit_three() {
    let dir = TempDir::new().unwrap();
    let outside = write_config(
        &dir,
        "outside.toml",
        &format!("{EUCLID_KLEIN}\n[[points]]\nx = [2.0, 0.0]\ny = [1.0, 0.0]\n"),
    );
    assert_structured_error(&finsler(&["evaluate", "--config", &outside]), 3, "runtime");
    let out_dir = dir.path().join("missing-dir").join("out.json");
    let cfg = write_config(&dir, "ek.toml", EUCLID_KLEIN);
    let out = finsler(&["verify", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    assert!(!Path::new(&out_dir).exists());
}
