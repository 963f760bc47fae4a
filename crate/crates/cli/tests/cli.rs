use std::path::Path;
use std::process::{Command, Output};

fn edecay(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_edecay")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn values(report: &serde_json::Value) -> Vec<(String, f64)> {
    report["results"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| (r["form"].as_str().unwrap().to_string(), r["value"].as_f64().unwrap()))
        .collect()
}

fn snapshot_rows(dir: &Path) -> Vec<(f64, f64)> {
    let text = std::fs::read_to_string(dir.join("snapshots.csv")).unwrap();
    text.lines()
        .skip(1)
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|s| s.parse().unwrap()).collect();
            (v[0], v[2])
        })
        .collect()
}

#[test]
fn energy_between_point_masses() {
    let r = json(&edecay(&["metric", "--kind", "energy", "--alpha", "1", "--a", "dirac:0", "--b", "dirac:1.5"]));
    let v = values(&r);
    assert_eq!(v.len(), 1);
    assert!((v[0].1 - 3.0).abs() < 1e-12);
}

#[test]
fn gini_of_uniform() {
    let r = json(&edecay(&["metric", "--kind", "gini", "--a", "uniform:0,1"]));
    let g = r["gini"]["pairwise"].as_f64().unwrap();
    assert!((g - 1.0 / 3.0).abs() < 1e-4);
}

#[test]
fn cramer_forms_agree() {
    let r = json(&edecay(&["metric", "--kind", "cramer", "--a", "gaussian:0,1", "--b", "gaussian:1,1"]));
    let v = values(&r);
    let cdf = v.iter().find(|(f, _)| f == "cdf").unwrap().1;
    let fourier = v.iter().find(|(f, _)| f == "fourier").unwrap().1;
    assert!(cdf > 0.0);
    assert!((cdf - fourier).abs() <= 1e-3 * cdf);
}

#[test]
fn csv_output_and_out_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = edecay(&[
        "metric", "--kind", "cramer", "--a", "uniform:0,1", "--b", "uniform:0,2", "--format", "csv",
        "--out", dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("metric.csv")).unwrap();
    assert_eq!(text, String::from_utf8(out.stdout).unwrap());
    assert!(text.starts_with("kind,form,value,err\n"));
}

#[test]
fn opinion_run_writes_files_and_conserves_mass() {
    let dir = tempfile::tempdir().unwrap();
    let r = json(&edecay(&[
        "evolve", "--model", "opinion", "--initial", "gaussian:0.2,0.01", "--out", dir.path().to_str().unwrap(),
    ]));
    assert!(r["max_mass_error"].as_f64().unwrap() <= 1e-8);
    for f in ["snapshots.csv", "manifest.json", "final.csv"] {
        assert!(dir.path().join(f).exists(), "{f} missing");
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config_hash"], r["config_hash"]);
    for d in manifest["diagnostics"].as_array().unwrap() {
        assert!((d["mass"].as_f64().unwrap() - 1.0).abs() <= 1e-8);
    }
}

#[test]
fn wealth_equilibrium_is_stationary() {
    let dir = tempfile::tempdir().unwrap();
    json(&edecay(&[
        "evolve", "--model", "wealth", "--sigma", "1", "--lambda", "1", "--t-final", "2", "--out",
        dir.path().to_str().unwrap(),
    ]));
    let rows = snapshot_rows(dir.path());
    let t0 = rows[0].0;
    let f0: Vec<f64> = rows.iter().filter(|r| r.0 == t0).map(|r| r.1).collect();
    let n = f0.len();
    let drift = rows
        .chunks(n)
        .map(|snap| snap.iter().zip(&f0).map(|(a, b)| (a.1 - b).abs()).fold(0.0, f64::max))
        .fold(0.0, f64::max);
    assert!(drift < 1e-5, "drift {drift}");
}

#[test]
fn nonpositive_lambda_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = edecay(&["evolve", "--model", "opinion", "--lambda", "0", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("lambda"));
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "[model]\nname = \"opinion\"\nlamda = 1.0\n").unwrap();
    let out = edecay(&["evolve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("lamda"));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "[model]\nname = \"opinion\"\nlambda = 0.0\n[solver]\ncells = 128\nt_final = 0.5\n").unwrap();
    let out_dir = dir.path().join("run");
    let r = json(&edecay(&[
        "evolve", "--config", cfg.to_str().unwrap(), "--lambda", "2", "--out", out_dir.to_str().unwrap(),
    ]));
    assert_eq!(r["snapshots"].as_u64(), Some(6));
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["model"]["lambda"].as_f64(), Some(2.0));
    assert_eq!(manifest["grid"]["n_cells"].as_u64(), Some(128));
}

#[test]
fn unstable_step_is_a_runtime_failure() {
    let dir = tempfile::tempdir().unwrap();
    let out = edecay(&[
        "evolve", "--model", "opinion", "--dt", "1", "--theta", "0.5", "--out", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn evolve_is_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        json(&edecay(&[
            "evolve", "--model", "porous_medium", "--initial", "gaussian:0,0.05", "--cells", "256", "--threads", "2",
            "--out", d.path().to_str().unwrap(),
        ]));
    }
    let read = |d: &tempfile::TempDir| std::fs::read(d.path().join("snapshots.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn evolved_density_feeds_metric() {
    let dir = tempfile::tempdir().unwrap();
    json(&edecay(&["evolve", "--model", "opinion", "--m", "0.2", "--out", dir.path().to_str().unwrap()]));
    let grid = format!("grid:{}", dir.path().join("final.csv").display());
    let r = json(&edecay(&["metric", "--kind", "cramer", "--a", &grid, "--b", "beta:0.2,1"]));
    for (_, v) in values(&r) {
        assert!(v.abs() < 1e-6, "{v}");
    }
    let r = json(&edecay(&["metric", "--kind", "d1", "--a", &grid, "--b", &grid]));
    assert_eq!(values(&r)[0].1, 0.0);
}

#[test]
fn exact_flow_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exact.toml");
    let out_dir = dir.path().join("exact");
    std::fs::write(
        &cfg,
        format!(
            "out = {:?}\n[exact]\nflow = \"full_fp\"\ncomponents = [[1.0, [2.0, 0.0], 3.0]]\ntimes = [0.0, 1.0]\n",
            out_dir.to_str().unwrap()
        ),
    )
    .unwrap();
    json(&edecay(&["evolve", "--config", cfg.to_str().unwrap()]));
    let rec: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("exact.json")).unwrap()).unwrap();
    let c = &rec["states"][1]["state"]["components"][0];
    let e = (-1.0f64).exp();
    assert!((c["mean"][0].as_f64().unwrap() - 2.0 * e).abs() < 1e-12);
    assert!((c["var"].as_f64().unwrap() - (1.0 + 2.0 * e * e)).abs() < 1e-12);
}

#[test]
fn suite_only_drift() {
    let dir = tempfile::tempdir().unwrap();
    let out = edecay(&["suite", "--only", "drift", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    let criteria = report["criteria"].as_array().unwrap();
    assert_eq!(criteria.len(), 1);
    assert_eq!(criteria[0]["key"], "drift");
    assert!(criteria[0]["margin"].as_f64().unwrap() > 0.0);
    let traces = std::fs::read_to_string(dir.path().join("traces.csv")).unwrap();
    assert!(traces.starts_with("run_id,t,metric,alpha,value,err"));
}

#[test]
fn suite_with_unmatched_filter_is_invalid() {
    let dir = tempfile::tempdir().unwrap();
    let out = edecay(&["suite", "--only", "nonexistent", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_source_is_invalid() {
    let out = edecay(&["metric", "--kind", "cramer", "--a", "gaussian:0", "--b", "gaussian:1,1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = edecay(&["metric", "--kind", "energy", "--a", "dirac:0", "--b", "dirac:1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha"));
}
