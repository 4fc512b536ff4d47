//! End-to-end checks of the scenario runner binary: catalog validation,
//! deterministic golden-file reproduction and error reporting.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qspectro"))
}

fn scenario_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios")
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qspectro-test-{tag}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn catalog_lists_and_all_bundled_scenarios_validate() {
    let out = bin().arg("list").output().unwrap();
    assert!(out.status.success());
    let listing = String::from_utf8(out.stdout).unwrap();
    assert!(listing.lines().count() >= 10, "catalog too small:\n{listing}");
    for entry in fs::read_dir(scenario_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("toml") {
            continue;
        }
        let out = bin().arg("validate").arg("--config").arg(&path).output().unwrap();
        assert!(
            out.status.success(),
            "{} failed validation: {}",
            path.display(),
            String::from_utf8_lossy(&out.stdout)
        );
        let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        let hard = report["problems"]
            .as_array()
            .unwrap()
            .iter()
            .filter(|p| p["hard"].as_bool().unwrap())
            .count();
        assert_eq!(hard, 0, "{} reported hard problems", path.display());
    }
}

#[test]
fn f_pop_run_matches_golden_and_is_deterministic() {
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden");
    let config = scenario_dir().join("f-pop.toml");
    let out_a = tmp_dir("fpop-a");
    let out_b = tmp_dir("fpop-b");
    for (dir, threads) in [(&out_a, "2"), (&out_b, "1")] {
        let st = bin()
            .arg("run")
            .arg("--config")
            .arg(&config)
            .arg("--out-dir")
            .arg(dir)
            .arg("--threads")
            .arg(threads)
            .status()
            .unwrap();
        assert!(st.success());
    }
    for name in ["f-pop-entangled.csv", "f-pop-classical.csv", "f-pop.summary.json"] {
        let a = fs::read(out_a.join(name)).unwrap();
        let b = fs::read(out_b.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between runs");
        let g = fs::read(golden.join(name)).unwrap();
        assert_eq!(a, g, "{name} differs from the golden file");
    }
}

#[test]
fn hom_dip_summary_reports_the_gate_sweep() {
    let config = scenario_dir().join("hom-dip.toml");
    let out = tmp_dir("hom");
    let st = bin().arg("run").arg("--config").arg(&config).arg("--out-dir").arg(&out).status().unwrap();
    assert!(st.success());
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("hom-dip.summary.json")).unwrap()).unwrap();
    let dips = summary["results"]["dips"].as_array().unwrap();
    assert_eq!(dips.len(), 3);
    let mut values: Vec<f64> = dips.iter().map(|d| d["dip"].as_f64().unwrap()).collect();
    for v in &values {
        assert!((0.0..=1.0).contains(v), "dip out of range: {v}");
    }
    // broader frequency gates deepen the dip
    let sorted = {
        let mut s = values.clone();
        s.sort_by(|a, b| b.partial_cmp(a).unwrap());
        s
    };
    assert_eq!(values, sorted, "dips should decrease with gate bandwidth: {values:?}");
    values.reverse();
}

#[test]
fn error_codes_for_bad_inputs() {
    // unparseable file -> exit 2
    let dir = tmp_dir("bad");
    let broken = dir.join("broken.toml");
    fs::write(&broken, "this is not toml [").unwrap();
    let st = bin().arg("validate").arg("--config").arg(&broken).output().unwrap();
    assert_eq!(st.status.code(), Some(2));

    // negative dephasing -> physics violation, exit 3
    let physics = dir.join("physics.toml");
    fs::write(
        &physics,
        r#"
schema_version = 1
id = "bad-physics"
description = "negative rate"
family = "population"

[model]
kind = "levels"
e = [11000.0]
f = [22000.0]
mu_ge = [1.0]
mu_ef = [1.0]
gamma_e = [-5.0]
gamma_f = [100.0]
gamma = 100.0

[protocol]
kind = "f-populations"
pump_center_cm = 22000.0
pump_halfspan_cm = 100.0
scan_points = 3
pump_sigma_cm = 100.0
entanglement_time_fs = 10.0
"#,
    )
    .unwrap();
    let st = bin().arg("validate").arg("--config").arg(&physics).output().unwrap();
    assert_eq!(st.status.code(), Some(3));
    let report: serde_json::Value = serde_json::from_slice(&st.stdout).unwrap();
    let codes: Vec<&str> =
        report["problems"].as_array().unwrap().iter().map(|p| p["code"].as_str().unwrap()).collect();
    assert!(codes.contains(&"physics-gamma"), "missing physics code: {codes:?}");

    // running the invalid scenario also refuses with exit 3
    let st = bin()
        .arg("run")
        .arg("--config")
        .arg(&physics)
        .arg("--out-dir")
        .arg(dir.join("out"))
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(3));
}

#[test]
fn grid_coverage_warning_is_soft() {
    let dir = tmp_dir("warn");
    let cfg = dir.join("wide.toml");
    fs::write(
        &cfg,
        r#"
schema_version = 1
id = "wide-scan"
description = "scan wider than the kernel window"
family = "population"

[protocol]
kind = "f-populations"
pump_center_cm = 22500.0
pump_halfspan_cm = 1400.0
scan_points = 3
pump_sigma_cm = 100.0
entanglement_time_fs = 10.0
"#,
    )
    .unwrap();
    let out = bin().arg("validate").arg("--config").arg(&cfg).output().unwrap();
    assert!(out.status.success(), "soft warnings must not fail validation");
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let codes: Vec<&str> =
        report["problems"].as_array().unwrap().iter().map(|p| p["code"].as_str().unwrap()).collect();
    assert!(codes.contains(&"grid-coverage"), "missing coverage warning: {codes:?}");
}
