use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_polariton-bjj"));
    c.env_remove("OUTPUT_DIR");
    c
}

fn bundled(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn run_into(config: &Path, out: &Path) -> Output {
    bin().arg("run").arg(config).env("OUTPUT_DIR", out).output().unwrap()
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect()
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("config.json");
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn fig2_threshold_endpoints() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_into(&bundled("fig2.json"), tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = read_csv(&tmp.path().join("threshold.csv"));
    let p_th = |j: f64| {
        rows.iter()
            .find(|r| (r[0].parse::<f64>().unwrap() - j).abs() < 1e-12 && r[1].parse::<f64>().unwrap() == 0.0)
            .map(|r| r[3].parse::<f64>().unwrap())
            .unwrap()
    };
    assert!((p_th(0.0) - 5.0).abs() < 1e-9);
    assert!((p_th(0.1) - 10.0).abs() < 1e-9);
    // The detuned curve never lies above the resonant one.
    let byj = |det: f64| rows.iter().filter(move |r| r[1].parse::<f64>().unwrap() == det).map(|r| r[3].parse::<f64>().unwrap());
    assert!(byj(0.2).zip(byj(0.0)).all(|(d, z)| d <= z + 1e-9));
    assert!(tmp.path().join("resolved_config.json").exists());
}

#[test]
fn fig3_branches() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_into(&bundled("fig3.json"), tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = read_csv(&tmp.path().join("stationary.csv"));
    let mut labels: Vec<&str> = rows.iter().map(|r| r[1].as_str()).collect();
    labels.sort();
    labels.dedup();
    assert_eq!(labels, ["non_condensed", "pt_antibonding", "pt_bonding", "self_trapped", "untrapped"]);
    let at11: Vec<&Vec<String>> = rows.iter().filter(|r| r[0] == "11.0").collect();
    assert_eq!(at11.len(), 5);
    let stable: Vec<&str> = at11.iter().filter(|r| r[9] == "true").map(|r| r[1].as_str()).collect();
    assert_eq!(stable, ["pt_bonding", "pt_antibonding", "self_trapped"]);
    // Condensed PT states start at the threshold.
    let first_pt = rows.iter().find(|r| r[1] == "pt_bonding").unwrap()[0].parse::<f64>().unwrap();
    assert!((10.0..=10.25).contains(&first_pt), "{first_pt}");
}

#[test]
fn malformed_config_fails_without_output() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("out");
    for text in [
        "{ not json",
        r#"{"experiment": "evolve", "output_dir": "x", "options": {"t_fianl": 5}}"#,
        r#"{"experiment": "evolve", "output_dir": "x", "model": {"gamma1": -1.0}}"#,
        r#"{"experiment": "threshold", "output_dir": "x", "model": {"r1_prime": 0.0}}"#,
    ] {
        let cfg = write_config(tmp.path(), text);
        let out = run_into(&cfg, &out_dir);
        assert!(!out.status.success(), "{text}");
        let err = String::from_utf8(out.stderr).unwrap();
        assert_eq!(err.lines().count(), 1, "{err}");
        let v: serde_json::Value = serde_json::from_str(&err).unwrap();
        assert!(v["error"].is_string());
        assert!(!out_dir.exists(), "{text}");
    }
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{"experiment": "evolve", "output_dir": "unused",
            "options": {"t_final": 50.0, "noise_sigma": 0.01, "seed": 7, "initial": {"n_ct": 10.0}}}"#,
    );
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert!(run_into(&cfg, &a).status.success());
    assert!(run_into(&cfg, &b).status.success());
    assert_eq!(std::fs::read(a.join("evolve.csv")).unwrap(), std::fs::read(b.join("evolve.csv")).unwrap());
    // Every value parses back to the float that was written.
    for r in read_csv(&a.join("evolve.csv")) {
        for v in &r {
            let x: f64 = v.parse().unwrap();
            assert!(x.is_nan() || format!("{x:?}") == *v);
        }
    }
}

#[test]
fn output_dir_comes_from_the_config_without_override() {
    let tmp = tempfile::tempdir().unwrap();
    let target = tmp.path().join("from_config");
    let text = format!(
        r#"{{"experiment": "stability", "output_dir": {}, "options": {{"p_values": [11.0]}}}}"#,
        serde_json::to_string(&target).unwrap()
    );
    let cfg = write_config(tmp.path(), &text);
    let out = bin().arg("run").arg(&cfg).output().unwrap();
    assert!(out.status.success());
    let rows = read_csv(&target.join("stability.csv"));
    assert_eq!(rows.len(), 20);
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["files"][0]["rows"], 20);
}

#[test]
fn unwritable_output_is_an_io_error() {
    let tmp = tempfile::tempdir().unwrap();
    let blocker = tmp.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let cfg = write_config(tmp.path(), r#"{"experiment": "stability", "output_dir": "x", "options": {"p_values": [11.0]}}"#);
    let out = run_into(&cfg, &blocker.join("sub"));
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("creating"));
    let report = bin().args(["verify", "--only", "1", "--report"]).arg(blocker.join("r.json")).output().unwrap();
    assert!(!report.status.success());
}

#[test]
fn verify_skips_pt_criteria_when_broken() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), r#"{"model": {"gamma2": 0.3}}"#);
    let report = tmp.path().join("report.json");
    let out = bin().arg("verify").arg(&cfg).args(["--only", "1,2,5,10", "--report"]).arg(&report).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 4);
    assert!(stdout.lines().next().unwrap().starts_with("[PASS]"));
    assert_eq!(stdout.lines().filter(|l| l.starts_with("[SKIP]")).count(), 3);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 4);
}

#[test]
fn lists_every_experiment() {
    let out = bin().arg("list-experiments").output().unwrap();
    assert!(out.status.success());
    let names: Vec<String> = String::from_utf8(out.stdout).unwrap().lines().map(|l| l.split('\t').next().unwrap().to_string()).collect();
    assert_eq!(names, ["threshold", "stationary", "stability", "evolve", "hysteresis", "basin", "emission", "reduced"]);
}
