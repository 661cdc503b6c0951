use sgsim_core::circuit::Circuit;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn sgsim(dir: &Path, sub: &str, config: &str, extra: &[&str]) -> Output {
    let cfg = dir.join("run.toml");
    fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_sgsim"))
        .arg(sub)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir)
        .args(extra)
        .output()
        .unwrap()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn col(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("missing column {name}"))
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

fn manifest(dir: &Path, name: &str) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join(format!("{name}.manifest"))).unwrap()).unwrap()
}

const SMALL: &str = "[lattice]\nL = 2\nm = 1.0\nbeta = 1.0\n";

#[test]
fn evolve_at_zero_time_is_single_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = sgsim(dir.path(), "evolve", &format!("{SMALL}[sim]\nlambda = 4\nt_max = 0.0\n"), &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (h, rows) = read_csv(&dir.path().join("evolve.csv"));
    assert_eq!(h, ["t", "survival_prob", "L", "m", "beta", "lambda", "trotter_steps", "mode"]);
    assert_eq!(rows.len(), 1);
    assert_eq!(num(&rows[0][col(&h, "survival_prob")]), 1.0);
    let m = manifest(dir.path(), "evolve");
    assert_eq!(m["config_sha256"].as_str().unwrap().len(), 64);
    assert_eq!(m["command"], "evolve");
}

#[test]
fn evolve_curves_per_cutoff_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!("{SMALL}[sim]\nlambda_list = [4, 5]\nt_max = 1.0\nn_points = 5\ntrotter_steps = 2\n");
    assert!(sgsim(dir.path(), "evolve", &cfg, &[]).status.success());
    let first = fs::read(dir.path().join("evolve.csv")).unwrap();
    assert!(sgsim(dir.path(), "evolve", &cfg, &[]).status.success());
    assert_eq!(first, fs::read(dir.path().join("evolve.csv")).unwrap());
    let (h, rows) = read_csv(&dir.path().join("evolve.csv"));
    assert_eq!(rows.len(), 10);
    assert!(rows.iter().all(|r| num(&r[col(&h, "survival_prob")]) <= 1.0 + 1e-12));
}

#[test]
fn evolve_auto_records_refinement() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!("{SMALL}[sim]\nlambda = 4\nt_max = 1.0\nn_points = 3\ntrotter_steps = \"auto\"\nauto_tol = 1e-3\n");
    let out = sgsim(dir.path(), "evolve", &cfg, &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let m = manifest(dir.path(), "evolve");
    let r = &m["derived"]["refinement_beta1_lambda4"];
    assert!(r["last_change"].as_f64().unwrap() < 1e-3);
}

#[test]
fn unknown_key_exits_2_naming_it() {
    let dir = tempfile::tempdir().unwrap();
    let out = sgsim(dir.path(), "evolve", &format!("{SMALL}[sim]\nlambda = 4\ntmax = 1.0\n"), &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("tmax"));
}

#[test]
fn dimension_guard_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = sgsim(dir.path(), "evolve", "[lattice]\nL = 5\nm = 1.0\nbeta = 1.0\n[sim]\nlambda = 20\n", &[]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn qite_zero_steps_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = sgsim(dir.path(), "qite", &format!("{SMALL}[sim]\nlambda = 4\n[qite]\nsteps = 0\n"), &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn qite_trace_per_beta() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "[lattice]\nL = 2\nm = 1.0\nbeta = [1.0, 2.0]\n[sim]\nlambda = 5\n[qite]\ndtau = 0.5\nsteps = 4\n";
    assert!(sgsim(dir.path(), "qite", cfg, &["--format", "json"]).status.success());
    let rows: Vec<serde_json::Value> = serde_json::from_str(&fs::read_to_string(dir.path().join("qite.json")).unwrap()).unwrap();
    assert_eq!(rows.len(), 10);
    for key in ["tau", "energy", "fidelity", "success_prob", "L", "m", "beta", "lambda", "dtau", "mode"] {
        assert!(rows[0].get(key).is_some(), "{key}");
    }
    let f = rows[4]["fidelity"].as_f64().unwrap();
    assert!(f > 0.9 && f <= 1.0 + 1e-10);
}

#[test]
fn correlator_zero_charge_and_equal_sites() {
    let dir = tempfile::tempdir().unwrap();
    let base = "[lattice]\nL = 2\nm = 1.0\nbeta = 1.5\n[sim]\nlambda = 6\nt_max = 1.0\nn_points = 3\n";
    let out = sgsim(dir.path(), "correlator", &format!("{base}[correlator]\nalpha = 0.0\n"), &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (h, rows) = read_csv(&dir.path().join("correlator.csv"));
    assert_eq!(h, ["t", "re_gc", "im_gc", "abs_gc", "alpha", "n", "k", "ground_source"]);
    assert!(rows.iter().all(|r| num(&r[col(&h, "abs_gc")]) < 1e-12));

    let out = sgsim(dir.path(), "correlator", &format!("{base}[correlator]\nalpha = 1.0\nn = 1\nk = 1\nground_source = [\"ed\", \"qite\"]\n"), &[]);
    assert!(out.status.success());
    let (h, rows) = read_csv(&dir.path().join("correlator.csv"));
    assert_eq!(rows.len(), 6);
    assert!(num(&rows[0][col(&h, "im_gc")]).abs() < 1e-10);
    let g0 = num(&rows[0][col(&h, "re_gc")]);
    assert!(g0 > 0.0 && g0 < 1.0);
    assert!(manifest(dir.path(), "correlator")["derived"]["ground_state_fidelity"].as_f64().unwrap() > 0.9);
}

#[test]
fn kink_without_mass_is_linear() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "[lattice]\nL = 3\nm = 0.0\nbeta = 2.0\n[sim]\nlambda = 4\n[kink]\nground_source = \"ed\"\n";
    let out = sgsim(dir.path(), "kink", cfg, &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (h, rows) = read_csv(&dir.path().join("kink.csv"));
    assert_eq!(h, ["site", "mean_phi", "variance", "classical_phi", "beta", "lambda", "ground_source"]);
    let pi = std::f64::consts::PI;
    for (n, r) in rows.iter().enumerate() {
        assert!((num(&r[col(&h, "classical_phi")]) - pi * n as f64 / 2.0).abs() < 1e-12);
    }
}

#[test]
fn kink_reports_charge() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "[lattice]\nL = 3\nm = 1.0\nbeta = 2.0\n[sim]\nlambda = 5\n[qite]\ndtau = 0.5\nsteps = 6\n";
    assert!(sgsim(dir.path(), "kink", cfg, &[]).status.success());
    let m = manifest(dir.path(), "kink");
    let q = m["derived"]["charge_QITE_beta2_lambda5"].as_f64().unwrap();
    assert!((q - 1.0).abs() < 0.3, "{q}");
    assert!(m["derived"]["qite_fidelity_vs_ed_beta2_lambda5"].as_f64().is_some());
}

#[test]
fn gatecheck_rows_and_dump() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("step.circ");
    let cfg = format!("{SMALL}[gatecheck]\nlambda = 8\nt = [0.0, 0.2]\n");
    let out = sgsim(dir.path(), "gatecheck", &cfg, &["--dump-circuit", dump.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (h, rows) = read_csv(&dir.path().join("gatecheck.csv"));
    assert_eq!(h, ["t", "c", "order", "steps", "circuit_error"]);
    let err = |order: &str, t: f64| {
        rows.iter()
            .find(|r| r[col(&h, "order")] == order && num(&r[col(&h, "t")]) == t)
            .map(|r| num(&r[col(&h, "circuit_error")]))
            .unwrap()
    };
    assert!(err("first", 0.0) < 1e-12);
    assert!(err("second", 0.2) < err("first", 0.2));
    let circ: Circuit = fs::read_to_string(&dump).unwrap().parse().unwrap();
    assert_eq!(circ.count("CD"), 3);
}

#[test]
fn evolve_dump_is_compiled_step() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("step.circ");
    let cfg = format!("{SMALL}[sim]\nlambda = 4\nt_max = 0.5\nn_points = 2\ntrotter_steps = 1\ntrotter_order = \"first\"\nmode = \"compiled\"\n");
    assert!(sgsim(dir.path(), "evolve", &cfg, &["--dump-circuit", dump.to_str().unwrap()]).status.success());
    let circ: Circuit = fs::read_to_string(&dump).unwrap().parse().unwrap();
    assert_eq!(circ.shape().n_qubits(), 2);
    assert!(circ.count("SQZ") >= 2);
}
