//! Runs the binary on the bundled configs and checks exit codes and outputs.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn scratch(tag: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("pcurv-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    d
}

fn pcurv(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pcurv")).args(args).arg("--out").arg(out).output().expect("binary runs")
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn annulus_run_exists_and_writes_the_factor() {
    let out = scratch("annulus");
    let o = pcurv(&["run", "--config", config("annulus_pc0.toml").to_str().unwrap()], &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&out.join("verdict.json"));
    assert_eq!(v["verdict"], "Exists");
    assert_eq!(v["report"]["status"], "Converged");
    let u = std::fs::read_to_string(out.join("fields/u.csv")).unwrap();
    assert!(u.starts_with("vertex_index,value"));
    assert_eq!(u.lines().count(), 1 + v["input"]["vertices"].as_u64().unwrap() as usize);
    assert_eq!(json(&out.join("solve_report.json"))["u"], "fields/u.csv");
    std::fs::remove_dir_all(&out).unwrap();
}

#[test]
fn affine_disk_target_is_obstructed() {
    let out = scratch("disk");
    let o = pcurv(&["run", "--config", config("disk_affine.toml").to_str().unwrap()], &out);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&out.join("verdict.json"));
    assert_eq!(v["verdict"], "NotExists");
    assert!(v["theorem"].as_str().unwrap().contains("Section 4.2.3"));
    assert!(v["witnesses"]["kazdan_warner_escobar"].as_f64().unwrap().abs() > 1.0);
    std::fs::remove_dir_all(&out).unwrap();
}

#[test]
fn missing_mesh_file_exits_with_two() {
    let dir = scratch("missing");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("bad.toml");
    std::fs::write(&cfg, "problem = \"PC\"\ntarget = \"1\"\n[mesh]\npath = \"absent.off\"\n").unwrap();
    let o = pcurv(&["run", "--config", cfg.to_str().unwrap()], &dir.join("out"));
    assert_eq!(o.status.code(), Some(2));
    let e = json(&dir.join("out/error.json"));
    assert_eq!(e["exit_code"], 2);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn bad_expression_and_missing_config_exit_with_two() {
    let dir = scratch("expr");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("expr.toml");
    std::fs::write(&cfg, "problem = \"PC0\"\ntarget = \"sin(\"\n[mesh]\ngenerator = \"disk\"\nresolution = 3\n").unwrap();
    let o = pcurv(&["check", "--config", cfg.to_str().unwrap()], &dir.join("out"));
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("offset 4"));
    let o = pcurv(&["run", "--config", dir.join("nope.toml").to_str().unwrap()], &dir.join("out"));
    assert_eq!(o.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn inapplicable_solver_is_a_solver_fault() {
    let out = scratch("fault");
    let o = pcurv(&["solve", "--config", config("annulus_pc0.toml").to_str().unwrap(), "--method", "subcritical"], &out);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(json(&out.join("error.json"))["kind"], "solver");
    std::fs::remove_dir_all(&out).unwrap();
}

#[test]
fn seeded_jitter_is_reproducible() {
    let dir = scratch("jitter");
    let run = |seed: &str, name: &str| {
        let path = dir.join(name);
        let o = pcurv(&["mesh", "gen", "disk", "--resolution", "4", "--jitter", "0.2", "--seed", seed], &path);
        assert_eq!(o.status.code(), Some(0));
        std::fs::read_to_string(path).unwrap()
    };
    let (a, b, c) = (run("5", "a.off"), run("5", "b.off"), run("6", "c.off"));
    assert_eq!(a, b);
    assert_ne!(a, c);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn classify_eigen_and_matrix_dump() {
    let out = scratch("classify");
    let cfg = config("ball_affine.toml");
    let o = pcurv(&["classify", "--config", cfg.to_str().unwrap(), "--resolution", "3", "--dump-matrices"], &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let c = json(&out.join("classification.json"));
    assert_eq!(c["lambda1"]["sign_class"], "POS");
    assert_eq!(c["classes_agree"], true);
    let mtx = std::fs::read_to_string(out.join("matrices/stiffness.mtx")).unwrap();
    assert!(mtx.starts_with("%%MatrixMarket matrix coordinate real general"));
    let o = pcurv(&["eigen", "--config", cfg.to_str().unwrap(), "--resolution", "3", "--kind", "sigma1"], &out);
    assert_eq!(o.status.code(), Some(0));
    assert!((json(&out.join("eigen.json"))["value"].as_f64().unwrap() - 1.0).abs() < 1e-8);
    assert!(out.join("fields/eigenfunction.csv").is_file());
    std::fs::remove_dir_all(&out).unwrap();
}
