use std::path::Path;
use std::process::Command;

use flowlab_cli::config::ExperimentConfig;

fn flowlab(out: &Path, args: &[&str]) -> (i32, serde_json::Value) {
    let o = Command::new(env!("CARGO_BIN_EXE_flowlab"))
        .env("FLOWLAB_OUT", out)
        .args(args)
        .output()
        .expect("binary runs");
    let v = serde_json::from_slice(&o.stdout).unwrap_or(serde_json::Value::Null);
    (o.status.code().unwrap_or(-1), v)
}

#[test]
fn bowl_writes_outputs_under_env_dir() {
    let dir = tempfile::tempdir().unwrap();
    let (code, v) = flowlab(dir.path(), &["bowl", "--speed", "bh", "--n", "3"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["passed"], true);
    for f in ["bowl.csv", "fit.json", "summary.json", "config.toml"] {
        assert!(dir.path().join("bowl").join(f).exists(), "{f} missing");
    }
    let cfg = ExperimentConfig::load(&dir.path().join("bowl/config.toml")).unwrap();
    assert_eq!(cfg.speed_label(), "bh_n3");
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::default();
    cfg.solver.a = vec![30.0];
    let path = dir.path().join("exp.toml");
    std::fs::write(&path, cfg.to_toml().unwrap()).unwrap();
    let p = path.to_str().unwrap();
    let (code, v) = flowlab(dir.path(), &["--config", p, "shrinker", "--a", "25,40"]);
    assert_eq!(code, 0, "{v}");
    let files: Vec<String> = serde_json::from_value(v["files"].clone()).unwrap();
    assert!(files.iter().any(|f| f.ends_with("psi_a40.csv")));
    assert!(!files.iter().any(|f| f.ends_with("psi_a30.csv")));
}

#[test]
fn bad_input_gives_error_json_and_nonzero_exit() {
    let dir = tempfile::tempdir().unwrap();
    let (code, v) = flowlab(dir.path(), &["bowl", "--speed", "sigma_ratio", "--n", "3", "--k", "4"]);
    assert_ne!(code, 0);
    assert!(v["error"]["message"].as_str().unwrap().contains("invalid"));
    let (code, _) = flowlab(dir.path(), &["spectral", "--seed-mode", "k=x"]);
    assert_ne!(code, 0);
}

fn zeta_at(csv: &Path, rho: f64) -> f64 {
    let text = std::fs::read_to_string(csv).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("rho"))
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    let i = rows.iter().position(|r| r[0] >= rho).unwrap();
    let (a, b) = (&rows[i - 1], &rows[i]);
    flowlab::interp::hermite(a[0], b[0], a[1], b[1], a[2], b[2], rho).0
}

#[test]
fn bowl_value_is_stable_under_tolerance() {
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    let (c1, _) = flowlab(d1.path(), &["bowl", "--rho-max", "20", "--tol", "1e-10"]);
    let (c2, _) = flowlab(d2.path(), &["bowl", "--rho-max", "20", "--tol", "1e-8"]);
    assert_eq!((c1, c2), (0, 0));
    let z1 = zeta_at(&d1.path().join("bowl/bowl.csv"), 10.0);
    let z2 = zeta_at(&d2.path().join("bowl/bowl.csv"), 10.0);
    assert_eq!(format!("{z1:.6e}"), format!("{z2:.6e}"));
}

#[test]
fn degenerate_pair_speed_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let (code, v) = flowlab(dir.path(), &["bowl", "--speed", "bh", "--n", "2"]);
    assert_ne!(code, 0);
    assert!(v["error"].is_object());
}

#[test]
fn second_mode_seed_is_neutral_dominated() {
    let dir = tempfile::tempdir().unwrap();
    let (code, v) = flowlab(dir.path(), &["spectral", "--seed-mode", "k=2", "--windows", "10"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["summary"]["verdict"], "neutral-dominated");
}

#[test]
fn reruns_write_identical_csv() {
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    let args = ["shrinker", "--a", "25,50"];
    assert_eq!(flowlab(d1.path(), &args).0, 0);
    let o = Command::new(env!("CARGO_BIN_EXE_flowlab"))
        .env("FLOWLAB_OUT", d2.path())
        .env("RAYON_NUM_THREADS", "1")
        .args(args)
        .output()
        .unwrap();
    assert!(o.status.success());
    for f in ["psi_a25.csv", "psi_a50.csv", "v_a50.csv"] {
        let a = std::fs::read(d1.path().join("shrinker").join(f)).unwrap();
        let b = std::fs::read(d2.path().join("shrinker").join(f)).unwrap();
        assert!(a == b, "{f} differs");
    }
}

#[test]
fn verify_json_lists_all_criteria() {
    let dir = tempfile::tempdir().unwrap();
    let (code, v) = flowlab(dir.path(), &["verify", "--json"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["criteria"].as_array().unwrap().len(), 12);
    assert_eq!(v["passed"], true);
}
