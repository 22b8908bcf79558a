use std::path::Path;
use std::process::{Command, Output};

use nfb_core::linalg::pgm::load_pgm;
use nfb_core::linalg::GrayImage;
use serde_json::Value;

fn nfb(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nfb"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn value(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| {
            let mut it = l.split_whitespace();
            (it.next() == Some(key)).then(|| it.next().unwrap().parse().unwrap())
        })
        .unwrap_or_else(|| panic!("{key} missing from:\n{text}"))
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// CSV rows without `#` metadata lines.
fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn param_check_worked_example() {
    let dir = tempfile::tempdir().unwrap();
    let o = nfb(dir.path(), &["param-check", "--set", "param_check.beta=1", "--set", "param_check.zeta=1", "--set", "param_check.kappa1=0.5", "--set", "param_check.t=0.9"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let chi = value(&text, "chi");
    let tau = value(&text, "tau");
    let root17 = 17f64.sqrt();
    assert!((chi - 4.0 / (1.0 + root17)).abs() < 1e-12);
    assert!((tau - 2.0 / (1.0 + root17)).abs() < 1e-12);
    assert!((chi - 0.780776).abs() < 1e-6 && (tau - 0.390388).abs() < 1e-6);
    assert_eq!(text.matches("PASS").count(), 10);
    let doc = json(&dir.path().join("param_check.json"));
    assert_eq!(doc["feasible"], Value::Bool(true));
    assert_eq!(doc["meta"]["seed"], 0);
    assert!(doc["meta"]["config_hash"].as_str().unwrap().starts_with("sha256:"));
}

#[test]
fn param_check_lambda_at_psi_fails() {
    let dir = tempfile::tempdir().unwrap();
    let base = nfb(dir.path(), &["param-check"]);
    let psi = value(&stdout(&base), "psi");
    let o = nfb(dir.path(), &["param-check", "--set", &format!("param_check.lambda={psi}")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("FAIL  lambda in ]0, phi(alpha) psi["));
    assert!(stderr(&o).contains("lambda in ]0, phi(alpha) psi[ violated"), "{}", stderr(&o));
    let doc = json(&dir.path().join("param_check.json"));
    assert_eq!(doc["feasible"], Value::Bool(false));
    assert_eq!(doc["violated"], "lambda in ]0, phi(alpha) psi[");
}

#[test]
fn param_check_zero_zeta() {
    let dir = tempfile::tempdir().unwrap();
    let o = nfb(dir.path(), &["param-check", "--set", "param_check.zeta=0", "--set", "param_check.beta=1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(value(&stdout(&o), "eps_bar"), 1.0);
    assert_eq!(value(&stdout(&o), "chi"), 2.0);
}

#[test]
fn equiv_test_default() {
    let dir = tempfile::tempdir().unwrap();
    let o = nfb(dir.path(), &["equiv-test"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc = json(&dir.path().join("equiv.json"));
    assert_eq!(doc["iters"], 200);
    assert!(doc["max_deviation"].as_f64().unwrap() < 1e-9);
    assert_eq!(csv_rows(&dir.path().join("equiv.csv")).len(), 201);
}

#[test]
fn image_restore_improves_psnr() {
    let dir = tempfile::tempdir().unwrap();
    let o = nfb(dir.path(), &["image-restore", "--set", "restore.size=64", "--set", "restore.kernel=avg3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc = json(&dir.path().join("restore.json"));
    let s = &doc["summary"];
    assert!(s["psnr_restored"].as_f64().unwrap() > s["psnr_observed"].as_f64().unwrap());
    for name in ["original.pgm", "observed.pgm", "restored.pgm"] {
        let img: GrayImage<f64> = load_pgm(dir.path().join(name)).unwrap();
        assert_eq!((img.width(), img.height()), (64, 64));
    }
    let head = std::fs::read(dir.path().join("restored.pgm")).unwrap();
    assert!(String::from_utf8_lossy(&head[..200]).contains("# config_hash: sha256:"));
}

#[test]
fn qp_bench_zero_inertia_matches_baseline() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bench.toml");
    std::fs::write(
        &cfg,
        r#"
seed = 11
[qp_bench]
dims = [[30, 15, 4]]
realizations = 2
max_iters = 100000

[[qp_bench.variants]]
label = "baseline"
alpha = "bar:0"
lambda = 1
t = 0.999

[[qp_bench.variants]]
label = "const0"
alpha = "const:0"
lambda = 1
t = 0.999

[[qp_bench.variants]]
label = "dec2"
alpha = "dec2"
lambda = 1
t = 0.999
"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = nfb(&out, &["qp-bench", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = csv_rows(&out.join("qp_bench.csv"));
    assert_eq!(rows[0][0], "N");
    assert_eq!(rows.len(), 4);
    let (base, c0) = (&rows[1], &rows[2]);
    assert_eq!(base[7..10], c0[7..10]);
    assert_eq!(base[10], c0[10]);
    assert_eq!(base[12], c0[12]);
    assert_eq!(rows[3][8], "0");

    // Re-running from the written config reproduces the iteration counts and the hash.
    let again = dir.path().join("again");
    let o = nfb(&again, &["qp-bench", "--config", out.join("qp_bench.config.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows2 = csv_rows(&again.join("qp_bench.csv"));
    for (a, b) in rows.iter().zip(&rows2) {
        assert_eq!(a[..11], b[..11]);
        assert_eq!(a[12], b[12]);
    }
    let hash = |p: &Path| {
        std::fs::read_to_string(p).unwrap().lines().find(|l| l.starts_with("# config_hash")).unwrap().to_string()
    };
    assert_eq!(hash(&out.join("qp_bench.csv")), hash(&again.join("qp_bench.csv")));
}

#[test]
fn qp_bench_rejects_empty_dimension() {
    let dir = tempfile::tempdir().unwrap();
    let o = nfb(dir.path(), &["qp-bench", "--set", "qp_bench.dims=[[20,10,0]]"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn sweep_reports_every_cell() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["sweep", "--set", "sweep.alpha=[0.0, 0.3, 0.6]", "--set", "sweep.lambda=[0.5, 1.5]", "--set", "sweep.kappa2=[0.9]"];
    let o = nfb(dir.path(), &args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = csv_rows(&dir.path().join("sweep.csv"));
    assert_eq!(rows.len(), 1 + 3 * 2 * 2);
    let feasible = rows[1..].iter().filter(|r| r[9] == "true").count();
    assert!(feasible > 0 && feasible < 12);
    for r in &rows[1..] {
        if r[9] == "true" {
            assert_eq!(r[11], "converged");
        } else {
            assert!(r[11].is_empty());
        }
    }
    let again = tempfile::tempdir().unwrap();
    nfb(again.path(), &args);
    let rows2 = csv_rows(&again.path().join("sweep.csv"));
    for (a, b) in rows.iter().zip(&rows2) {
        assert_eq!(a[..14], b[..14]);
    }
}

#[test]
fn exit_codes_and_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let nested = dir.path().join("a/b/c");
    let o = nfb(&nested, &["param-check", "--config", "/nonexistent/nfb.toml"]);
    assert_eq!(o.status.code(), Some(4));
    let o = nfb(&nested, &["param-check", "--set", "param_check.bogus=1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bogus"));
    let o = nfb(&nested, &["param-check", "--set", "param_check.kappa1=1.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("FAIL  parameter in its open domain"));
    let o = nfb(&nested, &["image-restore", "--set", "restore.image=/nonexistent.pgm"]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
    let o = nfb(&nested, &["param-check"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(nested.join("param_check.json").exists());
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let o = nfb(dir.path(), &["equiv-test", "--seed", "5", "--set", "seed=2", "--set", "equiv.iters=20"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(json(&dir.path().join("equiv.json"))["meta"]["seed"], 5);
    let o = nfb(dir.path(), &["equiv-test", "--set", "seed=2", "--set", "equiv.iters=20"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(json(&dir.path().join("equiv.json"))["meta"]["seed"], 2);
}
