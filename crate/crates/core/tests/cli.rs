//! End-to-end checks of the `cspace` binary: exit codes, output files, and
//! the determinism contract for metric CSVs.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cspace"))
}

fn scenarios() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios")
}

/// A small config for fast end-to-end runs.
fn small_config(dir: &Path) -> PathBuf {
    let path = dir.join("small.toml");
    std::fs::write(
        &path,
        format!(
            r#"
robot = "{s}/planar_2dof.toml"
scene = "{s}/planar_hulls.toml"
trials = 2
moves_per_trial = 2
dataset_size = 150
test_set_size = 200
query_reps = 200
seed = 9
start = [-2.0, 0.5]
goal = [2.0, -0.5]
grid_resolution = [48, 48]
"#,
            s = scenarios().display()
        ),
    )
    .unwrap();
    path
}

#[test]
fn no_args_prints_usage_and_exits_2() {
    let out = bin().output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("Usage"), "stderr was: {err}");
}

#[test]
fn unknown_subcommand_exits_2() {
    let out = bin().arg("frobnicate").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_config_exits_1() {
    let out = bin()
        .args(["collision-bench", "--config", "/nonexistent/cfg.toml"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}

#[test]
fn collision_bench_is_byte_deterministic_and_metric_algebra_holds() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let (out_a, out_b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&out_a, &out_b] {
        let st = bin()
            .args(["collision-bench", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(out)
            .output()
            .unwrap();
        assert!(st.status.success(), "{}", String::from_utf8_lossy(&st.stderr));
    }
    let a = std::fs::read(out_a.join("metrics.csv")).unwrap();
    let b = std::fs::read(out_b.join("metrics.csv")).unwrap();
    assert_eq!(a, b, "metrics.csv differs between identical runs");
    assert!(out_a.join("metrics_timing.csv").exists());

    // Reported ratios must equal ratios recomputed from the raw counts.
    let text = String::from_utf8(a).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert_eq!(
        header,
        "trial,move,checker,tp,fp,tn,fn,accuracy,tpr,tnr,support_count,converged"
    );
    let mut seen = 0;
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        let (tp, fp, tn, fn_): (usize, usize, usize, usize) = (
            f[3].parse().unwrap(),
            f[4].parse().unwrap(),
            f[5].parse().unwrap(),
            f[6].parse().unwrap(),
        );
        assert_eq!(tp + fp + tn + fn_, 200, "counts must add up to the test-set size");
        let acc: f64 = f[7].parse().unwrap();
        assert_eq!(acc, (tp + tn) as f64 / 200.0, "accuracy must be exact");
        seen += 1;
    }
    // 2 trials x 2 moves x 3 checkers.
    assert_eq!(seen, 12);
}

#[test]
fn cspace_image_roundtrips_through_a_pixmap_parser() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let out = dir.path().join("img");
    let st = bin()
        .args(["cspace-image", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(st.status.success(), "{}", String::from_utf8_lossy(&st.stderr));
    let (w, h, data) = cspace::bench::parse_ppm(&out.join("cspace.ppm")).unwrap();
    assert_eq!((w, h), (48, 48));
    assert_eq!(data.len(), 48 * 48 * 3);
}

#[test]
fn train_then_query_reports_both_labels() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let out = dir.path().join("models");
    let st = bin()
        .args(["train", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(st.status.success(), "{}", String::from_utf8_lossy(&st.stderr));
    assert!(out.join("model_fastron_fk.json").exists());

    let q = bin()
        .args(["query", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .args(["--joints", "-2.0,0.5"])
        .output()
        .unwrap();
    assert!(q.status.success(), "{}", String::from_utf8_lossy(&q.stderr));
    let text = String::from_utf8_lossy(&q.stdout);
    assert!(text.contains("proxy:") && text.contains("oracle:"), "stdout: {text}");
}
