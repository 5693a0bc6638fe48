//! End-to-end tests driving the compiled binary.

use idem::io::save_cloud;
use idem::{Point3d, PointCloudD, RandomSource};
use rand_distr::{Distribution, Uniform};
use std::path::Path;
use std::process::{Command, Output};
use tempfile::TempDir;

fn idem_bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_idem"))
}

/// A seeded blob of points spread through a box, saved as a .ply file.
fn write_blob(dir: &Path, name: &str, n: usize, seed: u64) -> std::path::PathBuf {
    let mut rng = RandomSource::new(seed).rng();
    let coord = Uniform::new(-10.0, 10.0);
    let points = (0..n)
        .map(|_| {
            Point3d::new(
                coord.sample(&mut rng),
                coord.sample(&mut rng),
                coord.sample(&mut rng),
            )
        })
        .collect();
    let cloud = PointCloudD::new(points, name).unwrap();
    let path = dir.join(format!("{name}.ply"));
    save_cloud(&cloud, &path).unwrap();
    path
}

fn stdout_json(output: &Output) -> serde_json::Value {
    serde_json::from_slice(&output.stdout).expect("stdout should be JSON")
}

#[test]
fn metric_on_identical_files_reports_exact_zero() {
    let dir = TempDir::new().unwrap();
    let cloud = write_blob(dir.path(), "blob", 120, 7);

    let output = idem_bin().arg("metric").arg(&cloud).arg(&cloud).output().unwrap();
    assert!(output.status.success());

    let doc = stdout_json(&output);
    assert_eq!(doc["fixed"]["points"], 120);
    assert_eq!(doc["moving"]["points"], 120);
    assert_eq!(doc["report"]["q_tot"], 0.0);
    assert_eq!(doc["report"]["rmse_1to2"], 0.0);
}

#[test]
fn metric_missing_file_exits_2_and_names_the_path() {
    let dir = TempDir::new().unwrap();
    let cloud = write_blob(dir.path(), "blob", 20, 7);
    let missing = dir.path().join("absent.ply");

    let output = idem_bin().arg("metric").arg(&missing).arg(&cloud).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("absent.ply"), "stderr was: {stderr}");
}

#[test]
fn degrade_downsample_is_reproducible_per_seed() {
    let dir = TempDir::new().unwrap();
    let input = write_blob(dir.path(), "blob", 200, 3);
    let out_a = dir.path().join("a.ply");
    let out_b = dir.path().join("b.ply");
    let out_c = dir.path().join("c.ply");

    for (out, seed) in [(&out_a, "5"), (&out_b, "5"), (&out_c, "6")] {
        let output = idem_bin()
            .args(["--seed", seed, "degrade", "--kind", "downsample", "--fraction", "0.5"])
            .arg("--in")
            .arg(&input)
            .arg("--out")
            .arg(out)
            .output()
            .unwrap();
        assert!(output.status.success());
    }

    let a = std::fs::read(&out_a).unwrap();
    let b = std::fs::read(&out_b).unwrap();
    let c = std::fs::read(&out_c).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);

    let cloud: PointCloudD = idem::io::load_cloud(&out_a).unwrap();
    assert_eq!(cloud.len(), 100);
}

#[test]
fn degrade_without_its_parameter_exits_3() {
    let dir = TempDir::new().unwrap();
    let input = write_blob(dir.path(), "blob", 20, 3);

    let output = idem_bin()
        .args(["degrade", "--kind", "downsample"])
        .arg("--in")
        .arg(&input)
        .arg("--out")
        .arg(dir.path().join("out.ply"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("--fraction"), "stderr was: {stderr}");
}

#[test]
fn sweep_writes_grids_images_summary_and_metadata() {
    let dir = TempDir::new().unwrap();
    let cloud = write_blob(dir.path(), "blob", 120, 7);
    let out = dir.path().join("sweep");

    let output = idem_bin()
        .arg("sweep")
        .arg(&cloud)
        .arg(&cloud)
        .args(["--range", "2", "--step", "1", "--metrics", "qtot,rmse-12"])
        .arg("--out-dir")
        .arg(&out)
        .output()
        .unwrap();
    assert!(output.status.success());

    for name in ["qtot.csv", "qtot.pgm", "rmse-12.csv", "summary.json", "run-metadata.json"] {
        assert!(out.join(name).exists(), "missing {name}");
    }

    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    let qtot = &summary["metrics"][0];
    assert_eq!(qtot["metric"], "qtot");
    assert_eq!(qtot["argmin_error"], 0.0);
}

#[test]
fn register_recovers_a_small_translation() {
    let dir = TempDir::new().unwrap();
    let fixed = write_blob(dir.path(), "fixed", 150, 11);

    let cloud: PointCloudD = idem::io::load_cloud(&fixed).unwrap();
    let shift = idem::RigidTransformD::translation_only(Point3d::new(0.4, 0.0, 0.0));
    let moved = idem::transform::apply_transform(&cloud, &shift).with_label("moved");
    let moving = dir.path().join("moved.ply");
    save_cloud(&moved, &moving).unwrap();

    let out = dir.path().join("reg");
    let output = idem_bin()
        .arg("register")
        .arg(&fixed)
        .arg(&moving)
        .args(["--roi-translation", "2", "--roi-rotation", "5"])
        .arg("--out-dir")
        .arg(&out)
        .output()
        .unwrap();
    assert!(output.status.success());

    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("transform.json")).unwrap())
            .unwrap();
    assert_eq!(doc["converged"], true);
    let tx = doc["matrix"][0][3].as_f64().unwrap();
    assert!((tx + 0.4).abs() < 0.05, "recovered tx {tx}");
    assert!(out.join("trace.csv").exists());
}

#[test]
fn sensitivity_writes_one_row_per_sigma() {
    let dir = TempDir::new().unwrap();
    let cloud = write_blob(dir.path(), "blob", 80, 7);
    let out = dir.path().join("sens");

    let output = idem_bin()
        .arg("sensitivity")
        .arg(&cloud)
        .args(["--sigma", "0.05,0.1", "--trials", "3"])
        .arg("--out-dir")
        .arg(&out)
        .output()
        .unwrap();
    assert!(output.status.success());

    let csv = std::fs::read_to_string(out.join("sensitivity.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0], "sigma,mean_qtot,std_qtot,cv,trials,negative_samples");
    assert!(lines[1].starts_with("0.05,"));
    assert!(lines[2].starts_with("0.1,"));
}

fn write_manifest(dir: &Path, expected_qtot_error: f64) -> std::path::PathBuf {
    write_blob(dir, "pair", 120, 7);
    let path = dir.join("mini.manifest");
    std::fs::write(
        &path,
        format!(
            r#"
[defaults]
a = 1.0
range = 2.0
step = 1.0
axes = "x"
mode = "translate-axis"

[[scenario]]
id = "self"
description = "cloud against itself"
fixed = {{ file = "pair.ply" }}
moving = {{ file = "pair.ply" }}

[scenario.expect]
qtot_error = {{ equals = {expected_qtot_error} }}
"#
        ),
    )
    .unwrap();
    path
}

#[test]
fn reproduce_passing_manifest_exits_0() {
    let dir = TempDir::new().unwrap();
    let manifest = write_manifest(dir.path(), 0.0);
    let out = dir.path().join("results");

    let output = idem_bin()
        .arg("reproduce")
        .arg(&manifest)
        .arg("--out-dir")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("PASS"), "stdout was: {stdout}");
    assert!(out.join("table.csv").exists());
    assert!(out.join("run-metadata.json").exists());
}

#[test]
fn reproduce_failing_manifest_exits_1_but_still_writes_table() {
    let dir = TempDir::new().unwrap();
    let manifest = write_manifest(dir.path(), 42.0);
    let out = dir.path().join("results");

    let output = idem_bin()
        .arg("reproduce")
        .arg(&manifest)
        .arg("--out-dir")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("FAIL"), "stdout was: {stdout}");
    assert!(out.join("table.csv").exists());
}

#[test]
fn reproduce_with_jobs_matches_sequential_table() {
    let dir = TempDir::new().unwrap();
    let manifest = write_manifest(dir.path(), 0.0);
    let out_seq = dir.path().join("seq");
    let out_par = dir.path().join("par");

    for (out, jobs) in [(&out_seq, "0"), (&out_par, "2")] {
        let output = idem_bin()
            .args(["--jobs", jobs, "reproduce"])
            .arg(&manifest)
            .arg("--out-dir")
            .arg(out)
            .output()
            .unwrap();
        assert!(output.status.success());
    }

    let seq = std::fs::read_to_string(out_seq.join("table.csv")).unwrap();
    let par = std::fs::read_to_string(out_par.join("table.csv")).unwrap();
    assert_eq!(seq, par);
}
