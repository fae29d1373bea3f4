//! Acceptance suite. Each test prints one `[PASS]`/`[FAIL]` line for its
//! criterion (visible with `--nocapture`) and then asserts it.

mod common;

use std::path::{Path, PathBuf};
use std::process::Command;

use common::*;
use rand::Rng;
use serde_json::json;
use topoprobe::cloud::{pairwise_distances, save_npy, write_csv, PointCloud};
use topoprobe::descriptors::lifespan_sum;
use topoprobe::persistence::{brute_force_persistence, mst_h0, vr_persistence, Threshold};
use topoprobe::phdim::{estimate_phdim, PhDimConfig};
use topoprobe::classical_id::{corr_dim, mle_id, two_nn};
use topoprobe::trajectory::{
    gengap_correlate, layer_trajectory, pearson, EmbeddingManifest, Measure, ModelList,
    TrajectoryConfig,
};

const ENDPOINT_TOL: f64 = 1e-9;
const MST_REL_TOL: f64 = 1e-9;
const SQUARE_TOL: f64 = 1e-9;
const MIN_R_SQUARED: f64 = 0.95;
const INVARIANCE_TOL: f64 = 1e-6;
const ID_REL_TOL: f64 = 0.35;
const PEARSON_TOL: f64 = 1e-12;
const GENGAP_MAX_R: f64 = -0.99;

#[test]
fn criterion_1_persistence_oracle() {
    let mut r = rng(1);
    let mut mismatches = Vec::new();
    for case in 0..200 {
        let n = r.random_range(1..=10);
        let d = r.random_range(1..=4);
        let cloud = uniform_cube(n, d, r.random());
        let dist = pairwise_distances(&cloud);
        let fast = vr_persistence(&dist, 1, Threshold::Auto).unwrap();
        let slow = brute_force_persistence(&dist, 1).unwrap();
        if !multisets_match(&fast, &slow, ENDPOINT_TOL) {
            mismatches.push(case);
        }
    }
    let pass = mismatches.is_empty();
    report(1, "persistence oracle equivalence", pass, format!("200 clouds, mismatches {mismatches:?}"));
    assert!(pass);
}

#[test]
fn criterion_2_mst_identity() {
    let mut r = rng(2);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let n = r.random_range(2..=500);
        let d = r.random_range(1..=16);
        let cloud = uniform_cube(n, d, r.random());
        let e = lifespan_sum(&mst_h0(&pairwise_distances(&cloud)), 0, 1.0).unwrap().value;
        let oracle = prim_mst_length(&cloud);
        worst = worst.max((e - oracle).abs() / oracle);
    }
    let pass = worst <= MST_REL_TOL;
    report(2, "MST identity", pass, format!("50 clouds, worst relative error {worst:.3e}"));
    assert!(pass);
}

#[test]
fn criterion_3_square_barcode() {
    let dist = pairwise_distances(&square());
    let bc = vr_persistence(&dist, 1, Threshold::Auto).unwrap();
    let h0: Vec<f64> = bc.finite(0).map(|iv| iv.death).collect();
    let h1: Vec<(f64, f64)> = bc.degree(1).map(|iv| (iv.birth, iv.death)).collect();
    let e0 = lifespan_sum(&bc, 0, 1.0).unwrap().value;
    let e1 = lifespan_sum(&bc, 1, 1.0).unwrap().value;
    let sqrt2 = 2f64.sqrt();
    let pass = h0.len() == 3
        && h0.iter().all(|d| (d - 1.0).abs() <= SQUARE_TOL)
        && h1.len() == 1
        && (h1[0].0 - 1.0).abs() <= SQUARE_TOL
        && (h1[0].1 - sqrt2).abs() <= SQUARE_TOL
        && (e0 - 3.0).abs() <= SQUARE_TOL
        && (e1 - (sqrt2 - 1.0)).abs() <= SQUARE_TOL;
    report(3, "unit-square barcode", pass, format!("H0 {h0:?}, H1 {h1:?}, E0 {e0}, E1 {e1}"));
    assert!(pass);
}

#[test]
fn criterion_4_phdim_recovery() {
    let segment = uniform_cube(1000, 1, 0);
    let cases: [(&str, PointCloud, f64, f64); 4] = [
        ("plane", uniform_cube(2000, 2, 0), 1.75, 2.25),
        ("cube", uniform_cube(2000, 3, 0), 2.5, 3.5),
        ("circle", unit_circle(1000, 0), 0.85, 1.20),
        ("segment", segment, 0.85, 1.20),
    ];
    let mut all = true;
    let mut details = Vec::new();
    for (name, cloud, lo, hi) in &cases {
        let est = estimate_phdim(cloud, &PhDimConfig::with_seed(0)).unwrap();
        let ok = (*lo..=*hi).contains(&est.phdim) && est.r_squared >= MIN_R_SQUARED;
        all &= ok;
        details.push(format!(
            "{name} {:.4} in [{lo}, {hi}] r2 {:.4}{}",
            est.phdim,
            est.r_squared,
            if ok { "" } else { " (out)" }
        ));
    }
    report(4, "PH-dim recovery", all, details.join("; "));
    assert!(all);
}

#[test]
fn criterion_5_invariance() {
    let cfg = PhDimConfig::with_seed(0);
    let mut worst = 0.0f64;
    for (cloud, d) in [(uniform_cube(1000, 2, 5), 2), (uniform_cube(1000, 3, 6), 3)] {
        let base = estimate_phdim(&cloud, &cfg).unwrap().phdim;
        for s in [0.1, 10.0] {
            let scaled = estimate_phdim(&cloud.scaled(s).unwrap(), &cfg).unwrap().phdim;
            worst = worst.max((scaled - base).abs());
        }
        let moved = rotate_translate(&cloud, &random_rotation(d, 7), 0.0);
        let rotated = estimate_phdim(&moved, &cfg).unwrap().phdim;
        worst = worst.max((rotated - base).abs());
    }
    let pass = worst < INVARIANCE_TOL;
    report(5, "scale and rotation invariance", pass, format!("max |delta phdim| {worst:.3e}"));
    assert!(pass);
}

#[test]
fn criterion_6_classical_estimators() {
    let mut all = true;
    let mut details = Vec::new();
    for d in 1..=3 {
        let cloud = uniform_cube(1000, d, 100 + d as u64);
        let df = d as f64;
        for (name, v) in [
            ("two_nn", two_nn(&cloud, 0.1).unwrap().value),
            ("mle", mle_id(&cloud, 20).unwrap().value),
            ("corr_dim", corr_dim(&cloud, 100).unwrap().value),
        ] {
            let ok = (v - df).abs() <= ID_REL_TOL * df;
            all &= ok;
            details.push(format!("d={d} {name} {v:.3}{}", if ok { "" } else { " (out)" }));
        }
    }
    report(6, "classical estimators within 35%", all, details.join("; "));
    assert!(all);
}

fn write_manifest(
    dir: &Path,
    name: &str,
    layers: &[(usize, &PointCloud)],
    test_accuracy: f64,
) -> PathBuf {
    let entries: Vec<_> = layers
        .iter()
        .map(|(layer, cloud)| {
            let file = format!("{name}_l{layer}.npy");
            save_npy(cloud, dir.join(&file)).unwrap();
            json!({"layer_index": layer, "epoch": 3, "class_label": "a", "path": file})
        })
        .collect();
    let manifest = json!({
        "manifest_version": 1,
        "model_name": name,
        "entries": entries,
        "accuracies": [{"epoch": 3, "train_accuracy": 1.0, "test_accuracy": test_accuracy}],
    });
    let path = dir.join(format!("{name}.json"));
    std::fs::write(&path, serde_json::to_string_pretty(&manifest).unwrap()).unwrap();
    path
}

#[test]
fn criterion_7_correlation_contract() {
    let x: Vec<f64> = (0..20).map(|i| i as f64 * 0.37 - 2.0).collect();
    let up: Vec<f64> = x.iter().map(|v| 3.5 * v + 1.25).collect();
    let down: Vec<f64> = x.iter().map(|v| -0.75 * v + 4.0).collect();
    let r_up = pearson(&x, &up).unwrap().r;
    let r_down = pearson(&x, &down).unwrap().r;
    let exact = (r_up - 1.0).abs() <= PEARSON_TOL && (r_down + 1.0).abs() <= PEARSON_TOL;

    let dir = tempfile::tempdir().unwrap();
    let hidden = uniform_cube(400, 6, 70);
    let base = uniform_cube(400, 3, 71);
    let config = TrajectoryConfig { batch_size: 200, n_batches: 3, ..TrajectoryConfig::default() };
    let mut models = Vec::new();
    for k in 0..5 {
        let acc = 0.70 + 0.05 * k as f64;
        let last = base.scaled(2.0 - acc * acc).unwrap();
        let name = format!("model{k}");
        let manifest = write_manifest(dir.path(), &name, &[(1, &hidden), (2, &last)], acc);
        let traj = layer_trajectory(&EmbeddingManifest::load(&manifest).unwrap(), &config).unwrap();
        let report_path = dir.path().join(format!("{name}_report.json"));
        std::fs::write(&report_path, serde_json::to_string(&traj).unwrap()).unwrap();
        models.push(json!({"report": report_path.file_name().unwrap().to_str().unwrap()}));
    }
    let list = dir.path().join("models.json");
    std::fs::write(&list, json!({"models": models}).to_string()).unwrap();
    let points = ModelList::load_models(&list, Measure::E_alpha_0).unwrap();
    let gengap = gengap_correlate(&points, Measure::E_alpha_0).unwrap();

    let pass = exact && gengap.r <= GENGAP_MAX_R && gengap.n_pairs == 5;
    report(
        7,
        "correlation contract",
        pass,
        format!("r(+) {r_up}, r(-) {r_down}, gengap r {:.6} over {} models", gengap.r, gengap.n_pairs),
    );
    assert!(pass);
}

#[test]
fn criterion_8_trajectory_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let mut entries = Vec::new();
    for (layer, intrinsic) in [(1usize, 8usize), (2, 4), (3, 2)] {
        for class in ["cat", "dog"] {
            let seed = 800 + layer as u64 * 10 + class.len() as u64 + (class == "dog") as u64;
            let cloud = padded_cube(1000, intrinsic, 8, seed);
            let file = format!("l{layer}_{class}.npy");
            save_npy(&cloud, dir.path().join(&file)).unwrap();
            entries.push(json!({"layer_index": layer, "epoch": 0, "class_label": class, "path": file}));
        }
    }
    let manifest_path = dir.path().join("manifest.json");
    let manifest = json!({"manifest_version": 1, "model_name": "synthetic", "entries": entries});
    std::fs::write(&manifest_path, manifest.to_string()).unwrap();

    let config = TrajectoryConfig { measures: vec![Measure::PhDim], ..TrajectoryConfig::default() };
    let traj = layer_trajectory(&EmbeddingManifest::load(&manifest_path).unwrap(), &config).unwrap();
    let means: Vec<f64> = traj.series.iter().map(|row| row.mean).collect();
    let pass = means.len() == 3 && means.windows(2).all(|w| w[0] > w[1]);
    report(8, "trajectory phdim decreases 8 -> 4 -> 2", pass, format!("layer means {means:.4?}"));
    assert!(pass);
}

fn run_cli(args: &[&str], threads: &str, out: &Path) -> std::process::Output {
    let output = Command::new(env!("CARGO_BIN_EXE_topoprobe"))
        .args(args)
        .args(["--threads", threads, "--output"])
        .arg(out)
        .env_remove("TOPOPROBE_THREADS")
        .output()
        .expect("spawn topoprobe");
    assert!(
        output.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    output
}

#[test]
fn criterion_9_cli_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name);
    let small = uniform_cube(60, 3, 90);
    let plane = uniform_cube(500, 2, 91);
    write_csv(&small, std::fs::File::create(p("small.csv")).unwrap()).unwrap();
    save_npy(&plane, p("plane.npy")).unwrap();

    let mut reports = Vec::new();
    for k in 0..3 {
        let acc = 0.6 + 0.1 * k as f64;
        let name = format!("m{k}");
        let last = padded_cube(300, 2, 4, 92 + k).scaled(1.5 - acc).unwrap();
        write_manifest(dir.path(), &name, &[(1, &uniform_cube(300, 4, 95)), (2, &last)], acc);
        reports.push(name);
    }
    let traj_args = |name: &str| {
        vec![
            "trajectory".to_string(),
            "--manifest".into(),
            p(&format!("{name}.json")).display().to_string(),
            "--measures".into(),
            "E_alpha_0,E_alpha_1,phdim".into(),
            "--batch-size".into(),
            "120".into(),
            "--n-batches".into(),
            "3".into(),
        ]
    };
    for name in &reports {
        let args = traj_args(name);
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        run_cli(&args, "2", &p(&format!("{name}_report.json")));
    }
    let models = json!({"models": reports.iter().map(|n| json!({"report": format!("{n}_report.json")})).collect::<Vec<_>>()});
    std::fs::write(p("models.json"), models.to_string()).unwrap();

    let small_s = p("small.csv").display().to_string();
    let plane_s = p("plane.npy").display().to_string();
    let models_s = p("models.json").display().to_string();
    let traj = traj_args("m0");
    let mut commands: Vec<Vec<String>> = vec![
        vec!["persist".into(), "-i".into(), small_s.clone()],
        vec!["descriptor".into(), "-i".into(), small_s.clone(), "--degree".into(), "1".into()],
        vec!["phdim".into(), "-i".into(), plane_s.clone()],
        vec!["id".into(), "-i".into(), plane_s.clone()],
        traj,
        vec!["correlate".into(), "-i".into(), models_s, "--measure".into(), "phdim".into()],
    ];
    let csv_variants: Vec<Vec<String>> = commands
        .iter()
        .map(|c| c.iter().cloned().chain(["--format".into(), "csv".into()]).collect())
        .collect();
    commands.extend(csv_variants);

    let mut failures = Vec::new();
    for (k, cmd) in commands.iter().enumerate() {
        let args: Vec<&str> = cmd.iter().map(String::as_str).collect();
        let runs: Vec<Vec<u8>> = [("1", "a"), ("4", "b"), ("4", "c"), ("0", "d")]
            .iter()
            .map(|(threads, tag)| {
                let out = p(&format!("out{k}{tag}"));
                run_cli(&args, threads, &out);
                std::fs::read(&out).unwrap()
            })
            .collect();
        if runs.iter().any(|r| r != &runs[0]) || runs[0].is_empty() {
            failures.push(cmd.join(" "));
        }
    }
    let pass = failures.is_empty();
    report(
        9,
        "CLI determinism across runs and thread counts",
        pass,
        format!("{} invocations x 4 runs, differing: {failures:?}", commands.len()),
    );
    assert!(pass);
}
