//! Builds a synthetic embedding manifest on disk (four layers, two epochs,
//! two classes) and tracks E_alpha^0, E_alpha^1 and the PH-dimension across
//! it. Later layers are sampled from lower-dimensional cubes, so the
//! dimension estimate drops towards the output.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use topoprobe::cloud::{save_npy, PointCloud};
use topoprobe::trajectory::{layer_trajectory, EmbeddingManifest, Measure, TrajectoryConfig};

const WIDTH: usize = 16;

fn embedded_cube(n: usize, intrinsic: usize, seed: u64) -> PointCloud {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..n)
        .flat_map(|_| (0..WIDTH).map(|k| if k < intrinsic { rng.random() } else { 0.0 }).collect::<Vec<f64>>())
        .collect();
    PointCloud::from_flat(data, n, WIDTH).unwrap()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("topoprobe-trajectory-example");
    std::fs::create_dir_all(&dir)?;

    let mut entries = Vec::new();
    for (epoch, dims) in [(1, [12, 10, 8, 6]), (20, [10, 6, 4, 2])] {
        for (layer, intrinsic) in (1..).zip(dims) {
            for (c, class) in ["cat", "dog"].iter().enumerate() {
                let file = format!("e{epoch}_l{layer}_{class}.npy");
                save_npy(&embedded_cube(400, intrinsic, (epoch * 100 + layer * 10 + c) as u64), dir.join(&file))?;
                entries.push(json!({"layer_index": layer, "epoch": epoch, "class_label": class, "path": file}));
            }
        }
    }
    let manifest_path = dir.join("manifest.json");
    let manifest = json!({
        "manifest_version": 1,
        "model_name": "synthetic-mlp",
        "entries": entries,
        "accuracies": [
            {"epoch": 1, "train_accuracy": 0.41, "test_accuracy": 0.40},
            {"epoch": 20, "train_accuracy": 0.97, "test_accuracy": 0.88}
        ],
    });
    std::fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)?)?;

    let config = TrajectoryConfig {
        measures: vec![Measure::E_alpha_0, Measure::E_alpha_1, Measure::PhDim],
        ..TrajectoryConfig::default()
    };
    let start = Instant::now();
    let report = layer_trajectory(&EmbeddingManifest::load(&manifest_path)?, &config)?;
    println!(
        "{} cells x {} batches of {} points in {:.2?}",
        report.series.len() / 3,
        config.n_batches * 2,
        config.batch_size,
        start.elapsed()
    );
    report.write_csv(std::io::stdout().lock())?;

    let out = dir.join("report.json");
    std::fs::write(&out, serde_json::to_string_pretty(&report)?)?;
    println!("report written to {}", out.display());
    Ok(())
}
