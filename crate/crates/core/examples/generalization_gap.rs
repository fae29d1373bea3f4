//! Correlates a last-layer descriptor with test accuracy over a family of
//! five synthetic models. Better models get tighter last-layer clouds, so
//! E_alpha^0 should fall as accuracy rises.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use topoprobe::cloud::{save_npy, PointCloud};
use topoprobe::trajectory::{gengap_correlate, layer_trajectory, EmbeddingManifest, Measure, ModelList, TrajectoryConfig};

fn noisy_blob(n: usize, d: usize, spread: f64, seed: u64) -> PointCloud {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    PointCloud::from_flat((0..n * d).map(|_| spread * rng.random::<f64>()).collect(), n, d).unwrap()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("topoprobe-gengap-example");
    std::fs::create_dir_all(&dir)?;
    let config = TrajectoryConfig { batch_size: 200, ..TrajectoryConfig::default() };

    let mut models = Vec::new();
    for k in 0..5u64 {
        let accuracy = 0.62 + 0.07 * k as f64;
        let name = format!("model{k}");
        let layers = [noisy_blob(300, 8, 1.0, 10 + k), noisy_blob(300, 4, 1.6 - accuracy, 20 + k)];
        let entries: Vec<_> = (1..).zip(&layers).map(|(layer, cloud)| {
            let file = format!("{name}_l{layer}.npy");
            save_npy(cloud, dir.join(&file)).unwrap();
            json!({"layer_index": layer, "epoch": 30, "class_label": "all", "path": file})
        }).collect();
        let manifest_path = dir.join(format!("{name}.json"));
        std::fs::write(&manifest_path, json!({
            "manifest_version": 1,
            "model_name": name,
            "entries": entries,
            "accuracies": [{"epoch": 30, "train_accuracy": 1.0, "test_accuracy": accuracy}],
        }).to_string())?;

        let report = layer_trajectory(&EmbeddingManifest::load(&manifest_path)?, &config)?;
        let report_file = format!("{name}_report.json");
        std::fs::write(dir.join(&report_file), serde_json::to_string(&report)?)?;
        models.push(json!({"report": report_file}));
    }
    let list = dir.join("models.json");
    std::fs::write(&list, json!({"models": models}).to_string())?;

    let points = ModelList::load_models(&list, Measure::E_alpha_0)?;
    for p in &points {
        let row = p.report.last_layer_row(Measure::E_alpha_0).expect("last layer");
        println!("{}: test accuracy {:.2}, last-layer E^0 {:.3}", p.report.model_name, p.test_accuracy, row.mean);
    }
    let result = gengap_correlate(&points, Measure::E_alpha_0)?;
    println!("pearson r = {:.4} over {} models", result.r, result.n_pairs);
    Ok(())
}
