//! Round-trips a point cloud through CSV and NPY, then subsamples it and
//! builds its distance matrix.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use topoprobe::cloud::{
    load_point_cloud_auto, pairwise_distances, save_npy, subsample, write_csv, PointCloud,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let rows: Vec<[f64; 3]> = (0..500).map(|_| rng.random()).collect();
    let cloud = PointCloud::from_rows(&rows)?;

    let dir = std::env::temp_dir().join("topoprobe-io-example");
    std::fs::create_dir_all(&dir)?;
    let csv_path = dir.join("cloud.csv");
    let npy_path = dir.join("cloud.npy");
    write_csv(&cloud, std::fs::File::create(&csv_path)?)?;
    save_npy(&cloud, &npy_path)?;

    for path in [&csv_path, &npy_path] {
        let back = load_point_cloud_auto(path)?;
        let max_err = back
            .as_flat()
            .iter()
            .zip(cloud.as_flat())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        println!("{}: {} x {}, max abs difference {max_err:e}", path.display(), back.n(), back.d());
    }

    let batch = subsample(&cloud, 100, 7)?;
    let dist = pairwise_distances(&batch);
    println!(
        "subsample of {} points: diameter {:.4}, enclosing radius {:.4}",
        batch.n(),
        dist.max_distance(),
        dist.enclosing_radius()
    );
    Ok(())
}
