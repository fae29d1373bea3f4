//! PH-dimension of uniform samples from a segment, circle, square and cube,
//! with the fitted power law for each.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use topoprobe::cloud::PointCloud;
use topoprobe::phdim::{estimate_phdim, PhDimConfig};

fn uniform(n: usize, d: usize, seed: u64) -> PointCloud {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    PointCloud::from_flat((0..n * d).map(|_| rng.random()).collect(), n, d).unwrap()
}

fn circle(n: usize, seed: u64) -> PointCloud {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<[f64; 2]> = (0..n)
        .map(|_| {
            let t = rng.random::<f64>() * std::f64::consts::TAU;
            [t.cos(), t.sin()]
        })
        .collect();
    PointCloud::from_rows(&rows).unwrap()
}

fn main() -> topoprobe::Result<()> {
    let shapes = [
        ("segment", uniform(1000, 1, 0)),
        ("circle", circle(1000, 0)),
        ("square", uniform(2000, 2, 0)),
        ("cube", uniform(2000, 3, 0)),
    ];
    let config = PhDimConfig::default();
    for (name, cloud) in &shapes {
        let est = estimate_phdim(cloud, &config)?;
        println!(
            "{name:<8} phdim {:.3}  (beta {:.4}, r^2 {:.3})",
            est.phdim, est.beta, est.r_squared
        );
        let grid: Vec<String> = est.points.iter().map(|p| format!("{}:{:.3}", p.n, p.mean_e)).collect();
        println!("         n:E  {}", grid.join(" "));
    }

    // H1 lifespan sums approach their asymptotic growth slowly, so on
    // grids this small the estimate overshoots.
    let h1 = PhDimConfig { degree: 1, sample_sizes: Some(vec![40, 60, 90, 135, 200]), ..config };
    let est = estimate_phdim(&shapes[2].1, &h1)?;
    println!("square via H1 bars: phdim {:.3} (r^2 {:.3})", est.phdim, est.r_squared);
    Ok(())
}
