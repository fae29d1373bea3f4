//! Power-weighted lifespan sums E_alpha^i of a noisy circle for a few
//! exponents, and how they react to rescaling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use topoprobe::cloud::{pairwise_distances, PointCloud};
use topoprobe::descriptors::lifespan_sum;
use topoprobe::persistence::{vr_persistence, Threshold};

fn main() -> topoprobe::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let rows: Vec<[f64; 2]> = (0..150)
        .map(|_| {
            let t = rng.random::<f64>() * std::f64::consts::TAU;
            let r = 1.0 + 0.05 * (rng.random::<f64>() - 0.5);
            [r * t.cos(), r * t.sin()]
        })
        .collect();
    let cloud = PointCloud::from_rows(&rows)?;

    for scale in [1.0, 3.0] {
        let dist = pairwise_distances(&cloud.scaled(scale)?);
        let barcode = vr_persistence(&dist, 1, Threshold::Auto)?;
        println!("scale {scale}");
        for alpha in [0.0, 0.5, 1.0, 2.0] {
            let e0 = lifespan_sum(&barcode, 0, alpha)?;
            let e1 = lifespan_sum(&barcode, 1, alpha)?;
            println!(
                "  alpha {alpha:<3}  E^0 = {:>9.4} ({} bars)  E^1 = {:>7.4} ({} bars)",
                e0.value, e0.n_intervals, e1.value, e1.n_intervals
            );
        }
    }
    Ok(())
}
