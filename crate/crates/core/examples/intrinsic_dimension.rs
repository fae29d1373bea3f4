//! Classical intrinsic-dimension estimators next to the PH-dimension on
//! cubes of growing dimension. The estimators drift low as d grows.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use topoprobe::classical_id::{corr_dim, mle_id, two_nn};
use topoprobe::cloud::PointCloud;
use topoprobe::phdim::{estimate_phdim, PhDimConfig};

fn main() -> topoprobe::Result<()> {
    println!("{:>3} {:>8} {:>8} {:>8} {:>8}", "d", "two_nn", "mle", "corr_dim", "phdim");
    for d in [1, 2, 3, 5, 8, 12] {
        let mut rng = ChaCha8Rng::seed_from_u64(d as u64);
        let cloud = PointCloud::from_flat((0..1000 * d).map(|_| rng.random()).collect(), 1000, d)?;
        println!(
            "{d:>3} {:>8.3} {:>8.3} {:>8.3} {:>8.3}",
            two_nn(&cloud, 0.1)?.value,
            mle_id(&cloud, 20)?.value,
            corr_dim(&cloud, 100)?.value,
            estimate_phdim(&cloud, &PhDimConfig::default())?.phdim,
        );
    }
    Ok(())
}
