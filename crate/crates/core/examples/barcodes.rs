//! Vietoris–Rips barcodes of small shapes, checked against the brute-force
//! reduction, plus the CSV form of one barcode.

use std::f64::consts::TAU;

use topoprobe::cloud::{pairwise_distances, PointCloud};
use topoprobe::persistence::{brute_force_persistence, vr_persistence, Threshold};

fn polygon(k: usize) -> PointCloud {
    let rows: Vec<[f64; 2]> = (0..k)
        .map(|i| {
            let t = TAU * i as f64 / k as f64;
            [t.cos(), t.sin()]
        })
        .collect();
    PointCloud::from_rows(&rows).unwrap()
}

fn main() -> topoprobe::Result<()> {
    let square = PointCloud::from_rows(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])?;
    let shapes = [("square", square), ("hexagon", polygon(6)), ("decagon", polygon(10))];

    for (name, cloud) in &shapes {
        let dist = pairwise_distances(cloud);
        let barcode = vr_persistence(&dist, 1, Threshold::Auto)?;
        let oracle = brute_force_persistence(&dist, 1)?;
        println!("{name}: agrees with brute force: {}", barcode.same_intervals(&oracle, 1e-9));
        for iv in barcode.degree(1) {
            println!("  H1 bar [{:.4}, {:.4})", iv.birth, iv.death);
        }
        println!("  H0 finite bars: {}", barcode.finite(0).count());
    }

    let dist = pairwise_distances(&shapes[0].1);
    let capped = vr_persistence(&dist, 1, Threshold::Value(1.2))?;
    println!("square capped at 1.2, as CSV:");
    capped.write_csv(std::io::stdout().lock()).expect("stdout");
    Ok(())
}
