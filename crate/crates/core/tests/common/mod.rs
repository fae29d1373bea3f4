//! Synthetic clouds and independent oracles shared by the integration tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use topoprobe::cloud::{DistanceMatrix, PointCloud};
use topoprobe::persistence::Barcode;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` points uniform on `[0, 1]^d`.
pub fn uniform_cube(n: usize, d: usize, seed: u64) -> PointCloud {
    let mut r = rng(seed);
    PointCloud::from_flat((0..n * d).map(|_| r.random::<f64>()).collect(), n, d).unwrap()
}

/// `n` points uniform on `[0, 1]^intrinsic`, zero-padded to `ambient` columns.
pub fn padded_cube(n: usize, intrinsic: usize, ambient: usize, seed: u64) -> PointCloud {
    let mut r = rng(seed);
    let mut data = Vec::with_capacity(n * ambient);
    for _ in 0..n {
        for k in 0..ambient {
            data.push(if k < intrinsic { r.random::<f64>() } else { 0.0 });
        }
    }
    PointCloud::from_flat(data, n, ambient).unwrap()
}

/// `n` points with uniform angle on the unit circle.
pub fn unit_circle(n: usize, seed: u64) -> PointCloud {
    let mut r = rng(seed);
    let rows: Vec<[f64; 2]> = (0..n)
        .map(|_| {
            let t = r.random::<f64>() * std::f64::consts::TAU;
            [t.cos(), t.sin()]
        })
        .collect();
    PointCloud::from_rows(&rows).unwrap()
}

/// Random rotation of `R^d` from Gram–Schmidt on a random matrix.
pub fn random_rotation(d: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut r = rng(seed);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    while basis.len() < d {
        let mut v: Vec<f64> = (0..d).map(|_| r.random::<f64>() * 2.0 - 1.0).collect();
        for b in &basis {
            let dot: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= dot * y);
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            basis.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    basis
}

pub fn rotate_translate(cloud: &PointCloud, rot: &[Vec<f64>], shift: f64) -> PointCloud {
    let rows: Vec<Vec<f64>> = cloud
        .rows()
        .map(|p| {
            rot.iter()
                .map(|row| row.iter().zip(p).map(|(a, b)| a * b).sum::<f64>() + shift)
                .collect()
        })
        .collect();
    PointCloud::from_rows(&rows).unwrap()
}

/// Total MST length by Prim's algorithm straight from coordinates; shares
/// no code with the library's Kruskal path.
pub fn prim_mst_length(cloud: &PointCloud) -> f64 {
    let n = cloud.n();
    let dist = |a: usize, b: usize| {
        cloud
            .row(a)
            .iter()
            .zip(cloud.row(b))
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    };
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    best[0] = 0.0;
    let mut total = 0.0;
    for _ in 0..n {
        let u = (0..n)
            .filter(|&v| !in_tree[v])
            .min_by(|&a, &b| best[a].total_cmp(&best[b]))
            .unwrap();
        in_tree[u] = true;
        total += best[u];
        for v in 0..n {
            if !in_tree[v] {
                best[v] = best[v].min(dist(u, v));
            }
        }
    }
    total
}

pub fn square() -> PointCloud {
    PointCloud::from_rows(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap()
}

pub fn report(id: u32, name: &str, pass: bool, detail: impl std::fmt::Display) {
    println!(
        "[{}] criterion {id}: {name}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
}

pub fn dist_from(entries: Vec<f64>, n: usize) -> DistanceMatrix {
    DistanceMatrix::from_flat(entries, n).unwrap()
}

/// Multiset equality of intervals by greedy matching within `tol`.
pub fn multisets_match(a: &Barcode, b: &Barcode, tol: f64) -> bool {
    let close = |x: f64, y: f64| (x.is_infinite() && y.is_infinite() && x == y) || (x - y).abs() <= tol;
    let mut used = vec![false; b.intervals.len()];
    a.intervals.len() == b.intervals.len()
        && a.intervals.iter().all(|p| {
            let hit = b.intervals.iter().enumerate().position(|(k, q)| {
                !used[k] && q.degree == p.degree && close(p.birth, q.birth) && close(p.death, q.death)
            });
            hit.map(|k| used[k] = true).is_some()
        })
}

