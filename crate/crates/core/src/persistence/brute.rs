use std::collections::BTreeSet;

use super::{check_degree, Barcode, PersistenceInterval};
use crate::cloud::DistanceMatrix;
use crate::error::{Error, Result};

pub const BRUTE_FORCE_MAX_POINTS: usize = 12;

struct Simplex {
    vertices: Vec<usize>,
    diam: f64,
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            cur.push(v);
            go(v + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Reference barcode from the full Rips complex and the standard
/// column-by-column boundary reduction. Exponential in `n`; only for
/// testing.
pub fn brute_force_persistence(dist: &DistanceMatrix, max_degree: usize) -> Result<Barcode> {
    check_degree(max_degree)?;
    let n = dist.n();
    if n > BRUTE_FORCE_MAX_POINTS {
        return Err(Error::TooLarge(n));
    }

    let mut simplices: Vec<Simplex> = Vec::new();
    for dim in 0..=max_degree + 1 {
        for vertices in combinations(n, dim + 1) {
            let mut diam = 0.0f64;
            for (a, &u) in vertices.iter().enumerate() {
                for &v in &vertices[a + 1..] {
                    diam = diam.max(dist.get(u, v));
                }
            }
            simplices.push(Simplex { vertices, diam });
        }
    }
    simplices.sort_by(|a, b| {
        a.diam
            .total_cmp(&b.diam)
            .then(a.vertices.len().cmp(&b.vertices.len()))
            .then(a.vertices.cmp(&b.vertices))
    });

    let index_of = |vs: &[usize]| {
        simplices
            .iter()
            .position(|s| s.vertices == vs)
            .expect("face present in full complex")
    };
    let mut columns: Vec<BTreeSet<usize>> = simplices
        .iter()
        .map(|s| {
            if s.vertices.len() == 1 {
                return BTreeSet::new();
            }
            (0..s.vertices.len())
                .map(|drop| {
                    let face: Vec<usize> = s
                        .vertices
                        .iter()
                        .enumerate()
                        .filter(|&(k, _)| k != drop)
                        .map(|(_, &v)| v)
                        .collect();
                    index_of(&face)
                })
                .collect()
        })
        .collect();

    let mut paired = vec![false; simplices.len()];
    let mut intervals = Vec::new();
    for j in 0..columns.len() {
        while let Some(&low) = columns[j].last() {
            let earlier = (0..j).find(|&k| columns[k].last() == Some(&low));
            match earlier {
                Some(k) => {
                    let other = columns[k].clone();
                    let col = &mut columns[j];
                    for r in other {
                        if !col.remove(&r) {
                            col.insert(r);
                        }
                    }
                }
                None => {
                    paired[low] = true;
                    paired[j] = true;
                    let degree = simplices[low].vertices.len() - 1;
                    let (birth, death) = (simplices[low].diam, simplices[j].diam);
                    if degree == 0 || death > birth {
                        intervals.push(PersistenceInterval::new(birth, death, degree));
                    }
                    break;
                }
            }
        }
    }
    for (idx, s) in simplices.iter().enumerate() {
        let degree = s.vertices.len() - 1;
        if !paired[idx] && degree <= max_degree {
            intervals.push(PersistenceInterval::infinite(s.diam, degree));
        }
    }
    Ok(Barcode::new(n, max_degree, dist.max_distance(), intervals))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cloud::{pairwise_distances, PointCloud};

    fn dist(rows: &[[f64; 2]]) -> DistanceMatrix {
        pairwise_distances(&PointCloud::from_rows(rows).unwrap())
    }

    #[test]
    fn two_points() {
        let bc = brute_force_persistence(&dist(&[[0.0, 0.0], [1.0, 0.0]]), 1).unwrap();
        assert_eq!(
            bc.intervals,
            vec![
                PersistenceInterval::new(0.0, 1.0, 0),
                PersistenceInterval::infinite(0.0, 0)
            ]
        );
    }

    #[test]
    fn square_by_hand() {
        let bc = brute_force_persistence(
            &dist(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]),
            1,
        )
        .unwrap();
        let h0: Vec<f64> = bc.finite(0).map(|iv| iv.death).collect();
        assert_eq!(h0, vec![1.0, 1.0, 1.0]);
        let h1: Vec<(f64, f64)> = bc.degree(1).map(|iv| (iv.birth, iv.death)).collect();
        assert_eq!(h1, vec![(1.0, 2f64.sqrt())]);
    }

    #[test]
    fn collinear_points() {
        let bc = brute_force_persistence(&dist(&[[0.0, 0.0], [1.0, 0.0], [3.0, 0.0]]), 1).unwrap();
        let h0: Vec<f64> = bc.finite(0).map(|iv| iv.death).collect();
        assert_eq!(h0, vec![1.0, 2.0]);
        assert_eq!(bc.degree(1).count(), 0);
    }

    #[test]
    fn too_large() {
        let rows: Vec<[f64; 2]> = (0..13).map(|i| [i as f64, 0.0]).collect();
        assert!(matches!(
            brute_force_persistence(&dist(&rows), 1),
            Err(Error::TooLarge(13))
        ));
    }

    #[test]
    fn combination_counts() {
        assert_eq!(combinations(12, 3).len(), 220);
        assert_eq!(combinations(4, 2), vec![
            vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]
        ]);
    }
}
