use std::cmp::Ordering;
use std::collections::HashMap;

use super::mst::kruskal;
use super::{check_degree, sorted_edges, Barcode, Edge, PersistenceInterval, Threshold};
use crate::cloud::DistanceMatrix;
use crate::error::Result;

/// A triangle `a < b < c`, identified by `(a * n + b) * n + c` so that id
/// order is lexicographic vertex order.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Triangle {
    diam: f64,
    id: u64,
}

impl Triangle {
    fn cmp(&self, other: &Self) -> Ordering {
        self.diam.total_cmp(&other.diam).then(self.id.cmp(&other.id))
    }
}

/// Vietoris–Rips barcode up to `max_degree` (0 or 1) for the complex
/// truncated at `threshold`.
///
/// Degree 0 comes from Kruskal's algorithm. Degree 1 is computed by
/// persistent cohomology: edge coboundaries are reduced from the last edge
/// to the first, and edges that already killed a component are skipped
/// since their columns would reduce to zero. The pivot of a column is its
/// earliest triangle.
pub fn vr_persistence(
    dist: &DistanceMatrix,
    max_degree: usize,
    threshold: Threshold,
) -> Result<Barcode> {
    check_degree(max_degree)?;
    let threshold = threshold.resolve(dist)?;
    let n = dist.n();
    let edges = sorted_edges(dist, threshold);

    let tree = kruskal(n, &edges);
    let mut intervals: Vec<PersistenceInterval> = tree
        .iter()
        .map(|e| PersistenceInterval::new(0.0, e.diam, 0))
        .collect();
    intervals.extend((0..n - tree.len()).map(|_| PersistenceInterval::infinite(0.0, 0)));

    if max_degree >= 1 && n >= 3 {
        intervals.extend(h1_intervals(dist, threshold, &edges, &tree));
    }
    Ok(Barcode::new(n, max_degree, threshold, intervals))
}

fn h1_intervals(
    dist: &DistanceMatrix,
    threshold: f64,
    edges: &[Edge],
    tree: &[Edge],
) -> Vec<PersistenceInterval> {
    let n = dist.n();
    let mut cleared = vec![false; n * n];
    for e in tree {
        cleared[e.i as usize * n + e.j as usize] = true;
    }

    let triangle_id = |i: usize, j: usize, k: usize| {
        let mut v = [i as u64, j as u64, k as u64];
        v.sort_unstable();
        (v[0] * n as u64 + v[1]) * n as u64 + v[2]
    };
    let cofacets = |e: Edge| {
        let (i, j) = (e.i as usize, e.j as usize);
        (0..n).filter(move |&k| k != i && k != j).filter_map(move |k| {
            let diam = e.diam.max(dist.get(i, k)).max(dist.get(j, k));
            if diam > threshold {
                return None;
            }
            Some(Triangle { diam, id: triangle_id(i, j, k) })
        })
    };
    // For a fixed edge, triangle ids grow with the third vertex, so the
    // first strict minimum of the diameter is the earliest cofacet.
    let min_cofacet = |e: &Edge| -> Option<Triangle> {
        let (i, j) = (e.i as usize, e.j as usize);
        let (row_i, row_j) = (dist.row(i), dist.row(j));
        let (mut best, mut best_k) = (f64::INFINITY, usize::MAX);
        for k in 0..n {
            let diam = if k == i || k == j {
                f64::INFINITY
            } else {
                e.diam.max(row_i[k]).max(row_j[k])
            };
            if diam < best {
                best = diam;
                best_k = k;
            }
        }
        (best <= threshold).then(|| Triangle { diam: best, id: triangle_id(i, j, best_k) })
    };
    let coboundary = |e: &Edge| -> Vec<Triangle> {
        let mut col: Vec<Triangle> = cofacets(*e).collect();
        col.sort_unstable_by(Triangle::cmp);
        col
    };

    let mut pivot_owner: HashMap<u64, usize> = HashMap::new();
    // Only columns that absorbed additions are stored; the rest are
    // recomputed from their edge on demand.
    let mut reduced: HashMap<usize, Vec<Triangle>> = HashMap::new();
    let mut out = Vec::new();

    for (rank, edge) in edges.iter().enumerate().rev() {
        if cleared[edge.i as usize * n + edge.j as usize] {
            continue;
        }
        // Most columns are already reduced: their earliest cofacet is not
        // yet claimed, and a linear scan settles them.
        match min_cofacet(edge) {
            None => {
                out.push(PersistenceInterval::infinite(edge.diam, 1));
                continue;
            }
            Some(pivot) if !pivot_owner.contains_key(&pivot.id) => {
                pivot_owner.insert(pivot.id, rank);
                if pivot.diam > edge.diam {
                    out.push(PersistenceInterval::new(edge.diam, pivot.diam, 1));
                }
                continue;
            }
            Some(_) => {}
        }
        let mut col = coboundary(edge);
        loop {
            let Some(&pivot) = col.first() else {
                out.push(PersistenceInterval::infinite(edge.diam, 1));
                break;
            };
            match pivot_owner.get(&pivot.id) {
                Some(&owner) => {
                    col = match reduced.get(&owner) {
                        Some(c) => symmetric_difference(&col, c),
                        None => symmetric_difference(&col, &coboundary(&edges[owner])),
                    };
                }
                None => {
                    pivot_owner.insert(pivot.id, rank);
                    if pivot.diam > edge.diam {
                        out.push(PersistenceInterval::new(edge.diam, pivot.diam, 1));
                    }
                    reduced.insert(rank, col);
                    break;
                }
            }
        }
    }
    out
}

/// Sum of two sorted Z/2 columns.
fn symmetric_difference(a: &[Triangle], b: &[Triangle]) -> Vec<Triangle> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}
