use super::{sorted_edges, Barcode, Edge, PersistenceInterval, UnionFind};
use crate::cloud::DistanceMatrix;

/// Kruskal over the complete graph: the `n - 1` edges that merge components.
pub fn mst_edges(dist: &DistanceMatrix) -> Vec<(usize, usize, f64)> {
    kruskal(dist.n(), &sorted_edges(dist, f64::INFINITY))
        .into_iter()
        .map(|e| (e.i as usize, e.j as usize, e.diam))
        .collect()
}

pub(crate) fn kruskal(n: usize, edges: &[Edge]) -> Vec<Edge> {
    let mut uf = UnionFind::new(n);
    let mut tree = Vec::with_capacity(n.saturating_sub(1));
    for e in edges {
        if uf.union(e.i, e.j) {
            tree.push(*e);
            if uf.components() == 1 {
                break;
            }
        }
    }
    tree
}

/// Degree-0 barcode: every point is born at 0, each MST edge kills one
/// component, and one component lives forever.
pub fn mst_h0(dist: &DistanceMatrix) -> Barcode {
    let mut intervals: Vec<PersistenceInterval> = mst_edges(dist)
        .into_iter()
        .map(|(_, _, w)| PersistenceInterval::new(0.0, w, 0))
        .collect();
    intervals.push(PersistenceInterval::infinite(0.0, 0));
    Barcode::new(dist.n(), 0, dist.max_distance(), intervals)
}
