//! Classical intrinsic-dimension estimators: TwoNN, Levina–Bickel MLE and
//! the Grassberger–Procaccia correlation dimension.
//!
//! Neighbor queries are exact, by scanning rows of the full distance matrix.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cloud::{pairwise_distances, DistanceMatrix, PointCloud};
use crate::error::{Error, Result};

pub const DEFAULT_DISCARD_FRACTION: f64 = 0.1;
pub const DEFAULT_MLE_K: usize = 20;
pub const DEFAULT_N_RADII: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdMethod {
    TwoNn,
    Mle,
    CorrDim,
}

impl IdMethod {
    pub const ALL: [IdMethod; 3] = [IdMethod::TwoNn, IdMethod::Mle, IdMethod::CorrDim];
}

impl fmt::Display for IdMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IdMethod::TwoNn => "two_nn",
            IdMethod::Mle => "mle",
            IdMethod::CorrDim => "corr_dim",
        })
    }
}

impl FromStr for IdMethod {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "two_nn" | "twonn" => Ok(IdMethod::TwoNn),
            "mle" => Ok(IdMethod::Mle),
            "corr_dim" | "corrdim" => Ok(IdMethod::CorrDim),
            other => Err(format!("unknown estimator `{other}`")),
        }
    }
}

/// Parameters an estimate was computed with; unused fields are omitted
/// from JSON.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IdParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discard_fraction: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_radii: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_fit: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdEstimate {
    pub method: IdMethod,
    pub value: f64,
    pub params: IdParams,
}

fn finish(method: IdMethod, value: f64, params: IdParams) -> Result<IdEstimate> {
    if !(value.is_finite() && value > 0.0) {
        return Err(Error::DegenerateDistances(format!(
            "{method} produced a non-positive or non-finite dimension ({value})"
        )));
    }
    Ok(IdEstimate {
        method,
        value,
        params,
    })
}

/// Sorted distances from every point to its `k` nearest neighbors.
fn knn_distances(dist: &DistanceMatrix, k: usize) -> Vec<Vec<f64>> {
    (0..dist.n())
        .into_par_iter()
        .map(|i| {
            let mut others: Vec<f64> = dist
                .row(i)
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &d)| d)
                .collect();
            if k < others.len() {
                others.select_nth_unstable_by(k - 1, f64::total_cmp);
                others.truncate(k);
            }
            others.sort_unstable_by(f64::total_cmp);
            others
        })
        .collect()
}

/// TwoNN: the ratio `μ = r₂ / r₁` of second to first neighbor distances is
/// Pareto with exponent `d`, so `−ln(1 − F(μ)) = d ln μ`. The largest
/// `discard_fraction` of ratios are dropped before the fit through the
/// origin.
pub fn two_nn(cloud: &PointCloud, discard_fraction: f64) -> Result<IdEstimate> {
    if !(0.0..0.5).contains(&discard_fraction) {
        return Err(Error::InvalidConfig(format!(
            "discard fraction must lie in [0, 0.5), got {discard_fraction}"
        )));
    }
    let n = cloud.n();
    if n < 3 {
        return Err(Error::TooFew { required: 3, got: n });
    }
    let nn = knn_distances(&pairwise_distances(cloud), 2);
    let mut mu = Vec::with_capacity(n);
    for (i, d) in nn.iter().enumerate() {
        if d[0] == 0.0 {
            return Err(Error::DuplicatePoints(i));
        }
        mu.push(d[1] / d[0]);
    }
    mu.sort_unstable_by(f64::total_cmp);

    let kept = ((n as f64) * (1.0 - discard_fraction)).floor() as usize;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (i, &m) in mu.iter().take(kept).enumerate() {
        let x = m.ln();
        let y = -(1.0 - i as f64 / n as f64).ln();
        sxy += x * y;
        sxx += x * x;
    }
    if sxx == 0.0 {
        return Err(Error::DegenerateDistances(
            "all neighbor ratios equal one".into(),
        ));
    }
    finish(
        IdMethod::TwoNn,
        sxy / sxx,
        IdParams {
            discard_fraction: Some(discard_fraction),
            n_fit: Some(kept),
            ..IdParams::default()
        },
    )
}

/// Levina–Bickel maximum likelihood with `k` neighbors.
///
/// The per-point inverse estimate is `(1/(k−1)) Σ_{j<k} ln(T_k / T_j)`;
/// the global value is the reciprocal of the mean of those inverses.
pub fn mle_id(cloud: &PointCloud, k: usize) -> Result<IdEstimate> {
    let n = cloud.n();
    if k < 3 || k >= n {
        return Err(Error::BadK { k, n });
    }
    let nn = knn_distances(&pairwise_distances(cloud), k);
    let mut inverse_sum = 0.0;
    for (i, d) in nn.iter().enumerate() {
        if d[0] == 0.0 {
            return Err(Error::DuplicatePoints(i));
        }
        let tk = d[k - 1];
        let s: f64 = d[..k - 1].iter().map(|&tj| (tk / tj).ln()).sum();
        inverse_sum += s / (k - 1) as f64;
    }
    let mean_inverse = inverse_sum / n as f64;
    if mean_inverse == 0.0 {
        return Err(Error::DegenerateDistances(
            "all neighbor distances are equal".into(),
        ));
    }
    finish(
        IdMethod::Mle,
        1.0 / mean_inverse,
        IdParams {
            k: Some(k),
            ..IdParams::default()
        },
    )
}

/// Linear-interpolation percentile of sorted data, `q` in `[0, 100]`.
fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q / 100.0 * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

/// Grassberger–Procaccia correlation dimension.
///
/// `C(r)` is the fraction of pairs closer than `r`, evaluated on `n_radii`
/// log-spaced radii between the 1st and 99th percentiles of the pairwise
/// distances. The dimension is the slope of `ln C` against `ln r` over the
/// central half of the grid, using only radii with `C(r) > 0`.
pub fn corr_dim(cloud: &PointCloud, n_radii: usize) -> Result<IdEstimate> {
    let n = cloud.n();
    if n < 10 {
        return Err(Error::TooFew { required: 10, got: n });
    }
    if n_radii < 8 {
        return Err(Error::InvalidConfig(format!(
            "need at least 8 radii, got {n_radii}"
        )));
    }
    let mut pairs = pairwise_distances(cloud).upper_triangle();
    pairs.sort_unstable_by(f64::total_cmp);
    let r_min = percentile(&pairs, 1.0);
    let r_max = percentile(&pairs, 99.0);
    if !(r_min > 0.0 && r_max > r_min) {
        return Err(Error::DegenerateDistances(format!(
            "percentile range [{r_min}, {r_max}] is empty"
        )));
    }

    let total = pairs.len() as f64;
    let ratio = r_max / r_min;
    let (first, last) = (n_radii / 4, 3 * n_radii / 4);
    let samples: Vec<(f64, f64)> = (first..=last)
        .filter_map(|k| {
            let r = r_min * ratio.powf(k as f64 / (n_radii - 1) as f64);
            let below = pairs.partition_point(|&d| d < r);
            (below > 0).then(|| (r.ln(), (below as f64 / total).ln()))
        })
        .collect();
    if samples.len() < 2 {
        return Err(Error::DegenerateDistances(
            "too few radii with nonzero correlation integral".into(),
        ));
    }
    let m = samples.len() as f64;
    let mx = samples.iter().map(|s| s.0).sum::<f64>() / m;
    let my = samples.iter().map(|s| s.1).sum::<f64>() / m;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for &(x, y) in &samples {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    finish(
        IdMethod::CorrDim,
        sxy / sxx,
        IdParams {
            n_radii: Some(n_radii),
            radius_min: Some(r_min),
            radius_max: Some(r_max),
            n_fit: Some(samples.len()),
            ..IdParams::default()
        },
    )
}

/// Runs one estimator with its default parameters.
pub fn estimate_with_defaults(cloud: &PointCloud, method: IdMethod) -> Result<IdEstimate> {
    match method {
        IdMethod::TwoNn => two_nn(cloud, DEFAULT_DISCARD_FRACTION),
        IdMethod::Mle => mle_id(cloud, DEFAULT_MLE_K),
        IdMethod::CorrDim => corr_dim(cloud, DEFAULT_N_RADII),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn uniform(n: usize, d: usize, seed: u64) -> PointCloud {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        PointCloud::from_flat((0..n * d).map(|_| rng.random::<f64>()).collect(), n, d).unwrap()
    }

    fn concentric_circles(n: usize, seed: u64) -> PointCloud {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<[f64; 2]> = (0..n)
            .map(|i| {
                let r = if i % 2 == 0 { 1.0 } else { 2.0 };
                let t = rng.random::<f64>() * std::f64::consts::TAU;
                [r * t.cos(), r * t.sin()]
            })
            .collect();
        PointCloud::from_rows(&rows).unwrap()
    }

    #[test]
    fn two_nn_plane_and_segment() {
        let v = two_nn(&uniform(1000, 2, 1), 0.1).unwrap().value;
        assert!((1.7..=2.3).contains(&v), "{v}");
        let v = two_nn(&uniform(1000, 1, 2), 0.1).unwrap().value;
        assert!((0.8..=1.2).contains(&v), "{v}");
    }

    #[test]
    fn mle_plane_and_circles() {
        let v = mle_id(&uniform(1000, 2, 3), 20).unwrap().value;
        assert!((1.7..=2.3).contains(&v), "{v}");
        let v = mle_id(&concentric_circles(1000, 4), 10).unwrap().value;
        assert!((0.8..=1.3).contains(&v), "{v}");
    }

    #[test]
    fn corr_dim_plane_and_segment() {
        let v = corr_dim(&uniform(1000, 2, 5), DEFAULT_N_RADII).unwrap().value;
        assert!((1.6..=2.2).contains(&v), "{v}");
        let v = corr_dim(&uniform(500, 1, 6), DEFAULT_N_RADII).unwrap().value;
        assert!((0.8..=1.2).contains(&v), "{v}");
    }

    #[test]
    fn errors() {
        let dup = PointCloud::from_rows(&[[0.0], [0.0], [1.0], [2.0]]).unwrap();
        assert!(matches!(two_nn(&dup, 0.1), Err(Error::DuplicatePoints(_))));
        assert!(matches!(mle_id(&dup, 3), Err(Error::DuplicatePoints(_))));
        let two = PointCloud::from_rows(&[[0.0], [1.0]]).unwrap();
        assert!(matches!(two_nn(&two, 0.1), Err(Error::TooFew { .. })));
        assert!(matches!(corr_dim(&two, 10), Err(Error::TooFew { .. })));
        let cloud = uniform(50, 2, 0);
        assert!(matches!(mle_id(&cloud, 2), Err(Error::BadK { .. })));
        assert!(matches!(mle_id(&cloud, 50), Err(Error::BadK { .. })));
        assert!(corr_dim(&cloud, 7).is_err());
        assert!(two_nn(&cloud, 0.5).is_err());
        let grid: Vec<[f64; 1]> = (0..12).map(|_| [3.0]).collect();
        assert!(matches!(
            corr_dim(&PointCloud::from_rows(&grid).unwrap(), 10),
            Err(Error::DegenerateDistances(_))
        ));
    }

    #[test]
    fn percentile_interpolates() {
        let s = [0.0, 10.0, 20.0, 30.0, 40.0];
        assert_eq!(percentile(&s, 0.0), 0.0);
        assert_eq!(percentile(&s, 50.0), 20.0);
        assert_eq!(percentile(&s, 100.0), 40.0);
        assert!((percentile(&s, 1.0) - 0.4).abs() < 1e-12);
    }

    #[test]
    fn method_names() {
        assert_eq!("two-nn".parse::<IdMethod>().unwrap(), IdMethod::TwoNn);
        assert_eq!(IdMethod::CorrDim.to_string(), "corr_dim");
        assert_eq!(serde_json::to_string(&IdMethod::TwoNn).unwrap(), "\"two_nn\"");
    }
}
