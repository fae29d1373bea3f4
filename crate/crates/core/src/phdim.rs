//! Persistent-homological fractal dimension.
//!
//! For a grid of sample sizes `n`, draw `repeats` random subsamples of each
//! size, evaluate `E_α^i` on each, and average. If the mean grows like
//! `n^β`, the dimension is `α / (1 − β)`. The slope `β` is the OLS slope of
//! `log10(mean E)` against `log10(n)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cloud::{pairwise_distances, subsample, PointCloud};
use crate::descriptors::{lifespan_sum, DEFAULT_ALPHA, DEFAULT_DEGREE};
use crate::error::{Error, Result};
use crate::persistence::{check_degree, mst_h0, vr_persistence, Threshold};
use crate::seed::derive_seed;

pub const DEFAULT_REPEATS: usize = 5;
pub const DEFAULT_GRID_LEN: usize = 9;
pub const DEFAULT_MIN_SIZE: usize = 64;
pub const DEFAULT_MAX_SIZE: usize = 1024;

/// `beta >= 1 - SLOPE_MARGIN` is rejected.
pub const SLOPE_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhDimConfig {
    pub alpha: f64,
    pub degree: usize,
    /// `None` selects [`default_sample_sizes`] for the cloud at hand.
    pub sample_sizes: Option<Vec<usize>>,
    pub repeats: usize,
    pub seed: u64,
}

impl Default for PhDimConfig {
    fn default() -> Self {
        Self {
            alpha: DEFAULT_ALPHA,
            degree: DEFAULT_DEGREE,
            sample_sizes: None,
            repeats: DEFAULT_REPEATS,
            seed: 0,
        }
    }
}

impl PhDimConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    /// The validated, ascending, de-duplicated size grid for a cloud of
    /// `n` points.
    pub fn resolve_sizes(&self, n: usize) -> Result<Vec<usize>> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "alpha must be positive and finite, got {}",
                self.alpha
            )));
        }
        check_degree(self.degree)?;
        if self.repeats == 0 {
            return Err(Error::InvalidConfig("repeats must be at least 1".into()));
        }
        let mut sizes = match &self.sample_sizes {
            Some(s) => s.clone(),
            None => default_sample_sizes(n),
        };
        sizes.sort_unstable();
        sizes.dedup();
        if sizes.len() < 3 {
            return Err(Error::InvalidConfig(format!(
                "need at least 3 distinct sample sizes, got {sizes:?}"
            )));
        }
        if sizes[0] < 2 {
            return Err(Error::InvalidConfig("sample sizes must be at least 2".into()));
        }
        let largest = *sizes.last().unwrap();
        if largest > n {
            return Err(Error::SampleTooLarge {
                requested: largest,
                available: n,
            });
        }
        Ok(sizes)
    }
}

/// Nine sizes spaced geometrically from 64 to `min(n, 1024)`, rounded and
/// de-duplicated. Clouds with fewer than 256 points start the grid at
/// `max(2, n / 4)` instead of 64.
pub fn default_sample_sizes(n: usize) -> Vec<usize> {
    let hi = n.min(DEFAULT_MAX_SIZE);
    let lo = DEFAULT_MIN_SIZE.min((hi / 4).max(2));
    if hi <= lo {
        return vec![hi];
    }
    let ratio = hi as f64 / lo as f64;
    let steps = (DEFAULT_GRID_LEN - 1) as f64;
    let mut sizes: Vec<usize> = (0..DEFAULT_GRID_LEN)
        .map(|k| (lo as f64 * ratio.powf(k as f64 / steps)).round() as usize)
        .map(|s| s.clamp(lo, hi))
        .collect();
    sizes.dedup();
    sizes
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Least squares of `log10(value)` on `log10(count)`.
///
/// `r_squared` is 1 when the logged values are constant (the fit is exact).
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    if points.len() < 3 {
        return Err(Error::DegenerateFit(format!(
            "need at least 3 points, got {}",
            points.len()
        )));
    }
    for &(count, value) in points {
        if count.is_nan() || count <= 0.0 {
            return Err(Error::NonPositiveValue(count));
        }
        if value.is_nan() || value <= 0.0 {
            return Err(Error::NonPositiveValue(value));
        }
    }
    let mut counts: Vec<f64> = points.iter().map(|p| p.0).collect();
    counts.sort_by(f64::total_cmp);
    if counts.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::DegenerateFit("sample counts must be distinct".into()));
    }

    let xs: Vec<f64> = points.iter().map(|p| p.0.log10()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.log10()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(&ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 {
        return Err(Error::DegenerateFit("all counts equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    Ok(PowerLawFit {
        slope,
        intercept,
        r_squared,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SizeMean {
    pub n: usize,
    pub mean_e: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhDimEstimate {
    pub phdim: f64,
    pub beta: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub alpha: f64,
    pub degree: usize,
    pub repeats: usize,
    pub seed: u64,
    pub points: Vec<SizeMean>,
}

/// `E_α^degree` of a whole cloud (degree 0 via the MST, degree 1 via the
/// Rips reduction at the automatic threshold).
pub fn descriptor_of(cloud: &PointCloud, degree: usize, alpha: f64) -> Result<f64> {
    let dist = pairwise_distances(cloud);
    let barcode = match degree {
        0 => mst_h0(&dist),
        1 => vr_persistence(&dist, 1, Threshold::Auto)?,
        d => return Err(Error::UnsupportedDegree(d)),
    };
    Ok(lifespan_sum(&barcode, degree, alpha)?.value)
}

pub fn estimate_phdim(cloud: &PointCloud, config: &PhDimConfig) -> Result<PhDimEstimate> {
    let sizes = config.resolve_sizes(cloud.n())?;
    let tasks: Vec<(usize, usize)> = (0..sizes.len())
        .flat_map(|j| (0..config.repeats).map(move |r| (j, r)))
        .collect();
    // collect() keeps task order, so the sums below do not depend on the
    // thread schedule.
    let values: Vec<f64> = tasks
        .par_iter()
        .map(|&(j, r)| {
            let seed = derive_seed(config.seed, &[j as u64, r as u64]);
            let sample = subsample(cloud, sizes[j], seed)?;
            descriptor_of(&sample, config.degree, config.alpha)
        })
        .collect::<Result<_>>()?;

    let points: Vec<SizeMean> = sizes
        .iter()
        .zip(values.chunks_exact(config.repeats))
        .map(|(&n, chunk)| SizeMean {
            n,
            mean_e: chunk.iter().sum::<f64>() / config.repeats as f64,
        })
        .collect();
    let fit = fit_power_law(
        &points
            .iter()
            .map(|p| (p.n as f64, p.mean_e))
            .collect::<Vec<_>>(),
    )?;
    if fit.slope >= 1.0 - SLOPE_MARGIN {
        return Err(Error::SlopeAtLeastOne(fit.slope));
    }
    Ok(PhDimEstimate {
        phdim: config.alpha / (1.0 - fit.slope),
        beta: fit.slope,
        intercept: fit.intercept,
        r_squared: fit.r_squared,
        alpha: config.alpha,
        degree: config.degree,
        repeats: config.repeats,
        seed: config.seed,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Textbook slope `(mΣxy − ΣxΣy) / (mΣx² − (Σx)²)` on the logged pairs.
    fn reference_slope(points: &[(f64, f64)]) -> f64 {
        let m = points.len() as f64;
        let (mut sx, mut sy, mut sxy, mut sxx) = (0.0, 0.0, 0.0, 0.0);
        for &(c, v) in points {
            let (x, y) = (c.log10(), v.log10());
            sx += x;
            sy += y;
            sxy += x * y;
            sxx += x * x;
        }
        (m * sxy - sx * sy) / (m * sxx - sx * sx)
    }

    #[test]
    fn exact_square_root_law() {
        let fit = fit_power_law(&[(100.0, 10.0), (1000.0, 31.6228), (10000.0, 100.0)]).unwrap();
        assert!((fit.slope - 0.5).abs() < 1e-5);
        assert!((fit.r_squared - 1.0).abs() < 1e-9);
    }

    #[test]
    fn constant_values_have_zero_slope() {
        let fit = fit_power_law(&[(10.0, 7.0), (100.0, 7.0), (1000.0, 7.0)]).unwrap();
        assert_eq!(fit.slope, 0.0);
        assert_eq!(fit.r_squared, 1.0);
    }

    #[test]
    fn matches_reference_ols() {
        let pts = [(10.0, 1.0), (20.0, 2.0), (40.0, 3.0)];
        let fit = fit_power_law(&pts).unwrap();
        let want = reference_slope(&pts);
        assert!((fit.slope - want).abs() < 1e-12, "{} vs {want}", fit.slope);
        // log10(3) / log10(4), frozen from the reference formula
        assert!((fit.slope - 0.792_481_250_360_578).abs() < 1e-12);
    }

    #[test]
    fn fit_errors() {
        assert!(matches!(
            fit_power_law(&[(10.0, 1.0), (10.0, 2.0), (10.0, 3.0)]),
            Err(Error::DegenerateFit(_))
        ));
        assert!(matches!(
            fit_power_law(&[(10.0, 1.0), (20.0, 0.0), (30.0, 3.0)]),
            Err(Error::NonPositiveValue(_))
        ));
        assert!(matches!(
            fit_power_law(&[(10.0, 1.0), (20.0, 2.0)]),
            Err(Error::DegenerateFit(_))
        ));
    }

    #[test]
    fn default_grid() {
        let grid = default_sample_sizes(2000);
        assert_eq!(grid.len(), 9);
        assert_eq!(grid[0], 64);
        assert_eq!(*grid.last().unwrap(), 1024);
        assert!(grid.windows(2).all(|w| w[0] < w[1]));
        let grid = default_sample_sizes(300);
        assert_eq!((grid[0], *grid.last().unwrap()), (64, 300));
        let small = default_sample_sizes(40);
        assert_eq!((small[0], *small.last().unwrap()), (10, 40));
    }

    fn uniform(n: usize, d: usize, seed: u64) -> PointCloud {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        PointCloud::from_flat((0..n * d).map(|_| rng.random::<f64>()).collect(), n, d).unwrap()
    }

    #[test]
    fn config_validation() {
        let cloud = uniform(100, 2, 1);
        let mut cfg = PhDimConfig {
            sample_sizes: Some(vec![10, 20]),
            ..PhDimConfig::default()
        };
        assert!(matches!(estimate_phdim(&cloud, &cfg), Err(Error::InvalidConfig(_))));
        cfg.sample_sizes = Some(vec![10, 20, 200]);
        assert!(matches!(
            estimate_phdim(&cloud, &cfg),
            Err(Error::SampleTooLarge { .. })
        ));
        cfg.sample_sizes = Some(vec![1, 20, 40]);
        assert!(estimate_phdim(&cloud, &cfg).is_err());
        cfg.sample_sizes = None;
        cfg.alpha = 0.0;
        assert!(estimate_phdim(&cloud, &cfg).is_err());
    }

    #[test]
    fn slope_at_least_one_is_an_error() {
        // With alpha near zero every bar contributes ~1, so E ~ n - 1 and the
        // log-log slope over small sizes exceeds one.
        let rows: Vec<[f64; 1]> = (0..64).map(|i| [i as f64 / 63.0]).collect();
        let cloud = PointCloud::from_rows(&rows).unwrap();
        let cfg = PhDimConfig {
            alpha: 1e-9,
            sample_sizes: Some(vec![8, 16, 32, 64]),
            repeats: 2,
            ..PhDimConfig::default()
        };
        assert!(matches!(
            estimate_phdim(&cloud, &cfg),
            Err(Error::SlopeAtLeastOne(b)) if b > 1.0
        ));
    }

    #[test]
    fn deterministic_and_plane_like() {
        let cloud = uniform(600, 2, 3);
        let cfg = PhDimConfig::with_seed(11);
        let a = estimate_phdim(&cloud, &cfg).unwrap();
        let b = estimate_phdim(&cloud, &cfg).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert!(a.points.windows(2).all(|w| w[0].n < w[1].n));
        assert!(a.phdim > 1.5 && a.phdim < 2.5, "{}", a.phdim);
    }
}
