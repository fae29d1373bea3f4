//! Power-weighted lifespan sums `E_α^i = Σ (death − birth)^α` over the
//! finite bars of one degree.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::persistence::Barcode;

pub const DEFAULT_ALPHA: f64 = 1.0;
pub const DEFAULT_DEGREE: usize = 0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DescriptorValue {
    pub alpha: f64,
    pub degree: usize,
    pub value: f64,
    /// Finite bars of positive length that entered the sum.
    pub n_intervals: usize,
}

/// Sums `lifespan^alpha` over finite, positive-length bars of `degree`.
///
/// Infinite bars never contribute. With `alpha == 0` the result is the
/// number of such bars.
pub fn lifespan_sum(barcode: &Barcode, degree: usize, alpha: f64) -> Result<DescriptorValue> {
    if alpha.is_nan() || alpha < 0.0 {
        return Err(Error::NegativeAlpha(alpha));
    }
    if degree > barcode.max_degree {
        return Err(Error::DegreeUnavailable {
            requested: degree,
            available: barcode.max_degree,
        });
    }
    let (value, n_intervals) = barcode
        .finite(degree)
        .map(|iv| iv.lifespan())
        .filter(|&l| l > 0.0)
        .fold((0.0, 0), |(sum, count), l| (sum + l.powf(alpha), count + 1));
    Ok(DescriptorValue {
        alpha,
        degree,
        value,
        n_intervals,
    })
}
