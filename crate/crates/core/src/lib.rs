//! Topology and geometry of point clouds and neural-network embeddings.
//!
//! The pipeline, bottom up:
//!
//! * [`cloud`]: load `.npy`/`.csv` point clouds, subsample, build Euclidean
//!   distance matrices.
//! * [`persistence`]: Vietoris–Rips barcodes in degrees 0 and 1, with a
//!   brute-force reference implementation.
//! * [`descriptors`]: power-weighted lifespan sums `E_α^i`.
//! * [`phdim`]: persistent-homological fractal dimension from the growth
//!   rate of `E_α^i` with sample size.
//! * [`classical_id`]: TwoNN, MLE and correlation-dimension estimators.
//! * [`trajectory`]: per-layer, per-epoch measurements over an embedding
//!   manifest, and correlation with test accuracy.
//! * [`cli`]: the `topoprobe` command-line front end.
//!
//! ```
//! use topoprobe::cloud::{pairwise_distances, PointCloud};
//! use topoprobe::descriptors::lifespan_sum;
//! use topoprobe::persistence::{vr_persistence, Threshold};
//!
//! let square = PointCloud::from_rows(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])?;
//! let barcode = vr_persistence(&pairwise_distances(&square), 1, Threshold::Auto)?;
//! assert_eq!(lifespan_sum(&barcode, 0, 1.0)?.value, 3.0);
//! # Ok::<(), topoprobe::Error>(())
//! ```

pub mod classical_id;
pub mod cli;
pub mod cloud;
pub mod descriptors;
pub mod error;
pub mod npy;
pub mod persistence;
pub mod phdim;
pub mod seed;
pub mod trajectory;

pub use error::{Error, ErrorClass, Result};
