//! Measurements across the layers and epochs of exported embeddings, and
//! their correlation with test accuracy.
//!
//! Embeddings are described by an [`EmbeddingManifest`] (JSON, version 1):
//!
//! ```json
//! {
//!   "manifest_version": 1,
//!   "model_name": "resnet18",
//!   "entries": [
//!     {"layer_index": 1, "epoch": 10, "class_label": "cat", "path": "layer1_epoch10_classcat.npy"}
//!   ],
//!   "accuracies": [{"epoch": 10, "train_accuracy": 0.99, "test_accuracy": 0.91}]
//! }
//! ```
//!
//! Relative paths are resolved against the manifest's directory.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cloud::{load_point_cloud_auto, subsample, PointCloud};
use crate::descriptors::lifespan_sum;
use crate::error::{Error, Result};
use crate::persistence::{mst_h0, vr_persistence, Threshold};
use crate::phdim::{estimate_phdim, PhDimConfig, DEFAULT_REPEATS};
use crate::seed::derive_seed;
use crate::cloud::pairwise_distances;

pub const MANIFEST_VERSION: u32 = 1;
pub const DEFAULT_BATCH_SIZE: usize = 300;
pub const DEFAULT_N_BATCHES: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    pub layer_index: usize,
    pub epoch: usize,
    #[serde(default)]
    pub class_label: Option<String>,
    pub path: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AccuracyRecord {
    pub epoch: usize,
    pub train_accuracy: f64,
    pub test_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbeddingManifest {
    pub manifest_version: u32,
    pub model_name: String,
    pub entries: Vec<ManifestEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accuracies: Option<Vec<AccuracyRecord>>,
}

impl EmbeddingManifest {
    /// Parses a manifest file and resolves its entry paths against the
    /// file's directory. The result is validated.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| {
            if e.kind() == std::io::ErrorKind::NotFound {
                Error::MissingFile(path.to_path_buf())
            } else {
                Error::io(path, e)
            }
        })?;
        let mut manifest: Self = serde_json::from_str(&text)
            .map_err(|e| Error::InvalidManifest(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new(""));
        for entry in &mut manifest.entries {
            if entry.path.is_relative() {
                entry.path = base.join(&entry.path);
            }
        }
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn validate(&self) -> Result<()> {
        if self.manifest_version != MANIFEST_VERSION {
            return Err(Error::InvalidManifest(format!(
                "unsupported manifest_version {}",
                self.manifest_version
            )));
        }
        if self.entries.is_empty() {
            return Err(Error::InvalidManifest("no entries".into()));
        }
        let mut seen = HashSet::new();
        for e in &self.entries {
            if !seen.insert((e.layer_index, e.epoch, e.class_label.clone())) {
                return Err(Error::InvalidManifest(format!(
                    "duplicate entry for layer {}, epoch {}, class {:?}",
                    e.layer_index, e.epoch, e.class_label
                )));
            }
            if !e.path.exists() {
                return Err(Error::MissingFile(e.path.clone()));
            }
        }
        let layers: std::collections::BTreeSet<usize> =
            self.entries.iter().map(|e| e.layer_index).collect();
        if layers.iter().copied().ne(1..=layers.len()) {
            return Err(Error::InvalidManifest(format!(
                "layer indices must be contiguous from 1, got {layers:?}"
            )));
        }
        for acc in self.accuracies.iter().flatten() {
            for v in [acc.train_accuracy, acc.test_accuracy] {
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::InvalidManifest(format!(
                        "accuracy {v} outside [0, 1] at epoch {}",
                        acc.epoch
                    )));
                }
            }
        }
        Ok(())
    }
}

#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Measure {
    E_alpha_0,
    E_alpha_1,
    #[serde(rename = "phdim")]
    PhDim,
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Measure::E_alpha_0 => "E_alpha_0",
            Measure::E_alpha_1 => "E_alpha_1",
            Measure::PhDim => "phdim",
        })
    }
}

impl FromStr for Measure {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "E_alpha_0" | "e_alpha_0" | "e0" => Ok(Measure::E_alpha_0),
            "E_alpha_1" | "e_alpha_1" | "e1" => Ok(Measure::E_alpha_1),
            "phdim" | "PH_dim" => Ok(Measure::PhDim),
            other => Err(format!(
                "unknown measure `{other}` (expected E_alpha_0, E_alpha_1 or phdim)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryConfig {
    pub batch_size: usize,
    pub n_batches: usize,
    pub measures: Vec<Measure>,
    pub alpha: f64,
    /// Subsamples per grid size inside each per-batch dimension estimate.
    pub phdim_repeats: usize,
    pub seed: u64,
}

impl Default for TrajectoryConfig {
    fn default() -> Self {
        Self {
            batch_size: DEFAULT_BATCH_SIZE,
            n_batches: DEFAULT_N_BATCHES,
            measures: vec![Measure::E_alpha_0],
            alpha: 1.0,
            phdim_repeats: DEFAULT_REPEATS,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub layer_index: usize,
    pub epoch: usize,
    pub measure: Measure,
    pub mean: f64,
    pub std: f64,
    pub n_batches: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryReport {
    pub model_name: String,
    pub config: TrajectoryConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accuracies: Option<Vec<AccuracyRecord>>,
    pub series: Vec<SeriesRow>,
}

impl TrajectoryReport {
    pub fn last_layer(&self) -> Option<usize> {
        self.series.iter().map(|r| r.layer_index).max()
    }

    /// Row for `measure` at the deepest layer and, among those, the latest
    /// epoch.
    pub fn last_layer_row(&self, measure: Measure) -> Option<&SeriesRow> {
        let layer = self.last_layer()?;
        self.series
            .iter()
            .filter(|r| r.layer_index == layer && r.measure == measure)
            .max_by_key(|r| r.epoch)
    }

    pub fn test_accuracy_at(&self, epoch: usize) -> Option<f64> {
        self.accuracies
            .iter()
            .flatten()
            .find(|a| a.epoch == epoch)
            .map(|a| a.test_accuracy)
    }

    /// Long format: `layer,epoch,measure,mean,std,n_batches`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "layer,epoch,measure,mean,std,n_batches")?;
        for r in &self.series {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                r.layer_index, r.epoch, r.measure, r.mean, r.std, r.n_batches
            )?;
        }
        Ok(())
    }
}

fn measure_batch(
    batch: &PointCloud,
    measures: &[Measure],
    config: &TrajectoryConfig,
    seed: u64,
) -> Result<Vec<f64>> {
    let needs_h1 = measures.contains(&Measure::E_alpha_1);
    let needs_h0 = measures.contains(&Measure::E_alpha_0);
    let barcode = if needs_h1 || needs_h0 {
        let dist = pairwise_distances(batch);
        Some(if needs_h1 {
            vr_persistence(&dist, 1, Threshold::Auto)?
        } else {
            mst_h0(&dist)
        })
    } else {
        None
    };
    measures
        .iter()
        .map(|m| match m {
            Measure::E_alpha_0 => Ok(lifespan_sum(barcode.as_ref().unwrap(), 0, config.alpha)?.value),
            Measure::E_alpha_1 => Ok(lifespan_sum(barcode.as_ref().unwrap(), 1, config.alpha)?.value),
            Measure::PhDim => {
                let cfg = PhDimConfig {
                    alpha: config.alpha,
                    degree: 0,
                    sample_sizes: None,
                    repeats: config.phdim_repeats,
                    seed,
                };
                Ok(estimate_phdim(batch, &cfg)?.phdim)
            }
        })
        .collect()
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Measures every `(layer, epoch)` of the manifest.
///
/// For each class cloud, `n_batches` subsamples of `batch_size` points are
/// drawn and measured; mean and population standard deviation are taken
/// over all `(class, batch)` pairs. Entries are processed in sorted order,
/// so the report does not depend on the manifest's entry order.
pub fn layer_trajectory(
    manifest: &EmbeddingManifest,
    config: &TrajectoryConfig,
) -> Result<TrajectoryReport> {
    manifest.validate()?;
    if config.batch_size < 2 || config.n_batches == 0 {
        return Err(Error::InvalidConfig(
            "batch_size must be at least 2 and n_batches at least 1".into(),
        ));
    }
    let mut measures = config.measures.clone();
    measures.sort();
    measures.dedup();
    if measures.is_empty() {
        return Err(Error::InvalidConfig("no measures requested".into()));
    }
    if config.alpha.is_nan() || config.alpha < 0.0 {
        return Err(Error::NegativeAlpha(config.alpha));
    }

    let mut groups: BTreeMap<(usize, usize), Vec<&ManifestEntry>> = BTreeMap::new();
    for e in &manifest.entries {
        groups.entry((e.layer_index, e.epoch)).or_default().push(e);
    }

    let mut series = Vec::new();
    for ((layer, epoch), mut entries) in groups {
        entries.sort_by(|a, b| a.class_label.cmp(&b.class_label));
        let clouds = entries
            .iter()
            .map(|e| load_point_cloud_auto(&e.path))
            .collect::<Result<Vec<_>>>()?;
        let d = clouds[0].d();
        for (cloud, entry) in clouds.iter().zip(&entries) {
            if cloud.d() != d {
                return Err(Error::ShapeMismatch(format!(
                    "layer {layer}, epoch {epoch}: {} has width {}, expected {d}",
                    entry.path.display(),
                    cloud.d()
                )));
            }
            if cloud.n() < config.batch_size {
                return Err(Error::BatchTooLarge {
                    batch_size: config.batch_size,
                    available: cloud.n(),
                    path: entry.path.clone(),
                });
            }
        }

        let cells: Vec<(usize, usize)> = (0..clouds.len())
            .flat_map(|c| (0..config.n_batches).map(move |b| (c, b)))
            .collect();
        let results: Vec<Vec<f64>> = cells
            .par_iter()
            .map(|&(c, b)| {
                let seed = derive_seed(config.seed, &[layer as u64, epoch as u64, c as u64, b as u64]);
                let batch = subsample(&clouds[c], config.batch_size, seed)?;
                measure_batch(&batch, &measures, config, derive_seed(seed, &[0xB1]))
            })
            .collect::<Result<_>>()?;

        for (k, &measure) in measures.iter().enumerate() {
            let values: Vec<f64> = results.iter().map(|r| r[k]).collect();
            let (mean, std) = mean_std(&values);
            series.push(SeriesRow {
                layer_index: layer,
                epoch,
                measure,
                mean,
                std,
                n_batches: values.len(),
            });
        }
    }

    Ok(TrajectoryReport {
        model_name: manifest.model_name.clone(),
        config: TrajectoryConfig {
            measures,
            ..config.clone()
        },
        accuracies: manifest.accuracies.clone(),
        series,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub r: f64,
    pub n_pairs: usize,
    pub measure: String,
    pub target: String,
}

/// Pearson product-moment correlation, computed from centered sums.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<CorrelationResult> {
    pearson_labeled(x, y, "x", "y")
}

pub fn pearson_labeled(x: &[f64], y: &[f64], measure: &str, target: &str) -> Result<CorrelationResult> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    let n = x.len();
    if n < 3 {
        return Err(Error::TooFewPairs(n));
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ConstantInput);
    }
    Ok(CorrelationResult {
        r: (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0),
        n_pairs: n,
        measure: measure.to_string(),
        target: target.to_string(),
    })
}

/// One trained model: its trajectory report and its test accuracy.
#[derive(Debug, Clone)]
pub struct ModelPoint {
    pub report: TrajectoryReport,
    pub test_accuracy: f64,
}

/// Correlates the last-layer `measure` of each model with its test
/// accuracy.
pub fn gengap_correlate(models: &[ModelPoint], measure: Measure) -> Result<CorrelationResult> {
    if models.len() < 3 {
        return Err(Error::TooFewPairs(models.len()));
    }
    let xs = models
        .iter()
        .map(|m| {
            m.report
                .last_layer_row(measure)
                .map(|row| row.mean)
                .ok_or_else(|| Error::MissingMeasure(format!("{measure} in {}", m.report.model_name)))
        })
        .collect::<Result<Vec<_>>>()?;
    let ys: Vec<f64> = models.iter().map(|m| m.test_accuracy).collect();
    pearson_labeled(&xs, &ys, &measure.to_string(), "test_accuracy")
}

/// A file listing model reports for [`gengap_correlate`]:
///
/// ```json
/// {"models": [{"report": "a/report.json", "test_accuracy": 0.91}]}
/// ```
///
/// When `test_accuracy` is omitted, the report's own accuracy record for the
/// epoch of its last-layer row is used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelList {
    pub models: Vec<ModelRef>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelRef {
    pub report: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test_accuracy: Option<f64>,
}

/// Accepts a bare report or the `{"config": .., "result": ..}` envelope
/// written by the command-line `trajectory` command.
fn parse_report(text: &str) -> serde_json::Result<TrajectoryReport> {
    match serde_json::from_str(text)? {
        serde_json::Value::Object(mut m) if m.contains_key("config") && m.contains_key("result") => {
            serde_json::from_value(m.remove("result").unwrap_or_default())
        }
        v => serde_json::from_value(v),
    }
}

impl ModelList {
    pub fn load_models(path: impl AsRef<Path>, measure: Measure) -> Result<Vec<ModelPoint>> {
        let path = path.as_ref();
        let read = |p: &Path| {
            std::fs::read_to_string(p).map_err(|e| {
                if e.kind() == std::io::ErrorKind::NotFound {
                    Error::MissingFile(p.to_path_buf())
                } else {
                    Error::io(p, e)
                }
            })
        };
        let list: ModelList = serde_json::from_str(&read(path)?)
            .map_err(|e| Error::InvalidManifest(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new(""));
        list.models
            .iter()
            .map(|m| {
                let rp = if m.report.is_relative() { base.join(&m.report) } else { m.report.clone() };
                let report = parse_report(&read(&rp)?)
                    .map_err(|e| Error::InvalidManifest(format!("{}: {e}", rp.display())))?;
                let accuracy = match m.test_accuracy {
                    Some(a) => a,
                    None => {
                        let row = report
                            .last_layer_row(measure)
                            .ok_or_else(|| Error::MissingMeasure(format!("{measure} in {}", rp.display())))?;
                        report.test_accuracy_at(row.epoch).ok_or_else(|| {
                            Error::InvalidManifest(format!(
                                "{} has no test accuracy for epoch {}",
                                rp.display(),
                                row.epoch
                            ))
                        })?
                    }
                };
                if !(0.0..=1.0).contains(&accuracy) {
                    return Err(Error::InvalidManifest(format!("accuracy {accuracy} outside [0, 1]")));
                }
                Ok(ModelPoint {
                    report,
                    test_accuracy: accuracy,
                })
            })
            .collect()
    }
}
