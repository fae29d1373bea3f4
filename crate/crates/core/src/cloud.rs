//! Point clouds, loading from disk, subsampling and pairwise distances.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::npy;

/// An `n × d` matrix of finite `f64` coordinates, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    data: Vec<f64>,
    n: usize,
    d: usize,
    source_label: Option<String>,
}

impl PointCloud {
    /// Builds a cloud from row-major data, checking shape and finiteness.
    pub fn from_flat(data: Vec<f64>, n: usize, d: usize) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::EmptyCloud { rows: n, cols: d });
        }
        if data.len() != n * d {
            return Err(Error::MalformedFile(format!(
                "{} values do not fill a {n}x{d} matrix",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteData {
                row: pos / d,
                col: pos % d,
            });
        }
        Ok(Self {
            data,
            n,
            d,
            source_label: None,
        })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let d = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(n * d);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != d {
                return Err(Error::MalformedFile(format!(
                    "row {i} has {} columns, expected {d}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Self::from_flat(data, n, d)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.source_label = Some(label.into());
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn source_label(&self) -> Option<&str> {
        self.source_label.as_deref()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> {
        self.data.chunks_exact(self.d)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    /// Applies `f` to every coordinate. The result must stay finite.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let mut out = Self::from_flat(self.data.iter().map(|&v| f(v)).collect(), self.n, self.d)?;
        out.source_label = self.source_label.clone();
        Ok(out)
    }

    pub fn scaled(&self, s: f64) -> Result<Self> {
        self.map(|v| v * s)
    }

    /// Rows gathered in the order given by `indices`.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let mut data = Vec::with_capacity(indices.len() * self.d);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        let mut out = Self::from_flat(data, indices.len(), self.d)?;
        out.source_label = self.source_label.clone();
        Ok(out)
    }
}

/// Symmetric `n × n` matrix of pairwise distances with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    entries: Vec<f64>,
    n: usize,
}

impl DistanceMatrix {
    /// Validates symmetry, the zero diagonal and non-negativity.
    pub fn from_flat(entries: Vec<f64>, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyCloud { rows: 0, cols: 0 });
        }
        if entries.len() != n * n {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for a {n}x{n} distance matrix",
                entries.len()
            )));
        }
        for i in 0..n {
            if entries[i * n + i] != 0.0 {
                return Err(Error::InvalidConfig(format!("nonzero diagonal at {i}")));
            }
            for j in 0..i {
                let v = entries[i * n + j];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::NonFiniteData { row: i, col: j });
                }
                if v != entries[j * n + i] {
                    return Err(Error::InvalidConfig(format!("asymmetric at ({i}, {j})")));
                }
            }
        }
        Ok(Self { entries, n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn max_distance(&self) -> f64 {
        self.entries.iter().copied().fold(0.0, f64::max)
    }

    /// `min_i max_j d(i, j)`: beyond this radius the Rips complex is a cone.
    pub fn enclosing_radius(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).iter().copied().fold(0.0, f64::max))
            .fold(f64::INFINITY, f64::min)
    }

    /// Values strictly above the diagonal, row by row.
    pub fn upper_triangle(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n * (self.n.saturating_sub(1)) / 2);
        for i in 0..self.n {
            out.extend_from_slice(&self.row(i)[i + 1..]);
        }
        out
    }
}

/// Distance function used to build a [`DistanceMatrix`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    #[default]
    Euclidean,
}

pub fn pairwise_distances(cloud: &PointCloud) -> DistanceMatrix {
    pairwise_distances_with(cloud, Metric::Euclidean)
}

pub fn pairwise_distances_with(cloud: &PointCloud, metric: Metric) -> DistanceMatrix {
    let n = cloud.n();
    let mut entries = vec![0.0; n * n];
    match metric {
        Metric::Euclidean => {
            for i in 0..n {
                let a = cloud.row(i);
                for j in (i + 1)..n {
                    let b = cloud.row(j);
                    let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
                    let d = d2.sqrt();
                    entries[i * n + j] = d;
                    entries[j * n + i] = d;
                }
            }
        }
    }
    DistanceMatrix { entries, n }
}

/// Draws `m` distinct rows uniformly without replacement.
///
/// The output order is the sampling order, so `m == n` yields a permutation.
pub fn subsample(cloud: &PointCloud, m: usize, seed: u64) -> Result<PointCloud> {
    if m > cloud.n() {
        return Err(Error::SampleTooLarge {
            requested: m,
            available: cloud.n(),
        });
    }
    if m == 0 {
        return Err(Error::EmptyCloud {
            rows: 0,
            cols: cloud.d(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let indices = rand::seq::index::sample(&mut rng, cloud.n(), m).into_vec();
    cloud.select(&indices)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CloudFormat {
    Npy,
    Csv,
}

impl CloudFormat {
    /// Guesses the format from the file extension.
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "npy" => Some(Self::Npy),
            "csv" => Some(Self::Csv),
            _ => None,
        }
    }
}

impl FromStr for CloudFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "npy" => Ok(Self::Npy),
            "csv" => Ok(Self::Csv),
            other => Err(format!("unknown point cloud format `{other}`")),
        }
    }
}

impl fmt::Display for CloudFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Npy => "npy",
            Self::Csv => "csv",
        })
    }
}

pub fn load_point_cloud(path: impl AsRef<Path>, format: CloudFormat) -> Result<PointCloud> {
    let path = path.as_ref();
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    let cloud = match format {
        CloudFormat::Npy => {
            let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
            let mut reader = std::io::BufReader::new(file);
            let (data, shape) = npy::read_f64_matrix(&mut reader)?;
            PointCloud::from_flat(data, shape.0, shape.1)?
        }
        CloudFormat::Csv => {
            let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
            read_csv(file)?
        }
    };
    Ok(cloud.with_label(path.display().to_string()))
}

/// Loads a cloud, inferring the format from the extension.
pub fn load_point_cloud_auto(path: impl AsRef<Path>) -> Result<PointCloud> {
    let path = path.as_ref();
    let format = CloudFormat::from_path(path).ok_or_else(|| {
        Error::MalformedFile(format!(
            "cannot infer format of {} (expected .npy or .csv)",
            path.display()
        ))
    })?;
    load_point_cloud(path, format)
}

/// Comma-separated, one point per row, optional single header row.
///
/// The first row is treated as a header when any of its fields does not
/// parse as a number.
pub fn read_csv<R: std::io::Read>(reader: R) -> Result<PointCloud> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut data = Vec::new();
    let mut d = 0;
    let mut n = 0;
    for (i, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| Error::MalformedFile(e.to_string()))?;
        let parsed: std::result::Result<Vec<f64>, _> =
            record.iter().map(|f| f.parse::<f64>()).collect();
        let row = match parsed {
            Ok(row) => row,
            Err(_) if i == 0 => continue,
            Err(e) => {
                return Err(Error::MalformedFile(format!(
                    "record {}: {e}",
                    i + 1
                )))
            }
        };
        if n == 0 {
            d = row.len();
        } else if row.len() != d {
            return Err(Error::MalformedFile(format!(
                "record {} has {} fields, expected {d}",
                i + 1,
                row.len()
            )));
        }
        data.extend(row);
        n += 1;
    }
    PointCloud::from_flat(data, n, d)
}

pub fn write_csv<W: std::io::Write>(cloud: &PointCloud, writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    for row in cloud.rows() {
        wtr.write_record(row.iter().map(|v| format!("{v:?}")))
            .map_err(|e| Error::MalformedFile(e.to_string()))?;
    }
    wtr.flush()
        .map_err(|e| Error::io("<csv writer>", e))?;
    Ok(())
}

pub fn save_npy(cloud: &PointCloud, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    npy::write_f64_matrix(&mut w, cloud.as_flat(), (cloud.n(), cloud.d()))
        .map_err(|e| Error::io(path, e))?;
    std::io::Write::flush(&mut w).map_err(|e| Error::io(path, e))
}
