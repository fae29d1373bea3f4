use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the toolkit can report.
///
/// Variants are grouped by [`ErrorClass`]: validation failures mean the
/// input or configuration was rejected, computation failures mean the input
/// was well-formed but the requested quantity does not exist for it.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("malformed file: {0}")]
    MalformedFile(String),
    #[error("non-finite value at row {row}, column {col}")]
    NonFiniteData { row: usize, col: usize },
    #[error("point cloud is empty ({rows} rows, {cols} columns)")]
    EmptyCloud { rows: usize, cols: usize },
    #[error("cannot draw {requested} points from a cloud of {available}")]
    SampleTooLarge { requested: usize, available: usize },
    #[error("homology degree {0} is not supported (max 1)")]
    UnsupportedDegree(usize),
    #[error("filtration threshold must be positive, got {0}")]
    BadThreshold(f64),
    #[error("brute-force persistence is limited to 12 points, got {0}")]
    TooLarge(usize),
    #[error("degree {requested} not computed in barcode (max degree {available})")]
    DegreeUnavailable { requested: usize, available: usize },
    #[error("alpha must be non-negative, got {0}")]
    NegativeAlpha(f64),
    #[error("degenerate power-law fit: {0}")]
    DegenerateFit(String),
    #[error("non-positive value {0} cannot be log-transformed")]
    NonPositiveValue(f64),
    #[error("fitted slope {0} is at least 1; dimension is undefined")]
    SlopeAtLeastOne(f64),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("duplicate points: nearest-neighbor distance is zero at point {0}")]
    DuplicatePoints(usize),
    #[error("need at least {required} points, got {got}")]
    TooFew { required: usize, got: usize },
    #[error("neighbor count k={k} invalid for {n} points (need 3 <= k < n)")]
    BadK { k: usize, n: usize },
    #[error("degenerate distances: {0}")]
    DegenerateDistances(String),
    #[error("batch size {batch_size} exceeds {available} points in {path}")]
    BatchTooLarge {
        batch_size: usize,
        available: usize,
        path: PathBuf,
    },
    #[error("missing file {0}")]
    MissingFile(PathBuf),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid manifest: {0}")]
    InvalidManifest(String),
    #[error("input is constant; correlation undefined")]
    ConstantInput,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("need at least 3 pairs, got {0}")]
    TooFewPairs(usize),
    #[error("measure {0} missing from report")]
    MissingMeasure(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Validation,
    Computation,
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Io { .. } => "Io",
            Error::MalformedFile(_) => "MalformedFile",
            Error::NonFiniteData { .. } => "NonFiniteData",
            Error::EmptyCloud { .. } => "EmptyCloud",
            Error::SampleTooLarge { .. } => "SampleTooLarge",
            Error::UnsupportedDegree(_) => "UnsupportedDegree",
            Error::BadThreshold(_) => "BadThreshold",
            Error::TooLarge(_) => "TooLarge",
            Error::DegreeUnavailable { .. } => "DegreeUnavailable",
            Error::NegativeAlpha(_) => "NegativeAlpha",
            Error::DegenerateFit(_) => "DegenerateFit",
            Error::NonPositiveValue(_) => "NonPositiveValue",
            Error::SlopeAtLeastOne(_) => "SlopeAtLeastOne",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::DuplicatePoints(_) => "DuplicatePoints",
            Error::TooFew { .. } => "TooFew",
            Error::BadK { .. } => "BadK",
            Error::DegenerateDistances(_) => "DegenerateDistances",
            Error::BatchTooLarge { .. } => "BatchTooLarge",
            Error::MissingFile(_) => "MissingFile",
            Error::ShapeMismatch(_) => "ShapeMismatch",
            Error::InvalidManifest(_) => "InvalidManifest",
            Error::ConstantInput => "ConstantInput",
            Error::LengthMismatch(..) => "LengthMismatch",
            Error::TooFewPairs(_) => "TooFewPairs",
            Error::MissingMeasure(_) => "MissingMeasure",
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::DegenerateFit(_)
            | Error::NonPositiveValue(_)
            | Error::SlopeAtLeastOne(_)
            | Error::DuplicatePoints(_)
            | Error::DegenerateDistances(_)
            | Error::ConstantInput => ErrorClass::Computation,
            _ => ErrorClass::Validation,
        }
    }
}
