//! Vietoris–Rips persistent homology in degrees 0 and 1.
//!
//! Three entry points share one output type:
//!
//! * [`mst_h0`] computes the degree-0 barcode from a Kruskal minimum spanning
//!   tree; every finite bar dies at an MST edge weight.
//! * [`vr_persistence`] adds degree-1 bars by reducing the coboundary matrix
//!   of edges against triangles, with the degree-0 death edges cleared.
//! * [`brute_force_persistence`] enumerates the full complex of up to 12
//!   points and runs the textbook boundary-matrix reduction. It exists to
//!   check the other two.
//!
//! Coefficients are in Z/2. Simplices of equal diameter are ordered by their
//! ascending vertex tuples. Zero-length degree-1 bars are dropped.

mod brute;
mod mst;
mod rips;
mod union_find;

use std::cmp::Ordering;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::de::{self, Deserializer};
use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};

use crate::cloud::DistanceMatrix;
use crate::error::{Error, Result};

pub use brute::{brute_force_persistence, BRUTE_FORCE_MAX_POINTS};
pub use mst::{mst_edges, mst_h0};
pub use rips::vr_persistence;
pub use union_find::UnionFind;

/// Highest homology degree any routine here computes.
pub const MAX_SUPPORTED_DEGREE: usize = 1;

/// A `(birth, death, degree)` triple. `death` is `f64::INFINITY` for
/// classes that never die.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PersistenceInterval {
    pub birth: f64,
    pub death: f64,
    pub degree: usize,
}

impl PersistenceInterval {
    pub fn new(birth: f64, death: f64, degree: usize) -> Self {
        debug_assert!(death >= birth, "death {death} before birth {birth}");
        Self {
            birth,
            death,
            degree,
        }
    }

    pub fn infinite(birth: f64, degree: usize) -> Self {
        Self::new(birth, f64::INFINITY, degree)
    }

    pub fn is_infinite(&self) -> bool {
        self.death.is_infinite()
    }

    pub fn lifespan(&self) -> f64 {
        self.death - self.birth
    }

    fn sort_key(&self, other: &Self) -> Ordering {
        self.degree
            .cmp(&other.degree)
            .then(self.birth.total_cmp(&other.birth))
            .then(self.death.total_cmp(&other.death))
    }
}

/// Finite endpoints are JSON numbers; infinity is the string `"inf"`.
mod endpoint {
    use super::*;

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        if v.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(v),
            Raw::Text(t) if t == "inf" => Ok(f64::INFINITY),
            Raw::Text(t) => Err(de::Error::custom(format!("bad endpoint `{t}`"))),
        }
    }
}

impl Serialize for PersistenceInterval {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        struct Endpoint(f64);
        impl Serialize for Endpoint {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                endpoint::serialize(&self.0, s)
            }
        }
        let mut st = s.serialize_struct("PersistenceInterval", 3)?;
        st.serialize_field("birth", &self.birth)?;
        st.serialize_field("death", &Endpoint(self.death))?;
        st.serialize_field("degree", &self.degree)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for PersistenceInterval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            birth: f64,
            #[serde(with = "endpoint")]
            death: f64,
            degree: usize,
        }
        let raw = Raw::deserialize(d)?;
        if raw.death < raw.birth {
            return Err(de::Error::custom("death precedes birth"));
        }
        if raw.degree > MAX_SUPPORTED_DEGREE {
            return Err(de::Error::custom("degree must be 0 or 1"));
        }
        Ok(Self::new(raw.birth, raw.death, raw.degree))
    }
}

/// Filtration cap for [`vr_persistence`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Threshold {
    /// The enclosing radius `min_i max_j d(i, j)`. Past it the complex is a
    /// cone, so no finite bar is lost.
    #[default]
    Auto,
    Value(f64),
}

impl Threshold {
    pub fn resolve(self, dist: &DistanceMatrix) -> Result<f64> {
        match self {
            Threshold::Auto => Ok(dist.enclosing_radius()),
            Threshold::Value(t) if t > 0.0 => Ok(t),
            Threshold::Value(t) => Err(Error::BadThreshold(t)),
        }
    }
}

impl FromStr for Threshold {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Threshold::Auto);
        }
        s.parse::<f64>()
            .map(Threshold::Value)
            .map_err(|_| format!("threshold must be a number or `auto`, got `{s}`"))
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Threshold::Auto => f.write_str("auto"),
            Threshold::Value(v) => write!(f, "{v}"),
        }
    }
}

/// The interval multiset of one filtration, sorted by `(degree, birth, death)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Barcode {
    pub n_points: usize,
    pub max_degree: usize,
    #[serde(with = "endpoint")]
    pub threshold: f64,
    pub intervals: Vec<PersistenceInterval>,
}

impl Barcode {
    pub(crate) fn new(
        n_points: usize,
        max_degree: usize,
        threshold: f64,
        mut intervals: Vec<PersistenceInterval>,
    ) -> Self {
        intervals.sort_by(PersistenceInterval::sort_key);
        Self {
            n_points,
            max_degree,
            threshold,
            intervals,
        }
    }

    pub fn degree(&self, degree: usize) -> impl Iterator<Item = &PersistenceInterval> {
        self.intervals.iter().filter(move |iv| iv.degree == degree)
    }

    pub fn finite(&self, degree: usize) -> impl Iterator<Item = &PersistenceInterval> {
        self.degree(degree).filter(|iv| !iv.is_infinite())
    }

    /// Betti number of the complex at the threshold.
    pub fn essential_count(&self, degree: usize) -> usize {
        self.degree(degree).filter(|iv| iv.is_infinite()).count()
    }

    /// Multiset equality with endpoint tolerance `tol`.
    ///
    /// Both barcodes are sorted, so equal multisets line up position by
    /// position once near-equal endpoints are allowed to swap; the check
    /// falls back to greedy matching within each degree.
    pub fn same_intervals(&self, other: &Barcode, tol: f64) -> bool {
        if self.intervals.len() != other.intervals.len() {
            return false;
        }
        let close = |a: f64, b: f64| {
            (a.is_infinite() && b.is_infinite() && a.signum() == b.signum()) || (a - b).abs() <= tol
        };
        let degrees = self.max_degree.max(other.max_degree);
        (0..=degrees).all(|deg| {
            let mut theirs: Vec<&PersistenceInterval> = other.degree(deg).collect();
            let ours: Vec<&PersistenceInterval> = self.degree(deg).collect();
            if ours.len() != theirs.len() {
                return false;
            }
            ours.iter().all(|a| {
                match theirs
                    .iter()
                    .position(|b| close(a.birth, b.birth) && close(a.death, b.death))
                {
                    Some(pos) => {
                        theirs.swap_remove(pos);
                        true
                    }
                    None => false,
                }
            })
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("barcode serializes")
    }

    /// Three-column CSV (`birth,death,degree`), infinity written as `inf`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "birth,death,degree")?;
        for iv in &self.intervals {
            let death = if iv.is_infinite() {
                "inf".to_string()
            } else {
                iv.death.to_string()
            };
            writeln!(w, "{},{},{}", iv.birth, death, iv.degree)?;
        }
        Ok(())
    }

    pub fn read_csv<R: std::io::Read>(r: R, n_points: usize, max_degree: usize) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
        let mut intervals = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| Error::MalformedFile(e.to_string()))?;
            let field = |i: usize| rec.get(i).ok_or_else(|| Error::MalformedFile("short record".into()));
            let num = |s: &str| {
                if s == "inf" {
                    Ok(f64::INFINITY)
                } else {
                    s.parse::<f64>()
                        .map_err(|_| Error::MalformedFile(format!("bad number `{s}`")))
                }
            };
            let birth = num(field(0)?)?;
            let death = num(field(1)?)?;
            let degree = field(2)?
                .parse::<usize>()
                .map_err(|_| Error::MalformedFile("bad degree".into()))?;
            if death < birth || degree > MAX_SUPPORTED_DEGREE {
                return Err(Error::MalformedFile("invalid interval".into()));
            }
            intervals.push(PersistenceInterval::new(birth, death, degree));
        }
        let threshold = intervals
            .iter()
            .map(|iv| if iv.is_infinite() { iv.birth } else { iv.death })
            .fold(0.0, f64::max);
        Ok(Self::new(n_points, max_degree, threshold, intervals))
    }
}

/// An edge `(i, j)` with `i < j`, ordered by `(diameter, i, j)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Edge {
    pub diam: f64,
    pub i: u32,
    pub j: u32,
}

impl Edge {
    pub(crate) fn filtration_cmp(&self, other: &Self) -> Ordering {
        self.diam
            .total_cmp(&other.diam)
            .then(self.i.cmp(&other.i))
            .then(self.j.cmp(&other.j))
    }
}

/// All edges of diameter at most `threshold`, in filtration order.
pub(crate) fn sorted_edges(dist: &DistanceMatrix, threshold: f64) -> Vec<Edge> {
    let n = dist.n();
    let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        let row = dist.row(i);
        for (j, &diam) in row.iter().enumerate().skip(i + 1) {
            if diam <= threshold {
                edges.push(Edge {
                    diam,
                    i: i as u32,
                    j: j as u32,
                });
            }
        }
    }
    edges.sort_unstable_by(Edge::filtration_cmp);
    edges
}

pub(crate) fn check_degree(max_degree: usize) -> Result<()> {
    if max_degree > MAX_SUPPORTED_DEGREE {
        Err(Error::UnsupportedDegree(max_degree))
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_json_uses_inf_literal() {
        let iv = PersistenceInterval::infinite(0.0, 0);
        let text = serde_json::to_string(&iv).unwrap();
        assert_eq!(text, r#"{"birth":0.0,"death":"inf","degree":0}"#);
        let back: PersistenceInterval = serde_json::from_str(&text).unwrap();
        assert_eq!(back, iv);
    }

    #[test]
    fn interval_json_rejects_inverted() {
        assert!(serde_json::from_str::<PersistenceInterval>(
            r#"{"birth":2.0,"death":1.0,"degree":0}"#
        )
        .is_err());
        assert!(serde_json::from_str::<PersistenceInterval>(
            r#"{"birth":0.0,"death":1.0,"degree":2}"#
        )
        .is_err());
    }

    #[test]
    fn barcode_csv_round_trip() {
        let bc = Barcode::new(
            2,
            1,
            1.5,
            vec![
                PersistenceInterval::new(0.0, 1.0, 0),
                PersistenceInterval::infinite(0.0, 0),
                PersistenceInterval::new(1.0, 1.5, 1),
            ],
        );
        let mut buf = Vec::new();
        bc.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text, "birth,death,degree\n0,1,0\n0,inf,0\n1,1.5,1\n");
        let back = Barcode::read_csv(buf.as_slice(), 2, 1).unwrap();
        assert!(back.same_intervals(&bc, 0.0));
    }

    #[test]
    fn threshold_parsing() {
        assert_eq!("auto".parse::<Threshold>().unwrap(), Threshold::Auto);
        assert_eq!("2.5".parse::<Threshold>().unwrap(), Threshold::Value(2.5));
        assert!("x".parse::<Threshold>().is_err());
    }
}
