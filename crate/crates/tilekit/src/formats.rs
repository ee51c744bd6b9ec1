//! JSON file formats for graphs, tilings, and regularity certificates.
//!
//! Rationals are always serialized as `"p/q"` strings; parsers also accept a
//! bare integer. Graph writers emit a canonical sorted edge list with the
//! lower endpoint first, but readers accept edges in either orientation and
//! any order. All writers end the file with a newline and use a stable field
//! order, so equal inputs produce byte-identical files.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use tilekit_core::params::{CertificateKind, DensityWindow, EpsParam, RegularityCertificate};
use tilekit_core::tiling::{Tile, Tiling};
use tilekit_core::{KPartiteGraph, Rational, VertexRef};

#[derive(Debug)]
pub enum FormatError {
    Io(std::io::Error),
    Json(serde_json::Error),
    /// A string that should have been a `p/q` rational.
    BadRational(String),
    BadGraph(String),
    BadTiling(String),
    BadCertificate(String),
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormatError::Io(e) => write!(f, "io error: {}", e),
            FormatError::Json(e) => write!(f, "json error: {}", e),
            FormatError::BadRational(s) => write!(f, "not a p/q rational: {:?}", s),
            FormatError::BadGraph(m) => write!(f, "bad graph file: {}", m),
            FormatError::BadTiling(m) => write!(f, "bad tiling file: {}", m),
            FormatError::BadCertificate(m) => write!(f, "bad certificate file: {}", m),
        }
    }
}

impl std::error::Error for FormatError {}

impl From<std::io::Error> for FormatError {
    fn from(e: std::io::Error) -> Self {
        FormatError::Io(e)
    }
}

impl From<serde_json::Error> for FormatError {
    fn from(e: serde_json::Error) -> Self {
        FormatError::Json(e)
    }
}

pub fn parse_rational(s: &str) -> Result<Rational, FormatError> {
    Rational::from_str(s).map_err(|_| FormatError::BadRational(s.to_string()))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, FormatError> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), FormatError> {
    fs::write(path, to_json_string(value)?)?;
    Ok(())
}

/// Pretty JSON with a trailing newline; the canonical on-disk form.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String, FormatError> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// A balanced k-partite graph: `k` parts of `n` vertices, edges as
/// `[[i, a], [j, b]]` pairs of 1-based (part, index) references.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub k: usize,
    pub n: usize,
    pub edges: Vec<[[usize; 2]; 2]>,
}

impl GraphFile {
    pub fn from_graph(g: &KPartiteGraph) -> Self {
        GraphFile {
            k: g.k(),
            n: g.n(),
            edges: g
                .edges()
                .into_iter()
                .map(|(u, v)| [[u.part, u.index], [v.part, v.index]])
                .collect(),
        }
    }

    pub fn to_graph(&self) -> Result<KPartiteGraph, FormatError> {
        let mut g = KPartiteGraph::edgeless(self.k, self.n)
            .map_err(|e| FormatError::BadGraph(e.to_string()))?;
        for (pos, e) in self.edges.iter().enumerate() {
            let u = VertexRef::new(e[0][0], e[0][1]);
            let v = VertexRef::new(e[1][0], e[1][1]);
            g.add_edge(u, v)
                .map_err(|err| FormatError::BadGraph(format!("edge {}: {}", pos, err)))?;
        }
        Ok(g)
    }

    pub fn read(path: &Path) -> Result<Self, FormatError> {
        read_json(path)
    }

    pub fn write(&self, path: &Path) -> Result<(), FormatError> {
        write_json(path, self)
    }
}

pub fn read_graph(path: &Path) -> Result<KPartiteGraph, FormatError> {
    GraphFile::read(path)?.to_graph()
}

pub fn write_graph(path: &Path, g: &KPartiteGraph) -> Result<(), FormatError> {
    GraphFile::from_graph(g).write(path)
}

/// A tiling: `h` vertices per part per tile; each tile is a flat list of
/// `[part, index]` pairs in part-major ascending order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TilingFile {
    pub h: usize,
    pub tiles: Vec<Vec<[usize; 2]>>,
}

impl TilingFile {
    pub fn from_tiling(t: &Tiling) -> Self {
        TilingFile {
            h: t.h,
            tiles: t
                .tiles
                .iter()
                .map(|tile| tile.vertices().map(|v| [v.part, v.index]).collect())
                .collect(),
        }
    }

    /// Rebuilds the tiling for a graph on `k` parts: every tile must hold
    /// exactly `h` vertices in each of the `k` parts.
    pub fn to_tiling(&self, k: usize) -> Result<Tiling, FormatError> {
        if self.h == 0 {
            return Err(FormatError::BadTiling("h must be positive".to_string()));
        }
        let mut tiles = Vec::with_capacity(self.tiles.len());
        for (pos, flat) in self.tiles.iter().enumerate() {
            let mut parts: Vec<Vec<VertexRef>> = vec![Vec::with_capacity(self.h); k];
            for pair in flat {
                let v = VertexRef::new(pair[0], pair[1]);
                if v.part == 0 || v.part > k {
                    return Err(FormatError::BadTiling(format!(
                        "tile {}: part {} out of range",
                        pos, v.part
                    )));
                }
                parts[v.part - 1].push(v);
            }
            for (i, side) in parts.iter_mut().enumerate() {
                side.sort();
                side.dedup();
                if side.len() != self.h {
                    return Err(FormatError::BadTiling(format!(
                        "tile {}: part {} holds {} vertices, want {}",
                        pos,
                        i + 1,
                        side.len(),
                        self.h
                    )));
                }
            }
            tiles.push(Tile { parts });
        }
        Ok(Tiling { h: self.h, tiles })
    }

    pub fn read(path: &Path) -> Result<Self, FormatError> {
        read_json(path)
    }

    pub fn write(&self, path: &Path) -> Result<(), FormatError> {
        write_json(path, self)
    }
}

/// Flat JSON mirror of a regularity certificate. `kind` selects which of
/// the optional fields are present.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateFile {
    /// One of "exact-exhaustive", "kr-good-pairs", "slicing-derived",
    /// "by-construction".
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub good_pairs: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refined: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<Box<CertificateFile>>,
    pub epsilon: EpsilonFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density_lo: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density_hi: Option<String>,
}

/// `form` is "exact" for a plain rational or "fifth-root" for value^(1/5).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpsilonFile {
    pub form: String,
    pub value: String,
}

impl EpsilonFile {
    pub fn from_eps(e: &EpsParam) -> Self {
        match e {
            EpsParam::Exact(r) => EpsilonFile {
                form: "exact".to_string(),
                value: r.to_pq_string(),
            },
            EpsParam::FifthRoot(x) => EpsilonFile {
                form: "fifth-root".to_string(),
                value: x.to_pq_string(),
            },
        }
    }

    pub fn to_eps(&self) -> Result<EpsParam, FormatError> {
        let v = parse_rational(&self.value)?;
        match self.form.as_str() {
            "exact" => Ok(EpsParam::Exact(v)),
            "fifth-root" => {
                if v.is_negative() {
                    return Err(FormatError::BadCertificate(
                        "fifth-root argument must be nonnegative".to_string(),
                    ));
                }
                Ok(EpsParam::FifthRoot(v))
            }
            other => Err(FormatError::BadCertificate(format!(
                "unknown epsilon form {:?}",
                other
            ))),
        }
    }
}

impl CertificateFile {
    pub fn from_certificate(c: &RegularityCertificate) -> Self {
        let (kind, good_pairs, refined, alpha, parent) = match &c.kind {
            CertificateKind::ExactExhaustive => ("exact-exhaustive", None, None, None, None),
            CertificateKind::KrGoodPairs { good_pairs, refined } => (
                "kr-good-pairs",
                Some(*good_pairs),
                Some(*refined),
                None,
                None,
            ),
            CertificateKind::SlicingDerived { parent, alpha } => (
                "slicing-derived",
                None,
                None,
                Some(alpha.to_pq_string()),
                Some(Box::new(CertificateFile::from_certificate(parent))),
            ),
            CertificateKind::ByConstruction => ("by-construction", None, None, None, None),
        };
        CertificateFile {
            kind: kind.to_string(),
            good_pairs,
            refined,
            alpha,
            parent,
            epsilon: EpsilonFile::from_eps(&c.epsilon),
            density_lo: c.density_window.as_ref().map(|w| w.lo.to_pq_string()),
            density_hi: c.density_window.as_ref().map(|w| w.hi.to_pq_string()),
        }
    }

    pub fn to_certificate(&self) -> Result<RegularityCertificate, FormatError> {
        let kind = match self.kind.as_str() {
            "exact-exhaustive" => CertificateKind::ExactExhaustive,
            "by-construction" => CertificateKind::ByConstruction,
            "kr-good-pairs" => CertificateKind::KrGoodPairs {
                good_pairs: self.good_pairs.ok_or_else(|| {
                    FormatError::BadCertificate("kr-good-pairs needs good_pairs".to_string())
                })?,
                refined: self.refined.ok_or_else(|| {
                    FormatError::BadCertificate("kr-good-pairs needs refined".to_string())
                })?,
            },
            "slicing-derived" => {
                let parent = self.parent.as_ref().ok_or_else(|| {
                    FormatError::BadCertificate("slicing-derived needs parent".to_string())
                })?;
                let alpha = self.alpha.as_ref().ok_or_else(|| {
                    FormatError::BadCertificate("slicing-derived needs alpha".to_string())
                })?;
                CertificateKind::SlicingDerived {
                    parent: Box::new(parent.to_certificate()?),
                    alpha: parse_rational(alpha)?,
                }
            }
            other => {
                return Err(FormatError::BadCertificate(format!(
                    "unknown certificate kind {:?}",
                    other
                )))
            }
        };
        let density_window = match (&self.density_lo, &self.density_hi) {
            (Some(lo), Some(hi)) => {
                let w = DensityWindow {
                    lo: parse_rational(lo)?,
                    hi: parse_rational(hi)?,
                };
                if w.lo > w.hi {
                    return Err(FormatError::BadCertificate(
                        "density_lo exceeds density_hi".to_string(),
                    ));
                }
                Some(w)
            }
            (None, None) => None,
            _ => {
                return Err(FormatError::BadCertificate(
                    "density_lo and density_hi must come together".to_string(),
                ))
            }
        };
        Ok(RegularityCertificate {
            kind,
            epsilon: self.epsilon.to_eps()?,
            density_window,
        })
    }

    pub fn read(path: &Path) -> Result<Self, FormatError> {
        read_json(path)
    }

    pub fn write(&self, path: &Path) -> Result<(), FormatError> {
        write_json(path, self)
    }
}
