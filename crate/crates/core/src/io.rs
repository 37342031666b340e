//! File formats: Loop and path JSON, functional-spec TOML, and the JSON
//! reports written by the solvers.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coincidence::{CoincidenceCertificate, FamilyReport, Method, SolveError};
use crate::error::Error;
use crate::functionals::{Component, FunctionalSpec};
use crate::loop_core::{node, Loop, Manifold};
use crate::sphere_geom::SpherePoint;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("malformed TOML: {0}")]
    Toml(String),
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
    #[error(transparent)]
    Invalid(#[from] Error),
}

impl From<serde_json::Error> for FormatError {
    fn from(e: serde_json::Error) -> Self {
        FormatError::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

fn field(field: &str, message: impl Into<String>) -> FormatError {
    FormatError::Field {
        field: field.into(),
        message: message.into(),
    }
}

pub fn read_text(path: &Path) -> Result<String, FormatError> {
    std::fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<(), FormatError> {
    std::fs::write(path, text).map_err(|source| FormatError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// `{"manifold": "sphere"|"euclidean", "n": int, "m": int, "base": [..], "samples": [[..], ...]}`
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoopDocument {
    pub manifold: String,
    pub n: usize,
    pub m: usize,
    pub base: Vec<f64>,
    pub samples: Vec<Vec<f64>>,
}

impl From<&Loop> for LoopDocument {
    fn from(l: &Loop) -> Self {
        let (manifold, n) = match l.manifold() {
            Manifold::Sphere(n) => ("sphere", n),
            Manifold::Euclidean(n) => ("euclidean", n),
        };
        LoopDocument {
            manifold: manifold.into(),
            n,
            m: l.m(),
            base: l.base().to_vec(),
            samples: l.samples().to_vec(),
        }
    }
}

impl TryFrom<LoopDocument> for Loop {
    type Error = FormatError;

    fn try_from(doc: LoopDocument) -> Result<Self, FormatError> {
        let manifold = match doc.manifold.as_str() {
            "sphere" => Manifold::Sphere(doc.n),
            "euclidean" => Manifold::Euclidean(doc.n),
            other => {
                return Err(field(
                    "manifold",
                    format!("expected \"sphere\" or \"euclidean\", got {other:?}"),
                ))
            }
        };
        if doc.samples.len() != doc.m + 1 {
            return Err(field(
                "samples",
                format!(
                    "m = {} requires {} samples, got {}",
                    doc.m,
                    doc.m + 1,
                    doc.samples.len()
                ),
            ));
        }
        Ok(Loop::new(manifold, doc.samples, doc.base)?)
    }
}

pub fn loop_from_json(text: &str) -> Result<Loop, FormatError> {
    let doc: LoopDocument = serde_json::from_str(text)?;
    Loop::try_from(doc)
}

pub fn loop_to_json(l: &Loop) -> String {
    to_json(&LoopDocument::from(l))
}

pub fn read_loop(path: &Path) -> Result<Loop, FormatError> {
    loop_from_json(&read_text(path)?)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
    s.push('\n');
    s
}

/// A sampled path `β : [0, 1] → R^dim`: `{"dim": int, "m": int, "samples": [[..], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathDocument {
    pub dim: usize,
    pub m: usize,
    pub samples: Vec<Vec<f64>>,
}

impl PathDocument {
    pub fn new(samples: Vec<Vec<f64>>) -> Self {
        PathDocument {
            dim: samples.first().map_or(0, Vec::len),
            m: samples.len().saturating_sub(1),
            samples,
        }
    }

    fn validate(self) -> Result<Vec<Vec<f64>>, FormatError> {
        if self.samples.len() != self.m + 1 {
            return Err(field(
                "samples",
                format!(
                    "m = {} requires {} samples, got {}",
                    self.m,
                    self.m + 1,
                    self.samples.len()
                ),
            ));
        }
        if let Some(i) = self.samples.iter().position(|p| p.len() != self.dim) {
            return Err(field(
                &format!("samples[{i}]"),
                format!("expected {} coordinates", self.dim),
            ));
        }
        if let Some(i) = self
            .samples
            .iter()
            .position(|p| p.iter().any(|v| !v.is_finite()))
        {
            return Err(field(&format!("samples[{i}]"), "non-finite coordinate"));
        }
        Ok(self.samples)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PathsFile {
    One(PathDocument),
    Many(Vec<PathDocument>),
}

/// Reads a path file holding one path document or an array of them.
pub fn paths_from_json(text: &str) -> Result<Vec<Vec<Vec<f64>>>, FormatError> {
    let docs = match serde_json::from_str::<PathsFile>(text)? {
        PathsFile::One(d) => vec![d],
        PathsFile::Many(v) => v,
    };
    docs.into_iter().map(PathDocument::validate).collect()
}

pub fn paths_to_json(paths: &[Vec<Vec<f64>>]) -> String {
    let docs: Vec<PathDocument> = paths.iter().cloned().map(PathDocument::new).collect();
    to_json(&docs)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    #[serde(default)]
    component: Vec<ComponentEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComponentEntry {
    kind: String,
    beta: Option<Vec<Vec<f64>>>,
    beta_file: Option<String>,
    beta_poly: Option<Vec<Vec<f64>>>,
    axis: Option<usize>,
    weights: Option<Vec<f64>>,
    weight_poly: Option<Vec<f64>>,
}

fn poly(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
}

/// Parses a functional spec:
///
/// ```toml
/// [[component]]
/// kind = "sqdist"              # ∫‖α − β‖²
/// beta_poly = [[0.0], [1.0]]   # or `beta = [[..], ...]` or `beta_file = "beta.json"`
///
/// [[component]]
/// kind = "wcoord"              # ∫ w(t) α_axis(t)
/// axis = 0
/// weight_poly = [0.0, 1.0]     # or `weights = [..]`
/// ```
///
/// Polynomial forms are sampled on the grid of size `m`; `beta_file` is
/// resolved relative to `base_dir`.
pub fn spec_from_toml(
    text: &str,
    base_dir: &Path,
    m: usize,
) -> Result<FunctionalSpec, FormatError> {
    let file: SpecFile = toml::from_str(text).map_err(|e| FormatError::Toml(e.to_string()))?;
    if file.component.is_empty() {
        return Err(field(
            "component",
            "at least one [[component]] block is required",
        ));
    }
    let mut components = Vec::new();
    for (j, c) in file.component.into_iter().enumerate() {
        let at = |name: &str| format!("component[{j}].{name}");
        let component = match c.kind.as_str() {
            "sqdist" => {
                let given = [
                    c.beta.is_some(),
                    c.beta_file.is_some(),
                    c.beta_poly.is_some(),
                ];
                if given.iter().filter(|g| **g).count() != 1 {
                    return Err(field(
                        &at("beta"),
                        "exactly one of beta, beta_file, beta_poly is required",
                    ));
                }
                let beta = if let Some(b) = c.beta {
                    b
                } else if let Some(file) = c.beta_file {
                    let mut paths = paths_from_json(&read_text(&base_dir.join(file))?)?;
                    if paths.len() != 1 {
                        return Err(field(&at("beta_file"), "file must hold exactly one path"));
                    }
                    paths.remove(0)
                } else {
                    let coeffs = c.beta_poly.unwrap_or_default();
                    let dim = coeffs.first().map_or(0, Vec::len);
                    if dim == 0 || coeffs.iter().any(|v| v.len() != dim) {
                        return Err(field(
                            &at("beta_poly"),
                            "coefficients must be equal-length vectors",
                        ));
                    }
                    (0..=m)
                        .map(|i| {
                            let t = node(i, m);
                            (0..dim)
                                .map(|d| poly(&coeffs.iter().map(|v| v[d]).collect::<Vec<_>>(), t))
                                .collect()
                        })
                        .collect()
                };
                if beta.len() != m + 1 {
                    return Err(field(
                        &at("beta"),
                        format!("expected {} samples for m = {m}, got {}", m + 1, beta.len()),
                    ));
                }
                Component::SquaredDistanceToPath { beta }
            }
            "wcoord" => {
                let axis = c.axis.ok_or_else(|| field(&at("axis"), "missing"))?;
                let weights = match (c.weights, c.weight_poly) {
                    (Some(w), None) => w,
                    (None, Some(p)) => (0..=m).map(|i| poly(&p, node(i, m))).collect(),
                    _ => {
                        return Err(field(
                            &at("weights"),
                            "exactly one of weights, weight_poly is required",
                        ))
                    }
                };
                if weights.len() != m + 1 {
                    return Err(field(
                        &at("weights"),
                        format!(
                            "expected {} samples for m = {m}, got {}",
                            m + 1,
                            weights.len()
                        ),
                    ));
                }
                Component::WeightedCoordinate { axis, weights }
            }
            other => {
                return Err(field(
                    &at("kind"),
                    format!("expected \"sqdist\" or \"wcoord\", got {other:?}"),
                ))
            }
        };
        components.push(component);
    }
    Ok(FunctionalSpec::new(components)?)
}

pub fn read_spec(path: &Path, m: usize) -> Result<FunctionalSpec, FormatError> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    spec_from_toml(&read_text(path)?, dir, m)
}

/// `{"x", "residual", "tf_distance", "method", "iterations", "g_norm", "loop"}`
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateDocument {
    pub x: Vec<f64>,
    pub residual: f64,
    pub tf_distance: f64,
    pub method: String,
    pub iterations: usize,
    pub g_norm: f64,
    #[serde(rename = "loop")]
    pub loop_: LoopDocument,
}

impl From<&CoincidenceCertificate> for CertificateDocument {
    fn from(c: &CoincidenceCertificate) -> Self {
        CertificateDocument {
            x: c.x.coords().to_vec(),
            residual: c.residual,
            tf_distance: c.tf_distance,
            method: c.method.as_str().into(),
            iterations: c.iterations,
            g_norm: c.g_norm,
            loop_: LoopDocument::from(&c.loop_),
        }
    }
}

impl TryFrom<CertificateDocument> for CoincidenceCertificate {
    type Error = FormatError;

    fn try_from(doc: CertificateDocument) -> Result<Self, FormatError> {
        let method = Method::parse(&doc.method)
            .ok_or_else(|| field("method", format!("unknown method {:?}", doc.method)))?;
        Ok(CoincidenceCertificate {
            x: SpherePoint::new(doc.x).map_err(|e| field("x", e.to_string()))?,
            loop_: Loop::try_from(doc.loop_)?,
            residual: doc.residual,
            tf_distance: doc.tf_distance,
            g_norm: doc.g_norm,
            iterations: doc.iterations,
            method,
        })
    }
}

pub fn certificate_to_json(c: &CoincidenceCertificate) -> String {
    to_json(&CertificateDocument::from(c))
}

pub fn certificate_from_json(text: &str) -> Result<CoincidenceCertificate, FormatError> {
    let doc: CertificateDocument = serde_json::from_str(text)?;
    CoincidenceCertificate::try_from(doc)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FiberDocument {
    pub c: Vec<f64>,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub certificate: Option<CertificateDocument>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilySummary {
    pub fibers: usize,
    pub certified: usize,
    pub max_residual: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilyDocument {
    pub certificates: Vec<FiberDocument>,
    pub summary: FamilySummary,
}

impl From<&FamilyReport> for FamilyDocument {
    fn from(r: &FamilyReport) -> Self {
        let certificates = r
            .fibers
            .iter()
            .map(|f| {
                let (status, certificate, error) = match &f.result {
                    Ok(c) => ("certified", Some(c.into()), None),
                    Err(SolveError::NoConvergence(c)) => {
                        ("no_convergence", Some(c.as_ref().into()), None)
                    }
                    Err(e) => ("error", None, Some(e.to_string())),
                };
                FiberDocument {
                    c: f.c.clone(),
                    status: status.into(),
                    certificate,
                    error,
                }
            })
            .collect();
        FamilyDocument {
            certificates,
            summary: FamilySummary {
                fibers: r.fibers.len(),
                certified: r.certified(),
                max_residual: r.max_residual(),
            },
        }
    }
}

pub fn family_to_json(r: &FamilyReport) -> String {
    to_json(&FamilyDocument::from(r))
}

/// `{"kernel_dim", "basis", "loops", "residuals", "bound"}`
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelFamilyDocument {
    pub kernel_dim: usize,
    pub basis: Vec<Vec<f64>>,
    pub loops: Vec<LoopDocument>,
    pub residuals: Vec<f64>,
    pub bound: f64,
}

pub fn kernel_family_to_json(doc: &KernelFamilyDocument) -> String {
    to_json(doc)
}
