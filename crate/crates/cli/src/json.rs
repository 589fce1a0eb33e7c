//! JSON interchange formats. Complex numbers are `[re, im]` arrays and every
//! document carries `"schema": "polygeom/1"`.

use std::path::Path;

use polygeom::{
    CircularRegion64, Complex64, Disk64, Polynomial64, RegionKind, RootSet64,
    SymmetricMultiaffine64, Theorem2Instance64,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const SCHEMA: &str = "polygeom/1";

pub type C = [f64; 2];

pub fn to_c(z: Complex64) -> C {
    [z.re, z.im]
}

pub fn from_c(c: C) -> Complex64 {
    Complex64::new(c[0], c[1])
}

pub fn to_cs(zs: &[Complex64]) -> Vec<C> {
    zs.iter().copied().map(to_c).collect()
}

pub fn from_cs(cs: &[C]) -> Vec<Complex64> {
    cs.iter().copied().map(from_c).collect()
}

fn default_schema() -> String {
    SCHEMA.to_string()
}

/// Rejects documents that declare a schema other than ours.
pub fn check_schema(schema: &Option<String>) -> Result<()> {
    match schema.as_deref() {
        None | Some(SCHEMA) => Ok(()),
        Some(other) => Err(CliError::InvalidInput(format!(
            "unsupported schema {other:?}, expected {SCHEMA:?}"
        ))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub coeffs: Vec<C>,
}

impl PolyJson {
    pub fn from_poly(p: &Polynomial64) -> Self {
        PolyJson {
            schema: None,
            coeffs: to_cs(p.coeffs()),
        }
    }

    pub fn to_poly(&self) -> Result<Polynomial64> {
        check_schema(&self.schema)?;
        Ok(Polynomial64::try_new(from_cs(&self.coeffs))?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointsJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub points: Vec<C>,
}

impl PointsJson {
    pub fn to_points(&self) -> Result<Vec<Complex64>> {
        check_schema(&self.schema)?;
        let points = from_cs(&self.points);
        if points.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(CliError::InvalidInput("non-finite point".into()));
        }
        Ok(points)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegionKindJson {
    Disk,
    Halfplane,
    Exterior,
}

fn default_closed() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub kind: RegionKindJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<C>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<C>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<f64>,
    #[serde(default = "default_closed")]
    pub closed: bool,
}

impl RegionJson {
    pub fn from_region(r: &CircularRegion64) -> Self {
        let mut out = RegionJson {
            schema: None,
            kind: RegionKindJson::Disk,
            center: None,
            radius: None,
            direction: None,
            offset: None,
            closed: r.closed,
        };
        match r.kind {
            RegionKind::Disk { center, radius } => {
                out.center = Some(to_c(center));
                out.radius = Some(radius);
            }
            RegionKind::ExteriorDisk { center, radius } => {
                out.kind = RegionKindJson::Exterior;
                out.center = Some(to_c(center));
                out.radius = Some(radius);
            }
            RegionKind::HalfPlane { direction, offset } => {
                out.kind = RegionKindJson::Halfplane;
                out.direction = Some(to_c(direction));
                out.offset = Some(offset);
            }
        }
        out
    }

    pub fn to_region(&self) -> Result<CircularRegion64> {
        check_schema(&self.schema)?;
        let missing = |field: &str| {
            CliError::InvalidInput(format!("{:?} region needs field {field:?}", self.kind))
        };
        let region = match self.kind {
            RegionKindJson::Disk | RegionKindJson::Exterior => {
                let center = from_c(self.center.ok_or_else(|| missing("center"))?);
                let radius = self.radius.ok_or_else(|| missing("radius"))?;
                if self.kind == RegionKindJson::Disk {
                    CircularRegion64::disk(center, radius, self.closed)?
                } else {
                    CircularRegion64::exterior(center, radius, self.closed)?
                }
            }
            RegionKindJson::Halfplane => CircularRegion64::half_plane(
                from_c(self.direction.ok_or_else(|| missing("direction"))?),
                self.offset.ok_or_else(|| missing("offset"))?,
                self.closed,
            )?,
        };
        Ok(region)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiaffineJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub n: usize,
    #[serde(rename = "E")]
    pub e: Vec<C>,
    /// Explicit total degree; inferred from `E` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
}

impl MultiaffineJson {
    pub fn from_multiaffine(p: &SymmetricMultiaffine64) -> Self {
        MultiaffineJson {
            schema: None,
            n: p.arity(),
            e: to_cs(p.coeffs()),
            m: Some(p.degree()),
        }
    }

    pub fn to_multiaffine(&self) -> Result<SymmetricMultiaffine64> {
        check_schema(&self.schema)?;
        let coeffs = from_cs(&self.e);
        Ok(match self.m {
            Some(m) => SymmetricMultiaffine64::with_degree(self.n, coeffs, m)?,
            None => SymmetricMultiaffine64::new(self.n, coeffs)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiskJson {
    pub center: C,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem2InstanceJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub inner: Vec<C>,
    pub outer: C,
    pub disk: DiskJson,
}

impl Theorem2InstanceJson {
    pub fn from_instance(inst: &Theorem2Instance64) -> Self {
        Theorem2InstanceJson {
            schema: None,
            inner: to_cs(&inst.inner),
            outer: to_c(inst.outer),
            disk: DiskJson {
                center: to_c(inst.disk.center),
                radius: inst.disk.radius,
            },
        }
    }

    pub fn to_instance(&self) -> Result<Theorem2Instance64> {
        check_schema(&self.schema)?;
        Ok(Theorem2Instance64 {
            inner: from_cs(&self.inner),
            outer: from_c(self.outer),
            disk: Disk64::new(from_c(self.disk.center), self.disk.radius)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterJson {
    pub representative: C,
    pub multiplicity: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootSetJson {
    pub roots: Vec<C>,
    pub residuals: Vec<f64>,
    pub clusters: Vec<ClusterJson>,
    pub tol: f64,
    pub iterations: usize,
}

impl RootSetJson {
    pub fn from_roots(rs: &RootSet64) -> Self {
        RootSetJson {
            roots: to_cs(&rs.roots),
            residuals: rs.residuals.clone(),
            clusters: rs
                .clusters
                .iter()
                .map(|c| ClusterJson {
                    representative: to_c(c.representative),
                    multiplicity: c.multiplicity,
                    residual: c.residual,
                })
                .collect(),
            tol: rs.tol,
            iterations: rs.iterations,
        }
    }
}

/// A document wrapped with the schema tag.
#[derive(Debug, Clone, Serialize)]
pub struct Tagged<T: Serialize> {
    pub schema: String,
    #[serde(flatten)]
    pub body: T,
}

pub fn tagged<T: Serialize>(body: T) -> Tagged<T> {
    Tagged {
        schema: default_schema(),
        body,
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| CliError::Json {
        context: path.display().to_string(),
        source,
    })
}

pub fn to_pretty<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|source| CliError::Json {
        context: "serializing output".into(),
        source,
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}
