//! Scenario files: JSON schema, validation and the bundled fixtures.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::CliError;

/// Schema version understood by this build.
pub const SCHEMA_VERSION: u32 = 1;
pub const MAX_LEVEL: usize = 6;
pub const MAX_WINDING: i64 = 5;
pub const MAX_RANK: usize = 3;
pub const RADIUS_RANGE: (f64, f64) = (0.1, 10.0);
pub const DEFAULT_TOLERANCE: f64 = 1e-3;
pub const DEFAULT_LEVEL: usize = 4;
pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Abstract,
    Immersed,
    GaussBonnet,
    Monotonicity,
    Closed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfaceName {
    Disk,
    Annulus,
}

/// Abstract pairs in a fixed trivialization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "builtin", rename_all = "snake_case", deny_unknown_fields)]
pub enum PairSpec {
    DiskExample,
    Winding {
        #[serde(default = "disk")]
        surface: SurfaceName,
        #[serde(default = "one")]
        rank: usize,
        winding: i64,
    },
    Constant {
        #[serde(default = "disk")]
        surface: SurfaceName,
        #[serde(default = "one")]
        rank: usize,
    },
    Monopole { degree: i64 },
    Random {
        #[serde(default)]
        seed: Option<u64>,
        #[serde(default = "three")]
        max_rank: usize,
        #[serde(default = "three_i")]
        max_winding: i64,
    },
}

/// Surfaces immersed in a Kähler chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "builtin", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeometrySpec {
    FlatDisk {
        #[serde(default = "one_f")]
        radius: f64,
    },
    TorusDisk {
        #[serde(default = "one_f")]
        r1: f64,
        #[serde(default = "one_f")]
        r2: f64,
        #[serde(default)]
        twist: f64,
    },
    PerturbedTorusDisk {
        #[serde(default = "one_f")]
        r1: f64,
        #[serde(default = "one_f")]
        r2: f64,
        #[serde(default = "tenth")]
        amplitude: f64,
        #[serde(default)]
        seed: Option<u64>,
    },
    RealPlaneDisk,
    SphereCap { colatitude: f64 },
    Hemisphere,
    PerturbedCap {
        colatitude: f64,
        #[serde(default = "tenth")]
        amplitude: f64,
        #[serde(default)]
        seed: Option<u64>,
    },
    Cp1Closed,
}

fn disk() -> SurfaceName {
    SurfaceName::Disk
}
fn one() -> usize {
    1
}
fn three() -> usize {
    3
}
fn three_i() -> i64 {
    3
}
fn one_f() -> f64 {
    1.0
}
fn tenth() -> f64 {
    0.1
}

/// One scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub version: u32,
    pub id: String,
    pub kind: ScenarioKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair: Option<PairSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<GeometrySpec>,
    /// Single level; ignored when `levels` is given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refinement: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary_samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub routes: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// Number of seeded copies of a randomized scenario.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let s: Scenario = serde_json::from_str(text).map_err(|e| CliError::Parse { line: e.line(), column: e.column(), message: e.to_string() })?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.display().to_string(), message: e.to_string() })?;
        Self::from_json(&text).map_err(|e| match e {
            CliError::Parse { line, column, message } => CliError::Parse { line, column, message: format!("{}: {message}", path.display()) },
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn levels(&self) -> Vec<usize> {
        match (&self.levels, self.refinement) {
            (Some(l), _) => l.clone(),
            (None, Some(r)) => vec![r],
            (None, None) => vec![DEFAULT_LEVEL],
        }
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance.unwrap_or(DEFAULT_TOLERANCE)
    }

    pub fn count(&self) -> usize {
        self.count.unwrap_or(1)
    }

    /// Routes that make sense for the kind.
    pub fn available_routes(&self) -> &'static [&'static str] {
        if self.geometry.is_some() {
            &["cw", "top", "geom"]
        } else {
            &["cw", "top"]
        }
    }

    pub fn routes(&self) -> Vec<String> {
        self.routes.clone().unwrap_or_else(|| self.available_routes().iter().map(|s| s.to_string()).collect())
    }

    fn is_randomized(&self) -> bool {
        matches!(self.pair, Some(PairSpec::Random { .. })) || matches!(self.geometry, Some(GeometrySpec::PerturbedTorusDisk { .. } | GeometrySpec::PerturbedCap { .. }))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |field: &str, message: String| Err(CliError::Validation { field: field.to_string(), message });
        if self.version != SCHEMA_VERSION {
            return bad("version", format!("unsupported schema version {} (expected {SCHEMA_VERSION})", self.version));
        }
        if self.id.trim().is_empty() || self.id.contains([',', '"', '\n']) {
            return bad("id", "must be non-empty without commas, quotes or newlines".into());
        }
        validate_levels(&self.levels())?;
        if let Some(n) = self.boundary_samples {
            if !(8..=8192).contains(&n) {
                return bad("boundary_samples", format!("{n} outside [8, 8192]"));
            }
        }
        let tol = self.tolerance();
        if !(tol > 0.0 && tol < 1.0) {
            return bad("tolerance", format!("{tol} outside (0, 1)"));
        }
        if let Some(c) = self.count {
            if !(1..=100).contains(&c) {
                return bad("count", format!("{c} outside [1, 100]"));
            }
            if c > 1 && !self.is_randomized() {
                return bad("count", "only randomized scenarios can be repeated".into());
            }
        }
        match (&self.pair, &self.geometry) {
            (Some(_), Some(_)) => return bad("pair", "give either a pair or a geometry, not both".into()),
            (None, None) => return bad("pair", "scenario needs a pair or a geometry".into()),
            _ => {}
        }
        match self.kind {
            ScenarioKind::Abstract if self.pair.is_none() => return bad("pair", "abstract scenarios take a pair".into()),
            ScenarioKind::Immersed | ScenarioKind::GaussBonnet | ScenarioKind::Monotonicity if self.geometry.is_none() => {
                return bad("geometry", "this kind needs an immersed geometry".into())
            }
            _ => {}
        }
        if let Some(p) = &self.pair {
            validate_pair(p)?;
        }
        if let Some(g) = &self.geometry {
            validate_geometry(g)?;
        }
        let closed = matches!(self.pair, Some(PairSpec::Monopole { .. })) || matches!(self.geometry, Some(GeometrySpec::Cp1Closed));
        if (self.kind == ScenarioKind::Closed) != closed {
            return bad("kind", if closed { "closed surfaces need kind 'closed'".into() } else { "kind 'closed' needs a surface without boundary".into() });
        }
        if self.kind == ScenarioKind::GaussBonnet
            && !matches!(self.geometry, Some(GeometrySpec::FlatDisk { .. } | GeometrySpec::SphereCap { .. } | GeometrySpec::Hemisphere | GeometrySpec::PerturbedCap { .. }))
        {
            return bad("geometry", "gauss_bonnet needs a surface in a complex curve (flat_disk, sphere_cap, hemisphere, perturbed_cap)".into());
        }
        if self.kind == ScenarioKind::Monotonicity && matches!(self.geometry, Some(GeometrySpec::Cp1Closed)) {
            return bad("geometry", "monotonicity needs a boundary constraint".into());
        }
        if let Some(routes) = &self.routes {
            validate_routes(routes, self.available_routes())?;
        }
        Ok(())
    }
}

pub fn validate_levels(levels: &[usize]) -> Result<(), CliError> {
    let bad = |message: String| Err(CliError::Validation { field: "levels".into(), message });
    if levels.is_empty() {
        return bad("no refinement levels".into());
    }
    if let Some(l) = levels.iter().find(|&&l| l > MAX_LEVEL) {
        return bad(format!("refinement {l} above {MAX_LEVEL}"));
    }
    if levels.windows(2).any(|w| w[0] >= w[1]) {
        return bad("levels must be strictly ascending".into());
    }
    Ok(())
}

pub fn validate_routes(routes: &[String], available: &[&str]) -> Result<(), CliError> {
    if routes.is_empty() {
        return Err(CliError::Validation { field: "routes".into(), message: "no routes requested".into() });
    }
    for r in routes {
        if !["cw", "top", "geom"].contains(&r.as_str()) {
            return Err(CliError::Validation { field: "routes".into(), message: format!("unknown route '{r}'") });
        }
        if !available.contains(&r.as_str()) {
            return Err(CliError::Validation { field: "routes".into(), message: format!("route '{r}' needs an immersed geometry") });
        }
    }
    Ok(())
}

fn check_radius(field: &str, r: f64) -> Result<(), CliError> {
    if !(RADIUS_RANGE.0..=RADIUS_RANGE.1).contains(&r) {
        return Err(CliError::Validation { field: field.into(), message: format!("radius {r} outside [{}, {}]", RADIUS_RANGE.0, RADIUS_RANGE.1) });
    }
    Ok(())
}

fn check_range(field: &str, v: f64, lo: f64, hi: f64) -> Result<(), CliError> {
    if !(lo..=hi).contains(&v) {
        return Err(CliError::Validation { field: field.into(), message: format!("{v} outside [{lo}, {hi}]") });
    }
    Ok(())
}

fn check_rank(rank: usize) -> Result<(), CliError> {
    if !(1..=MAX_RANK).contains(&rank) {
        return Err(CliError::Validation { field: "pair.rank".into(), message: format!("rank {rank} outside [1, {MAX_RANK}]") });
    }
    Ok(())
}

fn check_winding(field: &str, m: i64) -> Result<(), CliError> {
    if m.abs() > MAX_WINDING {
        return Err(CliError::Validation { field: field.into(), message: format!("|{m}| above {MAX_WINDING}") });
    }
    Ok(())
}

fn validate_pair(p: &PairSpec) -> Result<(), CliError> {
    match *p {
        PairSpec::DiskExample => Ok(()),
        PairSpec::Winding { rank, winding, .. } => {
            check_rank(rank)?;
            check_winding("pair.winding", winding)
        }
        PairSpec::Constant { rank, .. } => check_rank(rank),
        PairSpec::Monopole { degree } => check_winding("pair.degree", degree),
        PairSpec::Random { max_rank, max_winding, .. } => {
            check_rank(max_rank)?;
            check_winding("pair.max_winding", max_winding)
        }
    }
}

fn validate_geometry(g: &GeometrySpec) -> Result<(), CliError> {
    match *g {
        GeometrySpec::FlatDisk { radius } => check_radius("geometry.radius", radius),
        GeometrySpec::TorusDisk { r1, r2, twist } => {
            check_radius("geometry.r1", r1)?;
            check_radius("geometry.r2", r2)?;
            check_range("geometry.twist", twist, -10.0, 10.0)
        }
        GeometrySpec::PerturbedTorusDisk { r1, r2, amplitude, .. } => {
            check_radius("geometry.r1", r1)?;
            check_radius("geometry.r2", r2)?;
            check_range("geometry.amplitude", amplitude, 0.0, 0.5)
        }
        GeometrySpec::SphereCap { colatitude } => check_range("geometry.colatitude", colatitude, 0.05, PI - 0.15),
        GeometrySpec::PerturbedCap { colatitude, amplitude, .. } => {
            check_range("geometry.colatitude", colatitude, 0.05, PI - 0.15)?;
            check_range("geometry.amplitude", amplitude, 0.0, 0.5)
        }
        GeometrySpec::RealPlaneDisk | GeometrySpec::Hemisphere | GeometrySpec::Cp1Closed => Ok(()),
    }
}

/// Scenario files shipped with the binary, addressable as `bundled:NAME`.
pub const BUNDLED: [(&str, &str); 9] = [
    ("disk_example", include_str!("../scenarios/disk_example.json")),
    ("hemisphere", include_str!("../scenarios/hemisphere.json")),
    ("torus_disk", include_str!("../scenarios/torus_disk.json")),
    ("gauss_bonnet_cap", include_str!("../scenarios/gauss_bonnet_cap.json")),
    ("cp1", include_str!("../scenarios/cp1.json")),
    ("shrinking_circle", include_str!("../scenarios/shrinking_circle.json")),
    ("random_pairs", include_str!("../scenarios/random_pairs.json")),
    ("monopole", include_str!("../scenarios/monopole.json")),
    ("perturbed_torus", include_str!("../scenarios/perturbed_torus.json")),
];

pub fn bundled(name: &str) -> Result<Scenario, CliError> {
    let (_, text) = BUNDLED.iter().find(|(n, _)| *n == name).ok_or_else(|| CliError::Validation { field: "scenario".into(), message: format!("no bundled scenario '{name}'") })?;
    Scenario::from_json(text)
}

/// `bundled:NAME` or a path.
pub fn resolve(spec: &str) -> Result<Scenario, CliError> {
    match spec.strip_prefix("bundled:") {
        Some(name) => bundled(name),
        None => Scenario::load(Path::new(spec)),
    }
}
