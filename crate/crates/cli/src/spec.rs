//! Problem definition files and their validation.
//!
//! A spec is a UTF-8 JSON document. Complex numbers are `[re, im]` pairs, matrices are
//! row-major, angles are in radians:
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "n": 2,
//!   "a": [[[0.5, 0], [2, 0]], [[3, 0], [0.3333333333333333, 0]]],
//!   "u": [[0, 0], [1, 0]],
//!   "tau": 0.3
//! }
//! ```
//!
//! Optional fields: `u_c`, `epsilon0`, `eta` (instead of `tau`), `tolerances`
//! (`agreement` plus any library setting), `orders` (`series`, `formal`, `levelt`),
//! `gamma`, `paths` (lists of waypoints, each a full `u` vector) and `output_dir`.

use isostokes::model::{angle_distance_mod, is_in_cell, stokes_ray_directions, CellDefect};
use isostokes::{CMat, CutPlane, DeformationGeometry, Settings, SystemPair, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;

/// `[re, im]`.
pub type Cx = [f64; 2];

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("malformed spec: {0}")]
    Parse(#[from] serde_json::Error),

    #[error("unsupported schema_version {0} (expected {SCHEMA_VERSION})")]
    Version(u32),

    #[error("invalid spec: {0}")]
    Invalid(String),

    #[error("tau = {tau} is not admissible: it is a Stokes direction of pair ({j}, {k}); nearest admissible tau is {suggestion:.6}")]
    NonAdmissible { tau: f64, j: usize, k: usize, suggestion: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Threshold for agreement and constancy verdicts in reports.
    pub agreement: f64,
    #[serde(flatten)]
    pub settings: Settings,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            agreement: 1e-6,
            settings: Settings::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Orders {
    pub series: Option<usize>,
    /// Number of formal coefficients `F_1..F_L`.
    pub formal: usize,
    pub levelt: usize,
}

impl Default for Orders {
    fn default() -> Self {
        Self {
            series: None,
            formal: 4,
            levelt: 6,
        }
    }
}

/// The spec file as written.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub schema_version: u32,
    pub n: usize,
    pub a: Vec<Vec<Cx>>,
    pub u: Vec<Cx>,
    #[serde(default)]
    pub u_c: Option<Vec<Cx>>,
    #[serde(default = "default_epsilon0")]
    pub epsilon0: f64,
    #[serde(default)]
    pub tau: Option<f64>,
    #[serde(default)]
    pub eta: Option<f64>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub orders: Orders,
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default)]
    pub paths: Vec<Vec<Vec<Cx>>>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

fn default_epsilon0() -> f64 {
    0.2
}

/// Command-line overrides applied on top of a spec.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub tol: Option<f64>,
    pub order: Option<usize>,
    pub gamma: Option<f64>,
    pub out: Option<PathBuf>,
}

/// A validated problem.
#[derive(Debug, Clone)]
pub struct Problem {
    pub system: SystemPair,
    pub geometry: Option<DeformationGeometry>,
    pub tau: f64,
    pub cut: CutPlane,
    pub settings: Settings,
    pub agreement: f64,
    pub formal_order: usize,
    pub levelt_order: usize,
    pub gamma: Option<f64>,
    pub paths: Vec<Vec<Vec<C64>>>,
    pub output_dir: PathBuf,
}

impl Problem {
    /// Is the spec point `u` the coalescence point itself?
    pub fn at_coalescence(&self) -> bool {
        self.geometry.as_ref().is_some_and(|g| {
            g.u_c.iter().zip(self.system.u()).all(|(a, b)| (a - b).norm() < self.settings.coalescence_tol)
        })
    }
}

pub fn cx(z: C64) -> Cx {
    [z.re, z.im]
}

fn complex(p: &Cx) -> C64 {
    C64::new(p[0], p[1])
}

impl ProblemSpec {
    pub fn load(path: &Path) -> Result<Self, SpecError> {
        let text = std::fs::read_to_string(path).map_err(|source| SpecError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn validate(&self, overrides: &Overrides) -> Result<Problem, SpecError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(SpecError::Version(self.schema_version));
        }
        let n = self.n;
        if n == 0 {
            return Err(SpecError::Invalid("n must be positive".into()));
        }
        if self.a.len() != n || self.a.iter().any(|row| row.len() != n) {
            return Err(SpecError::Invalid(format!("A must be {n}x{n}")));
        }
        let check_len = |what: &str, v: &[Cx]| {
            if v.len() == n {
                Ok(())
            } else {
                Err(SpecError::Invalid(format!("{what} has {} entries, expected {n}", v.len())))
            }
        };
        check_len("u", &self.u)?;
        let mut settings = self.tolerances.settings;
        if let Some(order) = self.orders.series {
            settings.series_order = order;
        }
        let agreement = overrides.tol.unwrap_or(self.tolerances.agreement);
        if !(agreement > 0.0) {
            return Err(SpecError::Invalid("tolerance must be positive".into()));
        }
        let tau = match (self.tau, self.eta) {
            (Some(t), None) => t,
            (None, Some(e)) => 1.5 * PI - e,
            (Some(t), Some(e)) if angle_distance_mod(t, 1.5 * PI - e, 2.0 * PI) < 1e-12 => t,
            (Some(_), Some(_)) => return Err(SpecError::Invalid("tau and eta disagree (eta = 3pi/2 - tau)".into())),
            (None, None) => return Err(SpecError::Invalid("one of tau or eta is required".into())),
        };
        if !tau.is_finite() {
            return Err(SpecError::Invalid("tau must be finite".into()));
        }
        let a = CMat::from_fn(n, n, |i, j| complex(&self.a[i][j]));
        let u: Vec<C64> = self.u.iter().map(complex).collect();
        let system = SystemPair::new(a, u.clone()).map_err(|e| SpecError::Invalid(e.to_string()))?;

        let u_c = match &self.u_c {
            Some(v) => {
                check_len("u_c", v)?;
                Some(v.iter().map(complex).collect::<Vec<C64>>())
            }
            None => None,
        };
        let mut points = vec![u.clone()];
        points.extend(u_c.clone());
        let paths: Vec<Vec<Vec<C64>>> = self
            .paths
            .iter()
            .map(|p| p.iter().map(|w| check_len("waypoint", w).map(|_| w.iter().map(complex).collect())).collect())
            .collect::<Result<_, _>>()?;
        if paths.iter().any(|p| p.is_empty()) {
            return Err(SpecError::Invalid("empty deformation path".into()));
        }

        // τ must avoid the rays of Λ(u), Λ(u^c) and of every waypoint.
        let mut all_points = points.clone();
        all_points.extend(paths.iter().flatten().cloned());
        for p in &all_points {
            let check = is_in_cell(p, tau, &settings);
            if let Some(&(j, k, _)) = check.offenders.iter().find(|o| o.2 == CellDefect::RayAligned) {
                return Err(SpecError::NonAdmissible {
                    tau,
                    j,
                    k,
                    suggestion: nearest_admissible(&all_points, tau, &settings),
                });
            }
        }

        let geometry = match u_c {
            Some(u_c) => {
                let g = DeformationGeometry::new(u_c, tau, self.epsilon0, &settings).map_err(|e| SpecError::Invalid(e.to_string()))?;
                for p in std::iter::once(&u).chain(paths.iter().flatten()) {
                    if !g.contains(p) {
                        return Err(SpecError::Invalid(format!("point {p:?} lies outside the polydisc of radius {}", g.epsilon0)));
                    }
                }
                Some(g)
            }
            None => {
                if let Some((j, k, _)) = is_in_cell(&u, tau, &settings).offenders.first() {
                    return Err(SpecError::Invalid(format!("u_{j} = u_{k}: a coalescence point needs u_c and epsilon0")));
                }
                None
            }
        };
        let cut = CutPlane::new(1.5 * PI - tau);
        let order = |o: usize| overrides.order.unwrap_or(o);
        Ok(Problem {
            system,
            geometry,
            tau,
            cut,
            settings,
            agreement,
            formal_order: order(self.orders.formal),
            levelt_order: order(self.orders.levelt),
            gamma: overrides.gamma.or(self.gamma),
            paths,
            output_dir: overrides
                .out
                .clone()
                .or_else(|| self.output_dir.clone())
                .unwrap_or_else(|| PathBuf::from(".")),
        })
    }
}

/// The admissible direction closest to `tau` (mod π) that keeps a clearance of
/// `min(0.05, gap/4)` from the rays of every point.
pub fn nearest_admissible(points: &[Vec<C64>], tau: f64, settings: &Settings) -> f64 {
    let mut dirs: Vec<f64> = points
        .iter()
        .flat_map(|p| stokes_ray_directions(p, settings).rays)
        .map(|r| r.direction.rem_euclid(PI))
        .collect();
    if dirs.is_empty() {
        return tau;
    }
    dirs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    dirs.dedup_by(|a, b| (*a - *b).abs() < settings.angle_tol);
    let t = tau.rem_euclid(PI);
    let mut best = (f64::INFINITY, tau);
    for (i, &lo) in dirs.iter().enumerate() {
        let hi = if i + 1 < dirs.len() { dirs[i + 1] } else { dirs[0] + PI };
        let margin = (0.25 * (hi - lo)).min(0.05);
        for shift in [-PI, 0.0, PI] {
            let candidate = t.clamp(lo + margin + shift, hi - margin + shift);
            let d = (candidate - t).abs();
            if d < best.0 {
                best = (d, tau + (candidate - t));
            }
        }
    }
    best.1
}
