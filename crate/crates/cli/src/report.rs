//! Machine-readable reports: the JSON schema of every command's output.
//!
//! Every numeric result is wrapped in an [`Estimate`] with its method tag and error
//! estimate. Stages that fail leave an explicit [`Stage`] record and an absent result.

use crate::spec::{cx, Cx, SCHEMA_VERSION};
use isostokes::continuation::{ConnectionMethod, ConstancyReport};
use isostokes::model::RayTable;
use isostokes::{CMat, Settings};
use serde::{Deserialize, Serialize};

pub type Mat = Vec<Vec<Cx>>;

pub fn mat(m: &CMat) -> Mat {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| cx(m[(i, j)])).collect()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report<T> {
    pub schema_version: u32,
    pub command: String,
    pub metadata: Metadata,
    pub stages: Vec<Stage>,
    pub results: T,
}

impl<T> Report<T> {
    pub fn new(command: &str, metadata: Metadata, stages: Vec<Stage>, results: T) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            metadata,
            stages,
            results,
        }
    }

    pub fn failed(&self) -> bool {
        self.stages.iter().any(|s| s.status == StageStatus::Failed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub version: String,
    pub tau: f64,
    pub eta: f64,
    pub agreement: f64,
    pub settings: Settings,
    pub formal_order: usize,
    pub levelt_order: usize,
    pub gamma: Option<f64>,
    pub oracle: bool,
    /// The pipelines are deterministic; no random seeds are used.
    pub seeds: Vec<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StageStatus {
    Ok,
    Failed,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub name: String,
    pub status: StageStatus,
    pub detail: Option<String>,
}

/// Collects stage records while a pipeline runs.
#[derive(Debug, Default)]
pub struct Stages(pub Vec<Stage>);

impl Stages {
    pub fn record<T, E: std::fmt::Display>(&mut self, name: &str, r: Result<T, E>) -> Option<T> {
        match r {
            Ok(v) => {
                self.push(name, StageStatus::Ok, None);
                Some(v)
            }
            Err(e) => {
                self.push(name, StageStatus::Failed, Some(e.to_string()));
                None
            }
        }
    }

    pub fn skip(&mut self, name: &str, why: &str) {
        self.push(name, StageStatus::Skipped, Some(why.into()));
    }

    fn push(&mut self, name: &str, status: StageStatus, detail: Option<String>) {
        self.0.push(Stage {
            name: name.into(),
            status,
            detail,
        });
    }
}

/// A value with its method tag and error estimate (`None` when no estimate exists).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate<T> {
    pub value: T,
    pub method: String,
    pub error: Option<f64>,
}

impl<T> Estimate<T> {
    pub fn new(value: T, method: &str, error: Option<f64>) -> Self {
        Self {
            value,
            method: method.into(),
            error,
        }
    }
}

// ---------------------------------------------------------------------------- rays

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RaysResults {
    pub at_u: RayTable,
    pub at_u_c: Option<RayTable>,
    pub labels: Option<LabelsOut>,
    pub sectors: Vec<SectorOut>,
    pub in_cell: bool,
    pub cuts: Vec<CutOut>,
    pub laplace_directions: Vec<DirectionOut>,
    pub circles: Vec<CircleOut>,
    pub crossings: Vec<CrossingOut>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelsOut {
    pub nu: i64,
    pub mu: usize,
    pub tau_nu: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorOut {
    pub label: i64,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutOut {
    pub k: usize,
    pub origin: Cx,
    pub direction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionOut {
    pub h: i64,
    pub theta: f64,
}

/// `u_k` swept on `|u_k − center| = radius`, the other coordinates fixed at `u`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleOut {
    pub k: usize,
    pub center: Cx,
    pub radius: f64,
    pub samples: Vec<CircleSample>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleSample {
    pub phi: f64,
    pub point: Cx,
    pub in_cell: bool,
}

/// A point of the crossing locus: the ray of `(j, k)` has direction `τ mod π`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingOut {
    pub k: usize,
    pub j: usize,
    pub phi: f64,
    pub point: Cx,
}

// -------------------------------------------------------------------------- stokes

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StokesResults {
    /// Point at which the Stokes data were evaluated (differs from `u` at a coalescence).
    pub evaluated_at: Option<Vec<Cx>>,
    pub launch: Option<LaunchOut>,
    pub labels: Option<LabelsOut>,
    /// `precedes[j][k]`: `j ≺ k` in the ordering at the evaluation point.
    pub precedes: Vec<Vec<Option<bool>>>,
    pub lambda_prime: Vec<Cx>,
    pub connection: Option<ConnectionOut>,
    pub alpha: Option<Estimate<Vec<Cx>>>,
    pub formula: Option<Estimate<StokesOut>>,
    pub oracle: Option<Estimate<StokesOut>>,
    pub coherence: Option<Coherence>,
    /// Every off-diagonal entry of `C` and of both Stokes matrices vanishes.
    pub all_structural_zero: bool,
    pub formal: Option<Estimate<Vec<Mat>>>,
    pub resonance: ResonanceOut,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectionOut {
    pub c: Mat,
    pub provenance: Vec<Vec<ConnectionMethod>>,
    pub residual: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StokesOut {
    pub s_nu: Mat,
    pub s_nu_mu: Mat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coherence {
    pub max_difference: f64,
    pub tolerance: f64,
    pub agree: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceOut {
    /// In-group pairs `(i, j, λ'_j − λ'_i)` with a non-zero integer difference.
    pub in_group: Vec<(usize, usize, i64)>,
    /// Free entries `(l, i, j)` of the formal solution.
    pub formal_free_parameters: Vec<(usize, usize, usize)>,
    pub levelt: Vec<LeveltOut>,
    pub family: bool,
    pub notice: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeveltOut {
    pub group: Vec<usize>,
    pub exponents: Vec<Cx>,
    pub kappa: u32,
    pub free_parameters: Vec<(usize, usize, usize)>,
    pub partially_non_resonant: bool,
    pub max_r: f64,
    pub r_parts: Vec<Mat>,
}

// -------------------------------------------------------------------------- deform

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeformResults {
    pub paths: Vec<PathOut>,
}

/// Series start at the coalescence: `u = u^c + t v` with `v` aimed at the first waypoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaunchOut {
    pub order: usize,
    pub t: f64,
    pub tail: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathOut {
    pub launch: Option<LaunchOut>,
    pub waypoints: Vec<WaypointOut>,
    pub constancy: Option<ConstancyOut>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaypointOut {
    pub u: Vec<Cx>,
    pub in_cell: bool,
    pub a: Estimate<Mat>,
    pub min_gap: f64,
    pub c: Option<Mat>,
    pub formula: Option<StokesOut>,
    pub oracle: Option<Estimate<StokesOut>>,
    pub in_group: Vec<InGroupOut>,
}

/// Decay data of an in-group pair near the coalescence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InGroupOut {
    pub i: usize,
    pub j: usize,
    pub gap: f64,
    pub a_ij: f64,
    pub a_ji: f64,
    pub s_ij: Option<f64>,
    pub s_ji: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstancyOut {
    pub c: ConstancyReport,
    pub s_nu: ConstancyReport,
    pub s_nu_mu: ConstancyReport,
    pub tolerance: f64,
    pub constant: bool,
}

// -------------------------------------------------------------------------- levelt

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeveltResults {
    pub groups: Vec<LeveltOut>,
    pub family: bool,
    pub notice: Option<String>,
}

// --------------------------------------------------------------------------- check

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResults {
    pub integrability: Vec<IntegrabilityOut>,
    pub vanishing: Option<VanishingOut>,
}

/// Residuals at steps `h` and `h/2`; a transported family converges with ratio ≈ 4.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegrabilityOut {
    pub i: usize,
    pub j: usize,
    pub h: f64,
    pub residual: [f64; 2],
    pub ratio: f64,
    pub frozen_ratio: f64,
    pub quadratic: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VanishingOut {
    pub at_coalescence: bool,
    /// Decided only at `u = u^c`.
    pub satisfied: Option<bool>,
    pub pairs: Vec<InGroupOut>,
}
