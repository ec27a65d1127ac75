//! Error type shared by every module.

use thiserror::Error;

/// Failures reported by the numerical pipelines.
///
/// Resonance and free parameters are *data* (see [`crate::frobenius::LeveltData`]);
/// only situations in which a requested quantity cannot be produced are errors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("direction {angle} is not admissible: it is a Stokes direction of pair ({j}, {k})")]
    NonAdmissible { angle: f64, j: usize, k: usize },

    #[error("invalid deformation geometry: {0}")]
    InvalidGeometry(String),

    #[error("poles u_{j} and u_{k} coincide; no local series at a coalesced pole")]
    CoalescedPoles { j: usize, k: usize },

    #[error("unresolved zero divisor in the local recursion at pole {k}, order {order}")]
    ResonanceAmbiguity { k: usize, order: usize },

    #[error("adaptive integrator failed at parameter {at}: step size {step:e} underflowed")]
    StepFailure { at: f64, step: f64 },

    #[error("path planning failed: {0}")]
    PathPlanning(String),

    #[error("selected solutions are not a fundamental system (condition estimate {cond:e})")]
    BasisSingular { cond: f64 },

    #[error("{what}: relative residual {residual:e} exceeds tolerance")]
    IllConditioned { what: String, residual: f64 },

    #[error("z = {z_re}+{z_im}i lies outside the convergence half-plane of the contour (decay rate {decay:e})")]
    QuadratureDivergence { z_re: f64, z_im: f64, decay: f64 },

    #[error("sector overlap is empty")]
    OverlapEmpty,

    #[error("matched Stokes matrices vary with |z| by {spread:e}")]
    MatchingInconsistent { spread: f64 },

    #[error("bad gamma {gamma}: {reason}")]
    BadGamma { gamma: f64, reason: String },

    #[error("F_1 entry ({i}, {j}) is singular: |u_i - u_j| is tiny but A_ij is not")]
    SingularF1 { i: usize, j: usize },

    #[error("transport invariants drifted by {drift:e}")]
    DriftExceeded { drift: f64 },

    #[error("transport passes within {gap:e} of the coalescence u_{i} = u_{j}")]
    NearCoalescence { i: usize, j: usize, gap: f64 },

    #[error("B_{j} is not reducible by the explicit formula (lambda'_{j} = -1 and B_{j} = 0)")]
    NotReducible { j: usize },

    #[error("vanishing condition violated: |A_{i}{j}| = {value:e} at a coalescence")]
    VanishingViolated { i: usize, j: usize, value: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
