//! Monodromy data of rank-1 irregular systems `dY/dz = (Λ + A/z) Y` computed through
//! the Laplace transform of the associated Fuchsian system, with isomonodromic
//! (Schlesinger) transport across coalescences of the eigenvalues of `Λ`.

pub mod continuation;
pub mod deformation;
pub mod error;
pub mod frobenius;
pub mod laplace;
pub mod linalg;
pub mod model;
pub mod ode;
pub mod quad;
pub mod settings;
pub mod special;
pub mod stokes;

pub use continuation::ConnectionData;
pub use error::{Error, Result};
pub use frobenius::{FuchsianSystem, LeveltData};
pub use laplace::FormalSolution;
pub use linalg::{CMat, CVec, C64};
pub use model::{CutPlane, DeformationGeometry, RayLabels, SystemPair};
pub use settings::Settings;
pub use stokes::{Ordering, StokesPair};
