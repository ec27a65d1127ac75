//! Numerical thresholds and defaults, gathered in one place.
//!
//! | Field | Default | Meaning |
//! |-------|---------|---------|
//! | `angle_tol` | 1e-9 | a direction is "on a ray" below this angular distance |
//! | `coalescence_tol` | 1e-12 | `|u_i - u_j|` below this is a coalescence |
//! | `integer_tol` | 1e-8 | exponent declared integer below this distance to ℤ |
//! | `series_order` | 40 | Frobenius truncation order |
//! | `validity_fraction` | 0.75 | validity radius as fraction of the nearest-pole distance |
//! | `series_switch` | 0.4 | series evaluated up to this fraction of the nearest-pole distance |
//! | `continuation_tol` | 1e-12 | local error tolerance of the continuation integrator |
//! | `loop_fraction` | 0.3 | monodromy loop radius as fraction of the nearest-pole distance |
//! | `loop_samples` | 16 | sample points for the monodromy projection |
//! | `quad_tail` | 1e-14 | tail bound used to truncate the Laplace rays |
//! | `zero_tol` | 1e-12 | identically-vanishing verdict for series data |
//! | `projection_tol` | 1e-6 | admissible relative residual of the monodromy projection |
//! | `near_delta_guard` | 1e-4 | minimal in-group gap during transport |
//! | `sector_samples` | 64 | boundary samples per coordinate circle for sector shrinkage |

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Settings {
    pub angle_tol: f64,
    pub coalescence_tol: f64,
    pub integer_tol: f64,
    pub series_order: usize,
    pub validity_fraction: f64,
    pub series_switch: f64,
    pub continuation_tol: f64,
    pub loop_fraction: f64,
    pub loop_samples: usize,
    pub quad_tail: f64,
    pub zero_tol: f64,
    pub projection_tol: f64,
    pub near_delta_guard: f64,
    pub sector_samples: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            angle_tol: 1e-9,
            coalescence_tol: 1e-12,
            integer_tol: 1e-8,
            series_order: 40,
            validity_fraction: 0.75,
            series_switch: 0.4,
            continuation_tol: 1e-12,
            loop_fraction: 0.3,
            loop_samples: 16,
            quad_tail: 1e-14,
            zero_tol: 1e-12,
            projection_tol: 1e-6,
            near_delta_guard: 1e-4,
            sector_samples: 64,
        }
    }
}
