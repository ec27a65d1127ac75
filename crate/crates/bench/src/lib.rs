//! Fixed benchmark fixtures shared by the criterion targets.

use isostokes::linalg::c;
use isostokes::{CMat, SystemPair, C64};
use std::f64::consts::PI;

/// Generic `n × n` system with non-integer exponents and poles on a circle.
pub fn generic_system(n: usize) -> SystemPair {
    let a = CMat::from_fn(n, n, |i, j| {
        if i == j {
            c(0.15 + 0.2 * i as f64, 0.05 * j as f64)
        } else {
            c(0.3 * ((i + 2 * j) as f64).sin(), 0.2 * ((2 * i + j) as f64).cos())
        }
    });
    let u: Vec<C64> = (0..n).map(|k| C64::from_polar(1.0, 0.3 + 2.0 * PI * k as f64 / n as f64)).collect();
    SystemPair::new(a, u).expect("valid fixture")
}

/// An admissible direction for [`generic_system`]: the poles lie on a regular polygon
/// rotated by 0.3, so τ = 0.05 stays clear of every Stokes ray for n ≤ 4.
pub const TAU: f64 = 0.05;
