//! Complex Gamma function and integer helpers.

use crate::linalg::C64;
use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Γ(z) for complex z (Lanczos, g = 7, with reflection for Re z < ½).
pub fn gamma(z: C64) -> C64 {
    if z.re < 0.5 {
        return PI / ((PI * z).sin() * gamma(1.0 - z));
    }
    let z = z - 1.0;
    let mut x = C64::new(LANCZOS[0], 0.0);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powc(z + 0.5) * (-t).exp() * x
}

pub fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Nearest integer of `x` if `x` lies within `tol` of ℤ (imaginary part included).
pub fn as_integer(x: C64, tol: f64) -> Option<i64> {
    let r = x.re.round();
    if (x.re - r).abs() < tol && x.im.abs() < tol {
        Some(r as i64)
    } else {
        None
    }
}

/// Reduce `phi` into the half-open window `(eta - 2π, eta]`.
pub fn reduce_arg(phi: f64, eta: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut a = phi - two_pi * ((phi - eta) / two_pi).floor();
    if a > eta {
        a -= two_pi;
    }
    if a <= eta - two_pi {
        a += two_pi;
    }
    a
}

/// `x^a` on the branch `η − 2π < arg x ≤ η`.
pub fn branch_pow(x: C64, a: C64, eta: f64) -> C64 {
    let phi = reduce_arg(x.arg(), eta);
    (a * C64::new(x.norm().ln(), phi)).exp()
}

/// `ln x` on the branch `η − 2π < arg x ≤ η`.
pub fn branch_ln(x: C64, eta: f64) -> C64 {
    C64::new(x.norm().ln(), reduce_arg(x.arg(), eta))
}
