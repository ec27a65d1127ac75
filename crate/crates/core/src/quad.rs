//! Quadrature rules: Gauss–Legendre nodes and a tanh-sinh integrator.

use crate::linalg::{CVec, C64};
use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on [-1, 1] (Newton on the Legendre recurrence).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Nodes and weights of an `n`-point rule mapped to `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(n);
    let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
    x.iter().zip(w.iter()).map(|(xi, wi)| (m + h * xi, h * wi)).collect()
}

/// Result of an adaptive integration.
#[derive(Debug, Clone)]
pub struct Quadrature {
    pub value: CVec,
    pub error: f64,
    pub evaluations: usize,
}

/// Tanh-sinh (double exponential) integration of a vector-valued function on `[a, b]`.
///
/// Levels halve the step until successive estimates agree to `tol` (relative to the
/// magnitude of the integrand samples) or `max_level` is reached.
pub fn tanh_sinh<F>(mut f: F, a: f64, b: f64, tol: f64, max_level: usize) -> Quadrature
where
    F: FnMut(f64) -> CVec,
{
    let (m, half) = (0.5 * (a + b), 0.5 * (b - a));
    // Beyond |t| = 4.5 the nodes lie within 1e-60 of the endpoints.
    let t_max = 4.5;
    let mut h = 0.5;
    let mut evaluations = 1;
    let mut sum = f(m) * C64::from(PI / 2.0);
    let mut scale = max_norm(&sum);
    let mut previous: Option<CVec> = None;
    let mut error = f64::INFINITY;

    let mut add_nodes = |h: f64, offset_odd: bool, sum: &mut CVec, scale: &mut f64, evals: &mut usize| {
        let step = if offset_odd { 2.0 * h } else { h };
        let mut t = h;
        while t <= t_max {
            let s = 0.5 * PI * t.sinh();
            let w = 0.5 * PI * t.cosh() / (s.cosh() * s.cosh());
            // Distance to the endpoint, 1 − tanh s, without cancellation.
            let d = 2.0 / (1.0 + (2.0 * s).exp());
            if d > 0.0 && w > 0.0 {
                let fp = f(b - half * d);
                let fm = f(a + half * d);
                *scale = scale.max(max_norm(&fp) * w).max(max_norm(&fm) * w);
                *sum += (fp + fm) * C64::from(w);
                *evals += 2;
            }
            t += step;
        }
    };

    add_nodes(h, false, &mut sum, &mut scale, &mut evaluations);
    let mut estimate = sum.clone() * C64::from(h * half);
    for _ in 0..max_level {
        h *= 0.5;
        add_nodes(h, true, &mut sum, &mut scale, &mut evaluations);
        estimate = sum.clone() * C64::from(h * half);
        if let Some(p) = &previous {
            error = max_norm(&(&estimate - p));
            if error <= tol * scale.max(1e-300) * half.abs() {
                break;
            }
        }
        previous = Some(estimate.clone());
    }
    Quadrature {
        value: estimate,
        error,
        evaluations,
    }
}

fn max_norm(v: &CVec) -> f64 {
    v.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}
