//! Stokes matrices: the closed formula in terms of connection coefficients, the
//! direct matching oracle, and generation of the whole family `S_{ν+hμ}`.
//!
//! Conventions: `Y_{ν+μ} = Y_ν S_ν` and `Y_{ν+2μ} = Y_{ν+μ} S_{ν+μ}`; `j ≺ k` iff
//! `Re(e^{iτ}(u_j − u_k)) < 0`, so `S_ν − I` is supported on `j ≺ k` and
//! `S_{ν+μ} − I` on `j ≻ k`.

use crate::continuation::{alpha, ConnectionData};
use crate::error::{Error, Result};
use crate::frobenius::build_fuchsian;
use crate::laplace::laplace_matrix;
use crate::linalg::{exp_diag, inverse, max_abs, CMat, C64, TWO_PI_I};
use crate::model::{angle_distance_mod, stokes_ray_directions, CutPlane, RayLabels, SystemPair};
use crate::settings::Settings;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// The total order `≺` induced by `τ` on the indices, where defined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ordering {
    pub tau: f64,
    /// `precedes[j][k] = Some(true)` iff `j ≺ k`; `None` for coalesced or tied pairs.
    pub precedes: Vec<Vec<Option<bool>>>,
}

impl Ordering {
    pub fn new(u: &[C64], tau: f64, settings: &Settings) -> Self {
        let n = u.len();
        let rot = C64::from_polar(1.0, tau);
        let mut precedes = vec![vec![None; n]; n];
        for j in 0..n {
            for k in 0..n {
                let d = u[j] - u[k];
                if j == k || d.norm() < settings.coalescence_tol {
                    continue;
                }
                let re = (rot * d).re;
                if re.abs() > settings.angle_tol * d.norm() {
                    precedes[j][k] = Some(re < 0.0);
                }
            }
        }
        Self { tau, precedes }
    }

    pub fn precedes(&self, j: usize, k: usize) -> bool {
        self.precedes[j][k] == Some(true)
    }

    pub fn follows(&self, j: usize, k: usize) -> bool {
        self.precedes[j][k] == Some(false)
    }
}

/// How a pair of Stokes matrices was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StokesMethod {
    Formula,
    Oracle,
}

/// `S_ν` and `S_{ν+μ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct StokesPair {
    pub s_nu: CMat,
    pub s_nu_mu: CMat,
    pub nu: i64,
    pub method: StokesMethod,
    pub ordering: Ordering,
}

/// `(S_ν)_jk = e^{2πiλ'_k} α_k c_jk` for `j ≺ k` and
/// `(S_{ν+μ}^{−1})_jk = −e^{2πi(λ'_k − λ'_j)} α_k c_jk` for `j ≻ k`.
pub fn stokes_from_connection(conn: &ConnectionData, lambda_prime: &[C64], ordering: &Ordering) -> Result<StokesPair> {
    let n = lambda_prime.len();
    let mut s = CMat::identity(n, n);
    let mut s_inv = CMat::identity(n, n);
    for j in 0..n {
        for k in 0..n {
            let c = conn.c[(j, k)] * conn.alpha[k];
            if ordering.precedes(j, k) {
                s[(j, k)] = (TWO_PI_I * lambda_prime[k]).exp() * c;
            } else if ordering.follows(j, k) {
                s_inv[(j, k)] = -(TWO_PI_I * (lambda_prime[k] - lambda_prime[j])).exp() * c;
            }
        }
    }
    let s_nu_mu = inverse(&s_inv).ok_or(Error::BasisSingular { cond: f64::INFINITY })?;
    Ok(StokesPair {
        s_nu: s,
        s_nu_mu,
        nu: 0,
        method: StokesMethod::Formula,
        ordering: ordering.clone(),
    })
}

/// `S_{ν+(h+2)μ} = e^{−2πiB} S_{ν+hμ} e^{2πiB}`: returns `S_{ν+hμ}` for `h = 0..count`.
pub fn stokes_generate(pair: &StokesPair, lambda_prime: &[C64], count: usize) -> Vec<CMat> {
    let fwd = exp_diag(lambda_prime, TWO_PI_I);
    let back = exp_diag(lambda_prime, -TWO_PI_I);
    let mut out: Vec<CMat> = Vec::with_capacity(count);
    for h in 0..count {
        let s = match h {
            0 => pair.s_nu.clone(),
            1 => pair.s_nu_mu.clone(),
            _ => &back * &out[h - 2] * &fwd,
        };
        out.push(s);
    }
    out
}

/// Result of the direct matching.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub pair: StokesPair,
    /// Largest entrywise difference between the two matching radii.
    pub spread: f64,
    pub radii: [f64; 2],
}

/// Direction in `(lo, hi)` near `lo + fraction·(hi − lo)` keeping the largest distance
/// (mod π) from every ray of `Λ(u)`.
fn clear_direction(u: &[C64], lo: f64, hi: f64, fraction: f64, settings: &Settings) -> f64 {
    let rays = stokes_ray_directions(u, settings);
    let clearance = |t: f64| {
        rays.rays
            .iter()
            .map(|r| angle_distance_mod(r.direction, t, PI))
            .fold(f64::INFINITY, f64::min)
    };
    let candidates = (0..=16).map(|i| lo + (fraction - 0.2 + 0.4 * i as f64 / 16.0) * (hi - lo));
    let mut best = (f64::NEG_INFINITY, lo + fraction * (hi - lo));
    for t in candidates {
        // Prefer the nominal point unless a ray is close to it.
        let c = clearance(t).min(0.1 * (hi - lo)) - 1e-3 * (t - lo - fraction * (hi - lo)).abs();
        if c > best.0 {
            best = (c, t);
        }
    }
    best.1
}

/// `S_{ν+hμ}` from `Y_{ν+(h+1)μ} = Y_{ν+hμ} S` on the common ray, at two radii.
fn matched(system: &SystemPair, labels: &RayLabels, h: i64, settings: &Settings) -> Result<(CMat, f64, [f64; 2])> {
    let n = system.n();
    let u = system.u();
    if labels.mu == 0 {
        return Ok((CMat::identity(n, n), 0.0, [0.0, 0.0]));
    }
    let fs = build_fuchsian(system);
    let lo = labels.tau_at(labels.nu);
    let hi = labels.tau_at(labels.nu + 1);
    if hi - lo <= settings.angle_tol {
        return Err(Error::OverlapEmpty);
    }
    let mid = 0.5 * (lo + hi);
    let phi = mid + h as f64 * PI;
    let tau_a = clear_direction(u, lo, hi, 0.75, settings);
    let tau_b = clear_direction(u, lo, hi, 0.25, settings);
    let theta_a = 1.5 * PI - tau_a - h as f64 * PI;
    let theta_b = 1.5 * PI - tau_b - (h + 1) as f64 * PI;
    CutPlane::new(theta_a).check(u, settings)?;
    CutPlane::new(theta_b).check(u, settings)?;

    let dir = C64::from_polar(1.0, phi);
    let spread_re = (0..n)
        .flat_map(|j| (0..n).map(move |k| (j, k)))
        .filter(|&(j, k)| (u[j] - u[k]).norm() > settings.coalescence_tol)
        .map(|(j, k)| ((u[j] - u[k]) * dir).re.abs())
        .fold(0.0, f64::max);
    let base = if spread_re > 1e-3 { 1.0 / spread_re } else { 1.0 };
    let radii = [1.5 * base, 3.0 * base];
    let mut results = Vec::with_capacity(2);
    for &r in &radii {
        let z = dir * r;
        let ya = laplace_matrix(&fs, theta_a, z, settings)?;
        let yb = laplace_matrix(&fs, theta_b, z, settings)?;
        let ya_inv = inverse(&ya).ok_or(Error::BasisSingular { cond: f64::INFINITY })?;
        let mut s = ya_inv * yb;
        for j in 0..n {
            for k in 0..n {
                s[(j, k)] *= ((u[k] - u[j]) * z).exp();
            }
        }
        results.push(s);
    }
    let spread = max_abs(&(&results[0] - &results[1]));
    let scale = max_abs(&results[1]).max(1.0);
    if spread > settings.projection_tol * scale {
        return Err(Error::MatchingInconsistent { spread });
    }
    Ok((results.pop().unwrap(), spread, radii))
}

/// `S_{ν+hμ}` by direct matching, with the spread between the two radii.
pub fn stokes_direct_at(system: &SystemPair, labels: &RayLabels, h: i64, settings: &Settings) -> Result<(CMat, f64)> {
    matched(system, labels, h, settings).map(|(s, e, _)| (s, e))
}

/// Stokes matrices `S_ν`, `S_{ν+μ}` by matching Laplace solutions of adjacent sectors.
///
/// No structure is imposed: entries that vanish by the ordering come out numerically.
pub fn stokes_direct(system: &SystemPair, labels: &RayLabels, settings: &Settings) -> Result<OracleReport> {
    let ordering = Ordering::new(system.u(), labels.tau, settings);
    let (s0, e0, radii) = matched(system, labels, 0, settings)?;
    let (s1, e1, _) = matched(system, labels, 1, settings)?;
    Ok(OracleReport {
        pair: StokesPair {
            s_nu: s0,
            s_nu_mu: s1,
            nu: labels.nu,
            method: StokesMethod::Oracle,
            ordering,
        },
        spread: e0.max(e1),
        radii,
    })
}

/// `Y_ν(z e^{−2πi}) = Y_ν(z) S_ν S_{ν+μ} e^{−2πiB}`: clockwise monodromy of `Y_ν`,
/// with eigenvalues `e^{−2πi spec A}`.
pub fn stokes_monodromy(pair: &StokesPair, lambda_prime: &[C64]) -> CMat {
    &pair.s_nu * &pair.s_nu_mu * exp_diag(lambda_prime, -TWO_PI_I)
}

/// Largest deviation of `S_ν`, `S_{ν+μ}` from the triangular pattern of the ordering.
pub fn triangularity_defect(pair: &StokesPair) -> f64 {
    let n = pair.s_nu.nrows();
    let mut worst: f64 = 0.0;
    for j in 0..n {
        worst = worst.max((pair.s_nu[(j, j)] - 1.0).norm()).max((pair.s_nu_mu[(j, j)] - 1.0).norm());
        for k in 0..n {
            if pair.ordering.follows(j, k) {
                worst = worst.max(pair.s_nu[(j, k)].norm());
            }
            if pair.ordering.precedes(j, k) {
                worst = worst.max(pair.s_nu_mu[(j, k)].norm());
            }
        }
    }
    worst
}

/// `e^{2πiλ'_k} α_k` for every `k`: the factor linking `S` and `c`.
pub fn stokes_factors(lambda_prime: &[C64], settings: &Settings) -> Vec<C64> {
    lambda_prime.iter().map(|&l| (TWO_PI_I * l).exp() * alpha(l, settings)).collect()
}
