//! System definitions, deformation geometry, Stokes rays and their labelling.
//!
//! The irregular system `dY/dz = (Λ + A/z) Y` with `Λ = diag(u)` and the Fuchsian
//! system `(Λ − λ) dΨ/dλ = (A + I) Ψ` are both generated by a [`SystemPair`].
//! A [`DeformationGeometry`] fixes the coalescence point `u^c`, the admissible
//! direction `τ` (with `η = 3π/2 − τ`) and the polydisc radius `ε₀`.
//!
//! Ray conventions:
//!
//! | Object | Definition |
//! |--------|------------|
//! | Stokes ray of `(j, k)` | `θ` with `Re((u_j − u_k)e^{iθ}) = 0`, `Im(…) < 0` |
//! | labels `τ_ν` | increasing, `τ_{ν+μ} = τ_ν + π`, `τ_0 < τ < τ_1` |
//! | sector `Ŝ_ν` | `(τ_ν − π, τ_{ν+1})`, shrunk by the polydisc ray rotation |
//! | cut plane `P_η` | cuts from each `u_k` in direction `η`, `η − 2π < arg(λ − u_k) < η` |

use crate::error::{Error, Result};
use crate::linalg::{CMat, C64};
use crate::settings::Settings;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

/// The matrix `A` at a deformation point together with `u` (the diagonal of `Λ`).
#[derive(Debug, Clone, PartialEq)]
pub struct SystemPair {
    a: CMat,
    u: Vec<C64>,
}

impl SystemPair {
    pub fn new(a: CMat, u: Vec<C64>) -> Result<Self> {
        if !a.is_square() || a.nrows() != u.len() || u.is_empty() {
            return Err(Error::InvalidInput(format!(
                "A is {}x{} but u has {} entries",
                a.nrows(),
                a.ncols(),
                u.len()
            )));
        }
        if a.iter().chain(u.iter()).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("non-finite entry".into()));
        }
        Ok(Self { a, u })
    }

    pub fn n(&self) -> usize {
        self.u.len()
    }

    pub fn a(&self) -> &CMat {
        &self.a
    }

    pub fn u(&self) -> &[C64] {
        &self.u
    }

    /// `λ'_k = A_kk`.
    pub fn lambda_prime(&self) -> Vec<C64> {
        (0..self.n()).map(|k| self.a[(k, k)]).collect()
    }

    /// Same `A`, new point `u`.
    pub fn at(&self, u: Vec<C64>) -> Result<Self> {
        Self::new(self.a.clone(), u)
    }

    /// Same `u`, new matrix.
    pub fn with_a(&self, a: CMat) -> Result<Self> {
        Self::new(a, self.u.clone())
    }
}

/// Parallel branch cuts in direction `eta`; `arg(λ − u_k) ∈ (η − 2π, η)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutPlane {
    pub eta: f64,
}

impl CutPlane {
    pub fn new(eta: f64) -> Self {
        Self { eta }
    }

    /// Checks that no cut passes through another pole.
    pub fn check(&self, u: &[C64], settings: &Settings) -> Result<()> {
        for j in 0..u.len() {
            for k in 0..u.len() {
                let d = u[j] - u[k];
                if j != k && d.norm() >= settings.coalescence_tol {
                    let off = angle_distance_mod(d.arg(), self.eta, PI);
                    if off < settings.angle_tol {
                        return Err(Error::NonAdmissible { angle: self.eta, j, k });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Distance between two angles modulo `period`.
pub fn angle_distance_mod(a: f64, b: f64, period: f64) -> f64 {
    let r = (a - b).rem_euclid(period);
    r.min(period - r)
}

/// Stokes ray direction in `[0, 2π)` of an ordered pair with `u_j ≠ u_k`.
pub fn ray_direction(uj: C64, uk: C64) -> f64 {
    (-FRAC_PI_2 - (uj - uk).arg()).rem_euclid(2.0 * PI)
}

/// A Stokes ray of an ordered pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ray {
    pub j: usize,
    pub k: usize,
    pub direction: f64,
}

/// All rays of `Λ(u)`; coalesced pairs are listed separately.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayTable {
    pub rays: Vec<Ray>,
    pub skipped: Vec<(usize, usize)>,
}

pub fn stokes_ray_directions(u: &[C64], settings: &Settings) -> RayTable {
    let mut rays = Vec::new();
    let mut skipped = Vec::new();
    for j in 0..u.len() {
        for k in 0..u.len() {
            if j == k {
                continue;
            }
            if (u[j] - u[k]).norm() < settings.coalescence_tol {
                skipped.push((j, k));
            } else {
                rays.push(Ray {
                    j,
                    k,
                    direction: ray_direction(u[j], u[k]),
                });
            }
        }
    }
    RayTable { rays, skipped }
}

/// A coalescing group: indices sharing the same coordinate of `u^c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Group {
    pub value: C64,
    pub members: Vec<usize>,
}

/// Labelled Stokes rays `τ_ν` of `Λ(u^c)` around the admissible direction `τ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayLabels {
    pub tau: f64,
    /// `ν` of the sector containing `τ` (always 0 by convention).
    pub nu: i64,
    pub mu: usize,
    /// `τ_0 < τ_1 < … < τ_{μ−1}`, all within `[τ_0, τ_0 + π)`.
    pub base: Vec<f64>,
}

impl RayLabels {
    /// `τ_label` for any integer label (periodic with `τ_{ν+μ} = τ_ν + π`).
    pub fn tau_at(&self, label: i64) -> f64 {
        if self.mu == 0 {
            return self.tau + FRAC_PI_2 + PI * label as f64;
        }
        let mu = self.mu as i64;
        let (q, r) = (label.div_euclid(mu), label.rem_euclid(mu));
        self.base[r as usize] + PI * q as f64
    }

    /// Sector `Ŝ_label = (τ_label − π + shrink, τ_{label+1} − shrink)`.
    pub fn sector_bounds(&self, label: i64, shrink: f64) -> (f64, f64) {
        (self.tau_at(label) - PI + shrink, self.tau_at(label + 1) - shrink)
    }
}

/// Coalescence point, groups, polydisc radius and the admissible direction frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeformationGeometry {
    pub u_c: Vec<C64>,
    pub groups: Vec<Group>,
    /// Group index of every coordinate.
    pub group_of: Vec<usize>,
    pub epsilon0: f64,
    pub tau: f64,
    pub eta: f64,
    pub labels: RayLabels,
    /// Conservative maximal rotation of cross-group rays over the polydisc.
    pub max_rotation: f64,
}

impl DeformationGeometry {
    pub fn new(u_c: Vec<C64>, tau: f64, epsilon0: f64, settings: &Settings) -> Result<Self> {
        if u_c.is_empty() {
            return Err(Error::InvalidGeometry("empty u^c".into()));
        }
        if epsilon0.is_nan() || epsilon0 < 0.0 {
            return Err(Error::InvalidGeometry(format!("epsilon0 = {epsilon0} must be >= 0")));
        }
        let mut groups: Vec<Group> = Vec::new();
        let mut group_of = vec![0; u_c.len()];
        for (i, &ui) in u_c.iter().enumerate() {
            match groups.iter().position(|g| (g.value - ui).norm() < settings.coalescence_tol) {
                Some(g) => {
                    groups[g].members.push(i);
                    group_of[i] = g;
                }
                None => {
                    group_of[i] = groups.len();
                    groups.push(Group {
                        value: ui,
                        members: vec![i],
                    });
                }
            }
        }
        let eta = 1.5 * PI - tau;
        let delta = min_cut_half_distance(&groups, eta);
        if groups.len() > 1 && epsilon0 >= delta {
            return Err(Error::InvalidGeometry(format!(
                "epsilon0 = {epsilon0} must be below the cut half-distance {delta}"
            )));
        }
        let labels = label_rays(&u_c, tau, settings)?;
        let max_rotation = max_ray_rotation(&groups, epsilon0, settings.sector_samples)?;
        Ok(Self {
            u_c,
            groups,
            group_of,
            epsilon0,
            tau,
            eta,
            labels,
            max_rotation,
        })
    }

    pub fn n(&self) -> usize {
        self.u_c.len()
    }

    pub fn same_group(&self, j: usize, k: usize) -> bool {
        self.group_of[j] == self.group_of[k]
    }

    pub fn cut(&self) -> CutPlane {
        CutPlane::new(self.eta)
    }

    /// Bounds of `Ŝ_{ν+hμ}` intersected over the polydisc.
    pub fn sector_bounds(&self, h: i64) -> (f64, f64) {
        let label = self.labels.nu + h * self.labels.mu as i64;
        self.labels.sector_bounds(label, self.max_rotation)
    }

    /// Is `u` inside the polydisc `max_j |u_j − u_j^c| ≤ ε₀`?
    pub fn contains(&self, u: &[C64]) -> bool {
        u.len() == self.n() && u.iter().zip(&self.u_c).all(|(a, b)| (a - b).norm() <= self.epsilon0 * (1.0 + 1e-12))
    }
}

/// Half distance `δ_{αβ}` between the cut half-lines of two groups, minimised.
fn min_cut_half_distance(groups: &[Group], eta: f64) -> f64 {
    let dir = C64::from_polar(1.0, -eta);
    let mut best = f64::INFINITY;
    for a in groups {
        for b in groups {
            if std::ptr::eq(a, b) {
                continue;
            }
            let w = (a.value - b.value) * dir;
            let d = if w.re >= 0.0 { w.norm() } else { w.im.abs() };
            best = best.min(0.5 * d);
        }
    }
    best
}

/// Maximal angular rotation of cross-group rays, sampled on the polydisc boundary.
fn max_ray_rotation(groups: &[Group], epsilon0: f64, samples: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    if epsilon0 == 0.0 {
        return Ok(0.0);
    }
    let samples = samples.max(4);
    for (ia, a) in groups.iter().enumerate() {
        for b in groups.iter().skip(ia + 1) {
            let d = a.value - b.value;
            if 2.0 * epsilon0 >= d.norm() {
                return Err(Error::InvalidGeometry("polydisc reaches a cross-group coalescence".into()));
            }
            for s in 0..samples {
                let p = C64::from_polar(epsilon0, 2.0 * PI * s as f64 / samples as f64);
                for t in 0..samples {
                    let q = C64::from_polar(epsilon0, 2.0 * PI * t as f64 / samples as f64);
                    let rot = ((d + p - q) / d).arg().abs();
                    worst = worst.max(rot);
                }
            }
            // Sampling misses the exact extremum by at most the grid spacing.
            worst = worst.max((2.0 * epsilon0 / d.norm()).asin());
        }
    }
    Ok(worst)
}

/// Label the rays of `Λ(u^c)` around `τ`: `μ` basic rays, `ν = 0` for the sector
/// `τ_0 < τ < τ_1` with `τ_0` the largest ray direction in `(τ − π, τ]`.
pub fn label_rays(u_c: &[C64], tau: f64, settings: &Settings) -> Result<RayLabels> {
    let table = stokes_ray_directions(u_c, settings);
    let mut reduced: Vec<(f64, usize, usize)> = Vec::new();
    for r in &table.rays {
        if angle_distance_mod(r.direction, tau, PI) < settings.angle_tol {
            return Err(Error::NonAdmissible { angle: tau, j: r.j, k: r.k });
        }
        let m = r.direction.rem_euclid(PI);
        if !reduced.iter().any(|(x, _, _)| angle_distance_mod(*x, m, PI) < settings.angle_tol) {
            reduced.push((m, r.j, r.k));
        }
    }
    let mu = reduced.len();
    if mu == 0 {
        return Ok(RayLabels {
            tau,
            nu: 0,
            mu: 0,
            base: Vec::new(),
        });
    }
    let tau0 = reduced
        .iter()
        .map(|(m, _, _)| m + PI * ((tau - m) / PI).floor())
        .fold(f64::NEG_INFINITY, f64::max);
    let mut base: Vec<f64> = reduced
        .iter()
        .map(|(m, _, _)| {
            let mut x = m + PI * ((tau0 - m) / PI).round();
            if x < tau0 - settings.angle_tol {
                x += PI;
            }
            x
        })
        .collect();
    base.sort_by(|a, b| a.partial_cmp(b).unwrap());
    base[0] = tau0;
    Ok(RayLabels { tau, nu: 0, mu, base })
}

/// Why `u` fails to lie in a τ-cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CellDefect {
    Coalesced,
    RayAligned,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellCheck {
    pub inside: bool,
    pub offenders: Vec<(usize, usize, CellDefect)>,
}

/// `u` lies in a τ-cell iff `u ∉ Δ` and no Stokes ray of `Λ(u)` has direction `τ mod π`.
pub fn is_in_cell(u: &[C64], tau: f64, settings: &Settings) -> CellCheck {
    let mut offenders = Vec::new();
    for j in 0..u.len() {
        for k in (j + 1)..u.len() {
            if (u[j] - u[k]).norm() < settings.coalescence_tol {
                offenders.push((j, k, CellDefect::Coalesced));
            } else if angle_distance_mod(ray_direction(u[j], u[k]), tau, PI) < settings.angle_tol {
                offenders.push((j, k, CellDefect::RayAligned));
            }
        }
    }
    CellCheck {
        inside: offenders.is_empty(),
        offenders,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn ray_examples() {
        assert!((ray_direction(c(0.0, 0.0), c(1.0, 0.0)) - FRAC_PI_2).abs() < 1e-15);
        assert!((ray_direction(c(1.0, 0.0), c(0.0, 0.0)) - 1.5 * PI).abs() < 1e-15);
        assert!(ray_direction(c(0.0, 0.0), c(0.0, 1.0)).abs() < 1e-15);
    }

    #[test]
    fn labels_two_points() {
        let s = Settings::default();
        let l = label_rays(&[c(0.0, 0.0), c(1.0, 0.0)], PI / 4.0, &s).unwrap();
        assert_eq!(l.mu, 1);
        assert!((l.tau_at(0) + FRAC_PI_2).abs() < 1e-14);
        assert!((l.tau_at(1) - FRAC_PI_2).abs() < 1e-14);
        let (lo, hi) = l.sector_bounds(0, 0.0);
        assert!((lo + 1.5 * PI).abs() < 1e-14 && (hi - FRAC_PI_2).abs() < 1e-14);
        let (lo1, hi1) = l.sector_bounds(1, 0.0);
        assert!((lo1 - lo - PI).abs() < 1e-14 && (hi1 - hi - PI).abs() < 1e-14);
    }

    #[test]
    fn labels_coalesced_and_three_points() {
        let s = Settings::default();
        let l = label_rays(&[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)], PI / 4.0, &s).unwrap();
        assert_eq!(l.mu, 1);
        let l = label_rays(&[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)], 0.1, &s).unwrap();
        assert_eq!(l.mu, 3);
        assert!(l.tau_at(0) < 0.1 && 0.1 < l.tau_at(1));
    }

    #[test]
    fn non_admissible_direction_is_rejected() {
        let s = Settings::default();
        let e = label_rays(&[c(0.0, 0.0), c(1.0, 0.0)], FRAC_PI_2 + PI, &s).unwrap_err();
        assert!(matches!(e, Error::NonAdmissible { .. }));
    }
}
