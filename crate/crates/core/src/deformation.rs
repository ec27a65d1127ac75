//! Isomonodromic deformations: `dA = Σ_k [ω_k, A] du_k` with
//! `(ω_k)_ij = A_ij (δ_ik − δ_jk)/(u_i − u_j)`, the Schlesinger equations for the
//! Fuchsian residues, launching from a coalescence point, and integrability checks.

use crate::continuation::{connection_coefficients, variation_report, ConstancyReport};
use crate::error::{Error, Result};
use crate::frobenius::build_fuchsian;
use crate::linalg::{commutator, eigenvalues, max_abs, multiset_distance, CMat, C64, ZERO};
use crate::model::{CutPlane, DeformationGeometry, SystemPair};
use crate::ode::{integrate, OdeOptions, OdeStats};
use crate::settings::Settings;

/// `ω_k(u)`; coalesced pairs must have `A_ij = 0` and contribute nothing.
pub fn omega(system: &SystemPair, k: usize, settings: &Settings) -> Result<CMat> {
    let n = system.n();
    let (a, u) = (system.a(), system.u());
    let mut w = CMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i == j || (i != k && j != k) {
                continue;
            }
            let du = u[i] - u[j];
            if du.norm() < settings.coalescence_tol {
                if a[(i, j)].norm() > settings.zero_tol.max(1e-10) {
                    return Err(Error::SingularF1 { i, j });
                }
                continue;
            }
            let sign = if i == k { 1.0 } else { -1.0 };
            w[(i, j)] = a[(i, j)] * sign / du;
        }
    }
    Ok(w)
}

/// `Ω = Σ_k ω_k du_k`: `Ω_ij = A_ij (du_i − du_j)/(u_i − u_j)`.
fn omega_along(a: &CMat, u: &[C64], du: &[C64]) -> CMat {
    let n = u.len();
    CMat::from_fn(n, n, |i, j| {
        if i == j {
            ZERO
        } else {
            let d = u[i] - u[j];
            if d.norm() == 0.0 {
                ZERO
            } else {
                a[(i, j)] * (du[i] - du[j]) / d
            }
        }
    })
}

/// `∂_i B_k` for all `i, k` (outer index `i`).
pub fn schlesinger_rhs(system: &SystemPair, settings: &Settings) -> Result<Vec<Vec<CMat>>> {
    let fs = build_fuchsian(system);
    let n = system.n();
    let u = system.u();
    for i in 0..n {
        for j in (i + 1)..n {
            if (u[i] - u[j]).norm() < settings.coalescence_tol {
                return Err(Error::CoalescedPoles { j: i, k: j });
            }
        }
    }
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let w = omega(system, i, settings)?;
        let mut row = Vec::with_capacity(n);
        for k in 0..n {
            let mut d = commutator(&w, &fs.b[k]);
            if i == k {
                for l in (0..n).filter(|&l| l != i) {
                    d -= commutator(&fs.b[i], &fs.b[l]) / (u[i] - u[l]);
                }
            } else {
                d += commutator(&fs.b[i], &fs.b[k]) / (u[i] - u[k]);
            }
            row.push(d);
        }
        out.push(row);
    }
    Ok(out)
}

/// Smallest `|u_i(s) − u_j(s)|` along the straight segment from `from` to `to`.
fn min_gap(from: &[C64], to: &[C64]) -> (f64, usize, usize) {
    let n = from.len();
    let mut best = (f64::INFINITY, 0, 0);
    for i in 0..n {
        for j in (i + 1)..n {
            let d0 = from[i] - from[j];
            let d1 = to[i] - to[j];
            let e = d1 - d0;
            let s = if e.norm_sqr() == 0.0 {
                0.0
            } else {
                (-(d0 * e.conj()).re / e.norm_sqr()).clamp(0.0, 1.0)
            };
            let g = (d0 + e * s).norm();
            if g < best.0 {
                best = (g, i, j);
            }
        }
    }
    best
}

/// Outcome of a transport along a straight segment in `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportReport {
    pub system: SystemPair,
    pub stats: OdeStats,
    /// Drift of the invariants (diagonal and spectrum of `A`).
    pub drift: f64,
    /// Smallest pole separation along the path.
    pub min_gap: f64,
}

/// Transport `A` from `system.u()` to `target` along the straight segment.
pub fn transport(system: &SystemPair, target: &[C64], settings: &Settings) -> Result<TransportReport> {
    let n = system.n();
    if target.len() != n {
        return Err(Error::InvalidInput(format!("target has {} coordinates, expected {n}", target.len())));
    }
    let from = system.u().to_vec();
    let (gap, i, j) = min_gap(&from, target);
    if n > 1 && gap < settings.near_delta_guard {
        return Err(Error::NearCoalescence { i, j, gap });
    }
    let du: Vec<C64> = target.iter().zip(&from).map(|(t, f)| t - f).collect();
    let mut y: Vec<C64> = system.a().iter().copied().collect();
    let opts = OdeOptions::with_tol(settings.continuation_tol);
    let stats = integrate(
        |s, y, dy| {
            let a = CMat::from_column_slice(n, n, y);
            let u: Vec<C64> = from.iter().zip(&du).map(|(f, d)| f + d * s).collect();
            let w = omega_along(&a, &u, &du);
            let d = commutator(&w, &a);
            dy.copy_from_slice(d.as_slice());
        },
        0.0,
        1.0,
        &mut y,
        &opts,
    )?;
    let a1 = CMat::from_column_slice(n, n, &y);
    let a0 = system.a();
    let diag = (0..n).map(|k| (a1[(k, k)] - a0[(k, k)]).norm()).fold(0.0, f64::max);
    let spec = multiset_distance(&eigenvalues(&a1), &eigenvalues(a0));
    let drift = diag.max(spec);
    let scale = max_abs(a0).max(1.0);
    if drift > 1e3 * settings.continuation_tol * scale {
        return Err(Error::DriftExceeded { drift });
    }
    Ok(TransportReport {
        system: SystemPair::new(a1, target.to_vec())?,
        stats,
        drift,
        min_gap: gap,
    })
}

/// Entries `|A_ij|` with `u^c_i = u^c_j`, `i ≠ j`, that exceed `zero_tol`.
pub fn vanishing_check(a: &CMat, geometry: &DeformationGeometry, settings: &Settings) -> Result<()> {
    let n = geometry.n();
    let tol = settings.zero_tol.max(1e-10) * max_abs(a).max(1.0);
    for i in 0..n {
        for j in 0..n {
            if i != j && geometry.same_group(i, j) && a[(i, j)].norm() > tol {
                return Err(Error::VanishingViolated {
                    i,
                    j,
                    value: a[(i, j)].norm(),
                });
            }
        }
    }
    Ok(())
}

/// Power series `A(t) = Σ A_m t^m` of the isomonodromic family along `u = u^c + t v`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoalescenceLaunch {
    pub u_c: Vec<C64>,
    pub v: Vec<C64>,
    pub coeffs: Vec<CMat>,
}

impl CoalescenceLaunch {
    pub fn u_at(&self, t: f64) -> Vec<C64> {
        self.u_c.iter().zip(&self.v).map(|(c, v)| c + v * t).collect()
    }

    pub fn a_at(&self, t: f64) -> CMat {
        let mut acc = CMat::zeros(self.u_c.len(), self.u_c.len());
        for c in self.coeffs.iter().rev() {
            acc = acc * C64::from(t) + c;
        }
        acc
    }

    pub fn at(&self, t: f64) -> Result<SystemPair> {
        SystemPair::new(self.a_at(t), self.u_at(t))
    }

    /// Size of the last retained term at `t`, relative to `A_0`.
    pub fn tail(&self, t: f64) -> f64 {
        let m = self.coeffs.len() - 1;
        max_abs(&self.coeffs[m]) * t.powi(m as i32) / max_abs(&self.coeffs[0]).max(1.0)
    }
}

/// Series solution of `t dA/dt = [P(A), A] + t[Ω_×(t), A]` at `t = 0`, where `P` keeps the
/// in-group entries and `Ω_×` the cross-group part of `Ω`.
pub fn launch_from_coalescence(
    a0: &CMat,
    geometry: &DeformationGeometry,
    v: &[C64],
    order: usize,
    settings: &Settings,
) -> Result<CoalescenceLaunch> {
    let n = geometry.n();
    if a0.nrows() != n || v.len() != n {
        return Err(Error::InvalidInput("dimension mismatch in launch".into()));
    }
    vanishing_check(a0, geometry, settings)?;
    let u_c = &geometry.u_c;
    for i in 0..n {
        for j in (i + 1)..n {
            if geometry.same_group(i, j) && (v[i] - v[j]).norm() < settings.coalescence_tol {
                return Err(Error::InvalidInput(format!("direction keeps u_{i} = u_{j} coalesced")));
            }
        }
    }
    let inside = |i: usize, j: usize| i != j && geometry.same_group(i, j);
    // g_ij(t) = δv_ij/(d_ij + t δv_ij) = Σ_r g_{ij,r} t^r for cross pairs.
    let g = |i: usize, j: usize, r: usize| {
        let d = u_c[i] - u_c[j];
        let dv = v[i] - v[j];
        (dv / d) * (-dv / d).powi(r as i32)
    };
    let p_in = |x: &CMat| CMat::from_fn(n, n, |i, j| if inside(i, j) { x[(i, j)] } else { ZERO });
    // Matrix of X ↦ mX − [P(X), A_0] on column-major vec(X), minus mI.
    let nn = n * n;
    let mut lin = CMat::zeros(nn, nn);
    for col in 0..nn {
        let mut e = CMat::zeros(n, n);
        e[(col % n, col / n)] = C64::from(1.0);
        let img = -commutator(&p_in(&e), a0);
        lin.set_column(col, &crate::linalg::CVec::from_column_slice(img.as_slice()));
    }
    let mut coeffs = vec![a0.clone()];
    let mut omega_c: Vec<CMat> = Vec::new();
    for m in 1..=order {
        // (Ω_×)_{m−1} from A_0..A_{m−1}.
        let a_idx = m - 1;
        let w = CMat::from_fn(n, n, |i, j| {
            if i == j || geometry.same_group(i, j) {
                return ZERO;
            }
            (0..=a_idx).map(|a| coeffs[a][(i, j)] * g(i, j, a_idx - a)).sum()
        });
        omega_c.push(w);
        let mut rhs = CMat::zeros(n, n);
        for a in 1..m {
            rhs += commutator(&p_in(&coeffs[a]), &coeffs[m - a]);
        }
        for a in 0..m {
            rhs += commutator(&omega_c[a], &coeffs[m - 1 - a]);
        }
        let mut sys = lin.clone();
        for d in 0..nn {
            sys[(d, d)] += C64::from(m as f64);
        }
        let b = crate::linalg::CVec::from_column_slice(rhs.as_slice());
        let sol = sys.clone().svd(true, true).solve(&b, 1e-13).map_err(|e| Error::IllConditioned {
            what: format!("launch order {m}: {e}"),
            residual: f64::INFINITY,
        })?;
        let res = (&sys * &sol - &b).norm() / b.norm().max(1e-300);
        if res > 1e-8 && b.norm() > 1e-300 {
            return Err(Error::IllConditioned {
                what: format!("resonant launch at order {m}"),
                residual: res,
            });
        }
        coeffs.push(CMat::from_column_slice(n, n, sol.as_slice()));
    }
    Ok(CoalescenceLaunch {
        u_c: u_c.clone(),
        v: v.to_vec(),
        coeffs,
    })
}

/// How `A` is carried to the neighbouring points in [`integrability_residual`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Carry {
    Transported,
    /// Negative control: `A` held fixed.
    Frozen,
}

/// Residual of the family `A(u)` near `system` against the deformation equations, by
/// central differences of step `h` in `u_i` and `u_j`: the larger of
/// `|D_k A − [ω_k, A]|` (`k = i, j`) and `|D_i [ω_j, A] − D_j [ω_i, A]|`.
///
/// For the transported family this is `O(h²)`; with `A` frozen it stays `O(1)`.
pub fn integrability_residual(system: &SystemPair, i: usize, j: usize, h: f64, carry: Carry, settings: &Settings) -> Result<f64> {
    let moved = |k: usize, step: f64| -> Result<SystemPair> {
        let mut u = system.u().to_vec();
        u[k] += step;
        match carry {
            Carry::Transported => Ok(transport(system, &u, settings)?.system),
            Carry::Frozen => system.at(u),
        }
    };
    let flow = |s: &SystemPair, k: usize| -> Result<CMat> { Ok(commutator(&omega(s, k, settings)?, s.a())) };
    let two_h = C64::from(2.0 * h);
    let (ip, im, jp, jm) = (moved(i, h)?, moved(i, -h)?, moved(j, h)?, moved(j, -h)?);
    let eq_i = max_abs(&((ip.a() - im.a()) / two_h - flow(system, i)?));
    let eq_j = max_abs(&((jp.a() - jm.a()) / two_h - flow(system, j)?));
    let d_i_of_j = (flow(&ip, j)? - flow(&im, j)?) / two_h;
    let d_j_of_i = (flow(&jp, i)? - flow(&jm, i)?) / two_h;
    Ok(eq_i.max(eq_j).max(max_abs(&(d_i_of_j - d_j_of_i))))
}

/// `G` with `G^{−1} B_j G = T` in normal form.
#[derive(Debug, Clone, PartialEq)]
pub struct JordanReduction {
    pub g: CMat,
    pub t: CMat,
}

/// Explicit reduction of the rank-one residue `B_j = −E_j(A + I)`.
pub fn jordan_reduce_bj(system: &SystemPair, j: usize, settings: &Settings) -> Result<JordanReduction> {
    let n = system.n();
    let a = system.a();
    let lp = a[(j, j)];
    let mut g = CMat::identity(n, n);
    let mut t = CMat::zeros(n, n);
    if (lp + 1.0).norm() > settings.integer_tol {
        for l in (0..n).filter(|&l| l != j) {
            g[(j, l)] = -a[(j, l)] / (lp + 1.0);
        }
        t[(j, j)] = -(lp + 1.0);
    } else {
        let m = (0..n)
            .filter(|&l| l != j)
            .max_by(|&x, &y| a[(j, x)].norm().partial_cmp(&a[(j, y)].norm()).unwrap());
        let m = match m {
            Some(m) if a[(j, m)].norm() > settings.zero_tol => m,
            _ => return Err(Error::NotReducible { j }),
        };
        g[(j, j)] = -a[(j, m)];
        for l in (0..n).filter(|&l| l != j && l != m) {
            g[(m, l)] = -a[(j, l)] / a[(j, m)];
        }
        t[(j, m)] = C64::from(1.0);
    }
    Ok(JordanReduction { g, t })
}

/// Value at `t = 0` of the interpolating polynomial through `(t_i, f_i)` (Neville).
pub fn richardson(ts: &[f64], values: &[CMat]) -> CMat {
    let mut p: Vec<CMat> = values.to_vec();
    let m = ts.len();
    for level in 1..m {
        for i in 0..(m - level) {
            let (ti, tj) = (ts[i], ts[i + level]);
            p[i] = (&p[i + 1] * C64::from(ti) - &p[i] * C64::from(tj)) / C64::from(ti - tj);
        }
    }
    p[0].clone()
}

/// Least-squares slope of `log y` against `log t`.
pub fn log_slope(ts: &[f64], ys: &[f64]) -> f64 {
    let xs: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    let ls: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let k = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / k, ls.iter().sum::<f64>() / k);
    let num: f64 = xs.iter().zip(&ls).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}

/// Connection coefficients at `samples + 1` equally spaced points of the transport from
/// `system` to `target`, and their variation.
pub fn connection_constancy(system: &SystemPair, target: &[C64], samples: usize, cut: CutPlane, settings: &Settings) -> Result<ConstancyReport> {
    let from = system.u().to_vec();
    let mut current = system.clone();
    let mut mats = Vec::with_capacity(samples + 1);
    for s in 0..=samples {
        let f = s as f64 / samples.max(1) as f64;
        let u: Vec<C64> = from.iter().zip(target).map(|(a, b)| a + (b - a) * f).collect();
        if s > 0 {
            current = transport(&current, &u, settings)?.system;
        }
        cut.check(current.u(), settings)?;
        let conn = connection_coefficients(&build_fuchsian(&current), cut, settings)?;
        mats.push(conn.c);
    }
    Ok(variation_report(&mats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laplace::f1;
    use crate::linalg::{c, diag_unit};

    fn sample() -> SystemPair {
        let a = CMat::from_row_slice(2, 2, &[c(0.5, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(1.0 / 3.0, 0.0)]);
        SystemPair::new(a, vec![c(0.0, 0.0), c(1.0, 0.0)]).unwrap()
    }

    #[test]
    fn omega_is_commutator_with_f1() {
        let s = Settings::default();
        let sys = sample();
        let f = f1(&sys, &s).unwrap();
        for k in 0..2 {
            let w = omega(&sys, k, &s).unwrap();
            assert!(max_abs(&(w - commutator(&f, &diag_unit(2, k)))) < 1e-14);
        }
        let w = omega(&sys, 0, &s).unwrap();
        assert_eq!(w[(1, 0)], c(-3.0, 0.0));
        assert_eq!(w[(0, 1)], c(-2.0, 0.0));
    }

    #[test]
    fn jordan_forms() {
        let s = Settings::default();
        let sys = sample();
        let fs = build_fuchsian(&sys);
        for j in 0..2 {
            let r = jordan_reduce_bj(&sys, j, &s).unwrap();
            let back = crate::linalg::inverse(&r.g).unwrap() * &fs.b[j] * &r.g;
            assert!(max_abs(&(back - &r.t)) < 1e-13);
        }
        let a = CMat::from_row_slice(3, 3, &[c(-1.0, 0.0), c(0.5, 0.0), c(2.0, 0.0), c(1.0, 0.0), c(0.2, 0.0), ZERO, ZERO, c(1.0, 0.0), c(0.4, 0.0)]);
        let sys = SystemPair::new(a, vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        let fs = build_fuchsian(&sys);
        let r = jordan_reduce_bj(&sys, 0, &s).unwrap();
        let back = crate::linalg::inverse(&r.g).unwrap() * &fs.b[0] * &r.g;
        assert!(max_abs(&(back - &r.t)) < 1e-13);
        assert_eq!(r.t[(0, 2)], c(1.0, 0.0));
        let a = CMat::from_row_slice(2, 2, &[c(-1.0, 0.0), ZERO, c(1.0, 0.0), c(0.2, 0.0)]);
        let sys = SystemPair::new(a, vec![c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_eq!(jordan_reduce_bj(&sys, 0, &s), Err(Error::NotReducible { j: 0 }));
    }

    #[test]
    fn richardson_removes_linear_and_quadratic_terms() {
        let f = |t: f64| CMat::from_element(1, 1, C64::from(2.0 + 3.0 * t - 5.0 * t * t));
        let ts = [0.08, 0.04, 0.02];
        let v: Vec<CMat> = ts.iter().map(|&t| f(t)).collect();
        assert!((richardson(&ts, &v)[(0, 0)] - 2.0).norm() < 1e-12);
        assert!((log_slope(&[0.1, 0.01], &[3e-2, 3e-4]) - 2.0).abs() < 1e-12);
    }
}
