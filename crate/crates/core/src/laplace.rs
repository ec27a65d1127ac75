//! Laplace transform of the selected solutions, formal solutions at `z = ∞` and the
//! asymptotic coefficients linking the two.
//!
//! Column `k` of the canonical solution `Y_{ν+hμ}` is computed along the contour direction
//! `θ = η − hπ` (cut plane `P_θ`); all columns are returned scaled by `e^{−u_k z}`:
//!
//! | class | `e^{−u_k z} Y_k(z)` |
//! |-------|---------------------|
//! | non-integer | `(1/2πi) ∫_{γ_k(θ)} e^{zx} Ψ_k dx` (hairpin around `u_k`) |
//! | `λ' = q ≥ 0` | `Σ_{l≤q} b_l z^{q−l}/(q−l)! + ∫_0^∞ e^{zx} Ψ_k dx` |
//! | `λ' = −p` | `∫_0^∞ e^{zx} Ψ_k dx` |
//!
//! with `x = λ − u_k` running along `e^{iθ}ℝ₊`. The integral converges for
//! `Re(z e^{iθ}) < 0`. Near `u_k` the integrand comes from the Frobenius series, beyond
//! that from continuation along the ray, integrated together with the solution.

use crate::continuation::{selected_at, Path, Segment};
use crate::error::{Error, Result};
use crate::frobenius::{selected_solution, ExponentClass, FuchsianSystem, LocalSeries, LocalSolution};
use crate::linalg::{condition_number, CMat, CVec, C64, I, ZERO};
use crate::model::{CutPlane, SystemPair};
use crate::ode::{integrate, OdeOptions};
use crate::quad::{gauss_legendre_on, tanh_sinh};
use crate::settings::Settings;
use crate::special::{factorial, reduce_arg};
use std::f64::consts::PI;

/// `(F_1)_ij = A_ij/(u_j − u_i)`, `(F_1)_ii = −Σ_{j≠i} A_ij (F_1)_ji`.
///
/// Coalesced pairs with vanishing `A_ij` contribute 0; otherwise the entry is singular.
pub fn f1(system: &SystemPair, settings: &Settings) -> Result<CMat> {
    let n = system.n();
    let (a, u) = (system.a(), system.u());
    let mut f = CMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let du = u[j] - u[i];
            if du.norm() < settings.coalescence_tol {
                if a[(i, j)].norm() > settings.zero_tol.max(1e-10) {
                    return Err(Error::SingularF1 { i, j });
                }
            } else {
                f[(i, j)] = a[(i, j)] / du;
            }
        }
    }
    for i in 0..n {
        f[(i, i)] = -(0..n).filter(|&j| j != i).map(|j| a[(i, j)] * f[(j, i)]).sum::<C64>();
    }
    Ok(f)
}

/// Formal solution `F(z) = I + Σ_{l≥1} F_l z^{−l}` with `Y ∼ F z^B e^{zΛ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FormalSolution {
    /// `F_1, …, F_L`.
    pub f: Vec<CMat>,
    pub lambda_prime: Vec<C64>,
    pub u: Vec<C64>,
    /// `(l, i, j)` with coalesced `u_i = u_j` and `λ'_j − λ'_i = l`: `(F_l)_ij` is arbitrary.
    pub free_parameters: Vec<(usize, usize, usize)>,
}

impl FormalSolution {
    pub fn order(&self) -> usize {
        self.f.len()
    }
}

/// Recursion for `F_1..F_L`; free entries (only at coalescences) take `free_values` or 0.
pub fn formal_recursion(
    system: &SystemPair,
    order: usize,
    free_values: &[((usize, usize, usize), C64)],
    settings: &Settings,
) -> Result<FormalSolution> {
    let n = system.n();
    let (a, u) = (system.a(), system.u());
    let lp = system.lambda_prime();
    let coalesced = |i: usize, j: usize| (u[i] - u[j]).norm() < settings.coalescence_tol;
    for i in 0..n {
        for j in 0..n {
            if i != j && coalesced(i, j) && a[(i, j)].norm() > settings.zero_tol.max(1e-10) {
                return Err(Error::SingularF1 { i, j });
            }
        }
    }
    let mut fs: Vec<CMat> = Vec::with_capacity(order);
    let mut free_parameters = Vec::new();
    let mut prev = CMat::identity(n, n);
    for l in 1..=order {
        let mut f = CMat::zeros(n, n);
        // Entries between distinct eigenvalues.
        for i in 0..n {
            for j in 0..n {
                if i == j || coalesced(i, j) {
                    continue;
                }
                let mut s = (lp[i] - lp[j] + (l - 1) as f64) * prev[(i, j)];
                for p in (0..n).filter(|&p| p != i) {
                    s += a[(i, p)] * prev[(p, j)];
                }
                f[(i, j)] = s / (u[j] - u[i]);
            }
        }
        // Entries inside a coalesced group.
        for i in 0..n {
            for j in 0..n {
                if i == j || !coalesced(i, j) {
                    continue;
                }
                let rhs: C64 = -(0..n).filter(|&p| !coalesced(p, i)).map(|p| a[(i, p)] * f[(p, j)]).sum::<C64>();
                let div = lp[i] - lp[j] + l as f64;
                if div.norm() < settings.integer_tol {
                    free_parameters.push((l, i, j));
                    f[(i, j)] = free_values.iter().find(|(pos, _)| *pos == (l, i, j)).map_or(ZERO, |(_, v)| *v);
                } else {
                    f[(i, j)] = rhs / div;
                }
            }
        }
        for i in 0..n {
            f[(i, i)] = -(0..n).filter(|&p| p != i).map(|p| a[(i, p)] * f[(p, i)]).sum::<C64>() / l as f64;
        }
        prev = f.clone();
        fs.push(f);
    }
    Ok(FormalSolution {
        f: fs,
        lambda_prime: lp,
        u: u.to_vec(),
        free_parameters,
    })
}

/// Asymptotic coefficients `f_0, …, f_L` of column `k`, by arithmetic class.
pub fn asymptotic_coeffs(local: &LocalSolution, order: usize) -> Vec<CVec> {
    let n = local.b.first().map_or(0, |v| v.len());
    let get = |v: &[CVec], m: usize| v.get(m).cloned().unwrap_or_else(|| CVec::zeros(n));
    (0..=order)
        .map(|l| match local.class {
            ExponentClass::NonInteger => {
                // normalization = Γ(λ'+1), series power = −λ' − 1
                let lp = -local.series.power - 1.0;
                let mut factor = C64::from(1.0);
                for i in 1..=l {
                    factor *= lp + 1.0 - i as f64;
                }
                get(&local.b, l) * (factor / local.normalization)
            }
            ExponentClass::Natural(q) => {
                let q = q as usize;
                if l <= q {
                    get(&local.b, l) / C64::from(factorial((q - l) as u32))
                } else {
                    let m = l - q - 1;
                    let sign = if (l - q) % 2 == 0 { 1.0 } else { -1.0 };
                    get(&local.d, m) * C64::from(sign * factorial(m as u32))
                }
            }
            ExponentClass::NegativeInteger(p) => {
                let p = p as usize;
                let sign = if (l + p) % 2 == 0 { 1.0 } else { -1.0 };
                get(&local.b, l) * C64::from(sign * factorial((l + p - 1) as u32))
            }
        })
        .collect()
}

/// `F_0 = I, F_1, …, F_L` assembled column by column from the selected solutions.
pub fn assembled_coefficients(fs: &FuchsianSystem, cut: CutPlane, order: usize, settings: &Settings) -> Result<Vec<CMat>> {
    let n = fs.n();
    let mut out = vec![CMat::zeros(n, n); order + 1];
    for k in 0..n {
        let sel = selected_solution(fs, k, cut, settings.series_order.max(order + 2), settings)?;
        for (l, f) in asymptotic_coeffs(&sel, order).into_iter().enumerate() {
            out[l].set_column(k, &f);
        }
    }
    Ok(out)
}

/// Contour used for a Laplace column.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Contour {
    /// Hairpin around `u_k` (non-integer class) or half-line from `u_k` (integer classes).
    Local,
    /// Hairpin around a whole group: circle `|λ − center| = radius` plus its two rays.
    Group { center: C64, radius: f64 },
}

/// One Laplace column, scaled by `e^{−u_k z}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplaceValue {
    pub k: usize,
    pub z: C64,
    pub theta: f64,
    pub scaled: CVec,
    pub error: f64,
}

fn decay_rate(z: C64, theta: f64) -> f64 {
    -(z * C64::from_polar(1.0, theta)).re
}

/// Integrate `Ψ' = rhs` together with `I' = e^{z(λ − shift)} Ψ λ'` along a path.
fn transport_with_integral(fs: &FuchsianSystem, z: C64, shift: C64, path: &Path, psi: &CVec, tol: f64) -> Result<(CVec, CVec)> {
    let n = fs.n();
    let mut y: Vec<C64> = psi.iter().copied().chain(std::iter::repeat(ZERO).take(n)).collect();
    let opts = OdeOptions {
        blocks: 2,
        ..OdeOptions::with_tol(tol)
    };
    let mut col = vec![ZERO; n];
    for seg in &path.segments {
        let seg = *seg;
        integrate(
            |s, y, dy| {
                let lam = seg.point(s);
                let v = seg.velocity(s);
                fs.rhs(lam, &y[..n], &mut col);
                let w = (z * (lam - shift)).exp() * v;
                for i in 0..n {
                    dy[i] = col[i] * v;
                    dy[n + i] = y[i] * w;
                }
            },
            0.0,
            1.0,
            &mut y,
            &opts,
        )?;
    }
    Ok((CVec::from_column_slice(&y[..n]), CVec::from_column_slice(&y[n..])))
}

/// Length of the ray beyond which the tail is below `quad_tail`.
fn ray_length(c: f64, settings: &Settings) -> f64 {
    ((1.0 / settings.quad_tail).ln() + 10.0) / c
}

/// Column `k` of `Y` (scaled) for contour direction `theta`.
pub fn laplace_column(fs: &FuchsianSystem, k: usize, theta: f64, z: C64, contour: Contour, settings: &Settings) -> Result<LaplaceValue> {
    let c = decay_rate(z, theta);
    if !(c > 1e-8 * z.norm()) || z.norm() == 0.0 {
        return Err(Error::QuadratureDivergence {
            z_re: z.re,
            z_im: z.im,
            decay: c,
        });
    }
    let cut = CutPlane::new(theta);
    let sel = selected_solution(fs, k, cut, settings.series_order, settings)?;
    let uk = fs.u[k];
    let dir = C64::from_polar(1.0, theta);
    let tol = settings.continuation_tol;
    let switch = sel.switch_radius(settings);
    let length = ray_length(c, settings);

    if let Contour::Group { center, radius } = contour {
        if sel.class.is_integer() {
            return Err(Error::InvalidInput("group hairpins are used for non-integer exponents only".into()));
        }
        let bottom = center + C64::from_polar(radius, theta - PI);
        let psi_b = selected_at(fs, &sel, cut, bottom, settings)?;
        let arc = |sweep: f64| {
            Path::new(vec![Segment::Arc {
                center,
                radius,
                start: theta - PI,
                sweep,
            }])
        };
        let (psi_l, i_l) = transport_with_integral(fs, z, uk, &arc(PI), &psi_b, tol)?;
        let (psi_r, i_r) = transport_with_integral(fs, z, uk, &arc(-PI), &psi_b, tol)?;
        let end = center + dir * radius;
        let ray = Path::new(vec![Segment::Line { from: end, to: end + dir * length }]);
        let (_, ray_l) = transport_with_integral(fs, z, uk, &ray, &psi_l, tol)?;
        let (_, ray_r) = transport_with_integral(fs, z, uk, &ray, &psi_r, tol)?;
        let total = (i_l - i_r + ray_l - ray_r) / (2.0 * PI * I);
        return Ok(LaplaceValue {
            k,
            z,
            theta,
            scaled: total,
            error: tol * 10.0,
        });
    }

    match sel.class {
        ExponentClass::NonInteger => {
            let lp = fs.lambda_prime[k];
            let rho = (0.5 * switch).min(1.0 / z.norm());
            // The arc x = ρ e^{iφ}, φ from θ − 2π to θ, in two halves whose branch windows
            // keep the endpoints away from the branch boundary.
            let arc_half = |lo: f64, window: f64| {
                let series = sheet(&sel.series, window);
                tanh_sinh(
                    |phi| {
                        let x = C64::from_polar(rho, phi);
                        series.eval(uk + x) * ((z * x).exp() * I * x)
                    },
                    lo,
                    lo + PI,
                    1e-15,
                    12,
                )
            };
            let lower = arc_half(theta - 2.0 * PI, theta - 0.5 * PI);
            let upper = arc_half(theta - PI, theta + 0.5 * PI);
            let start = uk + dir * rho;
            let psi0 = sheet(&sel.series, theta + 0.5 * PI).eval(start);
            let ray = Path::new(vec![Segment::Line { from: start, to: start + dir * length }]);
            let (_, ray_int) = transport_with_integral(fs, z, uk, &ray, &psi0, tol)?;
            let jump = 1.0 - (2.0 * PI * I * lp).exp();
            let total = (lower.value + upper.value + ray_int * jump) / (2.0 * PI * I);
            Ok(LaplaceValue {
                k,
                z,
                theta,
                scaled: total,
                error: lower.error + upper.error + tol,
            })
        }
        ExponentClass::Natural(_) | ExponentClass::NegativeInteger(_) => {
            let n = fs.n();
            let mut total = CVec::zeros(n);
            if let ExponentClass::Natural(q) = sel.class {
                for l in 0..=(q as usize) {
                    total += &sel.b[l] * (z.powi((q as usize - l) as i32) / factorial((q as usize - l) as u32));
                }
                if sel.vanishes {
                    return Ok(LaplaceValue {
                        k,
                        z,
                        theta,
                        scaled: total,
                        error: 0.0,
                    });
                }
            }
            let rho = (0.5 * switch).min(8.0 / z.norm());
            for (t, w) in gauss_legendre_on(40, 0.0, rho) {
                let x = dir * t;
                total += sel.series.eval(uk + x) * ((z * x).exp() * dir * w);
            }
            let start = uk + dir * rho;
            let psi0 = sel.series.eval(start);
            let ray = Path::new(vec![Segment::Line { from: start, to: start + dir * length }]);
            let (_, ray_int) = transport_with_integral(fs, z, uk, &ray, &psi0, tol)?;
            total += ray_int;
            Ok(LaplaceValue {
                k,
                z,
                theta,
                scaled: total,
                error: tol,
            })
        }
    }
}

/// The same series evaluated on the window `(window − 2π, window]`.
fn sheet(series: &LocalSeries, window: f64) -> LocalSeries {
    LocalSeries {
        eta: window,
        ..series.clone()
    }
}

/// All columns `Ŷ = Y e^{−zΛ}` for contour direction `theta`.
pub fn laplace_matrix(fs: &FuchsianSystem, theta: f64, z: C64, settings: &Settings) -> Result<CMat> {
    let n = fs.n();
    let mut m = CMat::zeros(n, n);
    for k in 0..n {
        m.set_column(k, &laplace_column(fs, k, theta, z, Contour::Local, settings)?.scaled);
    }
    Ok(m)
}

/// `arg z` on the branch attached to contour direction `theta`: `arg z + θ ∈ (π/2, 3π/2)`.
pub fn arg_on_branch(z: C64, theta: f64) -> f64 {
    reduce_arg(z.arg(), 1.5 * PI - theta)
}

/// `z^{−λ'}` on the branch of `arg`.
pub fn z_power(modulus: f64, arg: f64, exponent: C64) -> C64 {
    (exponent * C64::new(modulus.ln(), arg)).exp()
}

/// Least-squares fit of `Ŷ z^{−B} ≈ I + Σ_{l≤L} F_l z^{−l}`.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticFit {
    pub f: Vec<CMat>,
    /// Relative residual of the fit.
    pub residual: f64,
    pub condition: f64,
}

/// `samples`: `(|z|, arg z, Ŷ(z))` along one ray.
pub fn asymptotic_fit(samples: &[(f64, f64, CMat)], lambda_prime: &[C64], order: usize) -> Result<AsymptoticFit> {
    let n = lambda_prime.len();
    if samples.len() <= order {
        return Err(Error::IllConditioned {
            what: "fewer samples than coefficients".into(),
            residual: f64::INFINITY,
        });
    }
    let m = samples.len();
    let mut v = CMat::zeros(m, order);
    let mut rhs = CMat::zeros(m, n * n);
    for (row, (r, arg, y)) in samples.iter().enumerate() {
        let w = C64::from_polar(1.0 / r, -arg);
        for l in 0..order {
            v[(row, l)] = w.powi(l as i32 + 1);
        }
        for i in 0..n {
            for j in 0..n {
                let g = y[(i, j)] * z_power(*r, *arg, -lambda_prime[j]) - if i == j { 1.0 } else { 0.0 };
                rhs[(row, i * n + j)] = g;
            }
        }
    }
    // Column scaling keeps the Vandermonde system balanced.
    let colscale: Vec<f64> = (0..order).map(|l| v.column(l).norm().max(f64::MIN_POSITIVE)).collect();
    for l in 0..order {
        let s = colscale[l];
        v.column_mut(l).scale_mut(1.0 / s);
    }
    let cond = condition_number(&v);
    let svd = v.clone().svd(true, true);
    let sol = svd.solve(&rhs, 0.0).map_err(|e| Error::IllConditioned {
        what: e.to_string(),
        residual: f64::INFINITY,
    })?;
    let res = (&v * &sol - &rhs).norm() / rhs.norm().max(f64::MIN_POSITIVE);
    let f = (0..order)
        .map(|l| {
            let mut fl = CMat::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    fl[(i, j)] = sol[(l, i * n + j)] / colscale[l];
                }
            }
            fl
        })
        .collect();
    Ok(AsymptoticFit {
        f,
        residual: res,
        condition: cond,
    })
}

/// Continue a solution matrix of `dY/dz = (Λ + A/z)Y` along a `z`-path, in the scaled
/// form `Ŷ = Y e^{−zΛ}`: `dŶ/dz = ΛŶ − ŶΛ + AŶ/z`.
pub fn continue_irregular(system: &SystemPair, scaled: &CMat, path: &Path, tol: f64) -> Result<CMat> {
    let n = system.n();
    let a = system.a().clone();
    let u = system.u().to_vec();
    let mut y: Vec<C64> = scaled.iter().copied().collect();
    let opts = OdeOptions::with_tol(tol);
    for seg in &path.segments {
        let seg = *seg;
        integrate(
            |s, y, dy| {
                let z = seg.point(s);
                let v = seg.velocity(s);
                for j in 0..n {
                    for i in 0..n {
                        let mut acc = (u[i] - u[j]) * y[j * n + i];
                        for p in 0..n {
                            acc += a[(i, p)] * y[j * n + p] / z;
                        }
                        dy[j * n + i] = acc * v;
                    }
                }
            },
            0.0,
            1.0,
            &mut y,
            &opts,
        )?;
    }
    Ok(CMat::from_column_slice(n, n, &y))
}

/// Relative residual of the irregular system for `Y = Ŷ e^{zΛ}` by central differences.
pub fn irregular_residual<F>(system: &SystemPair, mut scaled: F, z: C64, h: f64) -> Result<f64>
where
    F: FnMut(C64) -> Result<CMat>,
{
    let n = system.n();
    let u = system.u();
    let full = |m: CMat, z: C64| {
        let mut m = m;
        for k in 0..n {
            let e = (u[k] * z).exp();
            m.column_mut(k).iter_mut().for_each(|x| *x *= e);
        }
        m
    };
    let y0 = full(scaled(z)?, z);
    let yp = full(scaled(z + h)?, z + h);
    let ym = full(scaled(z - h)?, z - h);
    let dy = (yp - ym) / C64::from(2.0 * h);
    let lam = CMat::from_diagonal(&CVec::from_column_slice(u));
    let rhs = (&lam + system.a() / z) * &y0;
    Ok((dy - &rhs).norm() / rhs.norm().max(f64::MIN_POSITIVE))
}

/// Plan-free helper: the contour direction for sector label shift `h` and cut direction `eta`.
pub fn contour_direction(eta: f64, h: i64) -> f64 {
    eta - h as f64 * PI
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frobenius::build_fuchsian;
    use crate::linalg::c;

    fn sample() -> SystemPair {
        let a = CMat::from_row_slice(2, 2, &[c(0.5, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(1.0 / 3.0, 0.0)]);
        SystemPair::new(a, vec![c(0.0, 0.0), c(1.0, 0.0)]).unwrap()
    }

    #[test]
    fn f1_of_sample() {
        let f = f1(&sample(), &Settings::default()).unwrap();
        assert!((f[(0, 1)] - c(2.0, 0.0)).norm() < 1e-15);
        assert!((f[(1, 0)] - c(-3.0, 0.0)).norm() < 1e-15);
        assert!((f[(0, 0)] - c(6.0, 0.0)).norm() < 1e-14);
        assert!((f[(1, 1)] - c(-6.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn diagonal_column_is_a_power() {
        let s = Settings::default();
        let a = CMat::from_row_slice(2, 2, &[c(0.3, 0.0), ZERO, ZERO, c(-2.0, 0.0)]);
        let fs = build_fuchsian(&SystemPair::new(a, vec![c(0.0, 0.0), c(1.0, 0.0)]).unwrap());
        let theta = 0.5 * PI + 0.4;
        let z = C64::from_polar(3.0, PI - theta);
        for (k, lp) in [(0, 0.3), (1, -2.0)] {
            let y = laplace_column(&fs, k, theta, z, Contour::Local, &s).unwrap();
            let expect = z_power(z.norm(), arg_on_branch(z, theta), c(lp, 0.0));
            assert!((y.scaled[k] - expect).norm() < 1e-11 * expect.norm(), "{k}: {} vs {}", y.scaled[k], expect);
        }
    }
}
