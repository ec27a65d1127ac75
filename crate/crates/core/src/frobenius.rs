//! Fuchsian system `dΨ/dλ = Σ B_k/(λ − u_k) Ψ`, `B_k = −E_k(A + I)`, and its local
//! Frobenius solutions at the poles.
//!
//! With `x = λ − u_k` and `D = diag(u_j − u_k)` the system reads `(D − x)Ψ' = (A + I)Ψ`.
//! Every pole carries a selected solution `Ψ_k` and a singular solution `Ψ_k^{sing}`,
//! whose shape depends on the arithmetic class of `λ'_k = A_kk`:
//!
//! | class | `Ψ_k` | `Ψ_k^{sing}` | leading coefficient |
//! |-------|-------|--------------|---------------------|
//! | non-integer | `x^{−λ'−1} Σ b_m x^m` | `Ψ_k` | `Γ(λ'+1) e_k` |
//! | `λ' = −p ≤ −1` | `x^{p−1} Σ b_m x^m` | `Ψ_k ln x + reg` | `(−1)^p/(p−1)! e_k` |
//! | `λ' = q ≥ 0` | `Σ d_m x^m` (may vanish) | `x^{−q−1} Σ b_m x^m + Ψ_k ln x` | `q! e_k` |
//!
//! Non-unique regular parts are pinned: the free `x^0` coefficients of the pole part
//! (natural class) and the component along `Ψ_k` of the regular part (negative class) are
//! set to zero, and the remaining transversal freedom of the negative class is fixed by
//! the minimum-norm solution of its solvability constraint.

use crate::error::{Error, Result};
use crate::linalg::{commutator, max_abs, unit, CMat, CVec, C64, ONE, ZERO};
use crate::model::{CutPlane, SystemPair};
use crate::settings::Settings;
use crate::special::{as_integer, branch_ln, branch_pow, factorial, gamma};
use serde::{Deserialize, Serialize};

/// Residues `B_k` of the Fuchsian system.
#[derive(Debug, Clone, PartialEq)]
pub struct FuchsianSystem {
    pub b: Vec<CMat>,
    pub u: Vec<C64>,
    pub lambda_prime: Vec<C64>,
    a: CMat,
}

pub fn build_fuchsian(system: &SystemPair) -> FuchsianSystem {
    let n = system.n();
    let a = system.a();
    let b = (0..n)
        .map(|k| {
            let mut bk = CMat::zeros(n, n);
            for j in 0..n {
                bk[(k, j)] = -a[(k, j)];
            }
            bk[(k, k)] -= ONE;
            bk
        })
        .collect();
    FuchsianSystem {
        b,
        u: system.u().to_vec(),
        lambda_prime: system.lambda_prime(),
        a: a.clone(),
    }
}

impl FuchsianSystem {
    pub fn n(&self) -> usize {
        self.u.len()
    }

    pub fn a(&self) -> &CMat {
        &self.a
    }

    pub fn system(&self) -> SystemPair {
        SystemPair::new(self.a.clone(), self.u.clone()).expect("validated on construction")
    }

    /// `max |Σ_k B_k + A + I|`.
    pub fn residue_sum_defect(&self) -> f64 {
        let n = self.n();
        let mut s = &self.a + CMat::identity(n, n);
        for bk in &self.b {
            s += bk;
        }
        max_abs(&s)
    }

    /// Right-hand side `Ψ'_i = [(A + I)Ψ]_i / (u_i − λ)`.
    pub fn rhs(&self, lambda: C64, psi: &[C64], out: &mut [C64]) {
        let n = self.n();
        for i in 0..n {
            let mut s = psi[i];
            for j in 0..n {
                s += self.a[(i, j)] * psi[j];
            }
            out[i] = s / (self.u[i] - lambda);
        }
    }

    /// Distance from `u_k` to the nearest other pole.
    pub fn nearest_pole_distance(&self, k: usize) -> f64 {
        self.u
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != k)
            .map(|(_, uj)| (uj - self.u[k]).norm())
            .fold(f64::INFINITY, f64::min)
    }

    fn offsets(&self, k: usize, settings: &Settings) -> Result<Vec<C64>> {
        let d: Vec<C64> = self.u.iter().map(|uj| uj - self.u[k]).collect();
        for (j, dj) in d.iter().enumerate() {
            if j != k && dj.norm() < settings.coalescence_tol {
                return Err(Error::CoalescedPoles { j, k });
            }
        }
        Ok(d)
    }
}

/// Arithmetic class of `λ'_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExponentClass {
    NonInteger,
    /// `λ' = −p` with `p ≥ 1`.
    NegativeInteger(u32),
    /// `λ' = q` with `q ≥ 0`.
    Natural(u32),
}

impl ExponentClass {
    pub fn of(lambda_prime: C64, tol: f64) -> Self {
        match as_integer(lambda_prime, tol) {
            Some(m) if m < 0 => Self::NegativeInteger((-m) as u32),
            Some(m) => Self::Natural(m as u32),
            None => Self::NonInteger,
        }
    }

    pub fn is_integer(self) -> bool {
        !matches!(self, Self::NonInteger)
    }
}

/// Evaluator of `x^power Σ main_m x^m + ln x Σ log_m x^m + Σ regular_m x^m`, `x = λ − center`,
/// on the branch `η − 2π < arg x ≤ η`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalSeries {
    pub center: C64,
    pub eta: f64,
    pub power: C64,
    pub main: Vec<CVec>,
    pub log: Vec<CVec>,
    pub regular: Vec<CVec>,
}

impl LocalSeries {
    fn horner(coeffs: &[CVec], x: C64, n: usize) -> CVec {
        let mut acc = CVec::zeros(n);
        for c in coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    fn horner_derivative(coeffs: &[CVec], x: C64, n: usize) -> CVec {
        let mut acc = CVec::zeros(n);
        for (m, c) in coeffs.iter().enumerate().skip(1).rev() {
            acc = acc * x + c * C64::from(m as f64);
        }
        acc
    }

    fn dim(&self) -> usize {
        self.main
            .first()
            .or(self.log.first())
            .or(self.regular.first())
            .map_or(0, |v| v.len())
    }

    pub fn eval(&self, lambda: C64) -> CVec {
        let n = self.dim();
        let x = lambda - self.center;
        let mut v = CVec::zeros(n);
        if !self.main.is_empty() {
            v += Self::horner(&self.main, x, n) * branch_pow(x, self.power, self.eta);
        }
        if !self.log.is_empty() {
            v += Self::horner(&self.log, x, n) * branch_ln(x, self.eta);
        }
        if !self.regular.is_empty() {
            v += Self::horner(&self.regular, x, n);
        }
        v
    }

    /// Value and `λ`-derivative.
    pub fn eval_with_derivative(&self, lambda: C64) -> (CVec, CVec) {
        let n = self.dim();
        let x = lambda - self.center;
        let mut v = CVec::zeros(n);
        let mut dv = CVec::zeros(n);
        if !self.main.is_empty() {
            let p = branch_pow(x, self.power, self.eta);
            let s = Self::horner(&self.main, x, n);
            let ds = Self::horner_derivative(&self.main, x, n);
            v += &s * p;
            dv += (ds + s * (self.power / x)) * p;
        }
        if !self.log.is_empty() {
            let l = branch_ln(x, self.eta);
            let s = Self::horner(&self.log, x, n);
            let ds = Self::horner_derivative(&self.log, x, n);
            v += &s * l;
            dv += ds * l + s / x;
        }
        if !self.regular.is_empty() {
            v += Self::horner(&self.regular, x, n);
            dv += Self::horner_derivative(&self.regular, x, n);
        }
        (v, dv)
    }

    /// Relative residual of `(Λ − λ)Ψ' − (A + I)Ψ` at `λ`.
    pub fn ode_residual(&self, fs: &FuchsianSystem, lambda: C64) -> f64 {
        let (v, dv) = self.eval_with_derivative(lambda);
        let n = v.len();
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for i in 0..n {
            let mut r = (fs.u[i] - lambda) * dv[i] - v[i];
            scale = scale.max(((fs.u[i] - lambda) * dv[i]).norm()).max(v[i].norm());
            for j in 0..n {
                r -= fs.a[(i, j)] * v[j];
            }
            worst = worst.max(r.norm());
        }
        worst / scale.max(f64::MIN_POSITIVE)
    }

    /// Magnitude of the last retained terms at radius `r`, a truncation estimate.
    pub fn tail_estimate(&self, r: f64) -> f64 {
        let last = |c: &[CVec]| {
            c.iter()
                .enumerate()
                .rev()
                .take(2)
                .map(|(m, v)| v.iter().fold(0.0f64, |a, z| a.max(z.norm())) * r.powi(m as i32))
                .fold(0.0, f64::max)
        };
        last(&self.main) * r.powf(self.power.re) + last(&self.log) * (1.0 + r.ln().abs()) + last(&self.regular)
    }
}

/// Selected solution `Ψ_k` at pole `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalSolution {
    pub k: usize,
    pub class: ExponentClass,
    /// `f_k`, the coefficient of `e_k` in the leading term of `ψ_k`.
    pub normalization: C64,
    /// Coefficients `b_l` of `ψ_k` (for the natural class: of the pole part).
    pub b: Vec<CVec>,
    /// Coefficients `d_l` of the holomorphic `Ψ_k` (natural class only).
    pub d: Vec<CVec>,
    pub order: usize,
    /// Nominal radius of validity.
    pub radius: f64,
    /// Distance to the nearest other pole (radius of convergence).
    pub convergence: f64,
    /// `Ψ_k ≡ 0` (natural class, numerical verdict).
    pub vanishes: bool,
    pub series: LocalSeries,
}

impl LocalSolution {
    pub fn eval(&self, lambda: C64) -> CVec {
        self.series.eval(lambda)
    }

    /// Radius up to which the truncated series is used instead of continuation.
    pub fn switch_radius(&self, settings: &Settings) -> f64 {
        settings.series_switch * self.convergence
    }
}

/// Singular solution `Ψ_k^{sing}` with its local analytic complement.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularSolution {
    pub k: usize,
    pub class: ExponentClass,
    /// `Ψ_k^{sing} ≡ 0` (negative class: trivial local monodromy).
    pub vanishes: bool,
    pub series: LocalSeries,
    /// Solvability functional of the negative class (`None` otherwise).
    pub constraint: Option<CVec>,
}

/// Pole-type recursion `x^σ Σ c_m x^m` with optional logarithmic forcing `d` (natural class).
fn pole_recursion(
    a: &CMat,
    d: &[C64],
    k: usize,
    sigma: C64,
    c0: CVec,
    order: usize,
    log_part: Option<(u32, &[CVec])>,
) -> Vec<CVec> {
    let n = a.nrows();
    let mut c = vec![c0];
    let log_at = |s: i64| -> Option<&CVec> {
        let (_, dd) = log_part?;
        if s < 0 {
            None
        } else {
            dd.get(s as usize)
        }
    };
    for m in 0..order.saturating_sub(1) {
        let s = C64::from((m + 1) as f64) + sigma;
        let shift = log_part.map(|(q, _)| m as i64 - q as i64);
        let cm = &c[m];
        let mut next = CVec::zeros(n);
        let pinned = shift == Some(0);
        if !pinned {
            let acm = a * cm + cm * s;
            for j in 0..n {
                if j == k {
                    continue;
                }
                let mut num = acm[j];
                if let Some(sh) = shift {
                    if let Some(ds) = log_at(sh) {
                        num -= d[j] * ds[j];
                    }
                    if let Some(ds1) = log_at(sh - 1) {
                        num += ds1[j];
                    }
                }
                next[j] = num / (s * d[j]);
            }
        }
        let mut row = ZERO;
        for j in 0..n {
            if j != k {
                row += a[(k, j)] * next[j];
            }
        }
        if let Some(sh) = shift {
            if let Some(ds) = log_at(sh) {
                row += ds[k];
            }
        }
        next[k] = -row / ((m + 1) as f64);
        c.push(next);
    }
    c
}

/// Holomorphic recursion `Σ g_m x^m` with optional forcing `e` (the log coefficient of a
/// negative-class singular solution). The `k`-component of `g_0` is recomputed unless its
/// divisor vanishes, in which case the supplied value is kept.
fn regular_recursion(a: &CMat, d: &[C64], k: usize, g0: CVec, forcing: &[CVec], order: usize, tol: f64) -> Vec<CVec> {
    let n = a.nrows();
    let lam = a[(k, k)];
    let e = |m: usize| forcing.get(m);
    let fix_k = |g: &mut CVec, m: usize| {
        let div = lam + (m + 1) as f64;
        if div.norm() < tol {
            return;
        }
        let mut row = ZERO;
        for j in 0..n {
            if j != k {
                row += a[(k, j)] * g[j];
            }
        }
        if let Some(em) = e(m) {
            row += em[k];
        }
        g[k] = -row / div;
    };
    let mut g0 = g0;
    fix_k(&mut g0, 0);
    let mut g = vec![g0];
    for m in 0..order.saturating_sub(1) {
        let s = (m + 1) as f64;
        let gm = &g[m];
        let agm = a * gm + gm * C64::from(s);
        let mut next = CVec::zeros(n);
        for j in 0..n {
            if j == k {
                continue;
            }
            let mut num = agm[j];
            if let Some(e1) = e(m + 1) {
                num -= d[j] * e1[j];
            }
            if let Some(e0) = e(m) {
                num += e0[j];
            }
            next[j] = num / (d[j] * s);
        }
        fix_k(&mut next, m + 1);
        g.push(next);
    }
    g
}

fn validity(fs: &FuchsianSystem, k: usize, settings: &Settings) -> (f64, f64) {
    let r = fs.nearest_pole_distance(k);
    (settings.validity_fraction * r, r)
}

/// Natural-class data: pole coefficients, holomorphic coefficients, vanishing verdict.
fn natural_data(fs: &FuchsianSystem, k: usize, q: u32, order: usize, d: &[C64], settings: &Settings) -> (Vec<CVec>, Vec<CVec>, bool) {
    let n = fs.n();
    let a = &fs.a;
    let c0 = unit(n, k) * C64::from(factorial(q));
    let head = pole_recursion(a, d, k, C64::from(-(q as f64) - 1.0), c0, q as usize + 1, None);
    let cq = &head[q as usize];
    let acq = a * cq;
    let mut d0 = CVec::zeros(n);
    let mut vanishes = true;
    for j in 0..n {
        if j == k {
            continue;
        }
        d0[j] = acq[j] / d[j];
        let scale: f64 = (0..n).map(|i| (a[(j, i)] * cq[i]).norm()).sum::<f64>() / d[j].norm();
        if d0[j].norm() > settings.zero_tol * scale.max(1.0) {
            vanishes = false;
        }
    }
    if vanishes {
        d0.fill(ZERO);
    }
    let dd = regular_recursion(a, d, k, d0, &[], order, settings.integer_tol);
    let c = pole_recursion(a, d, k, C64::from(-(q as f64) - 1.0), head[0].clone(), order, Some((q, &dd)));
    (c, dd, vanishes)
}

/// The selected solution `Ψ_k` with the normalization of its class.
pub fn selected_solution(fs: &FuchsianSystem, k: usize, cut: CutPlane, order: usize, settings: &Settings) -> Result<LocalSolution> {
    let n = fs.n();
    if k >= n || order == 0 {
        return Err(Error::InvalidInput(format!("pole {k} / order {order}")));
    }
    let d = fs.offsets(k, settings)?;
    let lam = fs.lambda_prime[k];
    let class = ExponentClass::of(lam, settings.integer_tol);
    let (radius, convergence) = validity(fs, k, settings);
    let center = fs.u[k];
    let series = |power: C64, main: Vec<CVec>| LocalSeries {
        center,
        eta: cut.eta,
        power,
        main,
        log: Vec::new(),
        regular: Vec::new(),
    };
    let sol = match class {
        ExponentClass::NonInteger => {
            let f = gamma(lam + 1.0);
            let sigma = -lam - 1.0;
            let b = pole_recursion(&fs.a, &d, k, sigma, unit(n, k) * f, order, None);
            LocalSolution {
                k,
                class,
                normalization: f,
                series: series(sigma, b.clone()),
                b,
                d: Vec::new(),
                order,
                radius,
                convergence,
                vanishes: false,
            }
        }
        ExponentClass::NegativeInteger(p) => {
            let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
            let f = C64::from(sign / factorial(p - 1));
            let sigma = C64::from((p - 1) as f64);
            let b = pole_recursion(&fs.a, &d, k, sigma, unit(n, k) * f, order, None);
            LocalSolution {
                k,
                class,
                normalization: f,
                series: series(sigma, b.clone()),
                b,
                d: Vec::new(),
                order,
                radius,
                convergence,
                vanishes: false,
            }
        }
        ExponentClass::Natural(q) => {
            let (c, dd, vanishes) = natural_data(fs, k, q, order, &d, settings);
            LocalSolution {
                k,
                class,
                normalization: C64::from(factorial(q)),
                series: LocalSeries {
                    center,
                    eta: cut.eta,
                    power: ZERO,
                    main: Vec::new(),
                    log: Vec::new(),
                    regular: dd.clone(),
                },
                b: c,
                d: dd,
                order,
                radius,
                convergence,
                vanishes,
            }
        }
    };
    Ok(sol)
}

/// Homogeneous holomorphic solutions at a negative-class pole through `g_0 = e_i`,
/// returned together with the solvability functional `ℓ` (indexed by `i ≠ k`).
fn negative_constraint(fs: &FuchsianSystem, k: usize, p: u32, d: &[C64], settings: &Settings) -> CVec {
    let n = fs.n();
    let a = &fs.a;
    let mut ell = CVec::zeros(n);
    for i in 0..n {
        if i == k {
            continue;
        }
        let g = regular_recursion(a, d, k, unit(n, i), &[], p as usize, settings.integer_tol);
        let gp = &g[p as usize - 1];
        ell[i] = (0..n).filter(|&j| j != k).map(|j| a[(k, j)] * gp[j]).sum();
    }
    ell
}

/// The singular solution `Ψ_k^{sing}`.
pub fn singular_solution(fs: &FuchsianSystem, k: usize, cut: CutPlane, order: usize, settings: &Settings) -> Result<SingularSolution> {
    let sel = selected_solution(fs, k, cut, order, settings)?;
    let n = fs.n();
    let d = fs.offsets(k, settings)?;
    let center = fs.u[k];
    let out = match sel.class {
        ExponentClass::NonInteger => SingularSolution {
            k,
            class: sel.class,
            vanishes: false,
            series: sel.series,
            constraint: None,
        },
        ExponentClass::Natural(q) => SingularSolution {
            k,
            class: sel.class,
            vanishes: false,
            series: LocalSeries {
                center,
                eta: cut.eta,
                power: C64::from(-(q as f64) - 1.0),
                main: sel.b,
                log: sel.d,
                regular: Vec::new(),
            },
            constraint: None,
        },
        ExponentClass::NegativeInteger(p) => {
            // Ψ_k as an integer power series.
            let shift = p as usize - 1;
            let mut e = vec![CVec::zeros(n); shift];
            e.extend(sel.b.iter().take(order.saturating_sub(shift)).cloned());
            let ell = negative_constraint(fs, k, p, &d, settings);
            let norm2: f64 = ell.iter().map(|z| z.norm_sqr()).sum();
            let gap = fs.nearest_pole_distance(k).min(1.0);
            let scale = max_abs(&fs.a).max(1.0).powi(p as i32) / gap.powi(p as i32 - 1);
            let vanishes = norm2.sqrt() <= settings.zero_tol * scale;
            let (log, regular) = if vanishes {
                (Vec::new(), Vec::new())
            } else {
                let f = sel.normalization;
                let g0 = ell.map(|z| z.conj()) * (-f / norm2);
                let g = regular_recursion(&fs.a, &d, k, g0, &e, order, settings.integer_tol);
                (e, g)
            };
            SingularSolution {
                k,
                class: sel.class,
                vanishes,
                series: LocalSeries {
                    center,
                    eta: cut.eta,
                    power: ZERO,
                    main: Vec::new(),
                    log,
                    regular,
                },
                constraint: Some(ell),
            }
        }
    };
    Ok(out)
}

/// A full local basis at pole `k`: the singular solution (if it exists) first, then
/// holomorphic solutions. Used to cross-check connection coefficients by series matching.
pub fn local_basis(fs: &FuchsianSystem, k: usize, cut: CutPlane, order: usize, settings: &Settings) -> Result<Vec<LocalSeries>> {
    let n = fs.n();
    let d = fs.offsets(k, settings)?;
    let sing = singular_solution(fs, k, cut, order, settings)?;
    let analytic = |g: Vec<CVec>| LocalSeries {
        center: fs.u[k],
        eta: cut.eta,
        power: ZERO,
        main: Vec::new(),
        log: Vec::new(),
        regular: g,
    };
    let mut basis = Vec::with_capacity(n);
    match sing.class {
        ExponentClass::NonInteger | ExponentClass::Natural(_) => {
            basis.push(sing.series);
            for i in (0..n).filter(|&i| i != k) {
                basis.push(analytic(regular_recursion(&fs.a, &d, k, unit(n, i), &[], order, settings.integer_tol)));
            }
        }
        ExponentClass::NegativeInteger(_) => {
            let sel = selected_solution(fs, k, cut, order, settings)?;
            let ell = sing.constraint.clone().unwrap_or_else(|| CVec::zeros(n));
            if !sing.vanishes {
                basis.push(sing.series);
            }
            basis.push(sel.series);
            let others: Vec<usize> = (0..n).filter(|&i| i != k).collect();
            let pivot = if sing.vanishes {
                None
            } else {
                others.iter().copied().max_by(|&x, &y| ell[x].norm().partial_cmp(&ell[y].norm()).unwrap())
            };
            for &i in &others {
                if Some(i) == pivot {
                    continue;
                }
                let mut g0 = unit(n, i);
                if let Some(piv) = pivot {
                    g0[piv] = -ell[i] / ell[piv];
                }
                basis.push(analytic(regular_recursion(&fs.a, &d, k, g0, &[], order, settings.integer_tol)));
            }
        }
    }
    Ok(basis)
}

/// `Y ↦ z^{−γ} Y`: the system with `A − γI`.
pub fn gamma_shift(system: &SystemPair, gamma: f64, settings: &Settings) -> Result<SystemPair> {
    if !(gamma > 0.0) {
        return Err(Error::BadGamma {
            gamma,
            reason: "gamma must be positive".into(),
        });
    }
    let n = system.n();
    let shifted = system.a() - CMat::identity(n, n) * C64::from(gamma);
    for k in 0..n {
        if as_integer(shifted[(k, k)], settings.integer_tol).is_some() {
            return Err(Error::BadGamma {
                gamma,
                reason: format!("shifted lambda'_{k} is an integer"),
            });
        }
    }
    for ev in crate::linalg::eigenvalues(&shifted) {
        if as_integer(ev, settings.integer_tol.max(1e-7)).is_some() {
            return Err(Error::BadGamma {
                gamma,
                reason: format!("shifted spectrum contains the integer {}", ev.re.round()),
            });
        }
    }
    system.with_a(shifted)
}

/// Levelt normal form data at a group point of the system at `u = u^c`.
#[derive(Debug, Clone, PartialEq)]
pub struct LeveltData {
    pub group: Vec<usize>,
    /// `T = diag(−λ'_j − 1 on the group, 0 elsewhere)`.
    pub t: CMat,
    /// Simultaneous reduction `G` with `G⁻¹ (Σ_{j∈α} B_j) G = T`.
    pub g: CMat,
    /// `𝔇_m`, m = 1..=order.
    pub d_series: Vec<CMat>,
    /// `𝔊_l`, l = 1..=order.
    pub g_series: Vec<CMat>,
    /// `R_l`, l = 1..=order.
    pub r_parts: Vec<CMat>,
    pub kappa: u32,
    /// `(l, i, j)`: `(𝔊_l)_{ij}` is arbitrary.
    pub free_parameters: Vec<(usize, usize, usize)>,
}

impl LeveltData {
    pub fn partially_non_resonant(&self) -> bool {
        self.free_parameters.is_empty()
    }

    pub fn max_r(&self) -> f64 {
        self.r_parts.iter().map(max_abs).fold(0.0, f64::max)
    }
}

/// Levelt recursion at the group point `λ_α` of the Fuchsian system at `u^c`.
///
/// `free_values` assigns the arbitrary entries `(l, i, j) ↦ value`; unlisted ones are 0.
pub fn levelt_at_confluence(
    system: &SystemPair,
    group: &[usize],
    order: usize,
    free_values: &[((usize, usize, usize), C64)],
    settings: &Settings,
) -> Result<LeveltData> {
    let n = system.n();
    let a = system.a();
    let u = system.u();
    if group.is_empty() || group.iter().any(|&j| j >= n) {
        return Err(Error::InvalidInput("group indices out of range".into()));
    }
    let value = u[group[0]];
    for &j in group {
        if (u[j] - value).norm() >= settings.coalescence_tol {
            return Err(Error::InvalidInput(format!("u_{j} is not at the group point")));
        }
        for &i in group {
            if i != j && a[(i, j)].norm() > settings.zero_tol.max(1e-10) {
                return Err(Error::VanishingViolated {
                    i,
                    j,
                    value: a[(i, j)].norm(),
                });
            }
        }
        if (a[(j, j)] + 1.0).norm() < settings.integer_tol {
            return Err(Error::NotReducible { j });
        }
    }
    let in_group = |i: usize| group.contains(&i);
    let mut t = CMat::zeros(n, n);
    let mut g = CMat::identity(n, n);
    for &i in group {
        let li = a[(i, i)];
        t[(i, i)] = -li - 1.0;
        for l in (0..n).filter(|&l| !in_group(l)) {
            g[(i, l)] = -a[(i, l)] / (li + 1.0);
        }
    }
    let g_inv = crate::linalg::inverse(&g).ok_or(Error::BasisSingular { cond: f64::INFINITY })?;
    let fs = build_fuchsian(system);

    // Residues of the other group points, in the reduced frame.
    let mut others: Vec<(C64, CMat)> = Vec::new();
    for j in (0..n).filter(|&j| !in_group(j)) {
        match others.iter_mut().find(|(v, _)| (v - u[j]).norm() < settings.coalescence_tol) {
            Some((_, m)) => *m += &fs.b[j],
            None => others.push((u[j], fs.b[j].clone())),
        }
    }
    let others: Vec<(C64, CMat)> = others.into_iter().map(|(v, m)| (v, &g_inv * m * &g)).collect();
    let d_series: Vec<CMat> = (1..=order)
        .map(|m| {
            let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
            others.iter().fold(CMat::zeros(n, n), |acc, (v, db)| acc + db * (sign / (value - v).powi(m as i32)))
        })
        .collect();

    let diag: Vec<C64> = (0..n).map(|i| t[(i, i)]).collect();
    let mut g_series: Vec<CMat> = Vec::with_capacity(order);
    let mut r_parts: Vec<CMat> = Vec::with_capacity(order);
    let mut free_parameters = Vec::new();
    let mut kappa = 0u32;
    for l in 1..=order {
        let mut rhs = d_series[l - 1].clone();
        for p in 1..l {
            rhs += &d_series[l - p - 1] * &g_series[p - 1] - &g_series[p - 1] * &r_parts[l - p - 1];
        }
        let mut gl = CMat::zeros(n, n);
        let mut rl = CMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let div = diag[j] - diag[i] + l as f64;
                if div.norm() < settings.integer_tol {
                    rl[(i, j)] = rhs[(i, j)];
                    free_parameters.push((l, i, j));
                    kappa = kappa.max(l as u32);
                    gl[(i, j)] = free_values
                        .iter()
                        .find(|(pos, _)| *pos == (l, i, j))
                        .map_or(ZERO, |(_, v)| *v);
                } else {
                    gl[(i, j)] = rhs[(i, j)] / div;
                }
            }
        }
        g_series.push(gl);
        r_parts.push(rl);
    }
    Ok(LeveltData {
        group: group.to_vec(),
        t,
        g,
        d_series,
        g_series,
        r_parts,
        kappa,
        free_parameters,
    })
}

/// `max ‖[T^{(i)}, T^{(j)}]‖` over a set of diagonal exponent matrices.
pub fn exponent_commutator(ts: &[CMat]) -> f64 {
    let mut worst: f64 = 0.0;
    for x in ts {
        for y in ts {
            worst = worst.max(max_abs(&commutator(x, y)));
        }
    }
    worst
}
