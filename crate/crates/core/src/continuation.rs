//! Analytic continuation of Fuchsian solutions in the cut plane `P_η`, monodromy
//! matrices and connection coefficients.
//!
//! Paths are planned in the rotated frame `w = λ e^{−i(η − π/2)}` where every cut points
//! straight up: leave a pole downwards, run horizontally below all poles, climb to the
//! target. Vertical legs that pass within the clearance radius of a pole take a detour arc
//! on their own side, so no path ever meets a cut.
//!
//! Each pole `u_k` has an anchor `s_k = u_k + r_k e^{i(η − π)}` with
//! `r_k = loop_fraction · dist(u_k, other poles)`; `Ψ_k` is initialised there from its series.

use crate::error::{Error, Result};
use crate::frobenius::{local_basis, selected_solution, singular_solution, ExponentClass, FuchsianSystem, LocalSolution, SingularSolution};
use crate::linalg::{condition_number, inverse, CMat, CVec, C64, I, TWO_PI_I, ZERO};
use crate::model::CutPlane;
use crate::ode::{integrate, OdeOptions, OdeStats};
use crate::settings::Settings;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

/// Straight segment or circular arc in the `λ`-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment {
    Line { from: C64, to: C64 },
    Arc { center: C64, radius: f64, start: f64, sweep: f64 },
}

impl Segment {
    pub fn point(&self, s: f64) -> C64 {
        match *self {
            Segment::Line { from, to } => from + (to - from) * s,
            Segment::Arc { center, radius, start, sweep } => center + C64::from_polar(radius, start + sweep * s),
        }
    }

    pub fn velocity(&self, s: f64) -> C64 {
        match *self {
            Segment::Line { from, to } => to - from,
            Segment::Arc { radius, start, sweep, .. } => I * C64::from_polar(radius * sweep, start + sweep * s),
        }
    }

    pub fn length(&self) -> f64 {
        match *self {
            Segment::Line { from, to } => (to - from).norm(),
            Segment::Arc { radius, sweep, .. } => radius * sweep.abs(),
        }
    }

    /// Distance from `p` to the segment.
    pub fn distance_to(&self, p: C64) -> f64 {
        match *self {
            Segment::Line { from, to } => {
                let d = to - from;
                let len2 = d.norm_sqr();
                let s = if len2 == 0.0 { 0.0 } else { (((p - from) * d.conj()).re / len2).clamp(0.0, 1.0) };
                (from + d * s - p).norm()
            }
            Segment::Arc { .. } => (0..=256)
                .map(|i| (self.point(i as f64 / 256.0) - p).norm())
                .fold(f64::INFINITY, f64::min),
        }
    }
}

/// A piecewise smooth path.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Path {
    pub segments: Vec<Segment>,
}

impl Path {
    pub fn new(segments: Vec<Segment>) -> Self {
        Self { segments }
    }

    pub fn start(&self) -> Option<C64> {
        self.segments.first().map(|s| s.point(0.0))
    }

    pub fn end(&self) -> Option<C64> {
        self.segments.last().map(|s| s.point(1.0))
    }

    pub fn then(mut self, other: Path) -> Self {
        self.segments.extend(other.segments);
        self
    }

    pub fn length(&self) -> f64 {
        self.segments.iter().map(Segment::length).sum()
    }

    /// Minimum distance to a set of points.
    pub fn clearance(&self, poles: &[C64]) -> f64 {
        self.segments
            .iter()
            .flat_map(|s| poles.iter().map(move |p| s.distance_to(*p)))
            .fold(f64::INFINITY, f64::min)
    }

    /// A positive (counter-clockwise) circle of `turns` turns, negative for clockwise.
    pub fn circle(center: C64, radius: f64, start: f64, turns: f64) -> Self {
        Self::new(vec![Segment::Arc {
            center,
            radius,
            start,
            sweep: 2.0 * PI * turns,
        }])
    }
}

/// Anchor radius and point of pole `k`.
pub fn anchor(fs: &FuchsianSystem, k: usize, cut: CutPlane, settings: &Settings) -> (f64, C64) {
    let r = settings.loop_fraction * fs.nearest_pole_distance(k);
    (r, fs.u[k] + C64::from_polar(r, cut.eta - PI))
}

struct Frame {
    /// `w = λ·rot`, `rot = e^{−i·angle}`.
    angle: f64,
    rot: C64,
    poles: Vec<C64>,
    clearance: Vec<f64>,
    y_low: f64,
}

impl Frame {
    fn new(fs: &FuchsianSystem, eta: f64) -> Self {
        let angle = eta - FRAC_PI_2;
        let rot = C64::from_polar(1.0, -angle);
        let poles: Vec<C64> = fs.u.iter().map(|u| u * rot).collect();
        let nearest: Vec<f64> = (0..fs.n()).map(|k| fs.nearest_pole_distance(k)).collect();
        let clearance = nearest.iter().map(|d| 0.25 * d).collect();
        let margin = 0.5 * nearest.iter().cloned().filter(|d| d.is_finite()).fold(0.0, f64::max).max(1e-3);
        let y_low = poles.iter().map(|p| p.im).fold(f64::INFINITY, f64::min) - margin;
        Self {
            angle,
            rot,
            poles,
            clearance,
            y_low,
        }
    }

    fn to_lambda(&self, w: C64) -> C64 {
        w / self.rot
    }

    /// Vertical leg at abscissa `x` from height `y0` to `y1`, detouring around poles.
    fn vertical(&self, x: f64, y0: f64, y1: f64, out: &mut Vec<Segment>) {
        let down = y1 < y0;
        let mut obstacles: Vec<(usize, f64)> = Vec::new();
        for (m, p) in self.poles.iter().enumerate() {
            let c = self.clearance[m];
            let dx = x - p.re;
            if dx.abs() < c && p.im - c < y0.max(y1) && p.im + c > y0.min(y1) {
                obstacles.push((m, dx));
            }
        }
        obstacles.sort_by(|a, b| {
            let (ya, yb) = (self.poles[a.0].im, self.poles[b.0].im);
            if down {
                yb.partial_cmp(&ya).unwrap()
            } else {
                ya.partial_cmp(&yb).unwrap()
            }
        });
        let mut cur = C64::new(x, y0);
        let push_line = |out: &mut Vec<Segment>, a: C64, b: C64| {
            if (b - a).norm() > 0.0 {
                out.push(Segment::Line {
                    from: self.to_lambda(a),
                    to: self.to_lambda(b),
                });
            }
        };
        for (m, dx) in obstacles {
            let p = self.poles[m];
            let c = self.clearance[m];
            let h = (c * c - dx * dx).sqrt();
            let beta = h.atan2(dx.abs());
            let (enter, leave) = if down { (p.im + h, p.im - h) } else { (p.im - h, p.im + h) };
            push_line(out, cur, C64::new(x, enter));
            // Right side: angles in (−π/2, π/2); left side: around π.
            let (start, sweep) = match (dx >= 0.0, down) {
                (true, true) => (beta, -2.0 * beta),
                (true, false) => (-beta, 2.0 * beta),
                (false, true) => (PI - beta, 2.0 * beta),
                (false, false) => (PI + beta, -2.0 * beta),
            };
            out.push(Segment::Arc {
                center: self.to_lambda(p),
                radius: c,
                start: start + self.angle,
                sweep,
            });
            cur = C64::new(x, leave);
        }
        push_line(out, cur, C64::new(x, y1));
    }
}

/// Pole-avoiding path in `P_η` from `from` to `to`.
pub fn plan_path(fs: &FuchsianSystem, cut: CutPlane, from: C64, to: C64) -> Result<Path> {
    let frame = Frame::new(fs, cut.eta);
    let (a, b) = (from * frame.rot, to * frame.rot);
    let mut segs = Vec::new();
    frame.vertical(a.re, a.im, frame.y_low.min(a.im), &mut segs);
    let y = frame.y_low.min(a.im);
    if (a.re - b.re).abs() > 0.0 {
        segs.push(Segment::Line {
            from: frame.to_lambda(C64::new(a.re, y)),
            to: frame.to_lambda(C64::new(b.re, y)),
        });
    }
    frame.vertical(b.re, y, b.im, &mut segs);
    let path = Path::new(segs);
    let min_gap = (0..fs.n()).map(|k| fs.nearest_pole_distance(k)).fold(f64::INFINITY, f64::min);
    if path.clearance(&fs.u) < 1e-3 * min_gap.min(1.0) {
        return Err(Error::PathPlanning("path passes through a pole".into()));
    }
    Ok(path)
}

/// Transport the columns of `values` along `path`.
pub fn continue_columns(fs: &FuchsianSystem, values: &CMat, path: &Path, tol: f64) -> Result<(CMat, OdeStats)> {
    let n = fs.n();
    let m = values.ncols();
    let mut y: Vec<C64> = values.iter().copied().collect();
    let opts = OdeOptions::with_tol(tol);
    let mut stats = OdeStats::default();
    let mut col = vec![ZERO; n];
    for seg in &path.segments {
        let seg = *seg;
        stats += integrate(
            |s, y, dy| {
                let lam = seg.point(s);
                let v = seg.velocity(s);
                for c in 0..m {
                    fs.rhs(lam, &y[c * n..(c + 1) * n], &mut col);
                    for i in 0..n {
                        dy[c * n + i] = col[i] * v;
                    }
                }
            },
            0.0,
            1.0,
            &mut y,
            &opts,
        )?;
    }
    Ok((CMat::from_column_slice(n, m, &y), stats))
}

/// Transport a single vector solution along `path`.
pub fn continue_solution(fs: &FuchsianSystem, value: &CVec, path: &Path, tol: f64) -> Result<CVec> {
    let m = CMat::from_column_slice(value.len(), 1, value.as_slice());
    Ok(continue_columns(fs, &m, path, tol)?.0.column(0).into_owned())
}

/// `Ψ_k` at the anchor of pole `k`, continued to `to` within `P_η`.
pub fn selected_at(fs: &FuchsianSystem, sel: &LocalSolution, cut: CutPlane, to: C64, settings: &Settings) -> Result<CVec> {
    let (_, s) = anchor(fs, sel.k, cut, settings);
    let v = sel.eval(s);
    if (to - s).norm() == 0.0 {
        return Ok(v);
    }
    let path = plan_path(fs, cut, s, to)?;
    continue_solution(fs, &v, &path, settings.continuation_tol)
}

/// Monodromy of the selected basis around `u_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Monodromy {
    pub k: usize,
    pub m: CMat,
    pub basis_condition: f64,
}

impl Monodromy {
    /// Distance to the predicted shape: identity off row `k`, `e^{−2πiλ'_k}` on the diagonal,
    /// and `α_k c_kj` elsewhere in row `k` when `conn` is given.
    pub fn structure_defect(&self, lambda_prime: C64, conn: Option<&ConnectionData>) -> f64 {
        let n = self.m.nrows();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let expected = if i != self.k {
                    if i == j {
                        C64::from(1.0)
                    } else {
                        ZERO
                    }
                } else if j == self.k {
                    (-TWO_PI_I * lambda_prime).exp()
                } else if let Some(c) = conn {
                    c.alpha[self.k] * c.c[(self.k, j)]
                } else {
                    self.m[(i, j)]
                };
                worst = worst.max((self.m[(i, j)] - expected).norm());
            }
        }
        worst
    }
}

fn selected_all(fs: &FuchsianSystem, cut: CutPlane, settings: &Settings) -> Result<Vec<LocalSolution>> {
    (0..fs.n()).map(|k| selected_solution(fs, k, cut, settings.series_order, settings)).collect()
}

/// Selected basis `Ψ = [Ψ_1 | … | Ψ_n]` continued to `base`.
pub fn selected_basis_at(fs: &FuchsianSystem, cut: CutPlane, base: C64, settings: &Settings) -> Result<CMat> {
    let sols = selected_all(fs, cut, settings)?;
    let n = fs.n();
    let mut psi = CMat::zeros(n, n);
    for sol in &sols {
        psi.set_column(sol.k, &selected_at(fs, sol, cut, base, settings)?);
    }
    Ok(psi)
}

/// `M_k = Ψ(b)⁻¹ Ψ(γ_k b)` for a positive loop `γ_k` around `u_k` based at its anchor.
pub fn monodromy_matrix(fs: &FuchsianSystem, k: usize, cut: CutPlane, settings: &Settings) -> Result<Monodromy> {
    let (r, base) = anchor(fs, k, cut, settings);
    let psi = selected_basis_at(fs, cut, base, settings)?;
    let cond = condition_number(&psi);
    if !cond.is_finite() || cond > 1e12 {
        return Err(Error::BasisSingular { cond });
    }
    let looped = continue_columns(fs, &psi, &Path::circle(fs.u[k], r, cut.eta - PI, 1.0), settings.continuation_tol)?.0;
    let inv = inverse(&psi).ok_or(Error::BasisSingular { cond })?;
    Ok(Monodromy {
        k,
        m: inv * looped,
        basis_condition: cond,
    })
}

/// Monodromy of the selected basis along a large positive loop enclosing every pole.
pub fn infinity_monodromy(fs: &FuchsianSystem, cut: CutPlane, settings: &Settings) -> Result<CMat> {
    let n = fs.n() as f64;
    let center = fs.u.iter().sum::<C64>() / n;
    let spread = fs.u.iter().map(|u| (u - center).norm()).fold(0.0, f64::max);
    let radius = 2.0 * spread + 1.0;
    let base = center + C64::from_polar(radius, cut.eta - PI);
    let psi = selected_basis_at(fs, cut, base, settings)?;
    let cond = condition_number(&psi);
    let inv = inverse(&psi).ok_or(Error::BasisSingular { cond })?;
    let looped = continue_columns(fs, &psi, &Path::circle(center, radius, cut.eta - PI, 1.0), settings.continuation_tol)?.0;
    Ok(inv * looped)
}

/// How a connection coefficient was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConnectionMethod {
    /// `c_kk` fixed by the arithmetic class.
    Diagonal,
    MonodromyProjection,
    /// Natural class with `Ψ_j ≡ 0`: residue of `Ψ_k` at the pole `u_j`.
    PoleResidue,
    ZeroByCoalescence,
    /// `Ψ_j^{sing} ≡ 0`.
    ZeroByDegenerateSingular,
    /// `Ψ_k ≡ 0`.
    ZeroByVanishingSelected,
}

/// Connection coefficients `c_jk`: `Ψ_k = c_jk Ψ_j^{sing} + reg(λ − u_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionData {
    pub c: CMat,
    pub alpha: Vec<C64>,
    pub eta: f64,
    pub provenance: Vec<Vec<ConnectionMethod>>,
    /// Relative projection residual per entry.
    pub residual: CMatF,
}

/// Real matrix stored row-major for reports.
pub type CMatF = Vec<Vec<f64>>;

/// `α_k = e^{−2πiλ'_k} − 1`, or `2πi` for integer `λ'_k`.
pub fn alpha(lambda_prime: C64, settings: &Settings) -> C64 {
    if ExponentClass::of(lambda_prime, settings.integer_tol).is_integer() {
        TWO_PI_I
    } else {
        (-TWO_PI_I * lambda_prime).exp() - 1.0
    }
}

/// Sample angles on the circle around `u_j` reachable from `t_j` without meeting the cut.
fn circle_angles(eta: f64, samples: usize) -> Vec<f64> {
    (0..samples)
        .map(|m| eta - 2.0 * PI + 2.0 * PI * (m as f64 + 0.5) / samples as f64)
        .collect()
}

/// Continue the columns of `values` (given at the bottom point `t = u_j + r e^{i(η−π)}`)
/// around the cut disc and return them at the sample angles.
fn sample_on_circle(fs: &FuchsianSystem, center: C64, r: f64, eta: f64, values: &CMat, samples: usize, tol: f64) -> Result<Vec<CMat>> {
    let angles = circle_angles(eta, samples);
    let bottom = eta - PI;
    let mut out = vec![CMat::zeros(0, 0); samples];
    let half = samples / 2;
    for (range, forward) in [((half..samples).collect::<Vec<_>>(), true), ((0..half).rev().collect::<Vec<_>>(), false)] {
        let mut cur = values.clone();
        let mut at = bottom;
        for m in range {
            let target = angles[m];
            let path = Path::new(vec![Segment::Arc {
                center,
                radius: r,
                start: at,
                sweep: target - at,
            }]);
            debug_assert!(forward == (target > at));
            cur = continue_columns(fs, &cur, &path, tol)?.0;
            out[m] = cur.clone();
            at = target;
        }
    }
    Ok(out)
}

/// Least-squares `x` with `d ≈ x p` over sampled vectors; returns `(x, residual, ‖d‖)`.
fn project(d: &[CVec], p: &[CVec]) -> (C64, f64) {
    let mut num = ZERO;
    let mut den = 0.0;
    for (dv, pv) in d.iter().zip(p) {
        num += pv.dotc(dv);
        den += pv.norm_squared();
    }
    let x = if den > 0.0 { num / den } else { ZERO };
    let res: f64 = d.iter().zip(p).map(|(dv, pv)| (dv - pv * x).norm_squared()).sum::<f64>().sqrt();
    (x, res)
}

/// Connection coefficients by monodromy projection at every pole.
pub fn connection_coefficients(fs: &FuchsianSystem, cut: CutPlane, settings: &Settings) -> Result<ConnectionData> {
    cut.check(&fs.u, settings)?;
    let n = fs.n();
    let order = settings.series_order;
    let sel = selected_all(fs, cut, settings)?;
    let sing: Vec<SingularSolution> = (0..n).map(|k| singular_solution(fs, k, cut, order, settings)).collect::<Result<_>>()?;
    let alphas: Vec<C64> = fs.lambda_prime.iter().map(|l| alpha(*l, settings)).collect();
    let mut c = CMat::zeros(n, n);
    let mut provenance = vec![vec![ConnectionMethod::Diagonal; n]; n];
    let mut residual = vec![vec![0.0; n]; n];
    let samples = settings.loop_samples.max(4);

    for k in 0..n {
        c[(k, k)] = if sel[k].class.is_integer() { ZERO } else { C64::from(1.0) };
        for j in (0..n).filter(|&j| j != k) {
            if (fs.u[j] - fs.u[k]).norm() < settings.coalescence_tol {
                provenance[j][k] = ConnectionMethod::ZeroByCoalescence;
                continue;
            }
            if sel[k].vanishes {
                provenance[j][k] = ConnectionMethod::ZeroByVanishingSelected;
                continue;
            }
            if sing[j].vanishes {
                provenance[j][k] = ConnectionMethod::ZeroByDegenerateSingular;
                continue;
            }
            let (r, t) = anchor(fs, j, cut, settings);
            let psi_t = selected_at(fs, &sel[k], cut, t, settings)?;
            let tol = settings.continuation_tol;
            if let (ExponentClass::Natural(q), true) = (sel[j].class, sel[j].vanishes) {
                // Ψ_k is meromorphic at u_j: read the coefficient of x^{−q−1}.
                let pts = 32;
                let mut acc = ZERO;
                let mut cur = CMat::from_column_slice(n, 1, psi_t.as_slice());
                let mut at = cut.eta - PI;
                for m in 0..pts {
                    let theta = cut.eta - PI + 2.0 * PI * m as f64 / pts as f64;
                    if m > 0 {
                        let path = Path::new(vec![Segment::Arc {
                            center: fs.u[j],
                            radius: r,
                            start: at,
                            sweep: theta - at,
                        }]);
                        cur = continue_columns(fs, &cur, &path, tol)?.0;
                        at = theta;
                    }
                    let x = C64::from_polar(r, theta);
                    acc += cur[(j, 0)] * x.powi(q as i32 + 1);
                }
                c[(j, k)] = acc / (pts as f64 * crate::special::factorial(q));
                provenance[j][k] = ConnectionMethod::PoleResidue;
                continue;
            }
            let start = CMat::from_column_slice(n, 1, psi_t.as_slice());
            let looped = continue_columns(fs, &start, &Path::circle(fs.u[j], r, cut.eta - PI, 1.0), tol)?.0;
            let mut both = CMat::zeros(n, 2);
            both.set_column(0, &(looped.column(0) - start.column(0)));
            both.set_column(1, &start.column(0));
            let sampled = sample_on_circle(fs, fs.u[j], r, cut.eta, &both, samples, tol)?;
            let angles = circle_angles(cut.eta, samples);
            let target: Vec<CVec> = angles
                .iter()
                .map(|&th| {
                    let lam = fs.u[j] + C64::from_polar(r, th);
                    if sel[j].class.is_integer() {
                        sel[j].eval(lam)
                    } else {
                        sing[j].series.eval(lam)
                    }
                })
                .collect();
            let d: Vec<CVec> = sampled.iter().map(|m| m.column(0).into_owned()).collect();
            let scale: f64 = sampled.iter().map(|m| m.column(1).norm_squared()).sum::<f64>().sqrt();
            let (x, res) = project(&d, &target);
            let rel = res / scale.max(f64::MIN_POSITIVE);
            residual[j][k] = rel;
            if rel > settings.projection_tol {
                return Err(Error::IllConditioned {
                    what: format!("monodromy projection of c_{j}{k}"),
                    residual: rel,
                });
            }
            c[(j, k)] = x / alphas[j];
            provenance[j][k] = ConnectionMethod::MonodromyProjection;
        }
    }
    Ok(ConnectionData {
        c,
        alpha: alphas,
        eta: cut.eta,
        provenance,
        residual,
    })
}

/// Independent estimate of `c_jk` by fitting a local basis at `u_j` to the continued `Ψ_k`.
pub fn connection_by_series_matching(fs: &FuchsianSystem, cut: CutPlane, settings: &Settings) -> Result<CMat> {
    cut.check(&fs.u, settings)?;
    let n = fs.n();
    let sel = selected_all(fs, cut, settings)?;
    let mut c = CMat::zeros(n, n);
    let samples = settings.loop_samples.max(2 * n);
    for j in 0..n {
        let sing = singular_solution(fs, j, cut, settings.series_order, settings)?;
        let basis = local_basis(fs, j, cut, settings.series_order, settings)?;
        let (r, t) = anchor(fs, j, cut, settings);
        let angles = circle_angles(cut.eta, samples);
        let points: Vec<C64> = angles.iter().map(|th| fs.u[j] + C64::from_polar(r, *th)).collect();
        let nb = basis.len();
        let mut mat = CMat::zeros(samples * n, nb);
        for (p, lam) in points.iter().enumerate() {
            for (b, ser) in basis.iter().enumerate() {
                let v = ser.eval(*lam);
                for i in 0..n {
                    mat[(p * n + i, b)] = v[i];
                }
            }
        }
        let svd = mat.clone().svd(true, true);
        for k in 0..n {
            if k == j {
                c[(k, k)] = if sel[k].class.is_integer() { ZERO } else { C64::from(1.0) };
                continue;
            }
            if sel[k].vanishes || sing.vanishes {
                continue;
            }
            let psi_t = selected_at(fs, &sel[k], cut, t, settings)?;
            let start = CMat::from_column_slice(n, 1, psi_t.as_slice());
            let sampled = sample_on_circle(fs, fs.u[j], r, cut.eta, &start, samples, settings.continuation_tol)?;
            let mut rhs = CVec::zeros(samples * n);
            for (p, m) in sampled.iter().enumerate() {
                for i in 0..n {
                    rhs[p * n + i] = m[(i, 0)];
                }
            }
            let coef = svd
                .solve(&rhs, 1e-14)
                .map_err(|e| Error::IllConditioned {
                    what: e.to_string(),
                    residual: f64::INFINITY,
                })?;
            c[(j, k)] = coef[0];
        }
    }
    Ok(c)
}

/// Variation report of connection coefficients over a set of systems.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstancyReport {
    pub samples: usize,
    pub max_variation: f64,
    /// Per-entry maximal deviation from the first sample.
    pub variation: CMatF,
}

/// Maximal entrywise deviation of a sequence of matrices from the first one.
pub fn variation_report(mats: &[CMat]) -> ConstancyReport {
    let n = mats.first().map_or(0, |m| m.nrows());
    let mut variation = vec![vec![0.0; n]; n];
    let mut max_variation: f64 = 0.0;
    if let Some(first) = mats.first() {
        for m in mats {
            for i in 0..n {
                for j in 0..n {
                    let d = (m[(i, j)] - first[(i, j)]).norm();
                    variation[i][j] = f64::max(variation[i][j], d);
                    max_variation = max_variation.max(d);
                }
            }
        }
    }
    ConstancyReport {
        samples: mats.len(),
        max_variation,
        variation,
    }
}
