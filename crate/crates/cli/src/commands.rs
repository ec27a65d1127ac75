//! The subcommand pipelines. Each returns a report; numerical failures become stage
//! records, unmet preconditions become [`SpecError`]s.

use crate::report::*;
use crate::spec::{cx, Problem, SpecError};
use isostokes::continuation::{connection_coefficients, variation_report, ConnectionMethod};
use isostokes::deformation::{integrability_residual, launch_from_coalescence, transport, vanishing_check, Carry};
use isostokes::frobenius::{build_fuchsian, gamma_shift, levelt_at_confluence};
use isostokes::laplace::{assembled_coefficients, contour_direction, formal_recursion};
use isostokes::linalg::max_abs;
use isostokes::model::{is_in_cell, label_rays, stokes_ray_directions, RayLabels};
use isostokes::stokes::{stokes_direct, stokes_from_connection, OracleReport};
use isostokes::{CMat, ConnectionData, LeveltData, Ordering, Settings, StokesPair, SystemPair, C64};
use serde::Serialize;
use std::f64::consts::PI;

/// Launch-series order used when a path starts at the coalescence point.
const LAUNCH_ORDER: usize = 30;
const CIRCLE_SAMPLES: usize = 256;

/// Options shared by the commands.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub oracle: bool,
}

pub fn metadata(p: &Problem, opts: RunOptions) -> Metadata {
    Metadata {
        version: env!("CARGO_PKG_VERSION").into(),
        tau: p.tau,
        eta: p.cut.eta,
        agreement: p.agreement,
        settings: p.settings,
        formal_order: p.formal_order,
        levelt_order: p.levelt_order,
        gamma: p.gamma,
        oracle: opts.oracle,
        seeds: Vec::new(),
    }
}

fn labels_out(l: &RayLabels) -> LabelsOut {
    LabelsOut {
        nu: l.nu,
        mu: l.mu,
        tau_nu: l.base.clone(),
    }
}

fn stokes_out(p: &StokesPair) -> StokesOut {
    StokesOut {
        s_nu: mat(&p.s_nu),
        s_nu_mu: mat(&p.s_nu_mu),
    }
}

fn pair_difference(a: &StokesPair, b: &StokesPair) -> f64 {
    max_abs(&(&a.s_nu - &b.s_nu)).max(max_abs(&(&a.s_nu_mu - &b.s_nu_mu)))
}

fn max_residual(conn: &ConnectionData) -> f64 {
    conn.residual.iter().flatten().fold(0.0, |a, &b| a.max(b))
}

fn min_gap(u: &[C64]) -> f64 {
    let mut gap = f64::INFINITY;
    for i in 0..u.len() {
        for j in (i + 1)..u.len() {
            gap = gap.min((u[i] - u[j]).norm());
        }
    }
    gap
}

/// Formula pipeline: Fuchsian system → connection coefficients → Stokes matrices.
fn formula(system: &SystemPair, tau: f64, p: &Problem) -> isostokes::Result<(ConnectionData, StokesPair)> {
    let conn = connection_coefficients(&build_fuchsian(system), p.cut, &p.settings)?;
    let pair = stokes_from_connection(&conn, &system.lambda_prime(), &Ordering::new(system.u(), tau, &p.settings))?;
    Ok((conn, pair))
}

fn oracle(system: &SystemPair, tau: f64, settings: &Settings) -> isostokes::Result<OracleReport> {
    stokes_direct(system, &label_rays(system.u(), tau, settings)?, settings)
}

fn in_group_pairs(p: &Problem) -> Vec<(usize, usize)> {
    let Some(g) = &p.geometry else { return Vec::new() };
    let n = g.n();
    (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).filter(|&(i, j)| g.same_group(i, j)).collect()
}

fn levelt_out(d: &LeveltData) -> LeveltOut {
    LeveltOut {
        group: d.group.clone(),
        exponents: (0..d.t.nrows()).map(|i| cx(d.t[(i, i)])).collect(),
        kappa: d.kappa,
        free_parameters: d.free_parameters.clone(),
        partially_non_resonant: d.partially_non_resonant(),
        max_r: d.max_r(),
        r_parts: d.r_parts.iter().map(mat).collect(),
    }
}

fn family_notice(family: bool) -> Option<String> {
    family.then(|| {
        "resonant exponents inside a coalescing group: the data at u_c form a family parametrised by the listed free parameters".into()
    })
}

// ---------------------------------------------------------------------------- rays

/// Ray tables, labels, sectors, branch cuts and crossing-locus samples.
pub fn cmd_rays(p: &Problem, opts: RunOptions) -> Report<RaysResults> {
    let s = &p.settings;
    let u = p.system.u();
    let mut stages = Stages::default();
    let label_point = p.geometry.as_ref().map_or(u, |g| &g.u_c[..]);
    let labels = stages.record("labels", label_rays(label_point, p.tau, s));
    let sectors = labels
        .iter()
        .flat_map(|l| {
            let shrink = p.geometry.as_ref().map_or(0.0, |g| g.max_rotation);
            (0..2 * l.mu.max(1) as i64).map(move |h| {
                let (lo, hi) = l.sector_bounds(l.nu + h, shrink);
                SectorOut { label: l.nu + h, lo, hi }
            })
        })
        .collect();

    let (circles, crossings) = crossing_locus(p);
    let results = RaysResults {
        at_u: stokes_ray_directions(u, s),
        at_u_c: p.geometry.as_ref().map(|g| stokes_ray_directions(&g.u_c, s)),
        labels: labels.as_ref().map(labels_out),
        sectors,
        in_cell: is_in_cell(u, p.tau, s).inside,
        cuts: u
            .iter()
            .enumerate()
            .map(|(k, &z)| CutOut {
                k,
                origin: cx(z),
                direction: p.cut.eta,
            })
            .collect(),
        laplace_directions: (0..2)
            .map(|h| DirectionOut {
                h,
                theta: contour_direction(p.cut.eta, h),
            })
            .collect(),
        circles,
        crossings,
    };
    Report::new("rays", metadata(p, opts), stages.0, results)
}

/// Sweep each `u_k` on a circle (radius `ε₀` around `u^c_k`, or a quarter of the
/// nearest gap around `u_k`) and locate where `Re((u_j − u_k) e^{iτ})` changes sign.
fn crossing_locus(p: &Problem) -> (Vec<CircleOut>, Vec<CrossingOut>) {
    let u = p.system.u();
    let n = u.len();
    let rot = C64::from_polar(1.0, p.tau);
    let mut circles = Vec::new();
    let mut crossings = Vec::new();
    for k in 0..n {
        let (center, radius) = match &p.geometry {
            Some(g) => (g.u_c[k], g.epsilon0),
            None => (u[k], 0.25 * (0..n).filter(|&j| j != k).map(|j| (u[j] - u[k]).norm()).fold(f64::INFINITY, f64::min)),
        };
        if !radius.is_finite() || radius <= 0.0 {
            continue;
        }
        let point = |phi: f64| center + C64::from_polar(radius, phi);
        let moved = |phi: f64| {
            let mut v = u.to_vec();
            v[k] = point(phi);
            v
        };
        let samples = (0..CIRCLE_SAMPLES)
            .map(|m| {
                let phi = 2.0 * PI * m as f64 / CIRCLE_SAMPLES as f64;
                CircleSample {
                    phi,
                    point: cx(point(phi)),
                    in_cell: is_in_cell(&moved(phi), p.tau, &p.settings).inside,
                }
            })
            .collect();
        circles.push(CircleOut {
            k,
            center: cx(center),
            radius,
            samples,
        });
        for j in (0..n).filter(|&j| j != k) {
            let f = |phi: f64| ((u[j] - point(phi)) * rot).re;
            for m in 0..CIRCLE_SAMPLES {
                let (mut a, mut b) = (
                    2.0 * PI * m as f64 / CIRCLE_SAMPLES as f64,
                    2.0 * PI * (m + 1) as f64 / CIRCLE_SAMPLES as f64,
                );
                let fa = f(a);
                if fa == 0.0 || fa.signum() == f(b).signum() {
                    continue;
                }
                for _ in 0..60 {
                    let mid = 0.5 * (a + b);
                    if f(mid).signum() == fa.signum() {
                        a = mid;
                    } else {
                        b = mid;
                    }
                }
                let phi = 0.5 * (a + b);
                crossings.push(CrossingOut {
                    k,
                    j,
                    phi,
                    point: cx(point(phi)),
                });
            }
        }
    }
    (circles, crossings)
}

// -------------------------------------------------------------------------- stokes

/// γ-shift (optional) → Frobenius → connection → formula Stokes, in parallel with the
/// direct-matching oracle, followed by the coherence, formal and resonance reports.
pub fn cmd_stokes(p: &Problem, opts: RunOptions) -> Report<StokesResults> {
    let s = &p.settings;
    let sys = &p.system;
    let lp = sys.lambda_prime();
    let mut stages = Stages::default();
    // Stokes data are constant on the polydisc; at u^c they are evaluated at a launched point.
    let (eval, launch) = if p.at_coalescence() {
        match stages.record("launch", start_at_coalescence(p, &launch_target(p))) {
            Some((e, l, _)) => (Some(e), Some(l)),
            None => (None, None),
        }
    } else {
        (Some(sys.clone()), None)
    };
    let labels = stages.record("labels", label_rays(eval.as_ref().map_or(sys.u(), |e| e.u()), p.tau, s));
    let shifted = match (p.gamma, &eval) {
        (Some(g), Some(e)) => stages.record("gamma-shift", gamma_shift(e, g, s)),
        (None, Some(e)) => {
            stages.skip("gamma-shift", "no gamma requested");
            Some(e.clone())
        }
        (_, None) => None,
    };

    let (formula_result, oracle_result) = std::thread::scope(|scope| {
        let o = eval
            .as_ref()
            .filter(|_| opts.oracle)
            .map(|e| scope.spawn(|| oracle(e, p.tau, s)));
        let f = shifted.as_ref().map(|sh| formula(sh, p.tau, p));
        (f, o.map(|h| h.join().expect("oracle thread panicked")))
    });
    let formula = match formula_result {
        Some(r) => stages.record("formula", r),
        None => {
            stages.skip("formula", "no system to evaluate");
            None
        }
    };
    let oracle = match oracle_result {
        Some(r) => stages.record("oracle", r),
        None => {
            stages.skip("oracle", if opts.oracle { "no system to evaluate" } else { "disabled" });
            None
        }
    };

    let coherence = match (&formula, &oracle) {
        (Some((_, f)), Some(o)) => {
            let d = pair_difference(f, &o.pair);
            let c = Coherence {
                max_difference: d,
                tolerance: p.agreement,
                agree: d < p.agreement,
            };
            stages.record(
                "coherence",
                if c.agree { Ok(()) } else { Err(format!("formula and oracle differ by {d:.3e}")) },
            );
            Some(c)
        }
        _ => None,
    };

    let all_structural_zero = formula.as_ref().is_some_and(|(conn, pair)| {
        let n = sys.n();
        (0..n).all(|j| {
            (0..n).all(|k| {
                let zero_tag = matches!(
                    conn.provenance[j][k],
                    ConnectionMethod::ZeroByCoalescence | ConnectionMethod::ZeroByDegenerateSingular | ConnectionMethod::ZeroByVanishingSelected
                );
                j == k
                    || ((zero_tag || conn.c[(j, k)].norm() == 0.0)
                        && pair.s_nu[(j, k)].norm() == 0.0
                        && pair.s_nu_mu[(j, k)].norm() == 0.0)
            })
        })
    });

    let formal = stages.record("formal-recursion", formal_recursion(sys, p.formal_order, &[], s));
    let formal_error = if p.at_coalescence() {
        stages.skip("asymptotic-coefficients", "selected solutions are not defined at coalesced poles");
        None
    } else {
        stages
            .record("asymptotic-coefficients", assembled_coefficients(&build_fuchsian(sys), p.cut, p.formal_order, s))
            .zip(formal.as_ref())
            .map(|(asm, f)| f.f.iter().zip(&asm[1..]).map(|(x, y)| max_abs(&(x - y))).fold(0.0, f64::max))
    };

    let mut resonance = ResonanceOut {
        in_group: in_group_pairs(p)
            .into_iter()
            .filter_map(|(i, j)| {
                let d = lp[j] - lp[i];
                let r = d.re.round();
                ((d - r).norm() < s.integer_tol && r != 0.0).then_some((i, j, r as i64))
            })
            .collect(),
        formal_free_parameters: formal.as_ref().map_or(Vec::new(), |f| f.free_parameters.clone()),
        levelt: Vec::new(),
        family: false,
        notice: None,
    };
    if p.at_coalescence() {
        let g = p.geometry.as_ref().expect("coalescence implies geometry");
        for group in g.groups.iter().filter(|g| g.members.len() > 1) {
            let name = format!("levelt {:?}", group.members);
            if let Some(d) = stages.record(&name, levelt_at_confluence(sys, &group.members, p.levelt_order, &[], s)) {
                resonance.levelt.push(levelt_out(&d));
            }
        }
    }
    resonance.family = !resonance.in_group.is_empty()
        || !resonance.formal_free_parameters.is_empty()
        || resonance.levelt.iter().any(|l| !l.free_parameters.is_empty());
    resonance.notice = family_notice(resonance.family);

    let results = StokesResults {
        labels: labels.as_ref().map(labels_out),
        evaluated_at: eval.as_ref().map(|e| e.u().iter().map(|&z| cx(z)).collect()),
        launch,
        precedes: eval.as_ref().map_or_else(Vec::new, |e| Ordering::new(e.u(), p.tau, s).precedes),
        lambda_prime: lp.iter().map(|&z| cx(z)).collect(),
        connection: formula.as_ref().map(|(conn, _)| ConnectionOut {
            c: mat(&conn.c),
            provenance: conn.provenance.clone(),
            residual: conn.residual.clone(),
        }),
        alpha: formula
            .as_ref()
            .map(|(conn, _)| Estimate::new(conn.alpha.iter().map(|&a| cx(a)).collect(), "closed-form", Some(0.0))),
        formula: formula
            .as_ref()
            .map(|(conn, pair)| Estimate::new(stokes_out(pair), "connection-formula", Some(max_residual(conn)))),
        oracle: oracle.as_ref().map(|o| Estimate::new(stokes_out(&o.pair), "direct-matching", Some(o.spread))),
        coherence,
        all_structural_zero,
        formal: formal.map(|f| Estimate::new(f.f.iter().map(mat).collect(), "formal-recursion", formal_error)),
        resonance,
    };
    Report::new("stokes", metadata(p, opts), stages.0, results)
}

// -------------------------------------------------------------------------- deform

/// Transport `A` along every path and tabulate connection data, Stokes matrices and
/// in-group decay at each waypoint.
pub fn cmd_deform(p: &Problem, opts: RunOptions) -> Result<Report<DeformResults>, SpecError> {
    if p.paths.is_empty() {
        return Err(SpecError::Invalid("deform needs at least one path".into()));
    }
    let s = &p.settings;
    let mut stages = Stages::default();
    let mut paths = Vec::new();
    for (pi, path) in p.paths.iter().enumerate() {
        let mut launch = None;
        let mut waypoints = Vec::new();
        let mut current: Option<SystemPair> = None;
        let mut complete = true;
        for (wi, target) in path.iter().enumerate() {
            let name = |what: &str| format!("path {pi} waypoint {wi}: {what}");
            let step = match &current {
                Some(sys) => transport(sys, target, s).map(|r| (r.system, Estimate::new((), "transport", Some(r.drift)))),
                None if p.at_coalescence() => start_at_coalescence(p, target).map(|(sys, l, err)| {
                    launch = Some(l);
                    (sys, err)
                }),
                None => transport(&p.system, target, s).map(|r| (r.system, Estimate::new((), "transport", Some(r.drift)))),
            };
            let Some((sys, a_est)) = stages.record(&name("transport"), step) else {
                complete = false;
                break;
            };
            let formula = stages.record(&name("formula"), formula(&sys, p.tau, p));
            let oracle = if opts.oracle {
                stages.record(&name("oracle"), oracle(&sys, p.tau, s))
            } else {
                None
            };
            complete &= formula.is_some() && (oracle.is_some() || !opts.oracle);
            let pick = oracle.as_ref().map(|o| &o.pair).or(formula.as_ref().map(|f| &f.1));
            let entry = |i: usize, j: usize| pick.map(|q| q.s_nu[(i, j)].norm().max(q.s_nu_mu[(i, j)].norm()));
            let in_group = in_group_pairs(p)
                .into_iter()
                .map(|(i, j)| InGroupOut {
                    i,
                    j,
                    gap: (sys.u()[i] - sys.u()[j]).norm(),
                    a_ij: sys.a()[(i, j)].norm(),
                    a_ji: sys.a()[(j, i)].norm(),
                    s_ij: entry(i, j),
                    s_ji: entry(j, i),
                })
                .collect();
            waypoints.push((
                sys.clone(),
                formula,
                WaypointOut {
                    u: sys.u().iter().map(|&z| cx(z)).collect(),
                    in_cell: is_in_cell(sys.u(), p.tau, s).inside,
                    a: Estimate::new(mat(sys.a()), &a_est.method, a_est.error),
                    min_gap: min_gap(sys.u()),
                    c: None,
                    formula: None,
                    oracle: oracle.as_ref().map(|o| Estimate::new(stokes_out(&o.pair), "direct-matching", Some(o.spread))),
                    in_group,
                },
            ));
            current = Some(sys);
        }
        let constancy = complete.then(|| {
            let cs: Vec<CMat> = waypoints.iter().map(|w| w.1.as_ref().unwrap().0.c.clone()).collect();
            let nus: Vec<CMat> = waypoints.iter().map(|w| w.1.as_ref().unwrap().1.s_nu.clone()).collect();
            let mus: Vec<CMat> = waypoints.iter().map(|w| w.1.as_ref().unwrap().1.s_nu_mu.clone()).collect();
            let (c, s_nu, s_nu_mu) = (variation_report(&cs), variation_report(&nus), variation_report(&mus));
            let worst = c.max_variation.max(s_nu.max_variation).max(s_nu_mu.max_variation);
            ConstancyOut {
                c,
                s_nu,
                s_nu_mu,
                tolerance: p.agreement,
                constant: worst < p.agreement,
            }
        });
        if let Some(c) = &constancy {
            stages.record(
                &format!("path {pi}: constancy"),
                if c.constant { Ok(()) } else { Err(format!("variation exceeds {:.1e}", p.agreement)) },
            );
        }
        paths.push(PathOut {
            launch,
            waypoints: waypoints
                .into_iter()
                .map(|(_, f, mut w)| {
                    if let Some((conn, pair)) = f {
                        w.c = Some(mat(&conn.c));
                        w.formula = Some(stokes_out(&pair));
                    }
                    w
                })
                .collect(),
            constancy,
        });
    }
    Ok(Report::new("deform", metadata(p, opts), stages.0, DeformResults { paths }))
}

/// A point inside the cell of `τ`: each group spread along `e^{−iτ}` by `ε₀/4`, so
/// that the in-group rays stay a quarter turn away from `τ`.
fn launch_target(p: &Problem) -> Vec<C64> {
    let g = p.geometry.as_ref().expect("coalescence implies geometry");
    let mut u = g.u_c.clone();
    let dir = C64::from_polar(0.25 * g.epsilon0, -p.tau);
    for group in &g.groups {
        let r = group.members.len();
        if r < 2 {
            continue;
        }
        for (idx, &m) in group.members.iter().enumerate() {
            u[m] += dir * ((idx as f64 - 0.5 * (r - 1) as f64) / (r - 1) as f64);
        }
    }
    u
}

/// Series launch from `u^c` towards `target`, followed by transport when the series
/// cannot reach it with a negligible tail.
fn start_at_coalescence(p: &Problem, target: &[C64]) -> isostokes::Result<(SystemPair, LaunchOut, Estimate<()>)> {
    let g = p.geometry.as_ref().expect("coalescence implies geometry");
    let v: Vec<C64> = target.iter().zip(&g.u_c).map(|(a, b)| a - b).collect();
    let launch = launch_from_coalescence(p.system.a(), g, &v, LAUNCH_ORDER, &p.settings)?;
    let mut t = 1.0;
    while launch.tail(t) > 1e-14 && t > 1e-6 {
        t *= 0.5;
    }
    let info = LaunchOut {
        order: LAUNCH_ORDER,
        t,
        tail: launch.tail(t),
    };
    let start = launch.at(t)?;
    if t == 1.0 {
        return Ok((start, info, Estimate::new((), "launch-series", Some(launch.tail(t)))));
    }
    let r = transport(&start, target, &p.settings)?;
    Ok((r.system, info, Estimate::new((), "launch-series+transport", Some(r.drift.max(launch.tail(t))))))
}

// -------------------------------------------------------------------------- levelt

/// Levelt data at every coalescing group point; needs the system at `u = u^c`.
pub fn cmd_levelt(p: &Problem, opts: RunOptions) -> Result<Report<LeveltResults>, SpecError> {
    if !p.at_coalescence() {
        return Err(SpecError::Invalid("levelt needs u_c and the system given at u = u_c".into()));
    }
    let g = p.geometry.as_ref().expect("coalescence implies geometry");
    let mut stages = Stages::default();
    let mut groups = Vec::new();
    for group in &g.groups {
        let name = format!("levelt {:?}", group.members);
        if let Some(d) = stages.record(&name, levelt_at_confluence(&p.system, &group.members, p.levelt_order, &[], &p.settings)) {
            groups.push(levelt_out(&d));
        }
    }
    let family = groups.iter().any(|l| !l.free_parameters.is_empty());
    let results = LeveltResults {
        groups,
        family,
        notice: family_notice(family),
    };
    Ok(Report::new("levelt", metadata(p, opts), stages.0, results))
}

// --------------------------------------------------------------------------- check

/// Integrability residuals of the deformation equations and the vanishing conditions.
pub fn cmd_check(p: &Problem, opts: RunOptions) -> Report<CheckResults> {
    let s = &p.settings;
    let sys = &p.system;
    let n = sys.n();
    let mut stages = Stages::default();
    let h = 0.1 * min_gap(sys.u());
    let mut integrability = Vec::new();
    if p.at_coalescence() {
        stages.skip("integrability", "undefined at a coalescence");
    } else {
        for i in 0..n {
            for j in (i + 1)..n {
                let run = || -> isostokes::Result<IntegrabilityOut> {
                    let r = |step: f64, carry: Carry| integrability_residual(sys, i, j, step, carry, s);
                    let residual = [r(h, Carry::Transported)?, r(0.5 * h, Carry::Transported)?];
                    let ratio = residual[0] / residual[1];
                    Ok(IntegrabilityOut {
                        i,
                        j,
                        h,
                        residual,
                        ratio,
                        frozen_ratio: r(h, Carry::Frozen)? / r(0.5 * h, Carry::Frozen)?,
                        quadratic: (3.5..=4.5).contains(&ratio) || residual[1] < 1e-13,
                    })
                };
                let out = stages.record(&format!("integrability ({i}, {j})"), run());
                if let Some(o) = out {
                    stages.record(
                        &format!("integrability ({i}, {j}): convergence"),
                        if o.quadratic { Ok(()) } else { Err(format!("step-halving ratio {:.3}", o.ratio)) },
                    );
                    integrability.push(o);
                }
            }
        }
    }
    let vanishing = p.geometry.as_ref().map(|g| {
        let at = p.at_coalescence();
        let satisfied = at.then(|| stages.record("vanishing", vanishing_check(sys.a(), g, s)).is_some());
        VanishingOut {
            at_coalescence: at,
            satisfied,
            pairs: in_group_pairs(p)
                .into_iter()
                .map(|(i, j)| InGroupOut {
                    i,
                    j,
                    gap: (sys.u()[i] - sys.u()[j]).norm(),
                    a_ij: sys.a()[(i, j)].norm(),
                    a_ji: sys.a()[(j, i)].norm(),
                    s_ij: None,
                    s_ji: None,
                })
                .collect(),
        }
    });
    Report::new("check", metadata(p, opts), stages.0, CheckResults { integrability, vanishing })
}

// ---------------------------------------------------------------------------- csv

fn table<R: Serialize>(rows: impl IntoIterator<Item = R>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).expect("in-memory csv");
    }
    w.into_inner().expect("in-memory csv")
}

#[derive(Serialize)]
struct RayRow {
    j: usize,
    k: usize,
    direction: f64,
    at: &'static str,
}

#[derive(Serialize)]
struct CircleRow {
    k: usize,
    phi: f64,
    re: f64,
    im: f64,
    in_cell: bool,
}

#[derive(Serialize)]
struct CrossingRow {
    k: usize,
    j: usize,
    phi: f64,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct DecayRow {
    path: usize,
    waypoint: usize,
    i: usize,
    j: usize,
    gap: f64,
    a_ij: f64,
    a_ji: f64,
    s_ij: Option<f64>,
    s_ji: Option<f64>,
}

/// Plot tables of the `rays` command.
pub fn rays_tables(r: &RaysResults) -> Vec<(&'static str, Vec<u8>)> {
    let rays = std::iter::once((&r.at_u, "u"))
        .chain(r.at_u_c.iter().map(|t| (t, "u_c")))
        .flat_map(|(t, at)| {
            t.rays.iter().map(move |x| RayRow {
                j: x.j,
                k: x.k,
                direction: x.direction,
                at,
            })
        });
    let circles = r.circles.iter().flat_map(|c| {
        c.samples.iter().map(move |x| CircleRow {
            k: c.k,
            phi: x.phi,
            re: x.point[0],
            im: x.point[1],
            in_cell: x.in_cell,
        })
    });
    let crossings = r.crossings.iter().map(|x| CrossingRow {
        k: x.k,
        j: x.j,
        phi: x.phi,
        re: x.point[0],
        im: x.point[1],
    });
    vec![
        ("rays.csv", table(rays)),
        ("sectors.csv", table(&r.sectors)),
        ("circles.csv", table(circles)),
        ("crossings.csv", table(crossings)),
    ]
}

/// In-group decay table of the `deform` command.
pub fn decay_table(d: &DeformResults) -> Vec<(&'static str, Vec<u8>)> {
    let rows = d.paths.iter().enumerate().flat_map(|(path, p)| {
        p.waypoints.iter().enumerate().flat_map(move |(waypoint, w)| {
            w.in_group.iter().map(move |g| DecayRow {
                path,
                waypoint,
                i: g.i,
                j: g.j,
                gap: g.gap,
                a_ij: g.a_ij,
                a_ji: g.a_ji,
                s_ij: g.s_ij,
                s_ji: g.s_ji,
            })
        })
    });
    vec![("decay.csv", table(rows))]
}
