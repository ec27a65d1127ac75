mod common;

use common::*;
use isostokes::continuation::connection_coefficients;
use isostokes::deformation::*;
use isostokes::frobenius::build_fuchsian;
use isostokes::linalg::{c, commutator, max_abs};
use isostokes::{CMat, CutPlane, DeformationGeometry, Error, Settings, SystemPair, C64};
use std::f64::consts::PI;

/// `A_0` at `u^c = (0, 0, 1)` with the vanishing condition in the group {0, 1}.
fn coalesced_a0() -> CMat {
    CMat::from_row_slice(
        3,
        3,
        &[c(0.3, 0.1), c(0.0, 0.0), c(0.6, -0.2), c(0.0, 0.0), c(-0.45, 0.0), c(0.4, 0.3), c(-0.5, 0.25), c(0.7, 0.1), c(0.15, -0.1)],
    )
}

fn geometry(tau: f64) -> DeformationGeometry {
    DeformationGeometry::new(vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)], tau, 0.2, &Settings::default()).unwrap()
}

#[test]
fn schlesinger_rhs_sums_to_the_flow_of_a() {
    let s = Settings::default();
    let sys = random_system(&mut rng(3), 3);
    let d = schlesinger_rhs(&sys, &s).unwrap();
    for i in 0..3 {
        let sum = d[i].iter().fold(CMat::zeros(3, 3), |acc, m| acc + m);
        let expect = -commutator(&omega(&sys, i, &s).unwrap(), sys.a());
        assert!(max_diff(&sum, &expect) < 1e-13);
    }
}

#[test]
fn schlesinger_rhs_matches_finite_differences_of_transport() {
    let s = Settings::default();
    let sys = random_system(&mut rng(4), 3);
    let d = schlesinger_rhs(&sys, &s).unwrap();
    let h = 1e-4;
    for i in 0..3 {
        let shifted = |step: f64| {
            let mut u = sys.u().to_vec();
            u[i] += step;
            build_fuchsian(&transport(&sys, &u, &s).unwrap().system)
        };
        let (p, m) = (shifted(h), shifted(-h));
        for k in 0..3 {
            let fd = (&p.b[k] - &m.b[k]) / C64::from(2.0 * h);
            assert!(max_diff(&fd, &d[i][k]) < 1e-6, "∂_{i} B_{k}");
        }
    }
}

#[test]
fn transport_preserves_invariants_and_reverses() {
    let s = Settings::default();
    let sys = random_system(&mut rng(6), 3);
    let target: Vec<C64> = sys.u().iter().enumerate().map(|(k, u)| u + c(0.1 * k as f64, -0.05)).collect();
    let there = transport(&sys, &target, &s).unwrap();
    assert!(there.drift < 1e-10);
    let back = transport(&there.system, sys.u(), &s).unwrap();
    assert!(max_diff(back.system.a(), sys.a()) < 1e-10);
}

#[test]
fn transport_refuses_to_pass_a_coalescence() {
    let s = Settings::default();
    let sys = random_system(&mut rng(6), 2);
    let u = sys.u();
    // Swap the two poles along a straight line: they meet half way.
    let e = transport(&sys, &[u[1], u[0]], &s).unwrap_err();
    assert!(matches!(e, Error::NearCoalescence { i: 0, j: 1, .. }));
}

#[test]
fn connection_coefficients_are_constant_along_the_deformation() {
    let s = Settings::default();
    let sys = random_system(&mut rng(9), 3);
    let target: Vec<C64> = sys.u().iter().enumerate().map(|(k, u)| u + c(0.04 * k as f64, 0.03)).collect();
    let tau = (0..32)
        .map(|i| i as f64 * PI / 32.0)
        .find(|&t| {
            CutPlane::new(1.5 * PI - t).check(sys.u(), &s).is_ok() && CutPlane::new(1.5 * PI - t).check(&target, &s).is_ok()
        })
        .unwrap();
    let report = connection_constancy(&sys, &target, 4, CutPlane::new(1.5 * PI - tau), &s).unwrap();
    assert!(report.max_variation < 1e-8, "{:e}", report.max_variation);
}

#[test]
fn vanishing_violation_is_reported() {
    let s = Settings::default();
    let mut a = coalesced_a0();
    a[(0, 1)] = c(0.2, 0.0);
    let e = launch_from_coalescence(&a, &geometry(0.3), &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)], 10, &s).unwrap_err();
    assert!(matches!(e, Error::VanishingViolated { i: 0, j: 1, .. }));
}

#[test]
fn launched_family_agrees_with_transport() {
    let s = Settings::default();
    let v = [c(0.0, 0.0), c(0.6, 0.8), c(0.0, 0.0)];
    let launch = launch_from_coalescence(&coalesced_a0(), &geometry(0.3), &v, 30, &s).unwrap();
    assert!(launch.tail(0.1) < 1e-14);
    let a1 = launch.at(0.05).unwrap();
    let moved = transport(&a1, &launch.u_at(0.1), &s).unwrap();
    assert!(max_diff(moved.system.a(), &launch.a_at(0.1)) < 1e-10);
    // In-group entries vanish linearly.
    let r = launch.a_at(0.01)[(0, 1)].norm() / launch.a_at(0.02)[(0, 1)].norm();
    assert!((r - 0.5).abs() < 0.01);
}

#[test]
fn in_group_connection_coefficients_vanish_near_the_coalescence() {
    let s = Settings::default();
    let v = [c(0.0, 0.0), c(0.6, 0.8), c(0.0, 0.0)];
    let launch = launch_from_coalescence(&coalesced_a0(), &geometry(0.3), &v, 30, &s).unwrap();
    for t in [0.1, 0.05] {
        let sys = launch.at(t).unwrap();
        let cut = CutPlane::new(1.5 * PI - 0.3);
        cut.check(sys.u(), &s).unwrap();
        let conn = connection_coefficients(&build_fuchsian(&sys), cut, &s).unwrap();
        assert!(conn.c[(0, 1)].norm() < 1e-8 && conn.c[(1, 0)].norm() < 1e-8, "t = {t}: {}", conn.c);
    }
}

#[test]
fn integrability_residual_converges_only_for_the_transported_family() {
    let s = Settings::default();
    let sys = random_system(&mut rng(12), 3);
    let r1 = integrability_residual(&sys, 0, 1, 0.1, Carry::Transported, &s).unwrap();
    let r2 = integrability_residual(&sys, 0, 1, 0.05, Carry::Transported, &s).unwrap();
    let ratio = r1 / r2;
    assert!((ratio - 4.0).abs() < 0.5, "ratio {ratio}");
    let f1 = integrability_residual(&sys, 0, 1, 0.1, Carry::Frozen, &s).unwrap();
    let f2 = integrability_residual(&sys, 0, 1, 0.05, Carry::Frozen, &s).unwrap();
    assert!((f1 / f2 - 1.0).abs() < 0.2 && f2 > 100.0 * r2, "{f1:e} {f2:e}");
}

#[test]
fn omega_needs_vanishing_at_a_coalescence() {
    let s = Settings::default();
    let a = CMat::from_row_slice(2, 2, &[c(0.5, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.3, 0.0)]);
    let sys = SystemPair::new(a, vec![c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
    assert!(omega(&sys, 0, &s).is_err());
    let ok = sys.with_a(CMat::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.3, 0.0)])).unwrap();
    assert!(max_abs(&omega(&ok, 0, &s).unwrap()) == 0.0);
}
