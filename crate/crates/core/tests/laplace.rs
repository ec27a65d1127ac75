mod common;

use common::*;
use isostokes::frobenius::build_fuchsian;
use isostokes::laplace::*;
use isostokes::linalg::{c, max_abs};
use isostokes::{CMat, CutPlane, Settings, SystemPair, C64};
use std::f64::consts::PI;

fn with_diagonal(base: &SystemPair, lp: &[f64]) -> SystemPair {
    let mut a = base.a().clone();
    for (k, l) in lp.iter().enumerate() {
        a[(k, k)] = c(*l, 0.0);
    }
    base.with_a(a).unwrap()
}

fn samples(fs: &isostokes::frobenius::FuchsianSystem, theta: f64, radii: &[f64], s: &Settings) -> Vec<(f64, f64, CMat)> {
    let arg = PI - theta;
    radii
        .iter()
        .map(|&r| (r, arg, laplace_matrix(fs, theta, C64::from_polar(r, arg), s).unwrap()))
        .collect()
}

#[test]
fn assembled_coefficients_agree_with_recursion_for_all_classes() {
    let s = Settings::default();
    let base = random_system(&mut rng(11), 3);
    for lp in [[0.3, -0.45, 0.7], [2.0, 0.25, -0.6], [-2.0, 0.35, -1.0], [1.0, 0.0, -3.0]] {
        let sys = with_diagonal(&base, &lp);
        let fs = build_fuchsian(&sys);
        let cut = CutPlane::new(1.234);
        cut.check(sys.u(), &s).unwrap();
        let assembled = assembled_coefficients(&fs, cut, 3, &s).unwrap();
        let formal = formal_recursion(&sys, 3, &[], &s).unwrap();
        assert!(max_diff(&assembled[0], &CMat::identity(3, 3)) < 1e-12);
        for l in 1..=3 {
            let scale = max_abs(&formal.f[l - 1]).max(1.0);
            let d = max_diff(&assembled[l], &formal.f[l - 1]);
            assert!(d < 1e-8 * scale, "{lp:?} F_{l}: {d:e}");
        }
        let f1 = f1(&sys, &s).unwrap();
        assert!(max_diff(&f1, &formal.f[0]) < 1e-13);
    }
}

#[test]
fn free_parameter_positions_at_a_coalescence() {
    let s = Settings::default();
    let a = CMat::from_row_slice(
        3,
        3,
        &[c(0.5, 0.0), c(0.0, 0.0), c(0.4, 0.1), c(0.0, 0.0), c(2.5, 0.0), c(-0.3, 0.2), c(0.7, 0.0), c(0.2, -0.5), c(0.25, 0.0)],
    );
    let sys = SystemPair::new(a, vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
    let formal = formal_recursion(&sys, 4, &[], &s).unwrap();
    assert_eq!(formal.free_parameters, vec![(2, 0, 1)]);
    let chosen = formal_recursion(&sys, 4, &[((2, 0, 1), c(0.75, -1.0))], &s).unwrap();
    assert_eq!(chosen.f[1][(0, 1)], c(0.75, -1.0));
    // Away from the free position the choice only propagates to higher orders.
    assert!(max_diff(&chosen.f[0], &formal.f[0]) == 0.0);
}

#[test]
fn singular_f1_when_vanishing_fails() {
    let s = Settings::default();
    let a = CMat::from_row_slice(2, 2, &[c(0.5, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.3, 0.0)]);
    let sys = SystemPair::new(a, vec![c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
    assert!(matches!(f1(&sys, &s), Err(isostokes::Error::SingularF1 { i: 0, j: 1 })));
}

#[test]
fn laplace_matrix_solves_the_irregular_system() {
    let s = Settings::default();
    for (lp, seed) in [([0.3, -0.45], 1), ([1.0, 0.2], 2), ([-2.0, 0.6], 3)] {
        let sys = with_diagonal(&random_system(&mut rng(seed), 2), &lp);
        let fs = build_fuchsian(&sys);
        let theta = 0.9 + PI;
        CutPlane::new(theta).check(sys.u(), &s).unwrap();
        let z = C64::from_polar(2.0, PI - theta + 0.3);
        let r = irregular_residual(&sys, |z| laplace_matrix(&fs, theta, z, &s), z, 1e-3).unwrap();
        assert!(r < 1e-6, "{lp:?}: {r:e}");
    }
}

#[test]
fn asymptotic_fit_recovers_f1_inside_the_sector() {
    let s = Settings::default();
    let sys = sample_2x2();
    let fs = build_fuchsian(&sys);
    let theta = 1.5 * PI - 0.3;
    let radii: Vec<f64> = (0..24).map(|i| 40.0 * (25.0f64).powf(i as f64 / 23.0)).collect();
    let fit = asymptotic_fit(&samples(&fs, theta, &radii, &s), &sys.lambda_prime(), 6).unwrap();
    let f1 = f1(&sys, &s).unwrap();
    let d = max_diff(&fit.f[0], &f1);
    assert!(d < 1e-4, "F_1 fit error {d:e}, residual {:e}", fit.residual);
}

#[test]
fn asymptotic_fit_fails_outside_the_sector() {
    let s = Settings::default();
    let sys = sample_2x2();
    let fs = build_fuchsian(&sys);
    let theta = 1.5 * PI - 0.3;
    let arg0 = PI - theta;
    let r0 = 20.0;
    let y0 = laplace_matrix(&fs, theta, C64::from_polar(r0, arg0), &s).unwrap();
    // Rotate by 2π/3 + π/2, well past the sector edge, then sample radially.
    let sweep = 0.5 * PI + 2.0 * PI / 3.0;
    let arc = isostokes::continuation::Path::new(vec![isostokes::continuation::Segment::Arc {
        center: C64::from(0.0),
        radius: r0,
        start: arg0,
        sweep,
    }]);
    let y1 = continue_irregular(&sys, &y0, &arc, 1e-12).unwrap();
    let arg1 = arg0 + sweep;
    let mut out = vec![(r0, arg1, y1.clone())];
    let mut y = y1;
    let mut r = r0;
    for _ in 0..15 {
        let next = r * 1.2;
        let line = isostokes::continuation::Path::new(vec![isostokes::continuation::Segment::Line {
            from: C64::from_polar(r, arg1),
            to: C64::from_polar(next, arg1),
        }]);
        y = continue_irregular(&sys, &y, &line, 1e-12).unwrap();
        r = next;
        out.push((r, arg1, y.clone()));
    }
    let fit = asymptotic_fit(&out, &sys.lambda_prime(), 6).unwrap();
    assert!(fit.residual > 0.1, "residual {:e}", fit.residual);
}

#[test]
fn quadrature_diverges_outside_the_half_plane() {
    let s = Settings::default();
    let fs = build_fuchsian(&sample_2x2());
    let theta = 1.5 * PI - 0.3;
    let z = C64::from_polar(5.0, -theta);
    let e = laplace_column(&fs, 0, theta, z, Contour::Local, &s).unwrap_err();
    assert!(matches!(e, isostokes::Error::QuadratureDivergence { .. }));
}

#[test]
fn group_hairpin_matches_local_hairpin() {
    let s = Settings::default();
    let sys = diagonal(&[0.3, -0.45, 0.7], &[c(0.0, 0.0), c(0.6, -0.4), c(1.0, 0.5)]);
    let mut a = sys.a().clone();
    a[(0, 2)] = c(0.3, 0.1);
    a[(2, 0)] = c(-0.2, 0.4);
    a[(1, 2)] = c(0.1, -0.3);
    a[(2, 1)] = c(0.5, 0.2);
    let sys = sys.with_a(a).unwrap();
    let fs = build_fuchsian(&sys);
    let theta = 0.4 + PI;
    CutPlane::new(theta).check(sys.u(), &s).unwrap();
    let z = C64::from_polar(3.0, PI - theta);
    // A circle of radius 0.2 about a point near u_0 is homotopic to the small hairpin.
    let local = laplace_column(&fs, 0, theta, z, Contour::Local, &s).unwrap();
    let group = laplace_column(
        &fs,
        0,
        theta,
        z,
        Contour::Group {
            center: c(0.02, 0.01),
            radius: 0.2,
        },
        &s,
    )
    .unwrap();
    let d = (&local.scaled - &group.scaled).norm();
    assert!(d < 1e-9 * local.scaled.norm(), "{d:e}");
}

