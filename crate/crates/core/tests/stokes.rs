mod common;

use common::*;
use isostokes::continuation::connection_coefficients;
use isostokes::frobenius::build_fuchsian;
use isostokes::linalg::{c, eigenvalues, multiset_distance};
use isostokes::model::label_rays;
use isostokes::stokes::*;
use isostokes::{CMat, CutPlane, Settings, SystemPair, C64};
use std::f64::consts::PI;

fn formula(sys: &SystemPair, tau: f64, s: &Settings) -> StokesPair {
    let fs = build_fuchsian(sys);
    let conn = connection_coefficients(&fs, CutPlane::new(1.5 * PI - tau), s).unwrap();
    stokes_from_connection(&conn, &sys.lambda_prime(), &Ordering::new(sys.u(), tau, s)).unwrap()
}

fn oracle(sys: &SystemPair, tau: f64, s: &Settings) -> OracleReport {
    let labels = label_rays(sys.u(), tau, s).unwrap();
    stokes_direct(sys, &labels, s).unwrap()
}

#[test]
fn formula_matches_oracle_on_the_sample() {
    let s = Settings::default();
    let sys = sample_2x2();
    let tau = 0.3;
    let f = formula(&sys, tau, &s);
    let o = oracle(&sys, tau, &s);
    let d0 = max_diff(&f.s_nu, &o.pair.s_nu);
    let d1 = max_diff(&f.s_nu_mu, &o.pair.s_nu_mu);
    assert!(d0 < 1e-6 && d1 < 1e-6, "{d0:e} {d1:e}\n{}{}\n{}{}", f.s_nu, o.pair.s_nu, f.s_nu_mu, o.pair.s_nu_mu);
}

fn with_diagonal(base: &SystemPair, lp: &[f64]) -> SystemPair {
    let mut a = base.a().clone();
    for (k, l) in lp.iter().enumerate() {
        a[(k, k)] = c(*l, 0.0);
    }
    base.with_a(a).unwrap()
}

/// An admissible τ well away from every ray.
fn clear_tau(u: &[C64], s: &Settings) -> f64 {
    let rays = isostokes::model::stokes_ray_directions(u, s);
    (0..64)
        .map(|i| i as f64 * PI / 64.0)
        .max_by(|a, b| {
            let d = |t: f64| rays.rays.iter().map(|r| isostokes::model::angle_distance_mod(r.direction, t, PI)).fold(f64::INFINITY, f64::min);
            d(*a).partial_cmp(&d(*b)).unwrap()
        })
        .unwrap()
}

#[test]
fn formula_matches_oracle_on_random_systems() {
    let s = Settings::default();
    let mut r = rng(2024);
    let classes: [&[f64]; 4] = [&[], &[2.0], &[-1.0], &[0.0, -2.0]];
    let mut worst: f64 = 0.0;
    for case in 0..20 {
        let n = if case % 2 == 0 { 2 } else { 3 };
        let base = random_system(&mut r, n);
        let mut lp: Vec<f64> = base.lambda_prime().iter().map(|x| x.re).collect();
        for (k, v) in classes[case % 4].iter().enumerate() {
            lp[k] = *v;
        }
        let mut a = base.a().clone();
        for k in 0..n {
            a[(k, k)] = if classes[case % 4].len() > k { c(lp[k], 0.0) } else { a[(k, k)] };
        }
        let sys = base.with_a(a).unwrap();
        let tau = clear_tau(sys.u(), &s);
        let f = formula(&sys, tau, &s);
        let o = oracle(&sys, tau, &s);
        let d = max_diff(&f.s_nu, &o.pair.s_nu).max(max_diff(&f.s_nu_mu, &o.pair.s_nu_mu));
        assert!(d < 1e-6, "case {case}: {d:e}");
        assert!(triangularity_defect(&o.pair) < 1e-6);
        worst = worst.max(d);
    }
    assert!(worst < 1e-6);
}

#[test]
fn generated_matrices_match_direct_matching() {
    let s = Settings::default();
    let sys = with_diagonal(&random_system(&mut rng(5), 3), &[0.35, -0.2, 0.6]);
    let tau = clear_tau(sys.u(), &s);
    let labels = label_rays(sys.u(), tau, &s).unwrap();
    let f = formula(&sys, tau, &s);
    let family = stokes_generate(&f, &sys.lambda_prime(), 4);
    for h in 2..4 {
        let (direct, _) = stokes_direct_at(&sys, &labels, h as i64, &s).unwrap();
        let d = max_diff(&family[h], &direct);
        assert!(d < 1e-6, "h = {h}: {d:e}");
    }
}

#[test]
fn stokes_product_has_the_monodromy_spectrum() {
    let s = Settings::default();
    let sys = with_diagonal(&random_system(&mut rng(8), 3), &[0.15, -0.7, 0.45]);
    let tau = clear_tau(sys.u(), &s);
    let f = formula(&sys, tau, &s);
    let m = stokes_monodromy(&f, &sys.lambda_prime());
    let expected: Vec<C64> = eigenvalues(sys.a()).iter().map(|l| (-isostokes::linalg::TWO_PI_I * l).exp()).collect();
    let d = multiset_distance(&eigenvalues(&m), &expected);
    assert!(d < 1e-8, "{d:e}");
}

#[test]
fn diagonal_system_has_trivial_stokes_matrices() {
    let s = Settings::default();
    let sys = diagonal(&[0.3, -0.45, 0.7], &[c(0.0, 0.0), c(1.0, 0.2), c(-0.4, 1.1)]);
    let tau = clear_tau(sys.u(), &s);
    let o = oracle(&sys, tau, &s);
    let id = CMat::identity(3, 3);
    assert!(max_diff(&o.pair.s_nu, &id) < 1e-9);
    assert!(max_diff(&o.pair.s_nu_mu, &id) < 1e-9);
}

#[test]
fn ordering_of_collinear_points() {
    let s = Settings::default();
    let u = [c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)];
    // τ = 0: j ≺ k iff Re(u_j − u_k) < 0.
    let o = Ordering::new(&u, 0.0, &s);
    assert!(o.precedes(0, 1) && o.precedes(1, 2) && o.precedes(0, 2));
    assert!(o.follows(2, 0));
    let o = Ordering::new(&[c(0.0, 0.0), c(0.0, 0.0)], 0.0, &s);
    assert!(!o.precedes(0, 1) && !o.follows(0, 1));
}
