mod common;

use common::*;
use isostokes::continuation::*;
use isostokes::frobenius::{build_fuchsian, local_basis, selected_solution};
use isostokes::linalg::{c, eigenvalues, multiset_distance, unit, TWO_PI_I};
use isostokes::{CMat, CVec, CutPlane, Settings, C64};
use std::f64::consts::PI;

#[test]
fn diagonal_transport_is_a_power() {
    let fs = build_fuchsian(&diagonal(&[0.3, -0.45], &[c(0.0, 0.0), c(1.0, 0.0)]));
    let cut = CutPlane::new(PI / 2.0 + 0.2);
    let (from, to) = (c(0.2, -0.3), c(0.9, -0.5));
    let path = plan_path(&fs, cut, from, to).unwrap();
    let v = continue_solution(&fs, &unit(2, 0), &path, 1e-12).unwrap();
    let x0 = from;
    let x1 = to;
    let expected = (x1 / x0).powc(c(-1.3, 0.0));
    assert!((v[0] - expected).norm() < 1e-10);
    assert!(v[1].norm() < 1e-14);
}

#[test]
fn contractible_loop_is_identity() {
    let fs = build_fuchsian(&sample_2x2());
    let v = CVec::from_vec(vec![c(1.0, 0.5), c(-0.3, 2.0)]);
    let looped = continue_solution(&fs, &v, &Path::circle(c(0.5, 1.5), 0.7, 0.0, 1.0), 1e-12).unwrap();
    assert!((looped - v).norm() < 1e-10);
}

#[test]
fn half_loop_equals_two_quarter_loops() {
    let mut r = rng(7);
    let fs = build_fuchsian(&random_system(&mut r, 3));
    let v = CVec::from_vec(vec![c(1.0, 0.0), c(0.0, 1.0), c(0.5, 0.5)]);
    let center = fs.u[0];
    let rad = 0.3 * fs.nearest_pole_distance(0);
    let tol = 1e-12;
    let half = continue_solution(&fs, &v, &Path::circle(center, rad, 0.0, 0.5), tol).unwrap();
    let q1 = continue_solution(&fs, &v, &Path::circle(center, rad, 0.0, 0.25), tol).unwrap();
    let q2 = continue_solution(&fs, &q1, &Path::circle(center, rad, 0.5 * PI, 0.25), tol).unwrap();
    let scale = half.norm().max(v.norm());
    assert!((half - q2).norm() < 10.0 * tol * scale);
}

#[test]
fn diagonal_monodromy() {
    let s = Settings::default();
    let fs = build_fuchsian(&diagonal(&[0.5, 0.2], &[c(0.0, 0.0), c(1.0, 0.0)]));
    let cut = CutPlane::new(0.3);
    let m = monodromy_matrix(&fs, 0, cut, &s).unwrap();
    let mut expected = CMat::identity(2, 2);
    expected[(0, 0)] = c(-1.0, 0.0);
    assert!(max_diff(&m.m, &expected) < 1e-10);
}

#[test]
fn monodromy_structure_and_spectrum() {
    let s = Settings::default();
    let mut r = rng(11);
    for _ in 0..3 {
        let sys = random_system(&mut r, 3);
        let fs = build_fuchsian(&sys);
        let cut = CutPlane::new(1.1);
        let conn = connection_coefficients(&fs, cut, &s).unwrap();
        for k in 0..3 {
            let m = monodromy_matrix(&fs, k, cut, &s).unwrap();
            let lp = fs.lambda_prime[k];
            assert!(m.structure_defect(lp, Some(&conn)) < 1e-8, "{}", m.structure_defect(lp, Some(&conn)));
            let expected = [c(1.0, 0.0), c(1.0, 0.0), (-TWO_PI_I * lp).exp()];
            assert!(multiset_distance(&eigenvalues(&m.m), &expected) < 1e-8);
        }
    }
}

#[test]
fn loop_at_infinity_has_exponents_of_a() {
    let s = Settings::default();
    let sys = sample_2x2();
    let fs = build_fuchsian(&sys);
    let m = infinity_monodromy(&fs, CutPlane::new(0.4), &s).unwrap();
    let expected: Vec<C64> = eigenvalues(sys.a()).iter().map(|l| (-TWO_PI_I * l).exp()).collect();
    assert!(multiset_distance(&eigenvalues(&m), &expected) < 1e-8);
}

#[test]
fn series_matching_agrees_for_integer_exponents() {
    let s = Settings::default();
    let a = CMat::from_row_slice(
        3,
        3,
        &[c(1.0, 0.0), c(0.7, 0.1), c(-0.4, 0.0), c(0.2, 0.0), c(-2.0, 0.0), c(0.5, 0.3), c(0.3, -0.2), c(0.6, 0.0), c(0.25, 0.0)],
    );
    let sys = isostokes::SystemPair::new(a, vec![c(0.0, 0.0), c(1.0, 0.2), c(-0.3, 1.1)]).unwrap();
    let fs = build_fuchsian(&sys);
    let cut = CutPlane::new(-1.0);
    let proj = connection_coefficients(&fs, cut, &s).unwrap();
    let fit = connection_by_series_matching(&fs, cut, &s).unwrap();
    assert!(max_diff(&proj.c, &fit) < 1e-8, "{}", max_diff(&proj.c, &fit));
}

#[test]
fn branch_consistent_under_cut_perturbation() {
    let s = Settings::default();
    let fs = build_fuchsian(&sample_2x2());
    let a = connection_coefficients(&fs, CutPlane::new(PI / 2.0 + 0.3), &s).unwrap();
    let b = connection_coefficients(&fs, CutPlane::new(PI / 2.0 + 0.6), &s).unwrap();
    assert!(max_diff(&a.c, &b.c) < 1e-8);
}

#[test]
fn negative_class_completion_does_not_change_coefficients() {
    // Fit the continued Ψ_2 at u_1 with two different regular completions of Ψ_1^{sing}.
    let s = Settings::default();
    let a = CMat::from_row_slice(3, 3, &[c(-2.0, 0.0), c(0.4, 0.0), c(0.3, 0.1), c(0.5, 0.0), c(0.35, 0.0), c(-0.2, 0.0), c(0.1, 0.2), c(0.6, 0.0), c(-0.15, 0.0)]);
    let sys = isostokes::SystemPair::new(a, vec![c(0.0, 0.0), c(1.0, 0.0), c(0.4, 1.0)]).unwrap();
    let fs = build_fuchsian(&sys);
    let cut = CutPlane::new(-0.7);
    let basis = local_basis(&fs, 0, cut, 40, &s).unwrap();
    let mut other = basis.clone();
    let extra = basis[2].regular.clone();
    for (g, e) in other[0].regular.iter_mut().zip(extra) {
        *g += e * c(0.7, -0.2);
    }
    let sel = selected_solution(&fs, 1, cut, 40, &s).unwrap();
    let (r, _) = anchor(&fs, 0, cut, &s);
    let pts: Vec<C64> = (0..16).map(|m| fs.u[0] + C64::from_polar(r, cut.eta - 2.0 * PI + 2.0 * PI * (m as f64 + 0.5) / 16.0)).collect();
    let vals: Vec<CVec> = pts.iter().map(|p| selected_at(&fs, &sel, cut, *p, &s).unwrap()).collect();
    let fit = |b: &[isostokes::frobenius::LocalSeries]| {
        let mut m = CMat::zeros(48, 3);
        let mut rhs = CVec::zeros(48);
        for (p, lam) in pts.iter().enumerate() {
            for (j, ser) in b.iter().enumerate() {
                let v = ser.eval(*lam);
                for i in 0..3 {
                    m[(3 * p + i, j)] = v[i];
                }
            }
            for i in 0..3 {
                rhs[3 * p + i] = vals[p][i];
            }
        }
        m.svd(true, true).solve(&rhs, 1e-14).unwrap()[0]
    };
    let (c1, c2) = (fit(&basis), fit(&other));
    assert!((c1 - c2).norm() < 1e-9);
    let proj = connection_coefficients(&fs, cut, &s).unwrap();
    assert!((proj.c[(0, 1)] - c1).norm() < 1e-8);
}
