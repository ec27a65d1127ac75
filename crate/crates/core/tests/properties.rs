mod common;

use isostokes::laplace::formal_recursion;
use isostokes::linalg::c;
use isostokes::model::{angle_distance_mod, ray_direction};
use isostokes::stokes::Ordering;
use isostokes::{CMat, Settings, SystemPair, C64};
use num_rational::Rational64 as Q;
use proptest::prelude::*;
use std::f64::consts::PI;

type QMat = Vec<Vec<Q>>;

/// `F_1..F_L` in exact arithmetic from `[Λ, F_k] = F_{k−1}(B − (k−1)) − A F_{k−1}` and the
/// diagonal of the same relation at order `k + 1`.
fn exact_formal(a: &QMat, u: &[Q], order: usize) -> Vec<QMat> {
    let n = u.len();
    let zero = Q::from_integer(0);
    let mut prev: QMat = (0..n).map(|i| (0..n).map(|j| Q::from_integer((i == j) as i64)).collect()).collect();
    let mut out = Vec::new();
    for k in 1..=order {
        let km1 = Q::from_integer(k as i64 - 1);
        let mut f = vec![vec![zero; n]; n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let mut rhs = prev[i][j] * (a[j][j] - km1);
                    for p in 0..n {
                        rhs -= a[i][p] * prev[p][j];
                    }
                    f[i][j] = rhs / (u[i] - u[j]);
                }
            }
        }
        let kq = Q::from_integer(k as i64);
        for i in 0..n {
            let mut s = zero;
            for p in (0..n).filter(|&p| p != i) {
                s += a[i][p] * f[p][i];
            }
            f[i][i] = -s / kq;
        }
        prev = f.clone();
        out.push(f);
    }
    out
}

fn to_f64(q: Q) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

#[test]
fn formal_recursion_matches_exact_rational_arithmetic() {
    let q = |n: i64, d: i64| Q::new(n, d);
    let a: QMat = vec![
        vec![q(1, 2), q(2, 1), q(-1, 3)],
        vec![q(3, 1), q(1, 3), q(1, 4)],
        vec![q(-2, 5), q(1, 1), q(-3, 7)],
    ];
    let u = [q(0, 1), q(1, 1), q(-5, 2)];
    let exact = exact_formal(&a, &u, 4);
    let am = CMat::from_fn(3, 3, |i, j| c(to_f64(a[i][j]), 0.0));
    let sys = SystemPair::new(am, u.iter().map(|x| c(to_f64(*x), 0.0)).collect()).unwrap();
    let formal = formal_recursion(&sys, 4, &[], &Settings::default()).unwrap();
    for (l, f) in exact.iter().enumerate() {
        for i in 0..3 {
            for j in 0..3 {
                let e = to_f64(f[i][j]);
                assert!((formal.f[l][(i, j)] - e).norm() < 1e-12 * e.abs().max(1.0), "F_{}[{i}{j}]", l + 1);
            }
        }
    }
}

fn point() -> impl Strategy<Value = C64> {
    (-3.0..3.0f64, -3.0..3.0f64).prop_map(|(x, y)| c(x, y))
}

proptest! {
    #[test]
    fn ordering_is_a_strict_total_order(u in prop::collection::vec(point(), 2..5), tau in 0.0..PI) {
        let s = Settings::default();
        let o = Ordering::new(&u, tau, &s);
        let n = u.len();
        for j in 0..n {
            for k in 0..n {
                prop_assert!(!(o.precedes(j, k) && o.precedes(k, j)));
                prop_assert_eq!(o.precedes(j, k), o.follows(k, j));
                for l in 0..n {
                    if o.precedes(j, k) && o.precedes(k, l) {
                        prop_assert!(!o.follows(j, l));
                    }
                }
            }
        }
    }

    #[test]
    fn opposite_pairs_have_opposite_rays(a in point(), b in point()) {
        prop_assume!((a - b).norm() > 1e-6);
        let d = angle_distance_mod(ray_direction(a, b), ray_direction(b, a) + PI, 2.0 * PI);
        prop_assert!(d < 1e-12);
    }

    #[test]
    fn ordering_flips_exactly_at_the_ray(a in point(), b in point(), eps in 1e-3..0.5f64) {
        prop_assume!((a - b).norm() > 1e-3);
        let s = Settings::default();
        let ray = ray_direction(a, b);
        let u = [a, b];
        let before = Ordering::new(&u, ray - eps, &s).precedes(0, 1);
        let after = Ordering::new(&u, ray + eps, &s).precedes(0, 1);
        prop_assert!(before != after);
    }
}
