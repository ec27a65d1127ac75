//! Shared fixtures for the integration tests.
#![allow(dead_code)]

use isostokes::linalg::c;
use isostokes::{CMat, SystemPair, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn sample_2x2() -> SystemPair {
    let a = CMat::from_row_slice(2, 2, &[c(0.5, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(1.0 / 3.0, 0.0)]);
    SystemPair::new(a, vec![c(0.0, 0.0), c(1.0, 0.0)]).unwrap()
}

pub fn diagonal(lp: &[f64], u: &[C64]) -> SystemPair {
    let n = lp.len();
    let mut a = CMat::zeros(n, n);
    for k in 0..n {
        a[(k, k)] = c(lp[k], 0.0);
    }
    SystemPair::new(a, u.to_vec()).unwrap()
}

/// Random system with non-integer diagonal and well separated poles.
pub fn random_system(rng: &mut ChaCha8Rng, n: usize) -> SystemPair {
    let mut a = CMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = if i == j {
                c(rng.gen_range(-0.9..0.9), rng.gen_range(-0.3..0.3))
            } else {
                c(rng.gen_range(-0.8..0.8), rng.gen_range(-0.8..0.8))
            };
        }
    }
    let u = loop {
        let u: Vec<C64> = (0..n).map(|_| c(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5))).collect();
        let ok = (0..n).all(|i| (0..n).all(|j| i == j || (u[i] - u[j]).norm() > 0.6));
        if ok {
            break u;
        }
    };
    SystemPair::new(a, u).unwrap()
}

pub fn max_diff(a: &CMat, b: &CMat) -> f64 {
    isostokes::linalg::max_abs(&(a - b))
}
