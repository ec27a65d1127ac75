//! Small dense complex linear algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };
pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const TWO_PI_I: C64 = C64 { re: 0.0, im: 2.0 * std::f64::consts::PI };

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Unit vector `e_k` in ℂⁿ.
pub fn unit(n: usize, k: usize) -> CVec {
    let mut v = CVec::zeros(n);
    v[k] = ONE;
    v
}

/// Matrix unit `E_k` (single 1 at position (k, k)).
pub fn diag_unit(n: usize, k: usize) -> CMat {
    let mut m = CMat::zeros(n, n);
    m[(k, k)] = ONE;
    m
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

/// Largest entry modulus.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_vec(v: &CVec) -> f64 {
    v.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Eigenvalues from the complex Schur form (upper triangular for complex fields).
pub fn eigenvalues(m: &CMat) -> Vec<C64> {
    let (_, t) = nalgebra::Schur::new(m.clone()).unpack();
    t.diagonal().iter().copied().collect()
}

/// Ratio of extreme singular values; `inf` for singular input.
pub fn condition_number(m: &CMat) -> f64 {
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

pub fn inverse(m: &CMat) -> Option<CMat> {
    m.clone().try_inverse()
}

/// Greedy matching distance between two multisets of complex numbers.
pub fn multiset_distance(a: &[C64], b: &[C64]) -> f64 {
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let mut best = (f64::INFINITY, usize::MAX);
        for (i, y) in b.iter().enumerate() {
            if !used[i] && (x - y).norm() < best.0 {
                best = ((x - y).norm(), i);
            }
        }
        if best.1 == usize::MAX {
            return f64::INFINITY;
        }
        used[best.1] = true;
        worst = worst.max(best.0);
    }
    worst
}

/// Diagonal matrix `exp(s·diag(v))`.
pub fn exp_diag(v: &[C64], s: C64) -> CMat {
    CMat::from_diagonal(&CVec::from_iterator(v.len(), v.iter().map(|x| (s * x).exp())))
}
