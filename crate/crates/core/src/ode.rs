//! Adaptive Dormand–Prince 5(4) integrator for complex-valued states
//! driven by a real parameter.
//!
//! The state is a flat `&[C64]`; the error norm is the max-norm of the
//! embedded error relative to `atol + rtol·‖y‖∞`, which suits vector
//! solutions whose components may legitimately be tiny. The state may be split
//! into equal blocks, each measured against its own `‖·‖∞`.

use crate::error::{Error, Result};
use crate::linalg::C64;

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step as a fraction of the interval length.
    pub initial_fraction: f64,
    pub max_steps: usize,
    /// Number of equal blocks with separate error scales.
    pub blocks: usize,
}

impl OdeOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            rtol: tol,
            atol: tol * 1e-3,
            ..Self::default()
        }
    }
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-12,
            atol: 1e-15,
            initial_fraction: 0.01,
            max_steps: 2_000_000,
            blocks: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
}

impl std::ops::AddAssign for OdeStats {
    fn add_assign(&mut self, o: Self) {
        self.accepted += o.accepted;
        self.rejected += o.rejected;
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrate `y' = f(t, y)` from `t0` to `t1` (either direction), in place.
pub fn integrate<F>(mut f: F, t0: f64, t1: f64, y: &mut [C64], opts: &OdeOptions) -> Result<OdeStats>
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    let n = y.len();
    let blocks = if opts.blocks > 1 && n % opts.blocks == 0 { opts.blocks } else { 1 };
    let width = n / blocks;
    let mut stats = OdeStats::default();
    let span = t1 - t0;
    if span == 0.0 {
        return Ok(stats);
    }
    let dir = span.signum();
    let mut t = t0;
    let mut h = span.abs() * opts.initial_fraction.clamp(1e-12, 1.0);
    let h_min = span.abs() * 1e-14;

    let mut k1 = vec![C64::default(); n];
    let mut k2 = k1.clone();
    let mut k3 = k1.clone();
    let mut k4 = k1.clone();
    let mut k5 = k1.clone();
    let mut k6 = k1.clone();
    let mut k7 = k1.clone();
    let mut tmp = k1.clone();
    let mut y5 = k1.clone();
    f(t, y, &mut k1);

    while (t1 - t) * dir > 0.0 {
        if stats.accepted + stats.rejected > opts.max_steps {
            return Err(Error::StepFailure { at: t, step: h });
        }
        let last = (t + dir * h - t1) * dir >= 0.0;
        let hs = if last { (t1 - t).abs() } else { h };
        let hh = dir * hs;

        for i in 0..n {
            tmp[i] = y[i] + hh * A21 * k1[i];
        }
        f(t + C2 * hh, &tmp, &mut k2);
        for i in 0..n {
            tmp[i] = y[i] + hh * (A31 * k1[i] + A32 * k2[i]);
        }
        f(t + C3 * hh, &tmp, &mut k3);
        for i in 0..n {
            tmp[i] = y[i] + hh * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        f(t + C4 * hh, &tmp, &mut k4);
        for i in 0..n {
            tmp[i] = y[i] + hh * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        f(t + C5 * hh, &tmp, &mut k5);
        for i in 0..n {
            tmp[i] = y[i] + hh * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        f(t + hh, &tmp, &mut k6);
        for i in 0..n {
            y5[i] = y[i] + hh * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
        }
        f(t + hh, &y5, &mut k7);

        let mut err: f64 = 0.0;
        for block in 0..blocks {
            let r = block * width..(block + 1) * width;
            let scale_y = y[r.clone()].iter().chain(y5[r.clone()].iter()).fold(0.0f64, |m, z| m.max(z.norm()));
            let sc = opts.atol + opts.rtol * scale_y;
            for i in r {
                let e = hh * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                err = err.max(e.norm() / sc);
            }
        }
        if !err.is_finite() {
            err = 1e10;
        }

        if err <= 1.0 {
            t = if last { t1 } else { t + hh };
            y.copy_from_slice(&y5);
            std::mem::swap(&mut k1, &mut k7);
            stats.accepted += 1;
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h = hs * fac;
        } else {
            stats.rejected += 1;
            h = hs * (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
            if h < h_min {
                return Err(Error::StepFailure { at: t, step: h });
            }
        }
    }
    Ok(stats)
}

/// Integrate through an ordered list of output parameters, recording the state at each.
pub fn integrate_through<F>(
    mut f: F,
    t0: f64,
    outputs: &[f64],
    y: &mut [C64],
    opts: &OdeOptions,
) -> Result<(Vec<Vec<C64>>, OdeStats)>
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    let mut out = Vec::with_capacity(outputs.len());
    let mut stats = OdeStats::default();
    let mut t = t0;
    for &tk in outputs {
        stats += integrate(&mut f, t, tk, y, opts)?;
        out.push(y.to_vec());
        t = tk;
    }
    Ok((out, stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_is_reproduced() {
        let mut y = vec![C64::new(1.0, 0.0)];
        let lam = C64::new(-0.5, 2.0);
        integrate(|_, y, d| d[0] = lam * y[0], 0.0, 3.0, &mut y, &OdeOptions::default()).unwrap();
        assert!((y[0] - (lam * 3.0).exp()).norm() < 1e-10);
    }

    #[test]
    fn backwards_integration_inverts_forward() {
        let mut y = vec![C64::new(1.0, 0.0), C64::new(0.0, 1.0)];
        let rhs = |t: f64, y: &[C64], d: &mut [C64]| {
            d[0] = y[1] * t;
            d[1] = -y[0];
        };
        integrate(rhs, 0.0, 2.0, &mut y, &OdeOptions::default()).unwrap();
        integrate(rhs, 2.0, 0.0, &mut y, &OdeOptions::default()).unwrap();
        assert!((y[0] - C64::new(1.0, 0.0)).norm() < 1e-9);
        assert!((y[1] - C64::new(0.0, 1.0)).norm() < 1e-9);
    }
}
