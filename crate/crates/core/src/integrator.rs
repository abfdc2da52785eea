// Copyright 2026 qsteer contributors
// SPDX-License-Identifier: Apache-2.0

//! Explicit one-step integrators over fixed-size real state vectors.
//!
//! [`Dp45`] is the Dormand–Prince 5(4) embedded pair with local
//! extrapolation and first-same-as-last reuse. [`rk4_fixed`] is the classical
//! fourth-order method at a fixed step, kept as a brute-force reference.

use crate::error::{Error, Result};

// Dormand–Prince coefficients.
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
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// Error coefficients b5 − b4.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// One Dormand–Prince step from (t, y) with derivative `k1` at that point.
/// Returns the fifth-order solution, the embedded error vector and the
/// derivative at the new point.
pub fn dp45_step<const N: usize, F>(
    f: &mut F,
    t: f64,
    y: &[f64; N],
    k1: &[f64; N],
    h: f64,
) -> Result<([f64; N], [f64; N], [f64; N])>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let k2 = f(t + C2 * h, &axpy(y, h, &[(A21, k1)]))?;
    let k3 = f(t + C3 * h, &axpy(y, h, &[(A31, k1), (A32, &k2)]))?;
    let k4 = f(t + C4 * h, &axpy(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]))?;
    let k5 = f(
        t + C5 * h,
        &axpy(y, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
    )?;
    let k6 = f(
        t + h,
        &axpy(y, h, &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
    )?;
    let y_new = axpy(y, h, &[(A71, k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
    let k7 = f(t + h, &y_new)?;
    let mut err = [0.0; N];
    for i in 0..N {
        err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
    }
    Ok((y_new, err, k7))
}

/// Classical RK4 with `n_steps` equal steps from `t0` to `t1`.
pub fn rk4_fixed<const N: usize, F>(mut f: F, t0: f64, t1: f64, y0: [f64; N], n_steps: usize) -> Result<[f64; N]>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    assert!(n_steps > 0, "rk4_fixed needs at least one step");
    let h = (t1 - t0) / n_steps as f64;
    let mut y = y0;
    for n in 0..n_steps {
        let t = t0 + n as f64 * h;
        let k1 = f(t, &y)?;
        let k2 = f(t + 0.5 * h, &axpy(&y, h, &[(0.5, &k1)]))?;
        let k3 = f(t + 0.5 * h, &axpy(&y, h, &[(0.5, &k2)]))?;
        let k4 = f(t + h, &axpy(&y, h, &[(1.0, &k3)]))?;
        y = axpy(&y, h, &[(1.0 / 6.0, &k1), (1.0 / 3.0, &k2), (1.0 / 3.0, &k3), (1.0 / 6.0, &k4)]);
    }
    Ok(y)
}

/// Dormand–Prince 5(4) without step control: `n_steps` equal steps.
pub fn dp5_fixed<const N: usize, F>(mut f: F, t0: f64, t1: f64, y0: [f64; N], n_steps: usize) -> Result<[f64; N]>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    assert!(n_steps > 0, "dp5_fixed needs at least one step");
    let h = (t1 - t0) / n_steps as f64;
    let mut y = y0;
    let mut k1 = f(t0, &y)?;
    for n in 0..n_steps {
        let (y_new, _, k7) = dp45_step(&mut f, t0 + n as f64 * h, &y, &k1, h)?;
        y = y_new;
        k1 = k7;
    }
    Ok(y)
}

/// Counters accumulated by the adaptive driver.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

impl std::ops::AddAssign for StepStats {
    fn add_assign(&mut self, o: Self) {
        self.accepted += o.accepted;
        self.rejected += o.rejected;
        self.evaluations += o.evaluations;
    }
}

/// Adaptive Dormand–Prince driver.
///
/// A step is accepted when max_i |err_i| / (abs_tol + rel_tol·max(|y_i|, |y_new_i|)) ≤ 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dp45 {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
}

impl Dp45 {
    pub fn new(rel_tol: f64, abs_tol: f64, max_step: f64) -> Result<Self> {
        if !(rel_tol > 0.0 && rel_tol.is_finite()) {
            return Err(crate::error::invalid("rel_tol", format!("must be > 0, got {rel_tol}")));
        }
        if !(abs_tol > 0.0 && abs_tol.is_finite()) {
            return Err(crate::error::invalid("abs_tol", format!("must be > 0, got {abs_tol}")));
        }
        if !(max_step > 0.0) {
            return Err(crate::error::invalid("max_step", format!("must be > 0, got {max_step}")));
        }
        Ok(Self {
            rel_tol,
            abs_tol,
            max_step,
        })
    }

    fn error_norm<const N: usize>(&self, y: &[f64; N], y_new: &[f64; N], err: &[f64; N]) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..N {
            let scale = self.abs_tol + self.rel_tol * y[i].abs().max(y_new[i].abs());
            let r = err[i].abs() / scale;
            if r.is_nan() {
                return f64::INFINITY;
            }
            worst = worst.max(r);
        }
        worst
    }

    /// Integrate from `t0` to exactly `t1`. `h` carries the step-size guess in
    /// and out. `on_step(t, y)` is called after every accepted step.
    pub fn integrate<const N: usize, F, S>(
        &self,
        mut f: F,
        t0: f64,
        t1: f64,
        y0: [f64; N],
        h: &mut f64,
        mut on_step: S,
    ) -> Result<([f64; N], StepStats)>
    where
        F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
        S: FnMut(f64, &[f64; N]),
    {
        let mut stats = StepStats::default();
        let span = t1 - t0;
        if span <= 0.0 {
            return Ok((y0, stats));
        }
        let h_min = 64.0 * f64::EPSILON * t0.abs().max(t1.abs());
        let mut t = t0;
        let mut y = y0;
        let mut k1 = f(t, &y)?;
        stats.evaluations += 1;
        if !(*h > 0.0) || !h.is_finite() {
            *h = self.initial_step(&y, &k1, span);
        }
        loop {
            let remaining = t1 - t;
            let mut step = h.min(self.max_step);
            let last = step >= remaining * (1.0 - 1e-12);
            if last {
                step = remaining;
            }
            let (y_new, err, k7) = dp45_step(&mut f, t, &y, &k1, step)?;
            stats.evaluations += 6;
            let en = self.error_norm(&y, &y_new, &err);
            let factor = if en == 0.0 {
                MAX_FACTOR
            } else if en.is_finite() {
                (SAFETY * en.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
            } else {
                MIN_FACTOR
            };
            if en <= 1.0 {
                stats.accepted += 1;
                t = if last { t1 } else { t + step };
                y = y_new;
                k1 = k7;
                on_step(t, &y);
                // a truncated final step says nothing about the natural size
                if !last || factor < 1.0 {
                    *h = step * factor;
                }
                if last {
                    return Ok((y, stats));
                }
            } else {
                stats.rejected += 1;
                *h = step * factor;
                if *h < h_min {
                    return Err(Error::StepUnderflow { t, h: *h });
                }
            }
        }
    }

    fn initial_step<const N: usize>(&self, y: &[f64; N], k1: &[f64; N], span: f64) -> f64 {
        let mut d0: f64 = 0.0;
        let mut d1: f64 = 0.0;
        for i in 0..N {
            let scale = self.abs_tol + self.rel_tol * y[i].abs();
            d0 = d0.max(y[i].abs() / scale);
            d1 = d1.max(k1[i].abs() / scale);
        }
        let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 * span } else { 0.01 * d0 / d1 };
        h.min(span).min(self.max_step)
    }
}
