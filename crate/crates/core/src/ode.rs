//! Explicit integrators for complex-valued ODE systems.
//!
//! The adaptive scheme is the Dormand–Prince 5(4) pair with FSAL and a PI step
//! controller. Output times are hit exactly by shortening the step that would
//! cross them; no interpolation is involved.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::math;

/// `dy/dt = f(t, y)` over a flat complex state vector.
pub trait OdeSystem {
    fn dim(&self) -> usize;
    fn rhs(&self, t: f64, y: &[C64], dy: &mut [C64]);
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rtol: 1e-7, atol: 1e-10 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    /// Dormand–Prince 5(4) with error control.
    Adaptive(Tolerances),
    /// Classical RK4 with a fixed step (shortened only to land on output times).
    FixedRk4 { step: f64 },
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evaluations: usize,
}

// Dormand–Prince tableau.
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
// Fifth-order weights minus the embedded fourth-order ones.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrates `system` from `t0`, calling `observe(t, y)` at `t0` and at every
/// entry of `outputs` (strictly increasing, all `> t0`).
pub fn integrate<S, F>(
    system: &S,
    t0: f64,
    y0: &[C64],
    outputs: &[f64],
    method: Method,
    max_steps: usize,
    mut observe: F,
) -> Result<StepStats>
where
    S: OdeSystem + ?Sized,
    F: FnMut(f64, &[C64]) -> Result<()>,
{
    let n = system.dim();
    if y0.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: y0.len() });
    }
    let mut y = y0.to_vec();
    observe(t0, &y)?;
    match method {
        Method::Adaptive(tol) => dopri(system, t0, &mut y, outputs, tol, max_steps, &mut observe),
        Method::FixedRk4 { step } => rk4(system, t0, &mut y, outputs, step, &mut observe),
    }
}

fn axpy_into(out: &mut [C64], y: &[C64], terms: &[(f64, &[C64])], h: f64) {
    out.copy_from_slice(y);
    for (c, k) in terms {
        let w = c * h;
        for (o, x) in out.iter_mut().zip(k.iter()) {
            *o += *x * w;
        }
    }
}

fn dopri<S, F>(
    system: &S,
    t0: f64,
    y: &mut Vec<C64>,
    outputs: &[f64],
    tol: Tolerances,
    max_steps: usize,
    observe: &mut F,
) -> Result<StepStats>
where
    S: OdeSystem + ?Sized,
    F: FnMut(f64, &[C64]) -> Result<()>,
{
    let n = y.len();
    let mut stats = StepStats::default();
    let mut k1 = vec![C64::new(0.0, 0.0); n];
    let mut k2 = k1.clone();
    let mut k3 = k1.clone();
    let mut k4 = k1.clone();
    let mut k5 = k1.clone();
    let mut k6 = k1.clone();
    let mut k7 = k1.clone();
    let mut tmp = k1.clone();
    let mut y_new = k1.clone();

    let mut t = t0;
    system.rhs(t, y, &mut k1);
    stats.rhs_evaluations += 1;
    let mut h = initial_step(y, &k1, tol, outputs.last().map_or(1.0, |end| end - t0));
    let mut err_prev: f64 = 1e-4;

    for &target in outputs {
        while t < target {
            if stats.accepted + stats.rejected >= max_steps {
                return Err(Error::TooManySteps { t, max_steps });
            }
            let remaining = target - t;
            let lands = h >= remaining * (1.0 - 1e-12);
            let step = if lands { remaining } else { h };
            if step <= f64::EPSILON * t.abs().max(1.0) * 4.0 {
                return Err(Error::StepSizeUnderflow { t, h: step });
            }

            axpy_into(&mut tmp, y, &[(A21, &k1)], step);
            system.rhs(t + C2 * step, &tmp, &mut k2);
            axpy_into(&mut tmp, y, &[(A31, &k1), (A32, &k2)], step);
            system.rhs(t + C3 * step, &tmp, &mut k3);
            axpy_into(&mut tmp, y, &[(A41, &k1), (A42, &k2), (A43, &k3)], step);
            system.rhs(t + C4 * step, &tmp, &mut k4);
            axpy_into(&mut tmp, y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], step);
            system.rhs(t + C5 * step, &tmp, &mut k5);
            axpy_into(&mut tmp, y, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], step);
            system.rhs(t + step, &tmp, &mut k6);
            axpy_into(&mut y_new, y, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)], step);
            system.rhs(t + step, &y_new, &mut k7);
            stats.rhs_evaluations += 6;

            // Scaled max-norm error: components that stay zero do not dilute
            // it, so appending inert components leaves the step sequence
            // unchanged.
            let mut err: f64 = 0.0;
            for i in 0..n {
                let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * step;
                let scale = tol.atol + tol.rtol * math::sqrt(y[i].norm_sqr().max(y_new[i].norm_sqr()));
                err = err.max(math::sqrt(e.norm_sqr()) / scale);
            }
            if !err.is_finite() {
                return Err(Error::NonFinite { t });
            }

            if err <= 1.0 {
                t = if lands { target } else { t + step };
                core::mem::swap(y, &mut y_new);
                core::mem::swap(&mut k1, &mut k7);
                stats.accepted += 1;
                // PI controller (Hairer's beta = 0.04).
                let fac = 0.9 * math::powf(err.max(1e-10), -0.7 / 5.0) * math::powf(err_prev, 0.04);
                let fac = fac.clamp(0.2, 5.0);
                // A step shortened to land on an output says little about the
                // natural step, so do not shrink below the previous proposal.
                let proposal = step * fac;
                h = if lands { proposal.max(h) } else { proposal };
                err_prev = err.max(1e-4);
            } else {
                stats.rejected += 1;
                let fac = (0.9 * math::powf(err, -1.0 / 5.0)).clamp(0.2, 1.0);
                h = step * fac;
            }
        }
        observe(t, y)?;
    }
    Ok(stats)
}

fn initial_step(y: &[C64], f: &[C64], tol: Tolerances, span: f64) -> f64 {
    let mut d0: f64 = 0.0;
    let mut d1: f64 = 0.0;
    for (yi, fi) in y.iter().zip(f) {
        let sc = tol.atol + tol.rtol * yi.norm();
        d0 = d0.max(yi.norm() / sc);
        d1 = d1.max(fi.norm() / sc);
    }
    let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h.min(span.abs()).max(1e-10)
}

fn rk4<S, F>(system: &S, t0: f64, y: &mut [C64], outputs: &[f64], step: f64, observe: &mut F) -> Result<StepStats>
where
    S: OdeSystem + ?Sized,
    F: FnMut(f64, &[C64]) -> Result<()>,
{
    if !(step > 0.0) {
        return Err(Error::InvalidParameter(alloc::format!("RK4 step must be positive, got {step}")));
    }
    let n = y.len();
    let mut stats = StepStats::default();
    let mut k1 = vec![C64::new(0.0, 0.0); n];
    let mut k2 = k1.clone();
    let mut k3 = k1.clone();
    let mut k4 = k1.clone();
    let mut tmp = k1.clone();
    let mut t = t0;
    for &target in outputs {
        // Equal substeps between consecutive outputs.
        let span = target - t;
        let count = math::ceil(span / step * (1.0 - 1e-12)).max(1.0) as usize;
        let h = span / count as f64;
        for _ in 0..count {
            system.rhs(t, y, &mut k1);
            axpy_into(&mut tmp, y, &[(0.5, &k1)], h);
            system.rhs(t + 0.5 * h, &tmp, &mut k2);
            axpy_into(&mut tmp, y, &[(0.5, &k2)], h);
            system.rhs(t + 0.5 * h, &tmp, &mut k3);
            axpy_into(&mut tmp, y, &[(1.0, &k3)], h);
            system.rhs(t + h, &tmp, &mut k4);
            for i in 0..n {
                y[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
            }
            t += h;
            stats.accepted += 1;
            stats.rhs_evaluations += 4;
        }
        t = target;
        if y.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite { t });
        }
        observe(t, y)?;
    }
    Ok(stats)
}

/// Uniform output grid `dt, 2dt, ...` up to and including `tmax` (the last
/// point is clamped to `tmax`).
pub fn output_grid(tmax: f64, dt: f64) -> Vec<f64> {
    let count = math::round(tmax / dt) as usize;
    let mut grid: Vec<f64> = (1..=count).map(|k| k as f64 * dt).collect();
    if let Some(last) = grid.last_mut() {
        if (*last - tmax).abs() <= 1e-9 * tmax.max(1.0) {
            *last = tmax;
        } else if *last < tmax {
            grid.push(tmax);
        } else {
            *last = tmax;
        }
    } else if tmax > 0.0 {
        grid.push(tmax);
    }
    grid
}
