//! Adaptive Gauss–Kronrod quadrature and the spectral integrals built on it.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::model::BathSpec;

// 15-point Kronrod nodes on [0, 1] (symmetric), with the embedded 7-point
// Gauss weights on the odd positions.
const XK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let x = h * XK[i];
        let s = f(c - x) + f(c + x);
        k += WK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive integral of `f` over `[a, b]` to `max(abs_tol, rel_tol·|I|)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let mut segments: Vec<(f64, f64, f64, f64)> = Vec::new();
    let (v, e) = kronrod(&f, a, b);
    segments.push((a, b, v, e));
    for _ in 0..5000 {
        let total: f64 = segments.iter().map(|s| s.2).sum();
        let error: f64 = segments.iter().map(|s| s.3).sum();
        if !total.is_finite() {
            return Err(Error::Quadrature(format!("non-finite integrand on [{a}, {b}]")));
        }
        if error <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(total);
        }
        let worst = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).unwrap_or(core::cmp::Ordering::Equal))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let (lo, hi, _, _) = segments.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = kronrod(&f, lo, mid);
        let (v2, e2) = kronrod(&f, mid, hi);
        segments.push((lo, mid, v1, e1));
        segments.push((mid, hi, v2, e2));
    }
    Err(Error::Quadrature(format!("no convergence on [{a}, {b}] after 5000 subdivisions")))
}

/// `∫_a^∞ f` for integrands that decay at least like `1/ω²`, via `ω = a/u`.
pub fn integrate_tail<F: Fn(f64) -> f64>(f: F, a: f64, abs_tol: f64, rel_tol: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::Quadrature(format!("tail start must be positive, got {a}")));
    }
    integrate(|u| if u <= 0.0 { 0.0 } else { f(a / u) * a / (u * u) }, 0.0, 1.0, abs_tol, rel_tol)
}

/// `∫_a^∞ f` for slowly decaying oscillatory integrands with half-period
/// `half_period`: integrates consecutive half-periods and extrapolates the
/// partial sums with Wynn's epsilon algorithm.
pub fn integrate_oscillatory_tail<F: Fn(f64) -> f64>(f: F, a: f64, half_period: f64, abs_tol: f64) -> Result<f64> {
    const TERMS: usize = 60;
    let mut partial = Vec::with_capacity(TERMS);
    let mut sum = 0.0;
    for k in 0..TERMS {
        let lo = a + k as f64 * half_period;
        sum += integrate(&f, lo, lo + half_period, abs_tol * 1e-3, 1e-13)?;
        partial.push(sum);
    }
    let (value, estimate) = wynn_epsilon(&partial);
    if estimate > abs_tol.max(1e-14) * 10.0 {
        return Err(Error::Quadrature(format!("oscillatory tail extrapolation error {estimate:e}")));
    }
    Ok(value)
}

/// Wynn epsilon extrapolation of a sequence of partial sums; returns the
/// limit and the difference between the last two even-column estimates.
pub fn wynn_epsilon(s: &[f64]) -> (f64, f64) {
    let n = s.len();
    let mut prev: Vec<f64> = alloc::vec![0.0; n + 1];
    let mut cur: Vec<f64> = s.to_vec();
    let mut estimates: Vec<f64> = alloc::vec![s[n - 1]];
    let mut column = 0;
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let d = cur[i + 1] - cur[i];
            let inc = if d == 0.0 { f64::INFINITY } else { 1.0 / d };
            next.push(prev[i + 1] + inc);
        }
        column += 1;
        prev = cur;
        cur = next;
        if column % 2 == 0 {
            let last = *cur.last().unwrap();
            if !last.is_finite() {
                break;
            }
            estimates.push(last);
        }
    }
    let m = estimates.len();
    if m < 2 {
        return (estimates[0], f64::INFINITY);
    }
    // Use the best-agreeing pair of successive estimates.
    let mut best = (estimates[m - 1], (estimates[m - 1] - estimates[m - 2]).abs());
    for w in estimates.windows(2) {
        let d = (w[1] - w[0]).abs();
        if d < best.1 {
            best = (w[1], d);
        }
    }
    best
}

fn coth(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 / x + x / 3.0
    } else {
        let e = libm::exp(-2.0 * x.abs());
        let v = (1.0 + e) / (1.0 - e);
        if x < 0.0 {
            -v
        } else {
            v
        }
    }
}

fn drude(lambda: f64, gamma: f64, omega: f64) -> f64 {
    2.0 * lambda / core::f64::consts::PI * omega * gamma / (omega * omega + gamma * gamma)
}

/// `∫₀^∞ Λ_j(ω)/ω dω`, which equals `λ_j` for the Drude density.
pub fn spectral_sum_rule(bath: &BathSpec, site: usize) -> Result<f64> {
    let (l, g) = (bath.reorganization[site], bath.relaxation[site]);
    let f = |w: f64| if w == 0.0 { 2.0 * l / (core::f64::consts::PI * g) } else { drude(l, g, w) / w };
    let cut = 50.0 * g;
    Ok(integrate(f, 0.0, cut, 1e-14, 1e-12)? + integrate_tail(f, cut, 1e-14, 1e-12)?)
}

/// Full bath response
/// `α_j(τ) = ∫₀^∞ Λ_j(ω) [coth(ω/2k_BT) cos ωτ − i sin ωτ] dω` for `τ > 0`.
///
/// The real part diverges logarithmically at `τ = 0`, which is rejected.
pub fn response_quadrature(bath: &BathSpec, site: usize, tau: f64) -> Result<C64> {
    let (l, g, kt) = (bath.reorganization[site], bath.relaxation[site], bath.thermal_energy);
    if l == 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    if !(tau > 0.0) {
        return Err(Error::Quadrature(format!("response quadrature needs tau > 0, got {tau}")));
    }
    let re = |w: f64| {
        if w == 0.0 {
            4.0 * l * kt / (core::f64::consts::PI * g)
        } else {
            drude(l, g, w) * coth(w / (2.0 * kt)) * libm::cos(w * tau)
        }
    };
    let im = |w: f64| -drude(l, g, w) * libm::sin(w * tau);
    let half_period = core::f64::consts::PI / tau;
    // Start the tail on a whole number of half periods past 50γ.
    let cut = libm::ceil(50.0 * g / half_period).max(1.0) * half_period;
    let scale = l * g.max(kt);
    let head_re = integrate(re, 0.0, cut, 1e-13 * scale, 1e-12)?;
    let head_im = integrate(im, 0.0, cut, 1e-13 * scale, 1e-12)?;
    let tail_re = integrate_oscillatory_tail(re, cut, half_period, 1e-11 * scale)?;
    let tail_im = integrate_oscillatory_tail(im, cut, half_period, 1e-11 * scale)?;
    Ok(C64::new(head_re + tail_re, head_im + tail_im))
}
