//! Chebyshev expansion of `exp(−iHτ)` for a fixed step `τ`.
//!
//! With the spectrum mapped onto `[−1, 1]` by `H̃ = (H − b)/a`,
//!
//! ```text
//! exp(−iHτ) = e^{−ibτ} Σ_k c_k (−i)^k J_k(aτ) T_k(H̃),   c_0 = 1, c_k = 2,
//! ```
//!
//! and the series is cut where the Bessel coefficients fall below `1e−17`.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{CsrMatrix, C64, ZERO};
use crate::math;

#[derive(Debug, Clone)]
pub struct ChebyshevPropagator {
    h: CsrMatrix,
    centre: f64,
    half_width: f64,
    phase: C64,
    coefficients: Vec<C64>,
}

const CUTOFF: f64 = 1e-17;

impl ChebyshevPropagator {
    pub fn new(h: CsrMatrix, step: f64) -> Self {
        let (lo, hi) = h.spectral_bounds();
        let centre = 0.5 * (lo + hi);
        // Pad the interval so round-off never pushes H̃ outside [−1, 1].
        let half_width = (0.5 * (hi - lo)).max(1e-12) * 1.01;
        let x = half_width * step;
        let bessel = bessel_j_series(x);
        let mut coefficients = Vec::with_capacity(bessel.len());
        // (−i)^k cycles with period four.
        let cycle = [C64::new(1.0, 0.0), C64::new(0.0, -1.0), C64::new(-1.0, 0.0), C64::new(0.0, 1.0)];
        for (k, jk) in bessel.iter().enumerate() {
            let weight = if k == 0 { 1.0 } else { 2.0 };
            coefficients.push(cycle[k % 4] * (weight * jk));
        }
        let phase = C64::new(0.0, -centre * step).exp();
        Self { h, centre, half_width, phase, coefficients }
    }

    pub fn dim(&self) -> usize {
        self.h.dim()
    }

    pub fn order(&self) -> usize {
        self.coefficients.len()
    }

    pub fn hamiltonian(&self) -> &CsrMatrix {
        &self.h
    }

    /// Advances `psi` by one step in place.
    pub fn apply(&self, psi: &mut [C64], work: &mut Workspace) {
        let n = psi.len();
        work.ensure(n);
        let Workspace { prev, cur, next, acc } = work;
        let scale = 1.0 / self.half_width;
        prev.copy_from_slice(psi);
        for i in 0..n {
            acc[i] = prev[i] * self.coefficients[0];
        }
        if self.coefficients.len() > 1 {
            self.h.shifted_mul(prev, self.centre, scale, cur);
            for i in 0..n {
                acc[i] += cur[i] * self.coefficients[1];
            }
        }
        for c in &self.coefficients[2.min(self.coefficients.len())..] {
            self.h.shifted_mul(cur, self.centre, 2.0 * scale, next);
            for i in 0..n {
                next[i] -= prev[i];
                acc[i] += next[i] * *c;
            }
            core::mem::swap(prev, cur);
            core::mem::swap(cur, next);
        }
        for i in 0..n {
            psi[i] = acc[i] * self.phase;
        }
    }
}

/// Scratch vectors for [`ChebyshevPropagator::apply`].
#[derive(Debug, Default, Clone)]
pub struct Workspace {
    prev: Vec<C64>,
    cur: Vec<C64>,
    next: Vec<C64>,
    acc: Vec<C64>,
}

impl Workspace {
    fn ensure(&mut self, n: usize) {
        for v in [&mut self.prev, &mut self.cur, &mut self.next, &mut self.acc] {
            if v.len() != n {
                *v = vec![ZERO; n];
            }
        }
    }
}

/// `J_0(x) … J_K(x)` by Miller's backward recurrence, normalised with
/// `J_0 + 2 Σ J_{2k} = 1`, truncated once the tail is below [`CUTOFF`].
pub(crate) fn bessel_j_series(x: f64) -> Vec<f64> {
    if x == 0.0 {
        return vec![1.0];
    }
    let x = x.abs();
    // Start far enough beyond the turning point k ≈ x.
    let start = (x + 10.0 * math::cbrt(x) + 40.0) as usize;
    let start = start + (start % 2);
    let mut values = vec![0.0; start + 2];
    values[start + 1] = 0.0;
    values[start] = 1e-300;
    for k in (1..=start).rev() {
        values[k - 1] = 2.0 * k as f64 / x * values[k] - values[k + 1];
        if values[k - 1].abs() > 1e250 {
            for v in values[k - 1..].iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    let mut norm = values[0];
    let mut k = 2;
    while k <= start {
        norm += 2.0 * values[k];
        k += 2;
    }
    for v in values.iter_mut() {
        *v /= norm;
    }
    // Keep terms until the remaining ones are negligible and past the turning point.
    let mut last = 0;
    for (k, v) in values.iter().enumerate() {
        if v.abs() > CUTOFF || (k as f64) < x {
            last = k;
        }
    }
    values.truncate(last + 1);
    values
}
