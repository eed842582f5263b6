//! Wigner function of the phonon mode in dimensionless `(Q, P)` coordinates,
//! where `b = (Q + iP)/√2`. The vacuum is `W = e^{−(Q² + P²)}/π`.
//!
//! The Fock-basis sum `Σ ρ_mn W_mn(Q, P)` is evaluated with the normalised
//! Laguerre recurrence, which stays finite for hundreds of levels.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};
use crate::math;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Rectangular lattice of sample points.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseGrid {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
}

impl PhaseGrid {
    pub const DEFAULT_POINTS: usize = 201;
    pub const DEFAULT_EXTENT: f64 = 8.0;

    /// `points × points` grid over `[−extent, extent]²`.
    pub fn symmetric(extent: f64, points: usize) -> Self {
        let axis: Vec<f64> = if points < 2 {
            vec![0.0]
        } else {
            (0..points).map(|k| -extent + 2.0 * extent * k as f64 / (points - 1) as f64).collect()
        };
        Self { q: axis.clone(), p: axis }
    }

    /// Smallest symmetric extent recommended for `levels` Fock states.
    pub fn recommended_extent(levels: usize) -> f64 {
        math::sqrt(2.0 * levels.saturating_sub(1) as f64) + 2.0
    }
}

impl Default for PhaseGrid {
    fn default() -> Self {
        Self::symmetric(Self::DEFAULT_EXTENT, Self::DEFAULT_POINTS)
    }
}

/// Sampled Wigner function. `values[i * p.len() + k]` is `W(q[i], p[k])`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerField {
    pub grid: PhaseGrid,
    pub values: Vec<f64>,
    /// Trapezoidal `∫∫ W dQ dP`.
    pub normalization: f64,
}

impl WignerField {
    pub fn at(&self, qi: usize, pi: usize) -> f64 {
        self.values[qi * self.grid.p.len() + pi]
    }
}

pub const NORMALIZATION_TOLERANCE: f64 = 1e-3;

/// Evaluates `W` for the density matrix `rho` on `grid`.
///
/// Fails with [`Error::GridTooSmall`] when the grid misses a visible part of
/// the distribution, detected as `|∫∫W − tr ρ| > 1e−3`.
pub fn wigner_function(rho: &CMatrix, grid: &PhaseGrid) -> Result<WignerField> {
    let levels = effective_levels(rho);
    let eval = |q: f64| -> Vec<f64> { grid.p.iter().map(|&p| wigner_point(rho, levels, q, p)).collect() };
    #[cfg(feature = "parallel")]
    let rows: Vec<Vec<f64>> = grid.q.par_iter().map(|&q| eval(q)).collect();
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<Vec<f64>> = grid.q.iter().map(|&q| eval(q)).collect();
    let values: Vec<f64> = rows.into_iter().flatten().collect();

    let normalization = trapezoid_2d(&grid.q, &grid.p, &values);
    let trace = rho.trace().re;
    if (normalization - trace).abs() > NORMALIZATION_TOLERANCE {
        return Err(Error::GridTooSmall { normalization, trace });
    }
    Ok(WignerField { grid: grid.clone(), values, normalization })
}

// Drop trailing Fock levels that carry no weight.
fn effective_levels(rho: &CMatrix) -> usize {
    let n = rho.nrows();
    let mut tail = 0.0;
    for k in (0..n).rev() {
        tail += rho[(k, k)].re.abs();
        if tail > 1e-30 {
            return k + 1;
        }
    }
    1
}

fn wigner_point(rho: &CMatrix, levels: usize, q: f64, p: f64) -> f64 {
    // Normalised functions w_mn = W_|m⟩⟨n| · π, built column by column.
    let a = C64::new(q, p) * core::f64::consts::FRAC_1_SQRT_2;
    let two_a = a * 2.0;
    let two_a_conj = two_a.conj();
    let mut w = vec![C64::new(0.0, 0.0); levels];
    w[0] = C64::new(math::exp(-2.0 * a.norm_sqr()), 0.0);
    let mut total = rho[(0, 0)].re * w[0].re;
    for n in 1..levels {
        w[n] = two_a * w[n - 1] / math::sqrt(n as f64);
        total += 2.0 * (rho[(0, n)] * w[n]).re;
    }
    for m in 1..levels {
        let mut temp = w[m];
        let sm = math::sqrt(m as f64);
        w[m] = (two_a_conj * temp - w[m - 1] * sm) / sm;
        total += (rho[(m, m)] * w[m]).re;
        for n in m + 1..levels {
            let next = (two_a * w[n - 1] - temp * sm) / math::sqrt(n as f64);
            temp = w[n];
            w[n] = next;
            total += 2.0 * (rho[(m, n)] * w[n]).re;
        }
    }
    total / core::f64::consts::PI
}

fn trapezoid_2d(q: &[f64], p: &[f64], values: &[f64]) -> f64 {
    if q.len() < 2 || p.len() < 2 {
        return 0.0;
    }
    let weights = |axis: &[f64]| -> Vec<f64> {
        let mut w = vec![0.0; axis.len()];
        for k in 0..axis.len() - 1 {
            let h = axis[k + 1] - axis[k];
            w[k] += 0.5 * h;
            w[k + 1] += 0.5 * h;
        }
        w
    };
    let (wq, wp) = (weights(q), weights(p));
    let mut sum = 0.0;
    for (i, a) in wq.iter().enumerate() {
        for (k, b) in wp.iter().enumerate() {
            sum += a * b * values[i * p.len() + k];
        }
    }
    sum
}
