use alloc::vec::Vec;

use super::hierarchy::{Hierarchy, ABSENT};
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::math;
use crate::model::{BathSpec, MoleculeChain};
use crate::ode::OdeSystem;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Right-hand side of the hierarchy with the time-dependent Lamb shift:
///
/// ```text
/// dσ_n/dt = −i[H_eff(t), σ_n] − Σ_j n_j γ_j σ_n + Σ_j i[P_j, σ_{n+j}]
///           + Σ_j n_j (i c_j [P_j, σ_{n−j}] + λ_j γ_j {P_j, σ_{n−j}})
/// ```
///
/// with `P_j = |j⟩⟨j|` and `c_j = 2 λ_j k_B T`.
#[derive(Debug, Clone)]
pub struct HeomRhs<'h> {
    hierarchy: &'h Hierarchy,
    sites: usize,
    /// `Ω_j + λ_j`
    static_diagonal: Vec<f64>,
    /// `2 s_j λ_j`
    lamb_amplitude: Vec<f64>,
    gamma: Vec<f64>,
    thermal: Vec<f64>,
    dissipative: Vec<f64>,
    /// Non-zero off-diagonal couplings per row, `(column, J)`.
    hopping: Vec<Vec<(usize, f64)>>,
    /// `Σ_j n_j γ_j` per operator.
    damping: Vec<f64>,
}

impl<'h> HeomRhs<'h> {
    pub fn new(hierarchy: &'h Hierarchy, chain: &MoleculeChain, bath: &BathSpec) -> Result<Self> {
        let n = chain.len();
        if hierarchy.sites() != n || bath.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: hierarchy.sites().max(bath.len()) });
        }
        let static_diagonal = (0..n).map(|j| chain.site_energies()[j] + bath.reorganization[j]).collect();
        let lamb_amplitude = (0..n).map(|j| 2.0 * bath.scaling[j] * bath.reorganization[j]).collect();
        let thermal = bath.reorganization.iter().map(|l| 2.0 * l * bath.thermal_energy).collect();
        let dissipative = bath.reorganization.iter().zip(&bath.relaxation).map(|(l, g)| l * g).collect();
        let hopping = (0..n)
            .map(|a| (0..n).filter(|&c| c != a && chain.coupling(a, c) != 0.0).map(|c| (c, chain.coupling(a, c))).collect())
            .collect();
        let damping = hierarchy
            .indices()
            .iter()
            .map(|idx| idx.0.iter().zip(&bath.relaxation).map(|(k, g)| *k as f64 * g).sum())
            .collect();
        Ok(Self {
            hierarchy,
            sites: n,
            static_diagonal,
            lamb_amplitude,
            gamma: bath.relaxation.clone(),
            thermal,
            dissipative,
            hopping,
            damping,
        })
    }

    pub fn hierarchy(&self) -> &Hierarchy {
        self.hierarchy
    }

    /// Diagonal of `H_eff(t)`.
    pub fn effective_diagonal(&self, t: f64, out: &mut [f64]) {
        for j in 0..self.sites {
            out[j] = self.static_diagonal[j] + self.lamb_amplitude[j] * math::exp(-self.gamma[j] * t);
        }
    }

    fn operator_derivative(&self, k: usize, diag: &[f64], y: &[C64], out: &mut [C64]) {
        let n = self.sites;
        let block = n * n;
        let own = &y[k * block..(k + 1) * block];
        let damping = self.damping[k];
        for a in 0..n {
            for b in 0..n {
                // −i[H, σ] − (Σ n_j γ_j) σ, with −i·z written out as (z.im, −z.re).
                let s = own[a * n + b];
                let w = diag[b] - diag[a];
                let mut re = -damping * s.re - w * s.im;
                let mut im = -damping * s.im + w * s.re;
                for &(c, jac) in &self.hopping[a] {
                    let z = own[c * n + b];
                    re += jac * z.im;
                    im -= jac * z.re;
                }
                for &(c, jcb) in &self.hopping[b] {
                    let z = own[a * n + c];
                    re -= jcb * z.im;
                    im += jcb * z.re;
                }
                out[a * n + b] = C64::new(re, im);
            }
        }
        let index = &self.hierarchy.index(k).0;
        for j in 0..n {
            let p = self.hierarchy.plus(k, j);
            if p != ABSENT {
                let up = &y[p * block..(p + 1) * block];
                // i[P_j, σ]: row j gains iσ, column j loses it, (j, j) cancels.
                for c in 0..n {
                    if c != j {
                        let r = up[j * n + c];
                        out[j * n + c] += C64::new(-r.im, r.re);
                        let q = up[c * n + j];
                        out[c * n + j] += C64::new(q.im, -q.re);
                    }
                }
            }
            let nj = index[j];
            if nj > 0 {
                let m = self.hierarchy.minus(k, j);
                let down = &y[m * block..(m + 1) * block];
                let weight = nj as f64;
                let row = C64::new(self.dissipative[j] * weight, self.thermal[j] * weight);
                let col = row.conj();
                for c in 0..n {
                    if c != j {
                        out[j * n + c] += down[j * n + c] * row;
                        out[c * n + j] += down[c * n + j] * col;
                    }
                }
                out[j * n + j] += down[j * n + j] * (2.0 * row.re);
            }
        }
    }
}

impl OdeSystem for HeomRhs<'_> {
    fn dim(&self) -> usize {
        self.hierarchy.len() * self.sites * self.sites
    }

    fn rhs(&self, t: f64, y: &[C64], dy: &mut [C64]) {
        let mut diag = alloc::vec![0.0; self.sites];
        self.effective_diagonal(t, &mut diag);
        let block = self.sites * self.sites;
        #[cfg(feature = "parallel")]
        dy.par_chunks_mut(block).enumerate().for_each(|(k, out)| self.operator_derivative(k, &diag, y, out));
        #[cfg(not(feature = "parallel"))]
        dy.chunks_mut(block).enumerate().for_each(|(k, out)| self.operator_derivative(k, &diag, y, out));
    }
}
