use alloc::vec;
use alloc::vec::Vec;

use super::FockTruncation;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CsrMatrix, C64, ZERO};
use crate::math;

/// Amplitudes `Σ_k |k⟩ ⊗ |ψ_k⟩` on the site ⊗ Fock product basis, stored
/// site-major: index `k · levels + n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolaronState {
    sites: usize,
    levels: usize,
    amplitudes: Vec<C64>,
}

impl PolaronState {
    pub fn from_amplitudes(sites: usize, levels: usize, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != sites * levels {
            return Err(Error::DimensionMismatch { expected: sites * levels, found: amplitudes.len() });
        }
        Ok(Self { sites, levels, amplitudes })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    /// Number of retained Fock levels (`n_max + 1`).
    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amplitudes
    }

    pub fn amplitude(&self, site: usize, n: usize) -> C64 {
        self.amplitudes[site * self.levels + n]
    }

    pub fn norm(&self) -> f64 {
        math::sqrt(self.amplitudes.iter().map(|a| a.norm_sqr()).sum())
    }
}

/// Exciton on `start_site` with the phonon in its vacuum.
pub fn initial_state(sites: usize, trunc: FockTruncation, start_site: usize) -> Result<PolaronState> {
    if start_site >= sites {
        return Err(Error::IndexOutOfRange { index: start_site, len: sites });
    }
    let levels = trunc.levels();
    let mut amplitudes = vec![ZERO; sites * levels];
    amplitudes[start_site * levels] = C64::new(1.0, 0.0);
    Ok(PolaronState { sites, levels, amplitudes })
}

/// `P_k = Σ_n |ψ_k(n)|²`.
pub fn site_populations(state: &PolaronState) -> Vec<f64> {
    state
        .amplitudes
        .chunks(state.levels)
        .map(|block| block.iter().map(|a| a.norm_sqr()).sum())
        .collect()
}

/// `Δ = (Σ_k (k − k₀)² P_k)^{1/2}`; small negative populations (open-system
/// round-off) are kept in the sum and the result is clamped at zero.
pub fn rms_displacement(populations: &[f64], origin: usize) -> f64 {
    let second: f64 = populations
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let d = k as f64 - origin as f64;
            d * d * p
        })
        .sum();
    math::sqrt(second.max(0.0))
}

/// `⟨ψ|H|ψ⟩`. The imaginary part is discarded after checking it is round-off.
pub fn total_energy_expectation(h: &CMatrix, state: &PolaronState) -> Result<f64> {
    if h.nrows() != state.dim() || h.ncols() != state.dim() {
        return Err(Error::DimensionMismatch { expected: h.nrows(), found: state.dim() });
    }
    Ok(energy_with(&CsrMatrix::from_dense(h), state.amplitudes()))
}

pub(crate) fn energy_with(h: &CsrMatrix, amps: &[C64]) -> f64 {
    let mut hpsi = vec![ZERO; amps.len()];
    h.mul(amps, &mut hpsi);
    amps.iter().zip(&hpsi).map(|(a, b)| (a.conj() * b).re).sum()
}

/// `ρ_ph[n, n'] = Σ_k ψ_k(n) ψ_k(n')*`.
pub fn reduced_phonon_state(state: &PolaronState) -> CMatrix {
    let l = state.levels;
    let mut rho = CMatrix::from_element(l, l, ZERO);
    for block in state.amplitudes.chunks(l) {
        for n in 0..l {
            if block[n] == ZERO {
                continue;
            }
            for m in 0..l {
                rho[(n, m)] += block[n] * block[m].conj();
            }
        }
    }
    rho
}
