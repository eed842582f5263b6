use alloc::vec::Vec;

use super::propagate::{ChebyshevPropagator, Workspace};
use super::state::{energy_with, reduced_phonon_state, rms_displacement, site_populations, PolaronState};
use super::{initial_state, FockTruncation};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CsrMatrix};
use crate::model::{build_polaron_hamiltonian_sparse, MoleculeChain, SharedMode};
use crate::ode::output_grid;

#[derive(Debug, Clone, PartialEq)]
pub struct EvolveOptions {
    pub tmax: f64,
    pub dt_out: f64,
    /// Reference site `k₀` for the RMS displacement.
    pub origin_site: usize,
    /// Output indices (into the time grid, 0 = initial state) at which the
    /// reduced phonon state is stored for phase-space rendering.
    pub frame_indices: Vec<usize>,
}

impl EvolveOptions {
    pub fn new(tmax: f64, dt_out: f64, origin_site: usize) -> Self {
        Self { tmax, dt_out, origin_site, frame_indices: Vec::new() }
    }
}

/// Reduced phonon state captured at one output time.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub index: usize,
    pub time: f64,
    pub phonon_state: CMatrix,
}

/// Sampled closed-system trajectory. Row `i` of every series belongs to
/// `times[i]`; `times[0] = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryResult {
    pub times: Vec<f64>,
    pub populations: Vec<Vec<f64>>,
    pub rms: Vec<f64>,
    pub energy: Vec<f64>,
    pub norm: Vec<f64>,
    pub frames: Vec<Frame>,
    pub final_state: PolaronState,
}

impl TrajectoryResult {
    /// `P_site(t)` over the whole grid.
    pub fn population_series(&self, site: usize) -> Vec<f64> {
        self.populations.iter().map(|p| p[site]).collect()
    }

    pub fn max_norm_drift(&self) -> f64 {
        self.norm.iter().fold(0.0_f64, |acc, n| acc.max((n - 1.0).abs()))
    }

    /// Largest `|E(t) − E(0)| / max(|E(0)|, 1)`.
    pub fn max_relative_energy_drift(&self) -> f64 {
        let e0 = self.energy[0];
        let scale = e0.abs().max(1.0);
        self.energy.iter().fold(0.0_f64, |acc, e| acc.max((e - e0).abs() / scale))
    }
}

/// Propagates `psi0` under the time-independent `h`, sampling every `dt_out`.
///
/// Each output step applies a Chebyshev expansion of `exp(−iH dt_out)`
/// converged to round-off, so the sampled states carry no step-size error.
pub fn evolve_closed(h: &CMatrix, psi0: &PolaronState, opts: &EvolveOptions) -> Result<TrajectoryResult> {
    if h.nrows() != psi0.dim() || h.ncols() != psi0.dim() {
        return Err(Error::DimensionMismatch { expected: h.nrows(), found: psi0.dim() });
    }
    evolve_closed_sparse(&CsrMatrix::from_dense(h), psi0, opts)
}

/// [`evolve_closed`] for a Hamiltonian already in sparse form.
pub fn evolve_closed_sparse(csr: &CsrMatrix, psi0: &PolaronState, opts: &EvolveOptions) -> Result<TrajectoryResult> {
    if csr.dim() != psi0.dim() {
        return Err(Error::DimensionMismatch { expected: csr.dim(), found: psi0.dim() });
    }
    if !(opts.tmax > 0.0) || !(opts.dt_out > 0.0) || !opts.tmax.is_finite() {
        return Err(Error::InvalidParameter(alloc::format!(
            "tmax and dt_out must be positive, got {} and {}",
            opts.tmax,
            opts.dt_out
        )));
    }
    if opts.origin_site >= psi0.sites() {
        return Err(Error::IndexOutOfRange { index: opts.origin_site, len: psi0.sites() });
    }
    let grid = output_grid(opts.tmax, opts.dt_out);
    let mut times = Vec::with_capacity(grid.len() + 1);
    let mut populations = Vec::with_capacity(grid.len() + 1);
    let mut rms = Vec::with_capacity(grid.len() + 1);
    let mut energy = Vec::with_capacity(grid.len() + 1);
    let mut norm = Vec::with_capacity(grid.len() + 1);
    let mut frames = Vec::new();

    let mut psi = psi0.clone();
    let mut record = |t: f64, psi: &PolaronState, idx: usize| -> Result<()> {
        let p = site_populations(psi);
        if p.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite { t });
        }
        rms.push(rms_displacement(&p, opts.origin_site));
        norm.push(psi.norm());
        energy.push(energy_with(csr, psi.amplitudes()));
        populations.push(p);
        times.push(t);
        if opts.frame_indices.contains(&idx) {
            frames.push(Frame { index: idx, time: t, phonon_state: reduced_phonon_state(psi) });
        }
        Ok(())
    };
    record(0.0, &psi, 0)?;

    let mut work = Workspace::default();
    let mut step_prop: Option<(f64, ChebyshevPropagator)> = None;
    let mut t = 0.0;
    for (i, &target) in grid.iter().enumerate() {
        let dt = target - t;
        // The grid is uniform except possibly for the final point.
        let reuse = matches!(&step_prop, Some((s, _)) if (s - dt).abs() <= 1e-14 * dt.max(1.0));
        if !reuse {
            step_prop = Some((dt, ChebyshevPropagator::new(csr.clone(), dt)));
        }
        let (_, prop) = step_prop.as_ref().expect("propagator initialised above");
        prop.apply(psi.amplitudes_mut(), &mut work);
        t = target;
        record(t, &psi, i + 1)?;
    }

    Ok(TrajectoryResult { times, populations, rms, energy, norm, frames, final_state: psi })
}

/// Outcome of the Fock-truncation escalation.
#[derive(Debug, Clone, PartialEq)]
pub struct FockConvergence {
    pub accepted_n_max: usize,
    /// Largest `|P_k(t; n_max) − P_k(t; 2 n_max)|` at the accepted cutoff.
    pub deviation: f64,
    pub attempts: Vec<(usize, f64)>,
}

pub const FOCK_TOLERANCE: f64 = 1e-6;
pub const MAX_DIM: usize = 20_000;

/// Runs the closed system at `n_max` and `2 n_max`, growing `n_max` by 1.5×
/// until every population changes by less than [`FOCK_TOLERANCE`].
pub fn evolve_converged(
    chain: &MoleculeChain,
    mode: &SharedMode,
    trunc: FockTruncation,
    start_site: usize,
    opts: &EvolveOptions,
) -> Result<(TrajectoryResult, FockConvergence)> {
    if trunc.n_max >= trunc.escalation_cap {
        return Err(Error::InvalidParameter(alloc::format!(
            "n_max {} must be below the escalation cap {}",
            trunc.n_max,
            trunc.escalation_cap
        )));
    }
    let run = |n_max: usize| -> Result<TrajectoryResult> {
        let t = FockTruncation { n_max, escalation_cap: trunc.escalation_cap };
        let h = build_polaron_hamiltonian_sparse(chain, mode, n_max, MAX_DIM)?;
        let psi0 = initial_state(chain.len(), t, start_site)?;
        evolve_closed_sparse(&h, &psi0, opts)
    };
    let mut attempts = Vec::new();
    let mut n_max = trunc.n_max;
    let mut coarse = run(n_max)?;
    loop {
        let fine = run(2 * n_max)?;
        let deviation = coarse
            .populations
            .iter()
            .zip(&fine.populations)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0_f64, f64::max);
        attempts.push((n_max, deviation));
        if deviation < FOCK_TOLERANCE {
            return Ok((coarse, FockConvergence { accepted_n_max: n_max, deviation, attempts }));
        }
        let next = (n_max * 3).div_ceil(2);
        if next >= trunc.escalation_cap {
            return Err(Error::TruncationNotConverged { n_max, cap: trunc.escalation_cap, deviation });
        }
        n_max = next;
        coarse = run(n_max)?;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_polaron_hamiltonian, MoleculeChain};
    use alloc::vec;

    #[test]
    fn resonant_dimer_follows_rabi_formula() {
        let chain = MoleculeChain::linear(vec![0.0, 0.0], 1.0);
        let mode = SharedMode::uncoupled(1.0, 2);
        let h = build_polaron_hamiltonian(&chain, &mode, 4, 1000).unwrap();
        let psi0 = initial_state(2, FockTruncation::new(4), 0).unwrap();
        let tq = core::f64::consts::FRAC_PI_2;
        let res = evolve_closed(&h, &psi0, &EvolveOptions::new(tq, tq / 40.0, 0)).unwrap();
        for (t, p) in res.times.iter().zip(&res.populations) {
            let s = t.sin();
            assert!((p[1] - s * s).abs() < 1e-12);
        }
        assert!((res.populations.last().unwrap()[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let chain = MoleculeChain::linear(vec![0.0, 0.0], 1.0);
        let mode = SharedMode::uncoupled(1.0, 2);
        let h = build_polaron_hamiltonian(&chain, &mode, 4, 1000).unwrap();
        let psi0 = initial_state(2, FockTruncation::new(3), 0).unwrap();
        assert!(matches!(
            evolve_closed(&h, &psi0, &EvolveOptions::new(1.0, 0.1, 0)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn frames_are_captured() {
        let chain = MoleculeChain::linear(vec![2.0, 0.0], 1.0);
        let mode = SharedMode::new(1.0, vec![1.0, 2.0]);
        let h = build_polaron_hamiltonian(&chain, &mode, 10, 1000).unwrap();
        let psi0 = initial_state(2, FockTruncation::new(10), 0).unwrap();
        let mut opts = EvolveOptions::new(1.0, 0.25, 0);
        opts.frame_indices = vec![0, 4];
        let res = evolve_closed(&h, &psi0, &opts).unwrap();
        assert_eq!(res.times.len(), 5);
        assert_eq!(res.frames.len(), 2);
        assert_eq!(res.frames[1].time, 1.0);
        assert!((res.frames[1].phonon_state.trace().re - 1.0).abs() < 1e-12);
    }
}
