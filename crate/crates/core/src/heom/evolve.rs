use alloc::format;
use alloc::vec::Vec;

use super::hierarchy::{enumerate_hierarchy, operator_from_flat, AdoSet, DEFAULT_MAX_ADOS};
use super::rhs::HeomRhs;
use crate::closed::rms_displacement;
use crate::error::{Error, Result};
use crate::linalg::{hermiticity_error, min_eigenvalue, CMatrix};
use crate::model::{validate_chain, BathSpec, MoleculeChain, Warning};
use crate::ode::{integrate, output_grid, Method, StepStats, Tolerances};

#[derive(Debug, Clone, PartialEq)]
pub struct HeomOptions {
    pub cutoff: usize,
    pub tmax: f64,
    pub dt_out: f64,
    pub method: Method,
    /// Reference site `k₀` for the RMS displacement.
    pub origin_site: usize,
    pub max_ados: usize,
    pub max_steps: usize,
    /// Smallest eigenvalue of `ρ_e` tolerated before aborting.
    pub psd_tolerance: f64,
}

impl HeomOptions {
    pub const DEFAULT_CUTOFF: usize = 6;
    pub const PSD_TOLERANCE: f64 = 1e-5;

    pub fn new(cutoff: usize, tmax: f64, dt_out: f64) -> Self {
        Self {
            cutoff,
            tmax,
            dt_out,
            method: Method::Adaptive(Tolerances::default()),
            origin_site: 0,
            max_ados: DEFAULT_MAX_ADOS,
            max_steps: 10_000_000,
            psd_tolerance: Self::PSD_TOLERANCE,
        }
    }
}

/// Reduced electronic dynamics sampled on the output grid; `times[0] = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeomResult {
    pub times: Vec<f64>,
    pub rho: Vec<CMatrix>,
    pub populations: Vec<Vec<f64>>,
    pub rms: Vec<f64>,
    /// `|ρ_jk|` for `j < k`, row-major over the upper triangle.
    pub coherences: Vec<Vec<f64>>,
    pub trace: Vec<f64>,
    pub cutoff: usize,
    pub ado_count: usize,
    pub method: Method,
    pub stats: StepStats,
    pub warnings: Vec<Warning>,
    pub max_hermiticity_error: f64,
    pub min_eigenvalue: f64,
}

impl HeomResult {
    pub fn population_series(&self, site: usize) -> Vec<f64> {
        self.populations.iter().map(|p| p[site]).collect()
    }

    pub fn max_trace_drift(&self) -> f64 {
        self.trace.iter().fold(0.0_f64, |acc, t| acc.max((t - 1.0).abs()))
    }

    /// Index pairs matching the columns of `coherences`.
    pub fn coherence_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.rho.first().map_or(0, |r| r.nrows());
        (0..n).flat_map(|j| (j + 1..n).map(move |k| (j, k))).collect()
    }
}

const INITIAL_TOLERANCE: f64 = 1e-10;

/// Checks that `rho` is a density matrix: Hermitian, unit trace, PSD.
pub fn validate_density_matrix(rho: &CMatrix) -> Result<()> {
    if rho.nrows() != rho.ncols() || rho.nrows() == 0 {
        return Err(Error::InvalidParameter(format!("density matrix must be square, got {}x{}", rho.nrows(), rho.ncols())));
    }
    let herm = hermiticity_error(rho);
    if herm > INITIAL_TOLERANCE {
        return Err(Error::InvalidParameter(format!("initial density matrix is not Hermitian (error {herm:e})")));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > INITIAL_TOLERANCE || tr.im.abs() > INITIAL_TOLERANCE {
        return Err(Error::InvalidParameter(format!("initial density matrix has trace {tr}")));
    }
    let min = min_eigenvalue(rho);
    if min < -INITIAL_TOLERANCE {
        return Err(Error::InvalidParameter(format!("initial density matrix has eigenvalue {min:e}")));
    }
    Ok(())
}

/// Integrates the hierarchy from `σ(0) = ρ_e(0)` with every other operator
/// zero.
pub fn heom_evolve(chain: &MoleculeChain, bath: &BathSpec, rho0: &CMatrix, opts: &HeomOptions) -> Result<HeomResult> {
    validate_chain(chain).into_result()?;
    bath.validate(chain.len()).into_result()?;
    if rho0.nrows() != chain.len() {
        return Err(Error::DimensionMismatch { expected: chain.len(), found: rho0.nrows() });
    }
    validate_density_matrix(rho0)?;
    if !(opts.tmax > 0.0) || !(opts.dt_out > 0.0) || !opts.tmax.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "tmax and dt_out must be positive, got {} and {}",
            opts.tmax, opts.dt_out
        )));
    }
    if opts.origin_site >= chain.len() {
        return Err(Error::IndexOutOfRange { index: opts.origin_site, len: chain.len() });
    }
    let n = chain.len();
    let hierarchy = enumerate_hierarchy(n, opts.cutoff, opts.max_ados)?;
    let rhs = HeomRhs::new(&hierarchy, chain, bath)?;
    let ados = AdoSet::from_initial(&hierarchy, rho0)?;
    let grid = output_grid(opts.tmax, opts.dt_out);

    let mut times = Vec::with_capacity(grid.len() + 1);
    let mut rho = Vec::with_capacity(grid.len() + 1);
    let mut populations = Vec::with_capacity(grid.len() + 1);
    let mut rms = Vec::with_capacity(grid.len() + 1);
    let mut coherences = Vec::with_capacity(grid.len() + 1);
    let mut trace = Vec::with_capacity(grid.len() + 1);
    let mut max_herm: f64 = 0.0;
    let mut min_eig = f64::INFINITY;

    let observe = |t: f64, y: &[crate::linalg::C64]| -> Result<()> {
        let r = operator_from_flat(y, n, 0);
        if r.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite { t });
        }
        let herm = hermiticity_error(&r);
        // Eigenvalues of the Hermitian part.
        let sym = (&r + r.adjoint()) * crate::linalg::C64::new(0.5, 0.0);
        let lowest = min_eigenvalue(&sym);
        if lowest < -opts.psd_tolerance {
            return Err(Error::NonPhysical { t, detail: format!("smallest eigenvalue {lowest:e} below {:e}", -opts.psd_tolerance) });
        }
        max_herm = max_herm.max(herm);
        min_eig = min_eig.min(lowest);
        let p: Vec<f64> = (0..n).map(|j| r[(j, j)].re).collect();
        rms.push(rms_displacement(&p, opts.origin_site));
        trace.push(p.iter().sum());
        populations.push(p);
        coherences.push((0..n).flat_map(|j| (j + 1..n).map(move |k| (j, k))).map(|(j, k)| r[(j, k)].norm()).collect());
        rho.push(r);
        times.push(t);
        Ok(())
    };
    let stats = integrate(&rhs, 0.0, ados.as_slice(), &grid, opts.method, opts.max_steps, observe)?;

    Ok(HeomResult {
        times,
        rho,
        populations,
        rms,
        coherences,
        trace,
        cutoff: opts.cutoff,
        ado_count: hierarchy.len(),
        method: opts.method,
        stats,
        warnings: bath.warnings(),
        max_hermiticity_error: max_herm,
        min_eigenvalue: min_eig,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{C64, ZERO};
    use alloc::vec;

    fn pure(n: usize, site: usize) -> CMatrix {
        let mut r = CMatrix::from_element(n, n, ZERO);
        r[(site, site)] = C64::new(1.0, 0.0);
        r
    }

    #[test]
    fn bath_free_dimer_oscillates() {
        let chain = MoleculeChain::linear(vec![0.0, 0.0], 1.0);
        let bath = BathSpec::local(2, 0.0, 1.0, 1.0);
        let res = heom_evolve(&chain, &bath, &pure(2, 0), &HeomOptions::new(3, 3.0, 0.1)).unwrap();
        for (t, p) in res.times.iter().zip(&res.populations) {
            assert!((p[1] - t.sin().powi(2)).abs() < 1e-6);
        }
        assert_eq!(res.ado_count, 6);
    }

    #[test]
    fn invalid_initial_states_are_rejected() {
        let chain = MoleculeChain::linear(vec![0.0, 0.0], 1.0);
        let bath = BathSpec::local(2, 0.1, 1.0, 1.0);
        let opts = HeomOptions::new(3, 1.0, 0.1);
        let mut bad = pure(2, 0);
        bad[(0, 0)] = C64::new(0.9, 0.0);
        assert!(heom_evolve(&chain, &bath, &bad, &opts).is_err());
        let mut skew = pure(2, 0);
        skew[(0, 1)] = C64::new(0.1, 0.0);
        assert!(heom_evolve(&chain, &bath, &skew, &opts).is_err());
        let neg = CMatrix::from_diagonal(&crate::linalg::CVector::from_vec(vec![C64::new(1.2, 0.0), C64::new(-0.2, 0.0)]));
        assert!(heom_evolve(&chain, &bath, &neg, &opts).is_err());
    }

    #[test]
    fn damped_dimer_conserves_trace() {
        let chain = MoleculeChain::linear(vec![1.0, 0.0], 1.0);
        let bath = BathSpec::local(2, 0.3, 0.5, 1.5).with_scaling(vec![1.0, 2.0]);
        let res = heom_evolve(&chain, &bath, &pure(2, 0), &HeomOptions::new(5, 10.0, 0.5)).unwrap();
        assert!(res.max_trace_drift() < 1e-8);
        assert!(res.max_hermiticity_error < 1e-8);
        assert!(res.warnings.is_empty());
        assert_eq!(res.coherence_pairs(), vec![(0, 1)]);
    }
}
