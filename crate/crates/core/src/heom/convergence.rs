use alloc::vec::Vec;

use super::evolve::{heom_evolve, HeomOptions, HeomResult};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::model::{BathSpec, MoleculeChain};

pub const CONVERGENCE_THRESHOLD: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub cutoffs: Vec<usize>,
    /// Largest population difference between `cutoffs[i]` and `cutoffs[i + 1]`.
    pub deviations: Vec<f64>,
    /// First cutoff whose deviation from the next one is below the threshold.
    pub accepted: Option<usize>,
    pub threshold: f64,
}

/// Largest `|P_k(t) − P'_k(t)|` over two runs on the same grid.
pub fn max_population_deviation(a: &HeomResult, b: &HeomResult) -> f64 {
    a.populations
        .iter()
        .zip(&b.populations)
        .flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).abs()))
        .fold(0.0_f64, f64::max)
}

/// Runs every cutoff in `cutoffs` and compares successive runs.
pub fn convergence_scan(
    chain: &MoleculeChain,
    bath: &BathSpec,
    rho0: &CMatrix,
    opts: &HeomOptions,
    cutoffs: &[usize],
) -> Result<(ConvergenceReport, Vec<HeomResult>)> {
    if cutoffs.len() < 2 {
        return Err(Error::InvalidParameter(alloc::format!("need at least two cutoffs, got {}", cutoffs.len())));
    }
    let mut runs = Vec::with_capacity(cutoffs.len());
    for &c in cutoffs {
        let mut o = opts.clone();
        o.cutoff = c;
        runs.push(heom_evolve(chain, bath, rho0, &o)?);
    }
    let deviations: Vec<f64> = runs.windows(2).map(|w| max_population_deviation(&w[0], &w[1])).collect();
    let accepted = deviations.iter().position(|d| *d < CONVERGENCE_THRESHOLD).map(|i| cutoffs[i]);
    Ok((ConvergenceReport { cutoffs: cutoffs.to_vec(), deviations, accepted, threshold: CONVERGENCE_THRESHOLD }, runs))
}

/// Smallest cutoff `c ≥ start` whose populations differ from cutoff `c + step`
/// by less than the threshold, trying at most up to `max_cutoff`. Returns the
/// accepted run and the report of every comparison made.
pub fn find_cutoff(
    chain: &MoleculeChain,
    bath: &BathSpec,
    rho0: &CMatrix,
    opts: &HeomOptions,
    start: usize,
    step: usize,
    max_cutoff: usize,
) -> Result<(HeomResult, ConvergenceReport)> {
    let step = step.max(1);
    let run = |c: usize| {
        let mut o = opts.clone();
        o.cutoff = c;
        heom_evolve(chain, bath, rho0, &o)
    };
    let mut cutoffs = alloc::vec![start];
    let mut deviations = Vec::new();
    let mut current = run(start)?;
    let mut c = start;
    while c + step <= max_cutoff {
        let next = run(c + step)?;
        let d = max_population_deviation(&current, &next);
        cutoffs.push(c + step);
        deviations.push(d);
        if d < CONVERGENCE_THRESHOLD {
            let report = ConvergenceReport { cutoffs, deviations, accepted: Some(c), threshold: CONVERGENCE_THRESHOLD };
            return Ok((current, report));
        }
        c += step;
        current = next;
    }
    let report = ConvergenceReport { cutoffs, deviations, accepted: None, threshold: CONVERGENCE_THRESHOLD };
    Ok((current, report))
}
