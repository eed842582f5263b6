//! Executes a [`RunConfig`] with the core propagators.

use std::fmt;

use dret_core::closed::{evolve_converged, wigner_function, EvolveOptions, FockConvergence, PhaseGrid, TrajectoryResult, WignerField};
use dret_core::heom::{find_cutoff, heom_evolve, ConvergenceReport, HeomOptions, HeomResult};
use dret_core::{CMatrix, Error, C64};

use crate::config::{Regime, RunConfig};

#[derive(Debug, Clone, PartialEq)]
pub enum RunError {
    Validation(String),
    Numeric(String),
}

impl RunError {
    pub fn kind(&self) -> &'static str {
        match self {
            RunError::Validation(_) => "validation",
            RunError::Numeric(_) => "numeric",
        }
    }

    pub fn message(&self) -> &str {
        match self {
            RunError::Validation(m) | RunError::Numeric(m) => m,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} error: {}", self.kind(), self.message())
    }
}

impl std::error::Error for RunError {}

fn numeric(context: &str) -> impl Fn(Error) -> RunError + '_ {
    move |e| match e {
        Error::InvalidParameter(_) | Error::IndexOutOfRange { .. } | Error::DimensionMismatch { .. } => {
            RunError::Validation(format!("{context}: {e}"))
        }
        _ => RunError::Numeric(format!("{context}: {e}")),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WignerFrame {
    pub index: usize,
    pub time: f64,
    pub field: WignerField,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosedRun {
    pub trajectory: TrajectoryResult,
    pub convergence: FockConvergence,
    pub frames: Vec<WignerFrame>,
    /// Half-width actually used for the Wigner grid.
    pub wigner_extent: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeomRun {
    pub result: HeomResult,
    /// Present when the depth was found by the convergence search.
    pub convergence: Option<ConvergenceReport>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub relaxation: f64,
    pub run: HeomRun,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Closed(ClosedRun),
    Heom(HeomRun),
    Sweep(Vec<SweepPoint>),
}

/// Output indices of `frames` snapshots spread evenly over `len` samples,
/// first and last included.
pub fn frame_indices(frames: usize, len: usize) -> Vec<usize> {
    match frames {
        0 => Vec::new(),
        1 => vec![len - 1],
        k => (0..k).map(|i| (i * (len - 1) + (k - 1) / 2) / (k - 1)).collect(),
    }
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, RunError> {
    cfg.validate().map_err(|e| RunError::Validation(e.to_string()))?;
    match cfg.regime {
        Regime::Closed => run_closed(cfg).map(Outcome::Closed),
        Regime::Heom => match &cfg.sweep {
            None => run_heom(cfg, cfg.numerics.heom_cutoff).map(Outcome::Heom),
            Some(sweep) => {
                let mut points = Vec::with_capacity(sweep.relaxation.len());
                for (i, &gamma) in sweep.relaxation.iter().enumerate() {
                    let mut c = cfg.clone();
                    let bath = c.bath.as_mut().expect("validated");
                    bath.relaxation.iter_mut().for_each(|g| *g = gamma);
                    let cutoff = sweep.cutoffs.as_ref().map(|v| v[i]);
                    let run = run_heom(&c, cutoff)?;
                    points.push(SweepPoint { relaxation: gamma, run });
                }
                Ok(Outcome::Sweep(points))
            }
        },
    }
}

fn run_closed(cfg: &RunConfig) -> Result<ClosedRun, RunError> {
    let chain = cfg.chain();
    let mode = cfg.shared_mode().expect("validated");
    let samples = dret_core::ode::output_grid(cfg.time.tmax, cfg.time.dt_out).len() + 1;
    if cfg.wigner.frames > samples {
        return Err(RunError::Validation(format!(
            "{} Wigner frames requested but the time grid has only {samples} samples",
            cfg.wigner.frames
        )));
    }
    let mut opts = EvolveOptions::new(cfg.time.tmax, cfg.time.dt_out, cfg.start_index());
    opts.frame_indices = frame_indices(cfg.wigner.frames, samples);
    let trunc = dret_core::closed::FockTruncation { n_max: cfg.numerics.n_max, escalation_cap: cfg.numerics.fock_cap };
    let (trajectory, convergence) =
        evolve_converged(&chain, &mode, trunc, cfg.start_index(), &opts).map_err(numeric("closed evolution"))?;

    let wigner_extent = cfg.wigner.extent.max(PhaseGrid::recommended_extent(convergence.accepted_n_max + 1));
    let grid = PhaseGrid::symmetric(wigner_extent, cfg.wigner.points);
    let frames = trajectory
        .frames
        .iter()
        .map(|f| {
            let field = wigner_function(&f.phonon_state, &grid).map_err(numeric("Wigner function"))?;
            Ok(WignerFrame { index: f.index, time: f.time, field })
        })
        .collect::<Result<Vec<_>, RunError>>()?;
    Ok(ClosedRun { trajectory, convergence, frames, wigner_extent })
}

/// `|start⟩⟨start|`.
pub fn initial_density(sites: usize, start: usize) -> CMatrix {
    let mut rho = CMatrix::from_element(sites, sites, C64::new(0.0, 0.0));
    rho[(start, start)] = C64::new(1.0, 0.0);
    rho
}

pub const AUTO_CUTOFF_START: usize = HeomOptions::DEFAULT_CUTOFF;
pub const AUTO_CUTOFF_STEP: usize = 2;

fn run_heom(cfg: &RunConfig, cutoff: Option<usize>) -> Result<HeomRun, RunError> {
    let chain = cfg.chain();
    let bath = cfg.bath_spec().expect("validated");
    let rho0 = initial_density(cfg.sites(), cfg.start_index());
    let mut opts = HeomOptions::new(cutoff.unwrap_or(AUTO_CUTOFF_START), cfg.time.tmax, cfg.time.dt_out);
    opts.method = cfg.numerics.method();
    opts.origin_site = cfg.start_index();
    opts.max_ados = cfg.numerics.max_ados;
    match cutoff {
        Some(_) => {
            let result = heom_evolve(&chain, &bath, &rho0, &opts).map_err(numeric("hierarchy evolution"))?;
            Ok(HeomRun { result, convergence: None })
        }
        None => {
            let (result, report) = find_cutoff(
                &chain,
                &bath,
                &rho0,
                &opts,
                AUTO_CUTOFF_START,
                AUTO_CUTOFF_STEP,
                cfg.numerics.heom_cutoff_limit.max(AUTO_CUTOFF_START),
            )
            .map_err(numeric("hierarchy convergence search"))?;
            if report.accepted.is_none() {
                return Err(RunError::Numeric(format!(
                    "hierarchy depth not converged up to {} (deviations {:?})",
                    cfg.numerics.heom_cutoff_limit, report.deviations
                )));
            }
            Ok(HeomRun { result, convergence: Some(report) })
        }
    }
}
