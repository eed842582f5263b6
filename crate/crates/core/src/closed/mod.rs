//! Exciton plus one shared phonon mode, evolved exactly in a truncated Fock
//! space.

mod evolve;
mod propagate;
pub mod resonance;
mod state;
pub mod wigner;

pub use evolve::{evolve_closed, evolve_closed_sparse, evolve_converged, FOCK_TOLERANCE, MAX_DIM, EvolveOptions, FockConvergence, Frame, TrajectoryResult};
pub use propagate::{ChebyshevPropagator, Workspace as ChebyshevWorkspace};
pub use resonance::{energy_surface, resonance_intersections, ContourPair, Intersection, PhaseContour, ResonanceBand, ResonanceReport};
pub use state::{initial_state, reduced_phonon_state, rms_displacement, site_populations, total_energy_expectation, PolaronState};
pub use wigner::{wigner_function, PhaseGrid, WignerField};

/// Fock-space cutoff of the shared mode.
///
/// `n_max` is the highest retained phonon number; `escalation_cap` bounds the
/// automatic increase performed by [`evolve_converged`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockTruncation {
    pub n_max: usize,
    pub escalation_cap: usize,
}

impl FockTruncation {
    pub const DEFAULT_N_MAX: usize = 30;
    pub const DEFAULT_CAP: usize = 1200;

    pub fn new(n_max: usize) -> Self {
        Self { n_max, escalation_cap: Self::DEFAULT_CAP.max(n_max + 1) }
    }

    pub fn levels(&self) -> usize {
        self.n_max + 1
    }
}

impl Default for FockTruncation {
    fn default() -> Self {
        Self::new(Self::DEFAULT_N_MAX)
    }
}
