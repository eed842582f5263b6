//! Hierarchically coupled master equations for the reduced electronic state
//! under local or shared Drude baths.
//!
//! Only the high-temperature kernel `(2λ_j k_BT − iλ_jγ_j) e^{−γ_j τ}` is
//! represented; no Matsubara terms are added. A shared bath enters through the
//! time-dependent Lamb shift in the effective Hamiltonian.

mod convergence;
mod evolve;
mod hierarchy;
mod rhs;

pub use convergence::{convergence_scan, find_cutoff, max_population_deviation, ConvergenceReport, CONVERGENCE_THRESHOLD};
pub use evolve::{heom_evolve, validate_density_matrix, HeomOptions, HeomResult};
pub use hierarchy::{enumerate_hierarchy, hierarchy_size, AdoSet, Hierarchy, HierarchyIndex, ABSENT, DEFAULT_MAX_ADOS};
pub use rhs::HeomRhs;
