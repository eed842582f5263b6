//! Numerical core for phonon-driven exciton transfer.
//!
//! Two regimes are covered:
//!
//! * [`closed`]: an exciton on a chain of two-level molecules coupled to one
//!   shared phonon mode, evolved exactly in a truncated Fock space, together
//!   with phase-space tools (Wigner function, energy-surface contours).
//! * [`heom`]: the reduced electronic density matrix under local or shared
//!   Drude baths, propagated with hierarchically coupled master equations that
//!   include the time-dependent Lamb shift of the shared bath.
//!
//! # Units
//!
//! ħ = 1 throughout. Every energy is an angular frequency expressed in units
//! of a reference dipolar coupling `J_ref`, and every time is in units of
//! `J_ref⁻¹`. Thermal energies are given as `k_B T / ħ` in the same units.
//! Phase-space coordinates of the shared mode are the dimensionless
//! `Q = q √(mω/ħ)` and `P = p / √(mωħ)`, so the mass and the displacements
//! never appear on their own.
//!
//! Sites are indexed from zero in this crate. File formats and CLI output
//! label them from one (`P_1`, `P_2`, ...).
//!
//! The crate is `no_std` (with `alloc`) when the default `std` feature is
//! disabled. The `parallel` feature evaluates the hierarchy and Wigner grids
//! with rayon; results do not depend on the worker count.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod closed;
pub mod error;
pub mod heom;
pub mod linalg;
pub(crate) mod math;
pub mod model;
pub mod ode;
#[cfg(any(test, feature = "oracle"))]
pub mod oracle;

pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector, C64};
pub use model::{BathSpec, MoleculeChain, SharedMode, ValidationReport, Violation};
