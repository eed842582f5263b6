use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension {dim} exceeds the configured maximum {max}")]
    DimensionTooLarge { dim: usize, max: usize },

    #[error("index {index} out of range for {len} sites")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("step size underflow at t = {t} (h = {h})")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("step limit of {max_steps} reached at t = {t}")]
    TooManySteps { t: f64, max_steps: usize },

    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },

    #[error("non-physical density matrix at t = {t}: {detail}")]
    NonPhysical { t: f64, detail: String },

    #[error("hierarchy with {count} auxiliary operators exceeds the limit {max}")]
    HierarchyTooLarge { count: usize, max: usize },

    #[error("Fock truncation did not converge below the cap {cap} (last n_max {n_max}, deviation {deviation:e})")]
    TruncationNotConverged { n_max: usize, cap: usize, deviation: f64 },

    #[error("phase-space grid too small: normalization {normalization} vs trace {trace}")]
    GridTooSmall { normalization: f64, trace: f64 },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
}
