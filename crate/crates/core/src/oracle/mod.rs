//! Independent brute-force references used to check the production code.
//!
//! Nothing here calls into the propagators, quadrature or hierarchy it is
//! meant to validate. Available with the `oracle` feature.

mod dephasing;
mod expm;
mod heom_reference;
mod quadrature;

use alloc::string::String;
use alloc::vec::Vec;

pub use dephasing::{dephasing_analytic, lamb_shift_phase, lineshape, splitting_phase};
pub use expm::{dense_expm_evolve, taylor_expm, MAX_DENSE_DIM};
pub use heom_reference::{naive_heom_rhs, reference_indices, static_local_heom, AdoMap};
pub use quadrature::{
    integrate, integrate_oscillatory_tail, integrate_tail, response_quadrature, spectral_sum_rule, wynn_epsilon,
};

/// Outcome of comparing a computed series against a reference.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub quantity: String,
    pub reference: Vec<f64>,
    pub target: Vec<f64>,
    pub max_deviation: f64,
    pub threshold: f64,
}

impl OracleReport {
    /// Elementwise comparison; mismatched lengths count as an infinite deviation.
    pub fn compare(quantity: &str, reference: Vec<f64>, target: Vec<f64>, threshold: f64) -> Self {
        let max_deviation = if reference.len() != target.len() {
            f64::INFINITY
        } else {
            reference.iter().zip(&target).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        };
        Self { quantity: quantity.into(), reference, target, max_deviation, threshold }
    }

    pub fn passed(&self) -> bool {
        self.max_deviation < self.threshold
    }
}

impl core::fmt::Display for OracleReport {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(
            f,
            "{}: max deviation {:.3e} (threshold {:.1e}) {}",
            self.quantity,
            self.max_deviation,
            self.threshold,
            if self.passed() { "ok" } else { "FAILED" }
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn report_compare() {
        let r = OracleReport::compare("x", vec![1.0, 2.0], vec![1.0, 2.5], 1.0);
        assert_eq!(r.max_deviation, 0.5);
        assert!(r.passed());
        assert!(!OracleReport::compare("x", vec![1.0], vec![], 1.0).passed());
    }
}
