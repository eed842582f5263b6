use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::model::{BathSpec, MoleculeChain};

use super::quadrature::integrate;

const TOL: f64 = 1e-13;

// Kernel written out again here so the reference does not share code with
// the model.
fn kernel(bath: &BathSpec, j: usize, tau: f64) -> C64 {
    let (l, g) = (bath.reorganization[j], bath.relaxation[j]);
    C64::new(2.0 * l * bath.thermal_energy, -l * g) * libm::exp(-g * tau)
}

/// Lineshape `g_j(t) = ∫₀^t dt₁ ∫₀^{t₁} α_j(τ) dτ` by nested quadrature.
pub fn lineshape(bath: &BathSpec, j: usize, t: f64) -> Result<C64> {
    let inner = |t1: f64, part: fn(C64) -> f64| -> f64 {
        integrate(|tau| part(kernel(bath, j, tau)), 0.0, t1, TOL, TOL).unwrap_or(f64::NAN)
    };
    let re = integrate(|t1| inner(t1, |z| z.re), 0.0, t, TOL, 1e-12)?;
    let im = integrate(|t1| inner(t1, |z| z.im), 0.0, t, TOL, 1e-12)?;
    Ok(C64::new(re, im))
}

/// `∫₀^t [E₁(t′) − E₂(t′)] dt′` for the effective site energies
/// `Ω_j + λ_j + 2 s_j λ_j e^{−γ_j t′}`.
pub fn splitting_phase(chain: &MoleculeChain, bath: &BathSpec, t: f64) -> Result<f64> {
    let level = |j: usize, s: f64| {
        chain.site_energies()[j]
            + bath.reorganization[j]
            + 2.0 * bath.scaling[j] * bath.reorganization[j] * libm::exp(-bath.relaxation[j] * s)
    };
    integrate(|s| level(0, s) - level(1, s), 0.0, t, TOL, 1e-14)
}

/// Lamb-shift part of [`splitting_phase`]: `∫₀^t [Ω_LS,1 − Ω_LS,2] dt′`.
pub fn lamb_shift_phase(bath: &BathSpec, t: f64) -> Result<f64> {
    let shift = |j: usize, s: f64| 2.0 * bath.scaling[j] * bath.reorganization[j] * libm::exp(-bath.relaxation[j] * s);
    integrate(|s| shift(0, s) - shift(1, s), 0.0, t, TOL, 1e-14)
}

/// Coherence `ρ₁₂(t)` of an uncoupled dimer under the high-temperature
/// kernel:
///
/// ```text
/// ρ₁₂(t) = ρ₁₂(0) exp(−g₁(t) − g₂(t)*) exp(−i ∫₀^t ΔE_eff)
/// ```
///
/// The second lineshape enters conjugated because site 2 is the ket-bra's
/// right index.
pub fn dephasing_analytic(chain: &MoleculeChain, bath: &BathSpec, rho12: C64, t: f64) -> Result<C64> {
    if chain.len() != 2 || bath.len() != 2 {
        return Err(Error::InvalidParameter(alloc::format!("dephasing reference needs two sites, got {}", chain.len())));
    }
    if chain.coupling(0, 1) != 0.0 {
        return Err(Error::InvalidParameter(alloc::format!(
            "dephasing reference needs J_12 = 0, got {}",
            chain.coupling(0, 1)
        )));
    }
    let g = lineshape(bath, 0, t)? + lineshape(bath, 1, t)?.conj();
    let phase = splitting_phase(chain, bath, t)?;
    Ok(rho12 * (-g).exp() * C64::new(0.0, -phase).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use nalgebra::DMatrix;

    fn uncoupled(delta: f64) -> MoleculeChain {
        MoleculeChain::new(vec![delta, 0.0], DMatrix::zeros(2, 2))
    }

    #[test]
    fn lineshape_matches_closed_form() {
        let bath = BathSpec::local(2, 0.3, 0.7, 2.0);
        for t in [0.1, 1.0, 5.0] {
            let g = lineshape(&bath, 0, t).unwrap();
            let shape = (0.7 * t - 1.0 + libm::exp(-0.7 * t)) / (0.7 * 0.7);
            let exact = C64::new(2.0 * 0.3 * 2.0, -0.3 * 0.7) * shape;
            assert!((g - exact).norm() < 1e-11, "t = {t}");
        }
    }

    #[test]
    fn no_bath_keeps_magnitude() {
        let bath = BathSpec::local(2, 0.0, 0.5, 1.0);
        for t in [0.0, 1.0, 7.0] {
            let r = dephasing_analytic(&uncoupled(1.5), &bath, C64::new(0.5, 0.0), t).unwrap();
            assert!((r.norm() - 0.5).abs() < 1e-14);
            assert!((r - C64::new(0.5, 0.0) * C64::new(0.0, -1.5 * t).exp()).norm() < 1e-12);
        }
    }

    #[test]
    fn short_time_decay_is_quadratic() {
        let bath = BathSpec::local(2, 0.4, 0.5, 2.0);
        let loss = |t: f64| 1.0 - dephasing_analytic(&uncoupled(0.0), &bath, C64::new(1.0, 0.0), t).unwrap().norm();
        let ratio = loss(2e-3) / loss(1e-3);
        assert!((ratio - 4.0).abs() < 1e-2, "{ratio}");
    }

    #[test]
    fn coupled_dimer_is_rejected() {
        let chain = MoleculeChain::linear(vec![0.0, 0.0], 1.0);
        let bath = BathSpec::local(2, 0.1, 0.5, 1.0);
        assert!(dephasing_analytic(&chain, &bath, C64::new(0.5, 0.0), 1.0).is_err());
    }

    #[test]
    fn lamb_shift_phase_closed_form() {
        let bath = BathSpec::local(2, 0.1, 0.5, 4.0).with_scaling(vec![30.0, 60.0]);
        let t = 3.0;
        let exact = 2.0 * 30.0 * 0.1 * (1.0 - libm::exp(-0.5 * t)) / 0.5 - 2.0 * 60.0 * 0.1 * (1.0 - libm::exp(-0.5 * t)) / 0.5;
        assert!((lamb_shift_phase(&bath, t).unwrap() - exact).abs() < 1e-12);
    }
}
