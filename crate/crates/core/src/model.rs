//! Domain types and Hamiltonian constructors.
//!
//! All quantities follow the crate-wide unit convention: ħ = 1, energies as
//! angular frequencies in units of `J_ref`.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CsrMatrix, C64};
use crate::math;

/// Electronic sites of the single-exciton manifold: site energies `Ω_j` and
/// dipolar couplings `J_jk`.
#[derive(Debug, Clone, PartialEq)]
pub struct MoleculeChain {
    site_energies: Vec<f64>,
    couplings: DMatrix<f64>,
}

/// A single invariant that a parameter set failed.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NoSites,
    LengthMismatch { field: &'static str, expected: usize, found: usize },
    NonFinite { field: &'static str, index: usize },
    AsymmetricCouplings { j: usize, k: usize, jk: f64, kj: f64 },
    NonZeroDiagonal { site: usize, value: f64 },
    NonPositive { field: &'static str, index: usize, value: f64 },
    Negative { field: &'static str, index: usize, value: f64 },
}

impl core::fmt::Display for Violation {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Violation::NoSites => write!(f, "chain has no sites"),
            Violation::LengthMismatch { field, expected, found } => {
                write!(f, "{field}: expected length {expected}, found {found}")
            }
            Violation::NonFinite { field, index } => write!(f, "{field}[{index}] is not finite"),
            Violation::AsymmetricCouplings { j, k, jk, kj } => write!(
                f,
                "asymmetric couplings: J[{}][{}] = {jk} but J[{}][{}] = {kj}",
                j + 1,
                k + 1,
                k + 1,
                j + 1
            ),
            Violation::NonZeroDiagonal { site, value } => {
                write!(f, "coupling diagonal J[{0}][{0}] = {value} is not zero", site + 1)
            }
            Violation::NonPositive { field, index, value } => {
                write!(f, "{field}[{index}] = {value} must be positive")
            }
            Violation::Negative { field, index, value } => {
                write!(f, "{field}[{index}] = {value} must be non-negative")
            }
        }
    }
}

/// Outcome of a parameter validation. Failures are collected, not raised.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        match self.violations.first() {
            None => Ok(()),
            Some(v) => Err(Error::InvalidParameter(format!("{v}"))),
        }
    }
}

impl MoleculeChain {
    /// Builds a chain without checking invariants; see [`validate_chain`].
    pub fn new(site_energies: Vec<f64>, couplings: DMatrix<f64>) -> Self {
        Self { site_energies, couplings }
    }

    /// Linear chain with uniform nearest-neighbour coupling `j`.
    pub fn linear(site_energies: Vec<f64>, j: f64) -> Self {
        let n = site_energies.len();
        let couplings = DMatrix::from_fn(n, n, |a, b| if a.abs_diff(b) == 1 { j } else { 0.0 });
        Self { site_energies, couplings }
    }

    pub fn len(&self) -> usize {
        self.site_energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.site_energies.is_empty()
    }

    pub fn site_energies(&self) -> &[f64] {
        &self.site_energies
    }

    pub fn couplings(&self) -> &DMatrix<f64> {
        &self.couplings
    }

    pub fn coupling(&self, j: usize, k: usize) -> f64 {
        self.couplings[(j, k)]
    }

    /// Same couplings, new site energies.
    pub fn with_energies(&self, site_energies: Vec<f64>) -> Self {
        Self { site_energies, couplings: self.couplings.clone() }
    }

    /// Bare electronic Hamiltonian `Σ Ω_j |j⟩⟨j| + Σ J_jk |j⟩⟨k|`.
    pub fn electronic_hamiltonian(&self) -> CMatrix {
        let n = self.len();
        CMatrix::from_fn(n, n, |a, b| {
            if a == b {
                C64::new(self.site_energies[a], 0.0)
            } else {
                C64::new(self.couplings[(a, b)], 0.0)
            }
        })
    }
}

pub fn validate_chain(chain: &MoleculeChain) -> ValidationReport {
    let mut violations = Vec::new();
    let n = chain.site_energies.len();
    if n == 0 {
        violations.push(Violation::NoSites);
    }
    let (rows, cols) = chain.couplings.shape();
    if rows != n || cols != n {
        violations.push(Violation::LengthMismatch {
            field: "couplings",
            expected: n,
            found: if rows != n { rows } else { cols },
        });
        return ValidationReport { violations };
    }
    for (j, e) in chain.site_energies.iter().enumerate() {
        if !e.is_finite() {
            violations.push(Violation::NonFinite { field: "site_energies", index: j });
        }
    }
    for j in 0..n {
        for k in 0..n {
            let v = chain.couplings[(j, k)];
            if !v.is_finite() {
                violations.push(Violation::NonFinite { field: "couplings", index: j * n + k });
                continue;
            }
            if j == k && v != 0.0 {
                violations.push(Violation::NonZeroDiagonal { site: j, value: v });
            }
            if k > j {
                let w = chain.couplings[(k, j)];
                if w.is_finite() && v != w {
                    violations.push(Violation::AsymmetricCouplings { j, k, jk: v, kj: w });
                }
            }
        }
    }
    ValidationReport { violations }
}

/// The single shared phonon mode: frequency `ω` and per-site couplings `f_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SharedMode {
    pub frequency: f64,
    pub site_couplings: Vec<f64>,
}

impl SharedMode {
    pub fn new(frequency: f64, site_couplings: Vec<f64>) -> Self {
        Self { frequency, site_couplings }
    }

    /// Mode with no exciton coupling on `n` sites.
    pub fn uncoupled(frequency: f64, n: usize) -> Self {
        Self { frequency, site_couplings: alloc::vec![0.0; n] }
    }

    pub fn validate(&self, sites: usize) -> ValidationReport {
        let mut violations = Vec::new();
        if !(self.frequency > 0.0) || !self.frequency.is_finite() {
            violations.push(Violation::NonPositive { field: "frequency", index: 0, value: self.frequency });
        }
        if self.site_couplings.len() != sites {
            violations.push(Violation::LengthMismatch {
                field: "site_couplings",
                expected: sites,
                found: self.site_couplings.len(),
            });
        }
        for (j, f) in self.site_couplings.iter().enumerate() {
            if !f.is_finite() {
                violations.push(Violation::NonFinite { field: "site_couplings", index: j });
            }
        }
        ValidationReport { violations }
    }

    /// Dimensionless position `Q_j = √2 f_j / ω` of the mode equilibrium while
    /// site `j` is excited.
    pub fn equilibrium_position(&self, site: usize) -> f64 {
        math::sqrt(2.0) * self.site_couplings[site] / self.frequency
    }
}

/// Per-site Drude baths: reorganization `λ_j`, relaxation `γ_j`, shared-bath
/// scaling `s_j` and the thermal energy `k_B T / ħ`.
///
/// `s_j = 0` for every site is the local-bath model.
#[derive(Debug, Clone, PartialEq)]
pub struct BathSpec {
    pub reorganization: Vec<f64>,
    pub relaxation: Vec<f64>,
    pub scaling: Vec<f64>,
    pub thermal_energy: f64,
}

/// A non-fatal diagnostic attached to a run.
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// `βħγ_j ≥ 1`: the Matsubara-free kernel is outside its high-temperature
    /// regime for this site.
    HighTemperatureViolated { site: usize, beta_hbar_gamma: f64 },
}

impl core::fmt::Display for Warning {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Warning::HighTemperatureViolated { site, beta_hbar_gamma } => write!(
                f,
                "site {}: beta*hbar*gamma = {beta_hbar_gamma} >= 1, high-temperature kernel not justified",
                site + 1
            ),
        }
    }
}

impl BathSpec {
    /// Identical local baths on `n` sites.
    pub fn local(n: usize, reorganization: f64, relaxation: f64, thermal_energy: f64) -> Self {
        Self {
            reorganization: alloc::vec![reorganization; n],
            relaxation: alloc::vec![relaxation; n],
            scaling: alloc::vec![0.0; n],
            thermal_energy,
        }
    }

    pub fn with_scaling(mut self, scaling: Vec<f64>) -> Self {
        self.scaling = scaling;
        self
    }

    pub fn len(&self) -> usize {
        self.reorganization.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reorganization.is_empty()
    }

    pub fn is_local(&self) -> bool {
        self.scaling.iter().all(|s| *s == 0.0)
    }

    pub fn validate(&self, sites: usize) -> ValidationReport {
        let mut violations = Vec::new();
        for (field, list) in [
            ("reorganization", &self.reorganization),
            ("relaxation", &self.relaxation),
            ("scaling", &self.scaling),
        ] {
            if list.len() != sites {
                violations.push(Violation::LengthMismatch { field, expected: sites, found: list.len() });
            }
            for (j, v) in list.iter().enumerate() {
                if !v.is_finite() {
                    violations.push(Violation::NonFinite { field, index: j });
                }
            }
        }
        for (j, l) in self.reorganization.iter().enumerate() {
            if *l < 0.0 {
                violations.push(Violation::Negative { field: "reorganization", index: j, value: *l });
            }
        }
        for (j, g) in self.relaxation.iter().enumerate() {
            if !(*g > 0.0) {
                violations.push(Violation::NonPositive { field: "relaxation", index: j, value: *g });
            }
        }
        if !(self.thermal_energy > 0.0) || !self.thermal_energy.is_finite() {
            violations.push(Violation::NonPositive {
                field: "thermal_energy",
                index: 0,
                value: self.thermal_energy,
            });
        }
        ValidationReport { violations }
    }

    /// `βħγ_j` for each site.
    pub fn beta_hbar_gamma(&self) -> Vec<f64> {
        self.relaxation.iter().map(|g| g / self.thermal_energy).collect()
    }

    /// Sites where the high-temperature truncation is not justified.
    pub fn warnings(&self) -> Vec<Warning> {
        self.beta_hbar_gamma()
            .into_iter()
            .enumerate()
            .filter(|(_, b)| *b >= 1.0)
            .map(|(site, beta_hbar_gamma)| Warning::HighTemperatureViolated { site, beta_hbar_gamma })
            .collect()
    }
}

/// Polaron Hamiltonian `H_e + H_ph + H_e-ph` on the product basis
/// `|j⟩ ⊗ |n⟩`, `n = 0..=n_max`, flattened as `j · (n_max + 1) + n`.
///
/// Diagonal `Ω_j + f_j²/ω + ω(n + ½)`, hopping `J_jk` between equal phonon
/// numbers and `−f_j √(n+1)` between `|j, n⟩` and `|j, n+1⟩`.
pub fn build_polaron_hamiltonian(
    chain: &MoleculeChain,
    mode: &SharedMode,
    n_max: usize,
    max_dim: usize,
) -> Result<CMatrix> {
    Ok(build_polaron_hamiltonian_sparse(chain, mode, n_max, max_dim)?.to_dense())
}

/// Sparse form of [`build_polaron_hamiltonian`], used for propagation.
pub fn build_polaron_hamiltonian_sparse(
    chain: &MoleculeChain,
    mode: &SharedMode,
    n_max: usize,
    max_dim: usize,
) -> Result<CsrMatrix> {
    validate_chain(chain).into_result()?;
    mode.validate(chain.len()).into_result()?;
    if n_max < 1 {
        return Err(Error::InvalidParameter(format!("n_max must be at least 1, got {n_max}")));
    }
    let levels = n_max + 1;
    let sites = chain.len();
    let dim = sites
        .checked_mul(levels)
        .ok_or(Error::DimensionTooLarge { dim: usize::MAX, max: max_dim })?;
    if dim > max_dim {
        return Err(Error::DimensionTooLarge { dim, max: max_dim });
    }
    let w = mode.frequency;
    let mut rows: Vec<Vec<(usize, C64)>> = (0..dim).map(|_| Vec::new()).collect();
    for j in 0..sites {
        let f = mode.site_couplings[j];
        let onsite = chain.site_energies()[j] + f * f / w;
        for n in 0..levels {
            let row = j * levels + n;
            rows[row].push((row, C64::new(onsite + w * (n as f64 + 0.5), 0.0)));
            if n + 1 < levels {
                let v = C64::new(-f * math::sqrt((n + 1) as f64), 0.0);
                rows[row + 1].push((row, v));
                rows[row].push((row + 1, v));
            }
            for k in 0..sites {
                let jk = chain.coupling(j, k);
                if k != j && jk != 0.0 {
                    rows[row].push((k * levels + n, C64::new(jk, 0.0)));
                }
            }
        }
    }
    Ok(CsrMatrix::from_rows(rows))
}

/// Time-dependent Lamb shift `Ω_LS,j(t) = 2 s_j λ_j e^{−γ_j t}` of the Drude
/// shared bath.
pub fn lamb_shift(bath: &BathSpec, site: usize, t: f64) -> f64 {
    2.0 * bath.scaling[site] * bath.reorganization[site] * math::exp(-bath.relaxation[site] * t)
}

/// Effective electronic Hamiltonian with diagonal `Ω_j + λ_j + Ω_LS,j(t)`.
pub fn build_effective_electronic_hamiltonian(chain: &MoleculeChain, bath: &BathSpec, t: f64) -> CMatrix {
    let mut h = chain.electronic_hamiltonian();
    for j in 0..chain.len() {
        h[(j, j)] += C64::new(bath.reorganization[j] + lamb_shift(bath, j, t), 0.0);
    }
    h
}

/// Drude spectral density `Λ_j(ω) = (2λ_j/π) ωγ_j / (ω² + γ_j²)`.
pub fn spectral_density(bath: &BathSpec, site: usize, omega: f64) -> f64 {
    let l = bath.reorganization[site];
    let g = bath.relaxation[site];
    2.0 * l / core::f64::consts::PI * omega * g / (omega * omega + g * g)
}

/// Matsubara-free bath response `(2λ_j k_BT − iλ_jγ_j) e^{−γ_j τ}`, the kernel
/// realised by the hierarchy.
pub fn bath_response_high_t(bath: &BathSpec, site: usize, tau: f64) -> C64 {
    let l = bath.reorganization[site];
    let g = bath.relaxation[site];
    C64::new(2.0 * l * bath.thermal_energy, -l * g) * math::exp(-g * tau)
}
