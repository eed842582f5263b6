//! JSON run configuration.
//!
//! Site indices in files are 1-based. Energies are offsets from a reference
//! site, in units of `J_ref`; times are in `J_ref⁻¹`.

use std::fmt;
use std::path::Path;

use dret_core::model::{validate_chain, BathSpec, MoleculeChain, SharedMode};
use dret_core::ode::{Method, Tolerances};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Closed,
    Heom,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Closed => "closed",
            Regime::Heom => "heom",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SitesConfig {
    /// `Ω_k − Ω_ref` for every site.
    pub energy_offsets: Vec<f64>,
    /// 1-based; its own offset must be zero.
    pub reference_site: usize,
    /// Full symmetric `J_jk` matrix with zero diagonal.
    pub couplings: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeConfig {
    pub frequency: f64,
    pub site_couplings: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathConfig {
    pub reorganization: Vec<f64>,
    pub relaxation: Vec<f64>,
    pub scaling: Vec<f64>,
    pub thermal_energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimeConfig {
    pub tmax: f64,
    pub dt_out: f64,
}

impl Default for TimeConfig {
    fn default() -> Self {
        Self { tmax: 30.0, dt_out: 0.05 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Integrator {
    Adaptive,
    Rk4,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Numerics {
    /// Starting Fock cutoff; raised automatically until converged.
    pub n_max: usize,
    pub fock_cap: usize,
    /// `None` runs the convergence search starting at 6.
    pub heom_cutoff: Option<usize>,
    /// Deepest hierarchy tried by the convergence search.
    pub heom_cutoff_limit: usize,
    pub rtol: f64,
    pub atol: f64,
    pub integrator: Integrator,
    pub rk4_step: f64,
    pub max_ados: usize,
}

impl Default for Numerics {
    fn default() -> Self {
        Self {
            n_max: 30,
            fock_cap: 1200,
            heom_cutoff: None,
            heom_cutoff_limit: 24,
            rtol: 1e-7,
            atol: 1e-10,
            integrator: Integrator::Adaptive,
            rk4_step: 0.01,
            max_ados: dret_core::heom::DEFAULT_MAX_ADOS,
        }
    }
}

impl Numerics {
    pub fn method(&self) -> Method {
        match self.integrator {
            Integrator::Adaptive => Method::Adaptive(Tolerances { rtol: self.rtol, atol: self.atol }),
            Integrator::Rk4 => Method::FixedRk4 { step: self.rk4_step },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WignerConfig {
    pub frames: usize,
    /// Half-width of the square grid; widened to `√(2 n_max) + 2` when smaller.
    pub extent: f64,
    pub points: usize,
}

impl Default for WignerConfig {
    fn default() -> Self {
        Self { frames: 0, extent: 8.0, points: 201 }
    }
}

/// Repeats a bath run for each relaxation rate (applied to every site).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub relaxation: Vec<f64>,
    /// Hierarchy depth per rate; searched automatically when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoffs: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub regime: Regime,
    pub sites: SitesConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<ModeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bath: Option<BathConfig>,
    /// 1-based.
    #[serde(default = "default_start")]
    pub start_site: usize,
    #[serde(default)]
    pub time: TimeConfig,
    #[serde(default)]
    pub numerics: Numerics,
    #[serde(default)]
    pub wigner: WignerConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

fn default_start() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    Io(String),
    Parse { line: usize, column: usize, message: String },
    Invalid(Vec<String>),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Io(m) => write!(f, "cannot read config: {m}"),
            ConfigError::Parse { line, column, message } => {
                write!(f, "config parse error at line {line}, column {column}: {message}")
            }
            ConfigError::Invalid(v) => write!(f, "invalid config: {}", v.join("; ")),
        }
    }
}

impl std::error::Error for ConfigError {}

impl RunConfig {
    pub fn sites(&self) -> usize {
        self.sites.energy_offsets.len()
    }

    /// 0-based start site.
    pub fn start_index(&self) -> usize {
        self.start_site.saturating_sub(1)
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    pub fn chain(&self) -> MoleculeChain {
        let n = self.sites();
        let j = DMatrix::from_fn(n, n, |a, b| self.sites.couplings.get(a).and_then(|r| r.get(b)).copied().unwrap_or(f64::NAN));
        MoleculeChain::new(self.sites.energy_offsets.clone(), j)
    }

    pub fn shared_mode(&self) -> Option<SharedMode> {
        self.mode.as_ref().map(|m| SharedMode::new(m.frequency, m.site_couplings.clone()))
    }

    pub fn bath_spec(&self) -> Option<BathSpec> {
        self.bath.as_ref().map(|b| BathSpec {
            reorganization: b.reorganization.clone(),
            relaxation: b.relaxation.clone(),
            scaling: b.scaling.clone(),
            thermal_energy: b.thermal_energy,
        })
    }

    /// Checks every invariant, collecting all failures.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut errors = Vec::new();
        let n = self.sites();
        if self.version != CONFIG_VERSION {
            errors.push(format!("unsupported config version {} (expected {CONFIG_VERSION})", self.version));
        }
        if n == 0 {
            errors.push("sites.energy_offsets must not be empty".into());
        }
        if self.sites.couplings.len() != n || self.sites.couplings.iter().any(|r| r.len() != n) {
            errors.push(format!("sites.couplings must be a {n}x{n} matrix"));
        } else {
            errors.extend(validate_chain(&self.chain()).violations.iter().map(|v| v.to_string()));
        }
        if self.sites.reference_site == 0 || self.sites.reference_site > n {
            errors.push(format!("sites.reference_site {} out of range 1..={n}", self.sites.reference_site));
        } else if self.sites.energy_offsets[self.sites.reference_site - 1] != 0.0 {
            errors.push("the reference site must have energy offset 0".into());
        }
        if self.start_site == 0 || self.start_site > n {
            errors.push(format!("start_site {} out of range 1..={n}", self.start_site));
        }
        if !(self.time.tmax > 0.0 && self.time.tmax.is_finite()) {
            errors.push(format!("time.tmax must be positive, got {}", self.time.tmax));
        }
        if !(self.time.dt_out > 0.0 && self.time.dt_out <= self.time.tmax) {
            errors.push(format!("time.dt_out must be in (0, tmax], got {}", self.time.dt_out));
        }
        if self.numerics.n_max < 1 || self.numerics.n_max >= self.numerics.fock_cap {
            errors.push(format!(
                "numerics.n_max must satisfy 1 <= n_max < fock_cap ({}), got {}",
                self.numerics.fock_cap, self.numerics.n_max
            ));
        }
        if self.numerics.heom_cutoff == Some(0) {
            errors.push("numerics.heom_cutoff must be at least 1".into());
        }
        if !(self.numerics.rtol > 0.0 && self.numerics.atol > 0.0 && self.numerics.rk4_step > 0.0) {
            errors.push("numerics.rtol, atol and rk4_step must be positive".into());
        }
        if self.wigner.points < 2 || !(self.wigner.extent > 0.0) {
            errors.push("wigner.points must be >= 2 and wigner.extent positive".into());
        }
        match self.regime {
            Regime::Closed => {
                match self.shared_mode() {
                    None => errors.push("closed regime needs a mode".into()),
                    Some(m) => errors.extend(m.validate(n).violations.iter().map(|v| format!("mode: {v}"))),
                }
                if self.bath.is_some() {
                    errors.push("closed regime takes no bath".into());
                }
                if self.sweep.is_some() {
                    errors.push("sweeps apply to the heom regime only".into());
                }
            }
            Regime::Heom => {
                match self.bath_spec() {
                    None => errors.push("heom regime needs a bath".into()),
                    Some(b) => errors.extend(b.validate(n).violations.iter().map(|v| format!("bath: {v}"))),
                }
                if self.mode.is_some() {
                    errors.push("heom regime takes no mode".into());
                }
                if self.wigner.frames > 0 {
                    errors.push("Wigner frames apply to the closed regime only".into());
                }
                if let Some(s) = &self.sweep {
                    if s.relaxation.is_empty() || s.relaxation.iter().any(|g| !(*g > 0.0 && g.is_finite())) {
                        errors.push("sweep.relaxation must be a non-empty list of positive rates".into());
                    }
                    if let Some(c) = &s.cutoffs {
                        if c.len() != s.relaxation.len() || c.contains(&0) {
                            errors.push("sweep.cutoffs must give one positive cutoff per relaxation rate".into());
                        }
                    }
                }
            }
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Invalid(errors))
        }
    }
}

/// Reads, parses and validates a config file.
pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))?;
    RunConfig::from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "version": 1,
        "regime": "closed",
        "sites": { "energy_offsets": [2.0, 0.0], "reference_site": 2, "couplings": [[0, 1], [1, 0]] },
        "mode": { "frequency": 1.0, "site_couplings": [1.0, 2.0] }
    }"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = RunConfig::from_json(MINIMAL).unwrap();
        assert_eq!(cfg.numerics.n_max, 30);
        assert_eq!(cfg.time.dt_out, 0.05);
        assert_eq!(cfg.time.tmax, 30.0);
        assert_eq!(cfg.start_site, 1);
        assert_eq!(cfg.wigner, WignerConfig::default());
    }

    #[test]
    fn asymmetric_couplings_are_rejected() {
        let text = MINIMAL.replace("[[0, 1], [1, 0]]", "[[0, 1], [0.5, 0]]");
        let err = RunConfig::from_json(&text).unwrap_err();
        assert!(matches!(&err, ConfigError::Invalid(v) if v.iter().any(|m| m.contains("asymmetric"))), "{err}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = MINIMAL.replace("\"version\": 1,", "\"version\": 1, \"colour\": 3,");
        assert!(matches!(RunConfig::from_json(&text), Err(ConfigError::Parse { .. })));
        let text = MINIMAL.replace("\"frequency\": 1.0,", "\"frequency\": 1.0, \"mass\": 2,");
        let err = RunConfig::from_json(&text).unwrap_err();
        assert!(err.to_string().contains("mass"), "{err}");
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = RunConfig::from_json("{\n  \"version\": 1,\n  \"regime\": closed\n}").unwrap_err();
        assert!(matches!(err, ConfigError::Parse { line: 3, .. }), "{err}");
    }

    #[test]
    fn version_and_regime_checks() {
        let text = MINIMAL.replace("\"version\": 1", "\"version\": 2");
        assert!(RunConfig::from_json(&text).unwrap_err().to_string().contains("version"));
        let text = MINIMAL.replace("\"closed\"", "\"heom\"");
        assert!(RunConfig::from_json(&text).unwrap_err().to_string().contains("needs a bath"));
        let text = MINIMAL.replace("\"reference_site\": 2", "\"reference_site\": 1");
        assert!(RunConfig::from_json(&text).unwrap_err().to_string().contains("offset 0"));
    }
}
