//! Named presets, one per figure panel with its own parameter set.
//!
//! Panels that share parameters share a preset: `fig1b` covers 1(b)-(d),
//! `fig6a` covers 6(a)-(b), `fig6c` covers 6(c)-(d). `fig8a` and `fig8b`
//! sweep the relaxation rate, which together also give 8(c).

use std::f64::consts::PI;
use std::fmt;

use crate::config::{
    BathConfig, ModeConfig, Numerics, Regime, RunConfig, SitesConfig, SweepConfig, TimeConfig, WignerConfig,
    CONFIG_VERSION,
};

/// Quantitative check a preset feeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Check {
    RabiExactness,
    LowerSiteDwell,
    ContourIntersection,
    RuggedLocalization,
    Directionality,
    ChainDirectionality,
    BallisticExponent,
    DelocalizationLength,
    LocalReduction,
    SharedBathOrdering,
    RelaxationMonotonicity,
    Conservation,
}

impl Check {
    pub const ALL: [Check; 12] = [
        Check::RabiExactness,
        Check::LowerSiteDwell,
        Check::ContourIntersection,
        Check::RuggedLocalization,
        Check::Directionality,
        Check::ChainDirectionality,
        Check::BallisticExponent,
        Check::DelocalizationLength,
        Check::LocalReduction,
        Check::SharedBathOrdering,
        Check::RelaxationMonotonicity,
        Check::Conservation,
    ];

    /// Acceptance criterion number, when the check is one.
    pub fn criterion(self) -> Option<u8> {
        match self {
            Check::DelocalizationLength => Some(1),
            Check::RabiExactness => Some(2),
            Check::BallisticExponent => Some(3),
            Check::LocalReduction => Some(5),
            Check::Directionality => Some(6),
            Check::RelaxationMonotonicity => Some(7),
            Check::SharedBathOrdering => Some(8),
            Check::Conservation => Some(9),
            Check::LowerSiteDwell
            | Check::ContourIntersection
            | Check::RuggedLocalization
            | Check::ChainDirectionality => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioPreset {
    pub name: &'static str,
    pub citation: &'static str,
    pub checks: &'static [Check],
    pub config: RunConfig,
}

impl ScenarioPreset {
    pub fn regime(&self) -> Regime {
        self.config.regime
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownPreset(pub String);

impl fmt::Display for UnknownPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown scenario '{}' (see `dret list`)", self.0)
    }
}

impl std::error::Error for UnknownPreset {}

/// Registered names in alphabetical order.
pub const PRESET_NAMES: [&str; 18] = [
    "fig1a", "fig1b", "fig2a", "fig2b", "fig3a", "fig3b", "fig4a", "fig4b", "fig5a", "fig5b", "fig5c", "fig6a",
    "fig6c", "fig7c", "fig7d", "fig7e", "fig8a", "fig8b",
];

/// Accepted hierarchy depths from the convergence scan at the preset grids.
pub const FIG7_CUTOFF: usize = 10;
pub const FIG8_SHARED_CUTOFFS: [usize; 3] = [16, 8, 6];
pub const FIG8_LOCAL_CUTOFFS: [usize; 3] = [18, 8, 6];
pub const FIG8_RATES: [f64; 3] = [0.1, 0.5, 3.0];

const UNSTATED_FREQUENCY: &str =
    "mode frequency not stated because every coupling is zero; set to 1 (it only shifts the energy)";
const CLOSED_WINDOW: &str = "time window not stated; defaults to 30/J";

pub fn preset(name: &str) -> Result<ScenarioPreset, UnknownPreset> {
    use Check::*;
    let name: &'static str =
        PRESET_NAMES.iter().find(|n| **n == name).copied().ok_or_else(|| UnknownPreset(name.to_string()))?;
    let p = match name {
        "fig1a" => closed(
            name,
            "Fig. 1(a): resonant dimer without phonon coupling",
            &[RabiExactness, Conservation],
            &[0.0, 0.0],
            2,
            1.0,
            &[0.0, 0.0],
            1,
            &[UNSTATED_FREQUENCY, CLOSED_WINDOW],
        ),
        "fig1b" => closed(
            name,
            "Fig. 1(b)-(d): mismatched dimer sharing one mode",
            &[LowerSiteDwell, ContourIntersection, Conservation],
            &[2.0, 0.0],
            2,
            1.0,
            &[1.0, 2.0],
            1,
            &[CLOSED_WINDOW],
        ),
        "fig2a" => closed(
            name,
            "Fig. 2(a): rugged uphill trimer without phonon coupling",
            &[RuggedLocalization, Conservation],
            &[0.0, 3.0, 1.0],
            1,
            1.0,
            &[0.0, 0.0, 0.0],
            1,
            &[UNSTATED_FREQUENCY, CLOSED_WINDOW],
        ),
        "fig2b" => closed(
            name,
            "Fig. 2(b): rugged uphill trimer sharing one mode",
            &[Conservation],
            &[0.0, 3.0, 1.0],
            1,
            1.0,
            &[2.11, 2.80, 2.56],
            1,
            &[CLOSED_WINDOW],
        ),
        "fig3a" | "fig3b" => closed(
            name,
            if name == "fig3a" {
                "Fig. 3(a): downhill dimer, exciton starts high"
            } else {
                "Fig. 3(b): downhill dimer, exciton starts low"
            },
            &[Directionality, ContourIntersection, Conservation],
            &[2.0, 0.0],
            2,
            2.4,
            &[-0.5, 1.0],
            if name == "fig3a" { 1 } else { 2 },
            &[CLOSED_WINDOW],
        ),
        "fig4a" | "fig4b" => closed(
            name,
            if name == "fig4a" {
                "Fig. 4(a): uphill dimer, exciton starts low"
            } else {
                "Fig. 4(b): uphill dimer, exciton starts high"
            },
            &[Directionality, Conservation],
            &[-2.14, 0.0],
            2,
            0.143,
            &[-0.857, 0.143],
            if name == "fig4a" { 1 } else { 2 },
            &[CLOSED_WINDOW],
        ),
        "fig5a" | "fig5b" | "fig5c" => {
            let start = match name {
                "fig5a" => 1,
                "fig5b" => 2,
                _ => 3,
            };
            closed(
                name,
                match start {
                    1 => "Fig. 5(a): downhill trimer, exciton starts at site 1",
                    2 => "Fig. 5(b): downhill trimer, exciton starts at site 2",
                    _ => "Fig. 5(c): downhill trimer, exciton starts at site 3",
                },
                &[ChainDirectionality, Conservation],
                &[4.0, 2.0, 0.0],
                3,
                2.29,
                &[-0.975, 0.654, -0.654],
                start,
                &[CLOSED_WINDOW, "f_3 is read as f_3/J = -0.654"],
            )
        }
        "fig6a" => closed(
            name,
            "Fig. 6(a)-(b): flat seven-site chain, quantum walk",
            &[BallisticExponent, Conservation],
            &[0.0; 7],
            1,
            1.0,
            &[0.0; 7],
            1,
            &[UNSTATED_FREQUENCY, CLOSED_WINDOW],
        ),
        "fig6c" => closed(
            name,
            "Fig. 6(c)-(d): seven-site chain sharing one mode",
            &[Conservation],
            &[1.93, 2.06, 2.11, 2.13, 2.14, 2.05, 0.0],
            7,
            1.0,
            &[-0.471, -0.305, -0.221, -0.151, 0.129, 0.325, 1.47],
            1,
            &[CLOSED_WINDOW, "f_7/J = 1.47 is given to three significant figures, the others to three decimals"],
        ),
        "fig7c" => fig7(name, "Fig. 7(c): flat chain, local baths", &[0.0; 7], false),
        "fig7d" => fig7(name, "Fig. 7(d): downhill chain, local baths", &DOWNHILL7, false),
        "fig7e" => fig7(name, "Fig. 7(e): downhill chain, shared bath", &DOWNHILL7, true),
        "fig8a" => fig8(name, "Fig. 8(a),(c): dimer, shared bath, relaxation sweep", true),
        "fig8b" => fig8(name, "Fig. 8(b),(c): dimer, local baths, relaxation sweep", false),
        _ => unreachable!("registered name without a preset"),
    };
    Ok(p)
}

/// All presets in alphabetical order.
pub fn all_presets() -> Vec<ScenarioPreset> {
    PRESET_NAMES.iter().map(|n| preset(n).expect("registered")).collect()
}

/// `(Ω_j − Ω_7)/J` for a chain falling by `2J` per site.
const DOWNHILL7: [f64; 7] = [12.0, 10.0, 8.0, 6.0, 4.0, 2.0, 0.0];

fn linear_couplings(n: usize) -> Vec<Vec<f64>> {
    (0..n).map(|a| (0..n).map(|b| if a.abs_diff(b) == 1 { 1.0 } else { 0.0 }).collect()).collect()
}

#[allow(clippy::too_many_arguments)]
fn closed(
    name: &'static str,
    citation: &'static str,
    checks: &'static [Check],
    offsets: &[f64],
    reference_site: usize,
    frequency: f64,
    couplings: &[f64],
    start_site: usize,
    notes: &[&str],
) -> ScenarioPreset {
    let config = RunConfig {
        version: CONFIG_VERSION,
        name: Some(name.into()),
        regime: Regime::Closed,
        sites: SitesConfig {
            energy_offsets: offsets.to_vec(),
            reference_site,
            couplings: linear_couplings(offsets.len()),
        },
        mode: Some(ModeConfig { frequency, site_couplings: couplings.to_vec() }),
        bath: None,
        start_site,
        time: TimeConfig::default(),
        numerics: Numerics::default(),
        wigner: WignerConfig::default(),
        sweep: None,
        notes: notes.iter().map(|s| s.to_string()).collect(),
    };
    ScenarioPreset { name, citation, checks, config }
}

fn heom(name: &'static str, offsets: &[f64], reference_site: usize, bath: BathConfig, tmax: f64, dt_out: f64) -> RunConfig {
    RunConfig {
        version: CONFIG_VERSION,
        name: Some(name.into()),
        regime: Regime::Heom,
        sites: SitesConfig {
            energy_offsets: offsets.to_vec(),
            reference_site,
            couplings: linear_couplings(offsets.len()),
        },
        mode: None,
        bath: Some(bath),
        start_site: 1,
        time: TimeConfig { tmax, dt_out },
        numerics: Numerics::default(),
        wigner: WignerConfig::default(),
        sweep: None,
        notes: Vec::new(),
    }
}

fn fig7(name: &'static str, citation: &'static str, offsets: &[f64], shared: bool) -> ScenarioPreset {
    use Check::*;
    let (lambda, gamma, kt) = (0.35, 0.35, 2.0);
    let scaling = if shared { (1..=7).map(|j| j as f64 * (kt / lambda)).collect() } else { vec![0.0; 7] };
    let bath = BathConfig { reorganization: vec![lambda; 7], relaxation: vec![gamma; 7], scaling, thermal_energy: kt };
    let mut config = heom(name, offsets, 7, bath, 100.0 * PI, PI / 10.0);
    config.numerics.heom_cutoff = Some(FIG7_CUTOFF);
    config.notes = vec![
        "chain length 7".into(),
        "time grid not stated; output every pi/10 up to 100 pi".into(),
        format!("hierarchy depth {FIG7_CUTOFF} accepted by the convergence scan"),
    ];
    let checks: &'static [Check] = match name {
        "fig7c" => &[DelocalizationLength, LocalReduction, Conservation],
        "fig7d" => &[LocalReduction, Conservation],
        _ => &[SharedBathOrdering, Conservation],
    };
    ScenarioPreset { name, citation, checks, config }
}

fn fig8(name: &'static str, citation: &'static str, shared: bool) -> ScenarioPreset {
    let (lambda, kt, mismatch) = (0.1, 4.0, 4.0);
    let scaling = if shared { (1..=2).map(|j| 0.75 * j as f64 * mismatch / lambda).collect() } else { vec![0.0; 2] };
    let bath = BathConfig {
        reorganization: vec![lambda; 2],
        relaxation: vec![FIG8_RATES[0]; 2],
        scaling,
        thermal_energy: kt,
    };
    let cutoffs = if shared { FIG8_SHARED_CUTOFFS } else { FIG8_LOCAL_CUTOFFS };
    let mut config = heom(name, &[mismatch, 0.0], 2, bath, 10.0 * PI, PI / 20.0);
    config.numerics.heom_cutoff = Some(cutoffs[0]);
    config.sweep = Some(SweepConfig { relaxation: FIG8_RATES.to_vec(), cutoffs: Some(cutoffs.to_vec()) });
    config.notes = vec![
        "time grid not stated; output every pi/20 up to 10 pi".into(),
        format!("hierarchy depths {cutoffs:?} accepted by the convergence scan, one per rate"),
    ];
    ScenarioPreset { name, citation, checks: &[Check::RelaxationMonotonicity, Check::Conservation], config }
}
