//! Experiment specification: the JSON schema accepted by every subcommand,
//! its defaults, and the conversion into core types.

use std::path::Path;

use ris_core::{Direction, GaConfig, RisGeometry, Scenario, StateSet, SweepGrid};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

fn default_version() -> u32 {
    1
}

fn default_true() -> bool {
    true
}

fn default_theta_stop() -> f64 {
    90.0
}

fn default_theta_step() -> f64 {
    0.1
}

/// What to synthesize before the pattern sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Continuous,
    Quantize,
    Ga,
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryBlock {
    pub q_x: usize,
    pub q_y: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pitch_wavelengths: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pitch_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frequency_ghz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wavelength_m: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AngleBlock {
    pub theta_deg: f64,
    #[serde(default)]
    pub phi_deg: f64,
}

/// Discrete state set: either `bits` (uniform 2^bits states) or a two-state
/// set described by `psi_deg` with optional `gamma_deg` and per-state
/// magnitudes in dB.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatesBlock {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bits: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub psi_deg: Option<f64>,
    #[serde(default)]
    pub gamma_deg: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplitudes_db: Option<[f64; 2]>,
}

impl Default for StatesBlock {
    fn default() -> Self {
        Self { bits: None, psi_deg: Some(180.0), gamma_deg: 0.0, amplitudes_db: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    #[serde(default)]
    pub theta_start_deg: f64,
    #[serde(default = "default_theta_stop")]
    pub theta_stop_deg: f64,
    #[serde(default = "default_theta_step")]
    pub theta_step_deg: f64,
    #[serde(default)]
    pub phi_r_deg: f64,
}

impl Default for SweepBlock {
    fn default() -> Self {
        Self {
            theta_start_deg: 0.0,
            theta_stop_deg: 90.0,
            theta_step_deg: 0.1,
            phi_r_deg: 0.0,
        }
    }
}

/// Optional genetic-algorithm overrides; unset fields keep library defaults.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaBlock {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub population_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tournament_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub crossover_probability: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base_mutation_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mutation_boost_factor: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stagnation_boost_after: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elite_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_generations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stagnation_stop_after: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub improvement_epsilon: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    #[serde(default = "default_true")]
    pub svg: bool,
}

impl Default for OutputBlock {
    fn default() -> Self {
        Self { dir: None, svg: true }
    }
}

/// One experiment: geometry, angles, synthesis mode, state set, sweep, GA
/// settings, seed, and output options.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    #[serde(default = "default_version")]
    pub version: u32,
    pub geometry: GeometryBlock,
    pub incident: AngleBlock,
    pub target: AngleBlock,
    pub mode: Mode,
    #[serde(default)]
    pub states: StatesBlock,
    #[serde(default)]
    pub sweep: SweepBlock,
    #[serde(default)]
    pub ga: GaBlock,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: OutputBlock,
}

impl ExperimentSpec {
    /// Checks cross-field constraints that serde cannot express.
    pub fn validate(&self) -> Result<()> {
        if self.version != 1 {
            return Err(CliError::Spec(format!("version: unsupported value {}", self.version)));
        }
        let g = &self.geometry;
        match (g.pitch_wavelengths, g.pitch_m) {
            (Some(_), Some(_)) => {
                return Err(CliError::Spec(
                    "geometry: give exactly one of pitch_wavelengths or pitch_m, not both".into(),
                ))
            }
            (None, None) => {
                return Err(CliError::Spec(
                    "geometry: one of pitch_wavelengths or pitch_m is required".into(),
                ))
            }
            _ => {}
        }
        match (g.frequency_ghz, g.wavelength_m) {
            (Some(_), Some(_)) => {
                return Err(CliError::Spec(
                    "geometry: give exactly one of frequency_ghz or wavelength_m, not both".into(),
                ))
            }
            (None, None) => {
                return Err(CliError::Spec(
                    "geometry: one of frequency_ghz or wavelength_m is required".into(),
                ))
            }
            _ => {}
        }
        match (self.states.bits, self.states.psi_deg) {
            (Some(_), Some(_)) => {
                return Err(CliError::Spec(
                    "states: give exactly one of bits or psi_deg, not both".into(),
                ))
            }
            (None, None) => {
                return Err(CliError::Spec("states: one of bits or psi_deg is required".into()))
            }
            _ => {}
        }
        if self.states.amplitudes_db.is_some() && self.states.bits.is_some() {
            return Err(CliError::Spec(
                "states: amplitudes_db applies only to psi_deg state sets".into(),
            ));
        }
        if let Some(amps) = self.states.amplitudes_db {
            if amps.iter().any(|a| *a > 0.0 || !a.is_finite()) {
                return Err(CliError::Spec(
                    "states: amplitudes_db entries must be finite and <= 0 dB".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn wavelength(&self) -> f64 {
        match (self.geometry.wavelength_m, self.geometry.frequency_ghz) {
            (Some(lam), _) => lam,
            (None, Some(f)) => SPEED_OF_LIGHT / (f * 1e9),
            (None, None) => unreachable!("validated"),
        }
    }

    pub fn ris_geometry(&self) -> Result<RisGeometry> {
        let lam = self.wavelength();
        let pitch = match (self.geometry.pitch_m, self.geometry.pitch_wavelengths) {
            (Some(p), _) => p,
            (None, Some(w)) => w * lam,
            (None, None) => unreachable!("validated"),
        };
        Ok(RisGeometry::new(self.geometry.q_x, self.geometry.q_y, pitch, pitch, lam)?)
    }

    pub fn scenario(&self) -> Result<Scenario> {
        let geometry = self.ris_geometry()?;
        let incident = Direction::from_degrees(self.incident.theta_deg, self.incident.phi_deg)?;
        let target = Direction::from_degrees(self.target.theta_deg, self.target.phi_deg)?;
        Ok(Scenario::new(geometry, incident, target))
    }

    pub fn state_set(&self) -> Result<StateSet> {
        if let Some(bits) = self.states.bits {
            return Ok(ris_core::uniform_state_set(bits)?);
        }
        let psi = self.states.psi_deg.expect("validated").to_radians();
        let gamma = self.states.gamma_deg.to_radians();
        let amplitudes =
            self.states.amplitudes_db.map(|[a0, a1]| (10f64.powf(a0 / 20.0), 10f64.powf(a1 / 20.0)));
        Ok(ris_core::two_state_set(gamma, psi, amplitudes)?)
    }

    pub fn sweep_grid(&self) -> Result<SweepGrid> {
        Ok(SweepGrid::from_degrees(
            self.sweep.theta_start_deg,
            self.sweep.theta_stop_deg,
            self.sweep.theta_step_deg,
        )?)
    }

    /// Library GA config with block overrides applied and the spec seed.
    pub fn ga_config(&self, seed: u64) -> GaConfig {
        let defaults = GaConfig::default();
        GaConfig {
            population_size: self.ga.population_size.or(defaults.population_size),
            tournament_size: self.ga.tournament_size.unwrap_or(defaults.tournament_size),
            crossover_probability: self
                .ga
                .crossover_probability
                .unwrap_or(defaults.crossover_probability),
            base_mutation_rate: self.ga.base_mutation_rate.or(defaults.base_mutation_rate),
            mutation_boost_factor: self
                .ga
                .mutation_boost_factor
                .unwrap_or(defaults.mutation_boost_factor),
            stagnation_boost_after: self
                .ga
                .stagnation_boost_after
                .unwrap_or(defaults.stagnation_boost_after),
            elite_count: self.ga.elite_count.unwrap_or(defaults.elite_count),
            max_generations: self.ga.max_generations.unwrap_or(defaults.max_generations),
            stagnation_stop_after: self
                .ga
                .stagnation_stop_after
                .unwrap_or(defaults.stagnation_stop_after),
            improvement_epsilon: self
                .ga
                .improvement_epsilon
                .unwrap_or(defaults.improvement_epsilon),
            seed,
        }
    }
}

/// Reads and validates a spec file; error messages name the offending key.
pub fn load_spec(path: &Path) -> Result<ExperimentSpec> {
    let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
    let spec: ExperimentSpec = serde_json::from_str(&text)
        .map_err(|e| CliError::Spec(format!("{}: {e}", path.display())))?;
    spec.validate()?;
    Ok(spec)
}
