//! TOML run configuration.
//!
//! ```toml
//! [scenario]              # or an inline [problem] table
//! name = "general"
//!
//! [coefficients]          # optional; starts from a preset
//! preset = "calibrated"
//! c_quad = [1.0, 0.01, 0.015]
//!
//! [solver]                # SolverSettings fields, all optional
//! [simulation]            # needed by `simulate` only
//! [calibration]           # needed by `calibrate` only
//! [realization]           # physical-parameter report of `solve`
//! [output]                # optional file destinations
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::domain::WeightVector;
use crate::objective::ObjectiveCoefficients;
use crate::oracle::SimulationConfig;
use crate::scenarios::{
    builtin_scenario, builtin_scenarios, calibrated_coefficients, calibration_start, Scenario,
    CALIBRATION_BUDGET,
};
use crate::solver::SolverSettings;

use super::CliError;

/// Environment variable that replaces the default seed when the
/// configuration does not set one.
pub const SEED_ENV: &str = "DOCKOPT_SEED";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<ScenarioRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub problem: Option<Scenario>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<CoefficientConfig>,
    #[serde(default)]
    pub solver: SolverSettings,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimulationConfig>,
    #[serde(default)]
    pub calibration: CalibrationConfig,
    #[serde(default)]
    pub realization: RealizationConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioRef {
    pub name: String,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientPreset {
    /// The frozen calibration against the general case.
    #[default]
    Calibrated,
    /// All coefficients one.
    Unit,
    /// Starting point of calibration.
    CalibrationStart,
}

impl CoefficientPreset {
    pub fn coefficients(self) -> ObjectiveCoefficients {
        match self {
            CoefficientPreset::Calibrated => calibrated_coefficients(),
            CoefficientPreset::Unit => ObjectiveCoefficients::default(),
            CoefficientPreset::CalibrationStart => calibration_start(),
        }
    }
}

/// A preset with optional per-field overrides.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<CoefficientPreset>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_form: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_skin: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_quad: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_lin: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_reg: Option<[f64; 3]>,
    #[serde(rename = "A_max", default, skip_serializing_if = "Option::is_none")]
    pub area_max: Option<f64>,
    #[serde(rename = "l_max", default, skip_serializing_if = "Option::is_none")]
    pub length_max: Option<f64>,
}

impl CoefficientConfig {
    /// Every field set explicitly.
    pub fn explicit(k: &ObjectiveCoefficients) -> Self {
        Self {
            preset: None,
            h_form: Some(k.h_form),
            h_skin: Some(k.h_skin),
            c_quad: Some(k.c_quad),
            d_lin: Some(k.d_lin),
            v_reg: Some(k.v_reg),
            area_max: Some(k.area_max),
            length_max: Some(k.length_max),
        }
    }

    pub fn resolve(&self, default_preset: CoefficientPreset) -> ObjectiveCoefficients {
        let base = self.preset.unwrap_or(default_preset).coefficients();
        ObjectiveCoefficients {
            h_form: self.h_form.unwrap_or(base.h_form),
            h_skin: self.h_skin.unwrap_or(base.h_skin),
            c_quad: self.c_quad.unwrap_or(base.c_quad),
            d_lin: self.d_lin.unwrap_or(base.d_lin),
            v_reg: self.v_reg.unwrap_or(base.v_reg),
            area_max: self.area_max.unwrap_or(base.area_max),
            length_max: self.length_max.unwrap_or(base.length_max),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CalibrationConfig {
    /// Number of solves Nelder-Mead may spend.
    pub budget: usize,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        Self { budget: CALIBRATION_BUDGET }
    }
}

/// Inputs of the inverse map from abstract variables to physical ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RealizationConfig {
    /// Target control-error deviation, m.
    pub sigma_c: f64,
    pub authority_weight: f64,
    pub accuracy_weight: f64,
}

impl Default for RealizationConfig {
    fn default() -> Self {
        Self { sigma_c: 0.05, authority_weight: 1.0, accuracy_weight: 1.0 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Machine-readable JSON record.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<PathBuf>,
    /// Sweep table.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
}

impl RunConfig {
    /// Reads, parses and validates a configuration file, applying the seed
    /// environment variable.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Like [`load`](Self::load) on text already in memory; `origin` names
    /// the source in diagnostics.
    pub fn parse(text: &str, origin: &str) -> Result<Self, CliError> {
        let env = std::env::var(SEED_ENV).ok();
        Self::parse_with_seed_env(text, origin, env.as_deref())
    }

    /// Parsing with an explicit value for the seed environment variable.
    pub fn parse_with_seed_env(text: &str, origin: &str, seed_env: Option<&str>) -> Result<Self, CliError> {
        let config_error = |message: String| CliError::Config { origin: origin.to_string(), message };
        let de = toml::Deserializer::parse(text).map_err(|e| config_error(e.to_string()))?;
        let mut cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            if path.is_empty() || path == "." {
                config_error(inner.to_string())
            } else {
                config_error(format!("at `{path}`: {inner}"))
            }
        })?;

        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| config_error(e.to_string()))?;
        let section_sets = |section: &str| {
            table.get(section).and_then(|v| v.as_table()).is_some_and(|t| t.contains_key("seed"))
        };
        if let Some(raw) = seed_env {
            let seed: u64 = raw.trim().parse().map_err(|_| {
                config_error(format!("{SEED_ENV} must be a non-negative integer, got {raw:?}"))
            })?;
            if !section_sets("solver") {
                cfg.solver.seed = seed;
            }
            if let Some(sim) = cfg.simulation.as_mut() {
                if !section_sets("simulation") {
                    sim.seed = seed;
                }
            }
        }
        cfg.validate().map_err(config_error)?;
        Ok(cfg)
    }

    /// Checks every section against the invariants of its type and names
    /// the offending section.
    pub fn validate(&self) -> Result<(), String> {
        fn at(section: &str) -> impl Fn(crate::Error) -> String + '_ {
            move |e| format!("{section}: {e}")
        }
        if self.scenario.is_some() && self.problem.is_some() {
            return Err("set either [scenario] or [problem], not both".into());
        }
        let scenario = self.resolve_scenario()?;
        let section = if self.problem.is_some() { "problem" } else { "scenario" };
        scenario.weights.validate().map_err(at(&format!("{section}.weights")))?;
        scenario.bounds.validate().map_err(at(&format!("{section}.bounds")))?;
        scenario.constraints.validate().map_err(at(&format!("{section}.constraints")))?;
        scenario.x_init.validate().map_err(at(&format!("{section}.x_init")))?;
        if let Some(c) = &self.coefficients {
            c.resolve(CoefficientPreset::default()).validate().map_err(at("coefficients"))?;
        }
        self.solver.validate().map_err(at("solver"))?;
        if let Some(sim) = &self.simulation {
            sim.validate().map_err(at("simulation"))?;
        }
        if self.calibration.budget == 0 {
            return Err("calibration.budget must be >= 1".into());
        }
        let r = &self.realization;
        if !(r.sigma_c > 0.0 && r.sigma_c.is_finite()) {
            return Err(format!("realization.sigma_c must be finite and > 0, got {}", r.sigma_c));
        }
        if !(r.authority_weight >= 0.0 && r.accuracy_weight >= 0.0)
            || r.authority_weight + r.accuracy_weight <= 0.0
        {
            return Err("realization weights must be >= 0 with a positive sum".into());
        }
        Ok(())
    }

    fn resolve_scenario(&self) -> Result<Scenario, String> {
        match (&self.scenario, &self.problem) {
            (_, Some(p)) => Ok(p.clone()),
            (Some(r), None) => builtin_scenario(&r.name).ok_or_else(|| {
                let known: Vec<String> = builtin_scenarios().into_iter().map(|s| s.name).collect();
                format!("scenario.name: unknown scenario {:?}, expected one of {known:?}", r.name)
            }),
            (None, None) => Ok(builtin_scenario("general").expect("general is built in")),
        }
    }

    /// The selected problem; the general scenario when none is given.
    pub fn scenario(&self) -> Scenario {
        self.resolve_scenario().expect("validated on load")
    }

    pub fn weights(&self) -> WeightVector {
        self.scenario().weights
    }

    /// Coefficients from `[coefficients]`, starting from `default_preset`
    /// when the section does not name one.
    pub fn coefficients(&self, default_preset: CoefficientPreset) -> ObjectiveCoefficients {
        self.coefficients
            .as_ref()
            .map_or_else(|| default_preset.coefficients(), |c| c.resolve(default_preset))
    }
}
