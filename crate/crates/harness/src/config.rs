//! Scenario configuration files.
//!
//! A scenario is a TOML document. Every key is optional and defaults to the
//! reference experiment: an 8×8 radar, a 100-range × 12-azimuth grid at 1 m
//! and π/6 spacing, and a target at 60 m, π/4. Unknown keys are rejected.
//! Angles are radians and distances meters throughout.

use std::f64::consts::{FRAC_PI_4, TAU};
use std::fmt;
use std::path::Path;

use irs_place::channel::{ArraySpec, ReflectivityModel};
use irs_place::geometry::{build_candidate_grid, GridSpec, Scene};
use irs_place::optimizer::{Method, DEFAULT_ENUMERATION_CAP};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::HarnessError;

/// The reference scenario shipped with the repository.
pub const REFERENCE_SCENARIO: &str = include_str!("../../../scenarios/paper_scenario.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Number of surfaces to place.
    pub budget: usize,
    /// Seed for the per-candidate random phase profiles.
    pub phase_seed: u64,
    pub array: ArrayConfig,
    pub grid: GridConfig,
    pub scene: SceneConfig,
    pub reflectivity: ReflectivityConfig,
    pub run: RunConfig,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            budget: 5,
            phase_seed: 2023,
            array: ArrayConfig::default(),
            grid: GridConfig::default(),
            scene: SceneConfig::default(),
            reflectivity: ReflectivityConfig::default(),
            run: RunConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ArrayConfig {
    pub n_tx: usize,
    pub n_rx: usize,
    pub n_irs_elems: usize,
    /// Radar element spacing in wavelengths.
    pub tx_spacing: f64,
    /// Surface element spacing in wavelengths.
    pub irs_spacing: f64,
    pub wavelength: f64,
}

impl Default for ArrayConfig {
    fn default() -> Self {
        let a = ArraySpec::default();
        ArrayConfig {
            n_tx: a.n_tx,
            n_rx: a.n_rx,
            n_irs_elems: a.n_irs_elems,
            tx_spacing: a.tx_spacing,
            irs_spacing: a.irs_spacing,
            wavelength: a.wavelength,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub range_count: usize,
    pub range_step: f64,
    pub azimuth_count: usize,
    /// Defaults to `2π / azimuth_count`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub azimuth_step: Option<f64>,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            range_count: 100,
            range_step: 1.0,
            azimuth_count: 12,
            azimuth_step: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SceneConfig {
    pub target_range: f64,
    pub target_azimuth: f64,
    pub noise_power: f64,
    pub transmit_power: f64,
    pub samples: usize,
}

impl Default for SceneConfig {
    fn default() -> Self {
        SceneConfig {
            target_range: 60.0,
            target_azimuth: FRAC_PI_4,
            noise_power: 1.0,
            transmit_power: 1.0,
            samples: 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ReflectivityConfig {
    #[default]
    Unit,
    InverseSquareProduct,
    /// `values[i] = [re, im]` for candidate `i`.
    FixedList {
        values: Vec<[f64; 2]>,
    },
}

impl ReflectivityConfig {
    pub fn model(&self) -> ReflectivityModel {
        match self {
            ReflectivityConfig::Unit => ReflectivityModel::Unit,
            ReflectivityConfig::InverseSquareProduct => ReflectivityModel::InverseSquareProduct,
            ReflectivityConfig::FixedList { values } => ReflectivityModel::FixedList(
                values
                    .iter()
                    .map(|&[re, im]| Complex64::new(re, im))
                    .collect(),
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodName {
    Greedy,
    Lazy,
    Random,
    Exhaustive,
}

impl MethodName {
    pub fn method(self) -> Method {
        match self {
            MethodName::Greedy => Method::Greedy,
            MethodName::Lazy => Method::LazyGreedy,
            MethodName::Random => Method::Random,
            MethodName::Exhaustive => Method::Exhaustive,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MethodName::Greedy => "greedy",
            MethodName::Lazy => "lazy",
            MethodName::Random => "random",
            MethodName::Exhaustive => "exhaustive",
        }
    }
}

impl fmt::Display for MethodName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for MethodName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "greedy" => Ok(MethodName::Greedy),
            "lazy" | "lazy-greedy" => Ok(MethodName::Lazy),
            "random" => Ok(MethodName::Random),
            "exhaustive" => Ok(MethodName::Exhaustive),
            other => Err(format!(
                "unknown method `{other}` (expected greedy, lazy, random or exhaustive)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub method: MethodName,
    /// Seed for random placements and the property audit.
    pub seed: u64,
    /// Random placements per budget in a sweep.
    pub random_trials: usize,
    /// Chains drawn by `check`.
    pub check_trials: usize,
    /// Largest number of subsets exhaustive search may enumerate.
    pub enumeration_cap: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            method: MethodName::Greedy,
            seed: 1,
            random_trials: 100,
            check_trials: 1000,
            enumeration_cap: DEFAULT_ENUMERATION_CAP as u64,
        }
    }
}

impl ScenarioConfig {
    /// The reference scenario.
    pub fn reference() -> Self {
        parse_config(REFERENCE_SCENARIO).expect("bundled scenario parses")
    }

    pub fn array_spec(&self) -> ArraySpec {
        let a = &self.array;
        ArraySpec {
            n_tx: a.n_tx,
            n_rx: a.n_rx,
            n_irs_elems: a.n_irs_elems,
            tx_spacing: a.tx_spacing,
            irs_spacing: a.irs_spacing,
            wavelength: a.wavelength,
        }
    }

    pub fn grid_spec(&self) -> GridSpec {
        let g = &self.grid;
        GridSpec {
            range_count: g.range_count,
            range_step: g.range_step,
            azimuth_count: g.azimuth_count,
            azimuth_step: g
                .azimuth_step
                .unwrap_or(TAU / g.azimuth_count.max(1) as f64),
        }
    }

    pub fn scene(&self) -> irs_place::Result<Scene> {
        let s = &self.scene;
        Scene::new(
            s.target_range,
            s.target_azimuth,
            s.noise_power,
            s.transmit_power,
            s.samples,
        )
    }

    /// Checks every component invariant and the budget against the grid.
    pub fn validate(&self) -> Result<(), HarnessError> {
        let invalid = |e: irs_place::Error| HarnessError::Validation(e.to_string());
        self.array_spec().validate().map_err(invalid)?;
        let scene = self.scene().map_err(invalid)?;
        let grid = build_candidate_grid(&self.grid_spec(), &scene).map_err(invalid)?;
        if self.budget == 0 || self.budget > grid.len() {
            return Err(HarnessError::Validation(format!(
                "budget {} outside 1..={}",
                self.budget,
                grid.len()
            )));
        }
        if let ReflectivityConfig::FixedList { values } = &self.reflectivity {
            if values.len() < grid.len() {
                return Err(HarnessError::Validation(format!(
                    "fixed-list reflectivity has {} values for {} candidates",
                    values.len(),
                    grid.len()
                )));
            }
        }
        if self.run.random_trials == 0 {
            return Err(HarnessError::Validation(
                "random_trials must be at least 1".into(),
            ));
        }
        if self.run.check_trials == 0 {
            return Err(HarnessError::Validation(
                "check_trials must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Parses and validates a TOML scenario.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, HarnessError> {
    let cfg: ScenarioConfig =
        toml::from_str(text).map_err(|e| HarnessError::Parse(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

/// Loads a scenario from a TOML file, or the `config` field of a JSON
/// result record written by an earlier run.
pub fn load_config(path: &Path) -> Result<ScenarioConfig, HarnessError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| HarnessError::Parse(format!("{}: {e}", path.display())))?;
    if path.extension().is_some_and(|e| e == "json") {
        #[derive(Deserialize)]
        struct Echo {
            config: ScenarioConfig,
        }
        let echo: Echo = serde_json::from_str(&text)
            .map_err(|e| HarnessError::Parse(format!("{}: {e}", path.display())))?;
        echo.config.validate()?;
        return Ok(echo.config);
    }
    parse_config(&text)
}
