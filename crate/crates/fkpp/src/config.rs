//! TOML run configurations. Every field has a default, so a file only needs
//! the entries it changes; unknown keys are rejected.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{AppError, AppResult};

pub fn load<T: DeserializeOwned>(path: &Path) -> AppResult<T> {
    let text = fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
    toml::from_str(&text).map_err(|e| AppError::parse(path, e))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scenario", rename_all = "kebab-case")]
pub enum SimulateConfig {
    Fig1(Fig1Config),
    Decay(DecayConfig),
    Steadiness(SteadinessConfig),
}

impl SimulateConfig {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Fig1(_) => "fig1",
            Self::Decay(_) => "decay",
            Self::Steadiness(_) => "steadiness",
        }
    }

    pub fn default_for(scenario: &str) -> AppResult<Self> {
        match scenario {
            "fig1" => Ok(Self::Fig1(Fig1Config::default())),
            "decay" => Ok(Self::Decay(DecayConfig::default())),
            "steadiness" => Ok(Self::Steadiness(SteadinessConfig::default())),
            other => Err(AppError::Usage(format!("unknown scenario {other:?}; expected fig1, decay or steadiness"))),
        }
    }
}

/// Lab-frame spreading from `A(x, 0) = amplitude·e^{-x²}`, `I = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Fig1Config {
    pub d: f64,
    pub r: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub dx: f64,
    pub t_end: f64,
    pub dt_out: f64,
    pub cfl: f64,
    pub amplitude: f64,
    pub front_level: f64,
    pub speed_window: (f64, f64),
    pub expected_speed: f64,
    pub speed_tol: f64,
    pub expected_plateau: f64,
    pub plateau_tol: f64,
    /// Write every n-th output as a snapshot; 0 writes none.
    pub snapshot_every: usize,
}

impl Default for Fig1Config {
    fn default() -> Self {
        Self {
            d: 0.0,
            r: 0.0,
            x_min: -100.0,
            x_max: 100.0,
            dx: 0.05,
            t_end: 40.0,
            dt_out: 1.0,
            cfl: 0.4,
            amplitude: 0.5,
            front_level: 0.1,
            speed_window: (20.0, 40.0),
            expected_speed: 2.0,
            speed_tol: 0.05,
            expected_plateau: 2.0,
            plateau_tol: 0.02,
            snapshot_every: 10,
        }
    }
}

/// Relaxation of a perturbed invading front in the co-moving frame.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecayConfig {
    pub c: f64,
    pub d: f64,
    pub r: f64,
    pub alpha_minus: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub dx: f64,
    pub amplitude: f64,
    pub bump_centre: f64,
    pub t_end: f64,
    pub dt_out: f64,
    pub fit_from: f64,
    pub cfl: f64,
    pub tail_margin: f64,
    pub slope_band: (f64, f64),
    pub snapshot_every: usize,
}

impl Default for DecayConfig {
    fn default() -> Self {
        Self {
            c: 2.0,
            d: 0.3,
            r: 1.0,
            alpha_minus: 0.5,
            x_min: -60.0,
            x_max: 120.0,
            dx: 0.05,
            amplitude: 1e-2,
            bump_centre: 0.0,
            t_end: 60.0,
            dt_out: 0.5,
            fit_from: 5.0,
            cfl: 0.4,
            tail_margin: 0.1,
            slope_band: (-1.9, -1.1),
            snapshot_every: 4,
        }
    }
}

/// Drift of a wave profile under the moving-frame PDE.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SteadinessConfig {
    pub c: f64,
    pub d: f64,
    pub r: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub dx: Vec<f64>,
    pub t_end: f64,
    pub dt_out: f64,
    pub cfl: f64,
    pub tolerance: f64,
}

impl Default for SteadinessConfig {
    fn default() -> Self {
        Self {
            c: 2.0,
            d: 0.3,
            r: 1.0,
            x_min: -40.0,
            x_max: 40.0,
            dx: vec![0.1, 0.05, 0.025],
            t_end: 10.0,
            dt_out: 1.0,
            cfl: 0.4,
            tolerance: 5e-3,
        }
    }
}

/// Monte Carlo validation. Absent sections are skipped; with no file at all
/// every section runs with its defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateFkConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
    pub density: Option<DensityConfig>,
    pub oracle: Option<OracleConfig>,
    pub tail: Option<TailConfig>,
}

fn default_seed() -> u64 {
    20_240_601
}

impl Default for ValidateFkConfig {
    fn default() -> Self {
        Self {
            seed: default_seed(),
            density: Some(DensityConfig::default()),
            oracle: Some(OracleConfig::default()),
            tail: Some(TailConfig::default()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DensityConfig {
    pub x0: f64,
    pub c: f64,
    pub dt: f64,
    pub n_paths: usize,
    pub t_max: f64,
    pub bridge: bool,
    /// Drift of the density tested against; differs from `c` in negative controls.
    pub model_c: Option<f64>,
    /// Also run at this coarser step and report both statistics.
    pub coarse_dt: Option<f64>,
}

impl Default for DensityConfig {
    fn default() -> Self {
        Self {
            x0: -1.0,
            c: 1.0,
            dt: 1e-4,
            n_paths: 100_000,
            t_max: 60.0,
            bridge: true,
            model_c: None,
            coarse_dt: Some(1e-3),
        }
    }
}

/// Stopped representation with constant data against a finite-difference solution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleConfig {
    pub t: f64,
    pub x0: f64,
    pub c: f64,
    pub l: f64,
    pub m: f64,
    pub boundary_value: f64,
    pub initial_value: f64,
    pub dt: f64,
    pub n_paths: usize,
    pub fd_x_left: f64,
    pub fd_dx: f64,
    pub fd_dt: f64,
    /// Agreement required, in standard errors.
    pub stderr_factor: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            t: 1.0,
            x0: -1.0,
            c: 1.0,
            l: -1.0,
            m: 0.0,
            boundary_value: 1.0,
            initial_value: 1.0,
            dt: 1e-4,
            n_paths: 100_000,
            fd_x_left: -20.0,
            fd_dx: 2e-3,
            fd_dt: 1e-3,
            stderr_factor: 3.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TailConfig {
    /// Output directory of a `simulate` decay run; a fresh run is made when absent.
    pub run: Option<PathBuf>,
    pub decay: DecayConfig,
    /// `μ₀` as a fraction of the measured left rate of the profile.
    pub mu0_fraction: f64,
    /// Overwrite `I(0, x) = 0.5` left of the origin, violating the hypotheses.
    pub negative_control: bool,
}

impl Default for TailConfig {
    fn default() -> Self {
        Self { run: None, decay: DecayConfig::default(), mu0_fraction: 0.5, negative_control: false }
    }
}
