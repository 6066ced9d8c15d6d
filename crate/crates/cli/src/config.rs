//! Run configuration: defaults, optionally overlaid by a TOML file, then by
//! command-line flags.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use tsrm_core::pde::PdeGrid;
use tsrm_core::stochastic::{EnsembleConfig, McConfig, PathConfig, SamplingMode};
use tsrm_core::Execution;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Density,
    Moments,
    Tails,
    Spectrum,
    Simulate,
    Pde,
    Selftest,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Fixed,
    Geometric,
}

impl From<Mode> for SamplingMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Fixed => SamplingMode::FixedTime,
            Mode::Geometric => SamplingMode::GeometricTime,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridParams {
    pub x_max: f64,
    pub h_max: f64,
    pub dx: f64,
    pub dh: f64,
}

impl Default for GridParams {
    fn default() -> Self {
        let g = PdeGrid::default();
        Self {
            x_max: g.x_max,
            h_max: g.h_max,
            dx: g.dx,
            dh: g.dh,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McParams {
    pub n_paths: usize,
    pub dt: f64,
}

impl Default for McParams {
    fn default() -> Self {
        let c = McConfig::default();
        Self {
            n_paths: c.n_paths,
            dt: c.path.dt,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TsawParams {
    pub n_walks: usize,
    pub n_steps: u64,
    pub beta: f64,
    pub mode: Mode,
}

impl Default for TsawParams {
    fn default() -> Self {
        let c = EnsembleConfig::default();
        Self {
            n_walks: c.n_walks,
            n_steps: c.n_steps,
            beta: c.beta,
            mode: Mode::Fixed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    pub seed: u64,
    pub k_max: usize,
    pub format: Format,
    pub grid: GridParams,
    pub mc: McParams,
    pub tsaw: TsawParams,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: None,
            output: None,
            seed: 42,
            k_max: tsrm_core::spectrum::DEFAULT_K_MAX,
            format: Format::Csv,
            grid: GridParams::default(),
            mc: McParams::default(),
            tsaw: TsawParams::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("bad config: {e}")))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable in TOML")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let positive = [
            ("k_max", self.k_max as f64),
            ("grid.x_max", self.grid.x_max),
            ("grid.h_max", self.grid.h_max),
            ("grid.dx", self.grid.dx),
            ("grid.dh", self.grid.dh),
            ("mc.n_paths", self.mc.n_paths as f64),
            ("mc.dt", self.mc.dt),
            ("tsaw.n_walks", self.tsaw.n_walks as f64),
            ("tsaw.n_steps", self.tsaw.n_steps as f64),
            ("tsaw.beta", self.tsaw.beta),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Usage(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    pub fn pde_grid(&self) -> PdeGrid {
        PdeGrid {
            x_max: self.grid.x_max,
            h_max: self.grid.h_max,
            dx: self.grid.dx,
            dh: self.grid.dh,
        }
    }

    pub fn mc_config(&self) -> McConfig {
        McConfig {
            n_paths: self.mc.n_paths,
            path: PathConfig {
                dt: self.mc.dt,
                ..PathConfig::default()
            },
            seed: self.seed,
            execution: Execution::Parallel,
        }
    }

    pub fn ensemble_config(&self) -> EnsembleConfig {
        EnsembleConfig {
            n_walks: self.tsaw.n_walks,
            n_steps: self.tsaw.n_steps,
            beta: self.tsaw.beta,
            mode: self.tsaw.mode.into(),
            seed: self.seed,
            execution: Execution::Parallel,
        }
    }
}
