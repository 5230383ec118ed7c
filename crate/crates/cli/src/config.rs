//! TOML configuration. Precedence: command-line flags, then the config
//! file, then these defaults.

use std::path::{Path, PathBuf};

use fluidgeom::onset::{DEFAULT_ANCHOR, DEFAULT_REYNOLDS};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Environment variable naming the default config file.
pub const CONFIG_ENV: &str = "FLUIDGEOM_CONFIG";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub onset: OnsetConfig,
    pub numerics: NumericsConfig,
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OnsetConfig {
    pub reynolds: f64,
    /// `(x3, u1)` fit anchor.
    pub anchor: [f64; 2],
    /// Plate speed; profiles are normalised to 1.
    pub plate_speed: f64,
    pub bisection_iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NumericsConfig {
    pub poisson_tolerance: f64,
    pub poisson_max_iter_factor: usize,
    /// Threshold for flagging `|div u|` on incompressible states.
    pub divergence_tolerance: f64,
    /// Transverse node count for embedding grids.
    pub transverse_nodes: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// Include per-node diagnostics in reports.
    pub per_node: bool,
    pub binary_payload: bool,
}

impl Default for OnsetConfig {
    fn default() -> Self {
        Self {
            reynolds: DEFAULT_REYNOLDS,
            anchor: [DEFAULT_ANCHOR.x3, DEFAULT_ANCHOR.u1],
            plate_speed: 1.0,
            bisection_iterations: fluidgeom::onset::BISECTION_ITERATIONS,
        }
    }
}

impl Default for NumericsConfig {
    fn default() -> Self {
        let p = fluidgeom::fields::PoissonConfig::default();
        Self {
            poisson_tolerance: p.tolerance,
            poisson_max_iter_factor: p.max_iter_factor,
            divergence_tolerance: 1e-6,
            transverse_nodes: 5,
        }
    }
}

impl Config {
    pub fn from_toml(text: &str, origin: &Path) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::input(format!("{}: {e}", origin.display())))
    }

    /// Loads `explicit`, else the file named by [`CONFIG_ENV`], else defaults.
    pub fn load(explicit: Option<&Path>) -> CliResult<(Self, Option<PathBuf>)> {
        let path = explicit.map(Path::to_path_buf).or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
        match path {
            Some(p) => {
                let text = std::fs::read_to_string(&p).map_err(|e| CliError::io(&p, e))?;
                Ok((Self::from_toml(&text, &p)?, Some(p)))
            }
            None => Ok((Self::default(), None)),
        }
    }
}
