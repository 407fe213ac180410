//! Argument parsing, config files and the flag > file > default precedence.
//!
//! Config files are flat UTF-8 `key=value` text, one key per line, with `#`
//! comments; keys carry the same names as the long flags. Values given on
//! the command line always win over file values, which win over the built-in
//! defaults (the reference operating point: 100 agents, 100 items, nu = 1000,
//! 20 realizations).

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use srmwa::experiments::capacity_for_rho;
use srmwa::model::{GammaPolicy, ModelParams};

use crate::CliError;

/// Capacity-ratio grid used when `--rhos` is not given. Capped at 0.95: at
/// capacity = item count the top-share cutoff saturates at 1 and relative
/// comparisons against it degenerate.
pub const DEFAULT_RHO_GRID: [f64; 15] = [
    0.01, 0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.50, 0.60, 0.70, 0.80, 0.90, 0.95,
];

/// Pressure grid used when `--pressures` is not given.
pub const DEFAULT_PRESSURES: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];

/// Item counts used when `--items` is not given to the item-size sweep.
pub const DEFAULT_ITEM_COUNTS: [usize; 4] = [100, 200, 300, 500];

pub const DEFAULT_AGENTS: usize = 100;
pub const DEFAULT_ITEMS: usize = 100;
pub const DEFAULT_NU: f64 = 1000.0;
pub const DEFAULT_REALIZATIONS: usize = 20;
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_REFERENCE_NU: f64 = 100.0;

#[derive(Parser, Debug)]
#[command(
    name = "srmwa",
    version,
    about = "Attention-market simulator: recommendation dynamics under advertisement pressure"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run one seeded simulation and write final per-item market shares
    Simulate(SimulateArgs),
    /// Write transition rates, stationary distribution and expected share
    Analytic(AnalyticArgs),
    /// Parameter sweeps emitting plot-ready CSV
    #[command(subcommand)]
    Sweep(SweepCommand),
}

#[derive(Subcommand, Debug)]
pub enum SweepCommand {
    /// Advertised share versus capacity ratio, simulated and analytic
    Rho(SweepRhoArgs),
    /// Advertised share at several item counts relative to the reference
    ItemSize(ItemSizeArgs),
    /// Advertised share at several run lengths relative to a reference
    Stationarity(StationarityArgs),
}

#[derive(Args, Debug, Default)]
pub struct SimulateArgs {
    /// Number of agents
    #[arg(long)]
    pub agents: Option<usize>,
    /// Number of regular items
    #[arg(long)]
    pub items: Option<usize>,
    /// Attention capacity (alternative: --rho)
    #[arg(long, conflicts_with = "rho")]
    pub capacity: Option<usize>,
    /// Capacity ratio; capacity = rho * items, which must be integral
    #[arg(long)]
    pub rho: Option<f64>,
    /// Advertisement pressure in [0, 1]
    #[arg(long)]
    pub pressure: Option<f64>,
    /// Interactions per ordered agent pair; a run is ceil(nu * N^2) steps
    #[arg(long)]
    pub nu: Option<f64>,
    /// Seed of the random stream
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output CSV path
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Optional CSV path for the advertised-share trajectory
    #[arg(long)]
    pub trajectory_out: Option<PathBuf>,
    /// Trajectory sampling interval in steps (default N^2)
    #[arg(long)]
    pub sample_every: Option<u64>,
    /// Config file with key=value lines
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
pub struct AnalyticArgs {
    #[arg(long)]
    pub agents: Option<usize>,
    #[arg(long)]
    pub items: Option<usize>,
    #[arg(long, conflicts_with = "rho")]
    pub capacity: Option<usize>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub pressure: Option<f64>,
    /// Gamma policy: exact-m1 | approx | fixed:<v>
    #[arg(long)]
    pub gamma_policy: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
pub struct SweepRhoArgs {
    #[arg(long)]
    pub agents: Option<usize>,
    #[arg(long)]
    pub items: Option<usize>,
    /// Comma-separated capacity ratios (default: built-in 15-point grid)
    #[arg(long, value_delimiter = ',')]
    pub rhos: Option<Vec<f64>>,
    /// Comma-separated pressures (default: 1e-1,1e-2,1e-3,1e-4)
    #[arg(long, value_delimiter = ',')]
    pub pressures: Option<Vec<f64>>,
    #[arg(long)]
    pub nu: Option<f64>,
    #[arg(long)]
    pub realizations: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads for realizations (default: all cores)
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
pub struct ItemSizeArgs {
    #[arg(long)]
    pub agents: Option<usize>,
    /// Comma-separated item counts; the first default (100) is the reference
    #[arg(long, value_delimiter = ',')]
    pub items: Option<Vec<usize>>,
    /// Reference item count (default 100)
    #[arg(long)]
    pub reference_items: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub rhos: Option<Vec<f64>>,
    /// Single advertisement pressure
    #[arg(long)]
    pub pressure: Option<f64>,
    #[arg(long)]
    pub nu: Option<f64>,
    #[arg(long)]
    pub realizations: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
pub struct StationarityArgs {
    #[arg(long)]
    pub agents: Option<usize>,
    #[arg(long)]
    pub items: Option<usize>,
    /// Comma-separated run lengths nu
    #[arg(long, value_delimiter = ',')]
    pub nus: Option<Vec<f64>>,
    /// Reference run length (default 100)
    #[arg(long)]
    pub reference_nu: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub rhos: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub pressures: Option<Vec<f64>>,
    #[arg(long)]
    pub realizations: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Values read from a `--config` file, keyed by flag name.
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn empty() -> Self {
        Self {
            values: BTreeMap::new(),
        }
    }

    /// Loads and parses a key=value file; unreadable files are I/O errors,
    /// malformed lines are config errors naming the line.
    pub fn load(path: Option<&PathBuf>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::empty());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Config(format!(
                    "config {} line {}: expected key=value, got {:?}",
                    path.display(),
                    lineno + 1,
                    raw
                )));
            };
            values.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Self { values })
    }

    /// Rejects config keys the current subcommand does not understand.
    pub fn ensure_only(&self, allowed: &[&str]) -> Result<(), CliError> {
        for key in self.values.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(CliError::Config(format!(
                    "unknown config key {key:?} (allowed: {})",
                    allowed.join(", ")
                )));
            }
        }
        Ok(())
    }

    /// Resolves one scalar setting: flag, then file, then default.
    pub fn scalar<T: FromStr>(
        &self,
        key: &str,
        flag: Option<T>,
        default: Option<T>,
    ) -> Result<Option<T>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(key) {
            Some(raw) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|_| CliError::Config(format!("config value {key}={raw} is not valid"))),
            None => Ok(default),
        }
    }

    /// Resolves one comma-separated list setting.
    pub fn list<T: FromStr>(
        &self,
        key: &str,
        flag: Option<Vec<T>>,
        default: Option<Vec<T>>,
    ) -> Result<Option<Vec<T>>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(key) {
            Some(raw) => raw
                .split(',')
                .map(|part| {
                    part.trim().parse::<T>().map_err(|_| {
                        CliError::Config(format!("config value {key}={raw} is not a valid list"))
                    })
                })
                .collect::<Result<Vec<T>, _>>()
                .map(Some),
            None => Ok(default),
        }
    }
}

/// A setting that must be present after merging flags, file and defaults.
pub fn required<T>(value: Option<T>, flag: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Config(format!("missing required setting --{flag}")))
}

/// Parses a gamma policy spec: `exact-m1`, `approx` or `fixed:<v>`.
pub fn parse_gamma_policy(raw: &str) -> Result<GammaPolicy, CliError> {
    match raw {
        "exact-m1" => Ok(GammaPolicy::ExactM1),
        "approx" => Ok(GammaPolicy::Approximation),
        other => {
            if let Some(v) = other.strip_prefix("fixed:") {
                let value: f64 = v.parse().map_err(|_| {
                    CliError::Config(format!("--gamma-policy fixed:<v> needs a number, got {v:?}"))
                })?;
                Ok(GammaPolicy::Fixed(value))
            } else {
                Err(CliError::Config(format!(
                    "--gamma-policy must be exact-m1, approx or fixed:<v>, got {other:?}"
                )))
            }
        }
    }
}

/// Resolves capacity from either `--capacity` or `--rho`.
pub fn resolve_capacity(
    capacity: Option<usize>,
    rho: Option<f64>,
    n_items: usize,
) -> Result<usize, CliError> {
    match (capacity, rho) {
        (Some(c), None) => Ok(c),
        (None, Some(r)) => capacity_for_rho(r, n_items).map_err(|e| CliError::Config(e.to_string())),
        (Some(_), Some(_)) => Err(CliError::Config(
            "--capacity and --rho are mutually exclusive".into(),
        )),
        (None, None) => Err(CliError::Config(
            "one of --capacity or --rho is required".into(),
        )),
    }
}

/// Validates model parameters, mapping violations to config errors so the
/// process exits 2 with a message naming the offending field.
pub fn validated(params: ModelParams) -> Result<ModelParams, CliError> {
    params
        .validate()
        .map_err(|e| CliError::Config(e.to_string()))?;
    Ok(params)
}
