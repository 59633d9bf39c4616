//! Experiment specification: command-line flags merged over an optional TOML
//! config file merged over defaults, plus the reproducibility manifest that
//! every output file embeds.

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use std::fmt;
use std::path::{Path, PathBuf};

pub const DEFAULT_RATE: f64 = 1.0;
pub const DEFAULT_STATES: usize = 300;
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_T0: f64 = 1.0;
pub const DEFAULT_TMIN: f64 = 1e-3;
pub const DEFAULT_CANDIDATES: usize = 100;
pub const DEFAULT_SLOTS: u64 = 1_000_000;
pub const DEFAULT_TAU_MAX: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        })
    }
}

/// Flags shared by every subcommand; unset values fall back to the config
/// file, then to the defaults above.
#[derive(Debug, Clone, clap::Args)]
pub struct CommonArgs {
    /// Transmission rate R in bits per slot per unit bandwidth
    #[arg(long, allow_negative_numbers = true)]
    pub rate: Option<f64>,

    /// Average power budget in dB-watts (10^(x/10) W)
    #[arg(long, allow_negative_numbers = true)]
    pub pbar_dbw: Option<f64>,

    /// Comma-separated, strictly increasing power grid in dB-watts
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub pbar_grid_dbw: Option<Vec<f64>>,

    /// Number of tracked NACK-count states M
    #[arg(long)]
    pub states: Option<usize>,

    /// Initial annealing temperature T0
    #[arg(long)]
    pub t0: Option<f64>,

    /// Stopping temperature Tmin
    #[arg(long)]
    pub tmin: Option<f64>,

    /// Annealing candidates per temperature stage
    #[arg(long)]
    pub candidates: Option<usize>,

    /// Simulated slots per trajectory
    #[arg(long)]
    pub slots: Option<u64>,

    /// Master RNG seed
    #[arg(long)]
    pub seed: Option<u64>,

    /// Policy file (csv or json) to evaluate or simulate
    #[arg(long)]
    pub policy: Option<PathBuf>,

    /// Evaluate exactly this silent-state count instead of searching
    #[arg(long)]
    pub tau: Option<usize>,

    /// Largest silent-state count the on-off search tries
    #[arg(long)]
    pub tau_max: Option<usize>,

    /// Also Monte-Carlo-validate optimized policies (sweep)
    #[arg(long)]
    pub simulate: bool,

    /// Output path (defaults to stdout)
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Output format
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,

    /// TOML config file; flags override its values
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Config file mirroring the flags.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub rate: Option<f64>,
    pub pbar_dbw: Option<f64>,
    pub pbar_grid_dbw: Option<Vec<f64>>,
    pub states: Option<usize>,
    pub t0: Option<f64>,
    pub tmin: Option<f64>,
    pub candidates: Option<usize>,
    pub slots: Option<u64>,
    pub seed: Option<u64>,
    pub policy: Option<PathBuf>,
    pub tau: Option<usize>,
    pub tau_max: Option<usize>,
    pub simulate: Option<bool>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
}

/// Fully resolved experiment specification.
#[derive(Debug, Clone)]
pub struct ResolvedSpec {
    pub command: &'static str,
    pub rate: f64,
    pub states: usize,
    pub seed: u64,
    pub pbar_dbw: Option<f64>,
    pub pbar_grid_dbw: Option<Vec<f64>>,
    pub policy: Option<PathBuf>,
    pub tau: Option<usize>,
    pub tau_max: usize,
    pub t0: f64,
    pub tmin: f64,
    pub candidates: usize,
    pub slots: u64,
    pub simulate: bool,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
}

pub fn dbw_to_watts(dbw: f64) -> f64 {
    10f64.powf(dbw / 10.0)
}

impl CommonArgs {
    pub fn resolve(&self, command: &'static str) -> Result<ResolvedSpec> {
        let file = match &self.config {
            Some(path) => load_config(path)?,
            None => ConfigFile::default(),
        };
        let format = match &self.format {
            Some(f) => *f,
            None => match file.format.as_deref() {
                None => OutputFormat::Csv,
                Some("csv") => OutputFormat::Csv,
                Some("json") => OutputFormat::Json,
                Some(other) => bail!("unknown format {other:?} in config (expected csv or json)"),
            },
        };
        let states = self.states.or(file.states).unwrap_or(DEFAULT_STATES);
        let spec = ResolvedSpec {
            command,
            rate: self.rate.or(file.rate).unwrap_or(DEFAULT_RATE),
            states,
            seed: self.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            pbar_dbw: self.pbar_dbw.or(file.pbar_dbw),
            pbar_grid_dbw: self.pbar_grid_dbw.clone().or(file.pbar_grid_dbw),
            policy: self.policy.clone().or(file.policy),
            tau: self.tau.or(file.tau),
            // the default search range adapts to the state count
            tau_max: self
                .tau_max
                .or(file.tau_max)
                .unwrap_or(DEFAULT_TAU_MAX.min(states.saturating_sub(1))),
            t0: self.t0.or(file.t0).unwrap_or(DEFAULT_T0),
            tmin: self.tmin.or(file.tmin).unwrap_or(DEFAULT_TMIN),
            candidates: self
                .candidates
                .or(file.candidates)
                .unwrap_or(DEFAULT_CANDIDATES),
            slots: self.slots.or(file.slots).unwrap_or(DEFAULT_SLOTS),
            simulate: self.simulate || file.simulate.unwrap_or(false),
            format,
            out: self.out.clone().or(file.out),
        };
        if let Some(grid) = &spec.pbar_grid_dbw {
            if grid.is_empty() {
                bail!("power grid is empty");
            }
            if grid.iter().any(|v| !v.is_finite()) {
                bail!("power grid contains a non-finite value");
            }
            if grid.windows(2).any(|w| w[0] >= w[1]) {
                bail!("power grid must be strictly increasing, got {grid:?}");
            }
        }
        Ok(spec)
    }
}

fn load_config(path: &Path) -> Result<ConfigFile> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config file {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing config file {}", path.display()))
}

impl ResolvedSpec {
    /// Budget in watts, when a scalar budget applies.
    pub fn pbar_watts(&self) -> Result<f64> {
        let dbw = self
            .pbar_dbw
            .with_context(|| format!("--pbar-dbw is required for {}", self.command))?;
        Ok(dbw_to_watts(dbw))
    }

    /// Manifest rows, in a fixed order, describing this resolved spec.
    pub fn manifest(&self) -> Vec<(&'static str, serde_json::Value)> {
        use serde_json::json;
        let mut rows: Vec<(&'static str, serde_json::Value)> = vec![
            ("command", json!(self.command)),
            ("rate", json!(self.rate)),
            ("states", json!(self.states)),
            ("seed", json!(self.seed)),
        ];
        if let Some(dbw) = self.pbar_dbw {
            rows.push(("pbar_dbw", json!(dbw)));
        }
        if let Some(grid) = &self.pbar_grid_dbw {
            rows.push(("pbar_grid_dbw", json!(grid)));
        }
        if let Some(path) = &self.policy {
            rows.push(("policy", json!(path.display().to_string())));
        }
        if let Some(tau) = self.tau {
            rows.push(("tau", json!(tau)));
        }
        rows.push(("tau_max", json!(self.tau_max)));
        rows.push(("t0", json!(self.t0)));
        rows.push(("tmin", json!(self.tmin)));
        rows.push(("candidates", json!(self.candidates)));
        rows.push(("slots", json!(self.slots)));
        rows.push(("simulate", json!(self.simulate)));
        rows.push(("format", json!(self.format.to_string())));
        rows
    }
}
