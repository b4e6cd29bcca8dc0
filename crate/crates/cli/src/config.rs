use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::Deserialize;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Subcommand {
    Curve,
    Chsh,
    Scan,
    Fit,
    Mc,
    Bound,
    Single,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Simulate conservation-law constrained hidden-variable models of Bell tests.
#[derive(Debug, Parser)]
#[command(name = "waybell", version)]
pub struct Args {
    #[arg(value_enum)]
    pub subcommand: Subcommand,
    /// qm, base, way_singlet or way_triplet
    #[arg(long)]
    pub model: Option<String>,
    /// singlet, psi_plus or phi_minus; `curve` accepts a comma list
    #[arg(long)]
    pub state: Option<String>,
    /// Spread(s) of the conserved angular momentum, comma separated
    #[arg(long = "delta-l", value_delimiter = ',', allow_hyphen_values = true)]
    pub delta_l: Option<Vec<f64>>,
    #[arg(long)]
    pub theta_points: Option<usize>,
    /// Single relative angle (radians) for mc, bound and single
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub samples: Option<u64>,
    /// a,a',b,b' in radians
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub settings: Option<Vec<f64>>,
    /// zero_mean_signed, min_mean_abs or least_squares
    #[arg(long)]
    pub objective: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// TOML file with defaults for any of the flags above
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write `<out>.meta.json` with run metadata (requires --out)
    #[arg(long)]
    pub meta: bool,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub model: Option<String>,
    pub state: Option<String>,
    pub delta_l: Option<Vec<f64>>,
    pub theta_points: Option<usize>,
    pub theta: Option<f64>,
    pub seed: Option<u64>,
    pub samples: Option<u64>,
    pub settings: Option<Vec<f64>>,
    pub objective: Option<String>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
    }
}

/// Flags merged over the config file; defaults are applied per subcommand.
#[derive(Debug)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    pub model: Option<String>,
    pub state: Option<String>,
    pub delta_l: Option<Vec<f64>>,
    pub theta_points: Option<usize>,
    pub theta: Option<f64>,
    pub seed: Option<u64>,
    pub samples: Option<u64>,
    pub settings: Option<Vec<f64>>,
    pub objective: Option<String>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub meta: bool,
}

impl RunConfig {
    pub fn resolve(args: Args) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        Ok(Self {
            subcommand: args.subcommand,
            model: args.model.or(file.model),
            state: args.state.or(file.state),
            delta_l: args.delta_l.or(file.delta_l),
            theta_points: args.theta_points.or(file.theta_points),
            theta: args.theta.or(file.theta),
            seed: args.seed.or(file.seed),
            samples: args.samples.or(file.samples),
            settings: args.settings.or(file.settings),
            objective: args.objective.or(file.objective),
            out: args.out.or(file.out),
            format: args.format.or(file.format),
            meta: args.meta,
        })
    }
}
