mod commands;
mod config;

use std::fmt;
use std::path::Path;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::Parser;

use config::{Args, RunConfig};

const EXIT_INVALID: u8 = 2;
const EXIT_NUMERIC: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Debug)]
pub enum CliError {
    Invalid(String),
    Numeric(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => EXIT_INVALID,
            CliError::Numeric(_) => EXIT_NUMERIC,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Invalid(m) => write!(f, "invalid argument: {m}"),
            CliError::Numeric(m) => write!(f, "numeric error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<waybell_core::Error> for CliError {
    fn from(e: waybell_core::Error) -> Self {
        if e.is_numeric() {
            CliError::Numeric(e.to_string())
        } else {
            CliError::Invalid(e.to_string())
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("WAYBELL_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Invalid(format!("WAYBELL_THREADS must be a positive integer, got '{raw}'")))?;
    waybell_core::sampler::init_thread_pool(threads)?;
    Ok(())
}

fn write_meta(out: &Path, cfg: &RunConfig) -> Result<(), CliError> {
    let secs = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or_default();
    let meta = serde_json::json!({
        "tool": "waybell",
        "version": env!("CARGO_PKG_VERSION"),
        "subcommand": format!("{:?}", cfg.subcommand).to_lowercase(),
        "output": out.display().to_string(),
        "unix_time": secs,
    });
    let mut path = out.as_os_str().to_owned();
    path.push(".meta.json");
    std::fs::write(&path, format!("{meta:#}\n"))
        .map_err(|e| CliError::Io(format!("{}: {e}", Path::new(&path).display())))
}

fn run() -> Result<(), CliError> {
    let args = Args::parse();
    configure_threads()?;
    let cfg = RunConfig::resolve(args)?;
    let text = commands::run(&cfg)?;
    match &cfg.out {
        Some(path) => {
            std::fs::write(path, &text)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            if cfg.meta {
                write_meta(path, &cfg)?;
            }
        }
        None if cfg.meta => return Err(CliError::Invalid("--meta requires --out".into())),
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("waybell: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
