use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;
use waybell_core::bell::{
    chsh_s, max_chsh, quantum_singlet, ChshResult, ChshSettings, CLASSICAL_BOUND,
    DEFAULT_GRID_STEPS, DEFAULT_REFINE_ITERATIONS, STORZ_2023_S, TSIRELSON_BOUND,
};
use waybell_core::fitting::{exact_delta_l_curve, fit_delta_l, Objective, DEFAULT_GRID_SIZE};
use waybell_core::io::{curve_table, fmt_sig, to_json_string, CurveTable, DEFAULT_CURVE_DELTA_LS};
use waybell_core::lhv::{linspace, single_spin_required_delta_l, way_bound, Model, ModelId};
use waybell_core::quantum::way_numerator;
use waybell_core::sampler::{estimate_correlation, SamplerConfig};
use waybell_core::StateKind;

use crate::config::{Format, RunConfig, Subcommand};
use crate::CliError;

const DEFAULT_THETA_POINTS: usize = 361;
const DEFAULT_DELTA_L: f64 = 0.77;
const DEFAULT_SEED: u64 = 42;
const DEFAULT_SAMPLES: u64 = 1_000_000;

/// Where a correlation function comes from.
#[derive(Clone, Copy, Debug)]
enum Source {
    Quantum,
    Hidden(Model),
}

impl Source {
    fn name(&self) -> &'static str {
        match self {
            Source::Quantum => "qm",
            Source::Hidden(m) => m.id().as_str(),
        }
    }

    fn correlation(&self, alpha: f64, beta: f64) -> waybell_core::Result<f64> {
        match self {
            Source::Quantum => quantum_singlet(alpha, beta),
            Source::Hidden(m) => m.correlation_at(alpha, beta),
        }
    }
}

fn parse_state(s: Option<&str>) -> Result<StateKind, CliError> {
    match s {
        None => Ok(StateKind::Singlet),
        Some(s) => Ok(s.parse::<StateKind>()?),
    }
}

fn model_name(cfg: &RunConfig, default: &str) -> String {
    cfg.model.clone().unwrap_or_else(|| default.to_owned())
}

fn build_model(name: &str, kind: StateKind, delta_l: f64) -> Result<Model, CliError> {
    let id: ModelId = name.parse()?;
    // a triplet state with the generic "way" model means the triplet branch
    let id = if id == ModelId::WaySinglet && kind.is_triplet() {
        ModelId::WayTriplet
    } else {
        id
    };
    Ok(Model::from_id(id, delta_l, kind)?)
}

fn build_source(name: &str, kind: StateKind, delta_l: f64) -> Result<Source, CliError> {
    if matches!(name, "qm" | "quantum") {
        if kind != StateKind::Singlet {
            return Err(CliError::Invalid(
                "the quantum CHSH oracle is implemented for the singlet".into(),
            ));
        }
        return Ok(Source::Quantum);
    }
    Ok(Source::Hidden(build_model(name, kind, delta_l)?))
}

fn delta_ls(cfg: &RunConfig, default: &[f64]) -> Result<Vec<f64>, CliError> {
    let list = cfg.delta_l.clone().unwrap_or_else(|| default.to_vec());
    if list.is_empty() {
        return Err(CliError::Invalid("--delta-l must not be empty".into()));
    }
    Ok(list)
}

fn first_delta_l(cfg: &RunConfig) -> Result<f64, CliError> {
    Ok(delta_ls(cfg, &[DEFAULT_DELTA_L])?[0])
}

fn theta_points(cfg: &RunConfig, default: usize) -> Result<usize, CliError> {
    let n = cfg.theta_points.unwrap_or(default);
    if n < 2 {
        return Err(CliError::Invalid("--theta-points must be at least 2".into()));
    }
    Ok(n)
}

fn settings(cfg: &RunConfig) -> Result<ChshSettings, CliError> {
    match cfg.settings.as_deref() {
        None => Ok(ChshSettings::STANDARD),
        Some(&[a, ap, b, bp]) => Ok(ChshSettings::new(a, ap, b, bp)?),
        Some(other) => Err(CliError::Invalid(format!(
            "--settings takes 4 angles, got {}",
            other.len()
        ))),
    }
}

fn table_output(table: &CurveTable, format: Format) -> Result<String, CliError> {
    match format {
        Format::Csv => Ok(table.to_csv()),
        Format::Json => Ok(table.to_json()?),
    }
}

fn json_only(cfg: &RunConfig) -> Result<(), CliError> {
    if cfg.format == Some(Format::Csv) {
        return Err(CliError::Invalid(format!(
            "{:?} output is JSON only",
            cfg.subcommand
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct Reference {
    classical: f64,
    tsirelson: f64,
    storz_2023: f64,
}

const REFERENCE: Reference = Reference {
    classical: CLASSICAL_BOUND,
    tsirelson: TSIRELSON_BOUND,
    storz_2023: STORZ_2023_S,
};

#[derive(Serialize)]
struct ChshReport<'a> {
    model: &'a str,
    state: StateKind,
    delta_l: Option<f64>,
    #[serde(flatten)]
    result: ChshResult,
    reference: &'a Reference,
}

pub fn run(cfg: &RunConfig) -> Result<String, CliError> {
    match cfg.subcommand {
        Subcommand::Curve => run_curve(cfg),
        Subcommand::Chsh => run_chsh(cfg),
        Subcommand::Scan => run_scan(cfg),
        Subcommand::Fit => run_fit(cfg),
        Subcommand::Mc => run_mc(cfg),
        Subcommand::Bound => run_bound(cfg),
        Subcommand::Single => run_single(cfg),
    }
}

pub fn run_curve(cfg: &RunConfig) -> Result<String, CliError> {
    let kinds = match cfg.state.as_deref() {
        None => vec![StateKind::Singlet],
        Some(list) => list
            .split(',')
            .map(|s| parse_state(Some(s.trim())))
            .collect::<Result<Vec<_>, _>>()?,
    };
    let table = curve_table(
        &kinds,
        &delta_ls(cfg, &DEFAULT_CURVE_DELTA_LS)?,
        theta_points(cfg, DEFAULT_THETA_POINTS)?,
    )?;
    table_output(&table, cfg.format.unwrap_or(Format::Csv))
}

pub fn run_chsh(cfg: &RunConfig) -> Result<String, CliError> {
    json_only(cfg)?;
    let kind = parse_state(cfg.state.as_deref())?;
    let name = model_name(cfg, "qm");
    let delta_l = first_delta_l(cfg)?;
    let source = build_source(&name, kind, delta_l)?;
    let result = chsh_s(|a, b| source.correlation(a, b), &settings(cfg)?)?;
    let report = ChshReport {
        model: source.name(),
        state: kind,
        delta_l: matches!(source, Source::Hidden(Model::Way(_))).then_some(delta_l),
        result,
        reference: &REFERENCE,
    };
    Ok(to_json_string(&report)?)
}

#[derive(Serialize)]
struct ScanEntry {
    delta_l: Option<f64>,
    tsirelson_margin: f64,
    #[serde(flatten)]
    result: ChshResult,
}

#[derive(Serialize)]
struct ScanReport<'a> {
    model: &'a str,
    state: StateKind,
    grid_steps: usize,
    refine_iterations: usize,
    results: Vec<ScanEntry>,
    reference: &'a Reference,
}

pub fn run_scan(cfg: &RunConfig) -> Result<String, CliError> {
    json_only(cfg)?;
    let kind = parse_state(cfg.state.as_deref())?;
    let name = model_name(cfg, "way_singlet");
    let mut results = Vec::new();
    let mut label = "";
    let spreads: Vec<Option<f64>> = if matches!(name.as_str(), "qm" | "quantum" | "base" | "bell") {
        vec![None]
    } else {
        delta_ls(cfg, &DEFAULT_CURVE_DELTA_LS)?.into_iter().map(Some).collect()
    };
    for dl in spreads {
        let source = build_source(&name, kind, dl.unwrap_or(DEFAULT_DELTA_L))?;
        label = source.name();
        let result = max_chsh(
            |a, b| source.correlation(a, b),
            DEFAULT_GRID_STEPS,
            DEFAULT_REFINE_ITERATIONS,
        )?;
        results.push(ScanEntry {
            delta_l: dl,
            tsirelson_margin: result.s_value - TSIRELSON_BOUND,
            result,
        });
    }
    Ok(to_json_string(&ScanReport {
        model: label,
        state: kind,
        grid_steps: DEFAULT_GRID_STEPS,
        refine_iterations: DEFAULT_REFINE_ITERATIONS,
        results,
        reference: &REFERENCE,
    })?)
}

pub fn run_fit(cfg: &RunConfig) -> Result<String, CliError> {
    json_only(cfg)?;
    let objective: Objective = match cfg.objective.as_deref() {
        None => Objective::ZeroMeanSigned,
        Some(s) => s.parse()?,
    };
    let grid = cfg.theta_points.unwrap_or(DEFAULT_GRID_SIZE);
    Ok(to_json_string(&fit_delta_l(grid, objective)?)?)
}

#[derive(Serialize)]
struct McReport<'a> {
    model: &'a str,
    state: StateKind,
    delta_l: Option<f64>,
    theta: f64,
    closed_form: f64,
    mean: f64,
    std_error: f64,
    n_accepted: u64,
    n_rejected: u64,
    seed: u64,
}

pub fn run_mc(cfg: &RunConfig) -> Result<String, CliError> {
    json_only(cfg)?;
    let kind = parse_state(cfg.state.as_deref())?;
    let name = model_name(cfg, "way_singlet");
    let model = build_model(&name, kind, first_delta_l(cfg)?)?;
    let theta = cfg.theta.unwrap_or(FRAC_PI_2);
    let config = SamplerConfig::new(
        cfg.seed.unwrap_or(DEFAULT_SEED),
        cfg.samples.unwrap_or(DEFAULT_SAMPLES),
    );
    let est = estimate_correlation(&model, theta, &config)?;
    Ok(to_json_string(&McReport {
        model: model.id().as_str(),
        state: kind,
        delta_l: model.params().map(|p| p.delta_l),
        theta,
        closed_form: model.correlation(theta)?,
        mean: est.mean,
        std_error: est.std_error,
        n_accepted: est.n_accepted,
        n_rejected: est.n_rejected,
        seed: est.seed,
    })?)
}

pub fn run_bound(cfg: &RunConfig) -> Result<String, CliError> {
    let spreads = delta_ls(cfg, &[0.5])?;
    let thetas = match cfg.theta {
        Some(t) => vec![t],
        None => linspace(0.0, PI, theta_points(cfg, 181)?),
    };
    let mut columns = vec!["theta".to_owned()];
    columns.extend(spreads.iter().map(|dl| format!("way_bound_dL{}", fmt_sig(*dl))));
    columns.push("numerator".to_owned());
    columns.push("numerator_check_delta".to_owned());
    let mut table = CurveTable::new(columns);
    for theta in thetas {
        let mut row = vec![theta];
        for &dl in &spreads {
            row.push(way_bound(theta, dl)?);
        }
        let numerator = way_numerator(StateKind::Singlet, 0.0, theta)?;
        row.push(numerator);
        row.push((numerator - theta.sin().abs()).abs());
        table.push_row(row)?;
    }
    table_output(&table, cfg.format.unwrap_or(Format::Json))
}

pub fn run_single(cfg: &RunConfig) -> Result<String, CliError> {
    let mut table = CurveTable::new(vec!["theta".into(), "delta_l_exact".into()]);
    match cfg.theta {
        Some(alpha) => table.push_row(vec![alpha, single_spin_required_delta_l(alpha)?])?,
        None => {
            for (t, dl) in exact_delta_l_curve(theta_points(cfg, 179)?)? {
                table.push_row(vec![t, dl])?;
            }
        }
    }
    table_output(&table, cfg.format.unwrap_or(Format::Json))
}
