//! wasm-bindgen surface for the static demo page in `www/`.
//!
//! Every export returns a JSON string; the page parses it with `JSON.parse`.
//! The `*_json` functions hold the logic and run natively for tests.

use serde::Serialize;
use wasm_bindgen::prelude::*;
use waybell_core::bell::{chsh_s, quantum_singlet, ChshResult, ChshSettings, TSIRELSON_BOUND};
use waybell_core::io::{curve_table, to_json_string};
use waybell_core::lhv::{Model, ModelId};
use waybell_core::sampler::{estimate_correlation, SamplerConfig};
use waybell_core::StateKind;

/// Largest sample count the page may request in one call.
pub const MAX_SAMPLES: u64 = 5_000_000;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn parse_states(states: &str) -> Result<Vec<StateKind>, String> {
    states
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<StateKind>().map_err(err))
        .collect()
}

pub fn response_curves_json(delta_ls: &[f64], states: &str, points: usize) -> Result<String, String> {
    let kinds = parse_states(states)?;
    let table = curve_table(&kinds, delta_ls, points).map_err(err)?;
    table.to_json().map_err(err)
}

#[derive(Serialize)]
struct ChshView {
    #[serde(flatten)]
    result: ChshResult,
    tsirelson_margin: f64,
}

pub fn chsh_json(model: &str, delta_l: f64, angles: [f64; 4]) -> Result<String, String> {
    let settings = ChshSettings::new(angles[0], angles[1], angles[2], angles[3]).map_err(err)?;
    let result = if model == "qm" {
        chsh_s(quantum_singlet, &settings)
    } else {
        let id: ModelId = model.parse().map_err(err)?;
        let m = Model::from_id(id, delta_l, StateKind::Singlet).map_err(err)?;
        chsh_s(|a, b| m.correlation_at(a, b), &settings)
    }
    .map_err(err)?;
    to_json_string(&ChshView {
        tsirelson_margin: result.s_value - TSIRELSON_BOUND,
        result,
    })
    .map_err(err)
}

#[derive(Serialize)]
struct McView {
    theta: f64,
    closed_form: f64,
    mean: f64,
    std_error: f64,
    n_accepted: u64,
    n_rejected: u64,
    seed: u64,
}

pub fn monte_carlo_json(
    model: &str,
    state: &str,
    delta_l: f64,
    theta: f64,
    seed: u64,
    samples: u64,
) -> Result<String, String> {
    if samples > MAX_SAMPLES {
        return Err(format!("at most {MAX_SAMPLES} samples per call"));
    }
    let id: ModelId = model.parse().map_err(err)?;
    let kind: StateKind = state.parse().map_err(err)?;
    let m = Model::from_id(id, delta_l, kind).map_err(err)?;
    let est = estimate_correlation(&m, theta, &SamplerConfig::new(seed, samples)).map_err(err)?;
    to_json_string(&McView {
        theta,
        closed_form: m.correlation(theta).map_err(err)?,
        mean: est.mean,
        std_error: est.std_error,
        n_accepted: est.n_accepted,
        n_rejected: est.n_rejected,
        seed: est.seed,
    })
    .map_err(err)
}

/// Response curves over `[0, 2π]` for a comma-separated list of states and
/// spreads.
#[wasm_bindgen]
pub fn response_curves(delta_ls: Vec<f64>, states: &str, points: usize) -> Result<String, JsError> {
    response_curves_json(&delta_ls, states, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn chsh(model: &str, delta_l: f64, a: f64, a_prime: f64, b: f64, b_prime: f64) -> Result<String, JsError> {
    chsh_json(model, delta_l, [a, a_prime, b, b_prime]).map_err(|e| JsError::new(&e))
}

/// `seed` arrives as a JS number; values above 2^53 lose precision.
#[wasm_bindgen]
pub fn monte_carlo(
    model: &str,
    state: &str,
    delta_l: f64,
    theta: f64,
    seed: f64,
    samples: u32,
) -> Result<String, JsError> {
    monte_carlo_json(model, state, delta_l, theta, seed as u64, samples as u64)
        .map_err(|e| JsError::new(&e))
}
