//! Deterministic text output: 12-significant-digit numbers, CSV and JSON
//! tables, and readers for both.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::lhv::{linspace, Model, WayParams};
use crate::quantum::{qm_correlation, StateKind};
use crate::{Error, Result};

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Formats `x` as a decimal literal with at most 12 significant digits.
/// Trailing zeros are dropped; very large or small magnitudes use an
/// exponent.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_owned();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let mut digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    while digits.len() > 1 && digits.ends_with('0') {
        digits.pop();
    }
    let mut out = String::with_capacity(24);
    if negative {
        out.push('-');
    }
    if !(-7..SIGNIFICANT_DIGITS as i32).contains(&exp) {
        out.push_str(&digits[..1]);
        if digits.len() > 1 {
            out.push('.');
            out.push_str(&digits[1..]);
        }
        let _ = write!(out, "e{exp}");
        return out;
    }
    let point = exp + 1;
    if point <= 0 {
        out.push_str("0.");
        out.extend(std::iter::repeat('0').take((-point) as usize));
        out.push_str(&digits);
    } else if point as usize >= digits.len() {
        out.push_str(&digits);
        out.extend(std::iter::repeat('0').take(point as usize - digits.len()));
    } else {
        out.push_str(&digits[..point as usize]);
        out.push('.');
        out.push_str(&digits[point as usize..]);
    }
    out
}

/// `x` rounded to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    fmt_sig(x).parse().expect("fmt_sig emits parseable numbers")
}

/// Rounds every float inside a JSON value to 12 significant digits.
pub fn round_json(value: Value) -> Value {
    match value {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().unwrap_or_default());
            serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(round_json).collect()),
        Value::Object(map) => {
            Value::Object(map.into_iter().map(|(k, v)| (k, round_json(v))).collect())
        }
        other => other,
    }
}

/// Serializes `value` as pretty JSON with rounded floats and a trailing
/// newline.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| Error::Parse(e.to_string()))?;
    let mut s =
        serde_json::to_string_pretty(&round_json(v)).map_err(|e| Error::Parse(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Header plus numeric rows; the first column is the abscissa.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CurveTable {
    pub fn new(columns: Vec<String>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::DimensionMismatch(self.columns.len(), row.len()));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    /// Same table with every value rounded as it would be written.
    pub fn rounded(&self) -> Self {
        Self {
            columns: self.columns.clone(),
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|&x| round_sig(x)).collect())
                .collect(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&x| fmt_sig(x)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty CSV".into()))?;
        let mut table = Self::new(header.split(',').map(|s| s.trim().to_owned()).collect());
        for (i, line) in lines.enumerate() {
            let row = line
                .split(',')
                .map(|cell| {
                    cell.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::Parse(format!("row {}: '{cell}': {e}", i + 1)))
                })
                .collect::<Result<Vec<_>>>()?;
            table.push_row(row)?;
        }
        Ok(table)
    }

    pub fn to_json(&self) -> Result<String> {
        to_json_string(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let table: Self = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if table.rows.iter().any(|r| r.len() != table.columns.len()) {
            return Err(Error::Parse("row length differs from header".into()));
        }
        Ok(table)
    }
}

/// Default spreads plotted against the quantum curve.
pub const DEFAULT_CURVE_DELTA_LS: [f64; 5] = [0.5, 0.77, 1.0, 2.0, 10.0];

/// Column name for a band-model curve.
pub fn way_column_name(kind: StateKind, delta_l: f64) -> Result<String> {
    let tag = match kind {
        StateKind::Singlet => "singlet_dL",
        StateKind::TripletPsiPlus => "psiplus_dLxi",
        StateKind::TripletPhiMinus => "phiminus_dLxi",
        StateKind::Custom => return Err(Error::Unsupported(kind.to_string())),
    };
    Ok(format!("E_way_{tag}{}", fmt_sig(delta_l)))
}

/// Response curves over `θ ∈ [0, 2π]`: the quantum singlet, the base model
/// and one band-model column per `(kind, ΔL)` pair.
pub fn curve_table(kinds: &[StateKind], delta_ls: &[f64], theta_points: usize) -> Result<CurveTable> {
    if theta_points < 2 {
        return Err(Error::InvalidArgument("theta_points must be at least 2".into()));
    }
    let mut columns = vec!["theta".to_owned(), "E_qm".to_owned(), "E_base".to_owned()];
    let mut models = Vec::new();
    for &kind in kinds {
        for &dl in delta_ls {
            models.push(Model::Way(WayParams::new(dl, kind)?));
            columns.push(way_column_name(kind, dl)?);
        }
    }
    let mut table = CurveTable::new(columns);
    for theta in linspace(0.0, std::f64::consts::TAU, theta_points) {
        let mut row = vec![
            theta,
            qm_correlation(StateKind::Singlet, theta, 0.0)?,
            Model::Base.correlation_full(theta)?,
        ];
        for m in &models {
            row.push(m.correlation_full(theta)?);
        }
        table.push_row(row)?;
    }
    Ok(table)
}
