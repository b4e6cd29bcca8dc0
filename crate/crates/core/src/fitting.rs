//! Calibration of the singlet spread `ΔL` against the quantum curve
//! `-cos θ`, plus the scalar solvers it needs.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::lhv::{linspace, required_delta_l_raw, way_correlation_singlet};
use crate::{Error, Result};

pub const DEFAULT_GRID_SIZE: usize = 1000;
/// Search interval for `ΔL`.
pub const FIT_BRACKET: (f64, f64) = (0.5, 2.0);
const ROOT_TOL: f64 = 1e-10;
const MIN_TOL: f64 = 1e-9;

/// Bisection for a root of `f` on `[lo, hi]` until the bracket is narrower
/// than `tol`.
pub fn bisect<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let (mut lo, mut hi) = (lo, hi);
    let mut f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::Bracket { lo, hi });
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Golden-section search for the minimum of a unimodal `f` on `[lo, hi]`.
pub fn golden_section_min<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    Ok(0.5 * (a + b))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// Root of the signed mean error. The error is odd about `π/2`, so the
    /// mean is taken over the half period `[0, π/2]`.
    ZeroMeanSigned,
    MinMeanAbs,
    /// Minimum mean squared error over `[0, π]`.
    LeastSquares,
}

impl Objective {
    pub fn as_str(self) -> &'static str {
        match self {
            Objective::ZeroMeanSigned => "zero_mean_signed",
            Objective::MinMeanAbs => "min_mean_abs",
            Objective::LeastSquares => "least_squares",
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Objective {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "zero_mean_signed" | "signed" => Ok(Objective::ZeroMeanSigned),
            "min_mean_abs" | "abs" => Ok(Objective::MinMeanAbs),
            "least_squares" | "lsq" => Ok(Objective::LeastSquares),
            other => Err(Error::InvalidArgument(format!("unknown objective '{other}'"))),
        }
    }
}

/// Agreement between the singlet band model and `-cos θ` at one `ΔL`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub delta_l_star: f64,
    pub mean_signed_error: f64,
    pub mean_abs_error: f64,
    pub max_abs_error: f64,
    pub rms_error: f64,
    pub argmax_theta: f64,
    pub grid_size: usize,
    pub objective: Option<Objective>,
}

fn check_grid(grid_size: usize) -> Result<()> {
    if grid_size < 100 {
        return Err(Error::InvalidArgument(format!(
            "grid_size must be at least 100, got {grid_size}"
        )));
    }
    Ok(())
}

fn errors_on(delta_l: f64, thetas: &[f64]) -> Result<Vec<f64>> {
    thetas
        .iter()
        .map(|&t| Ok(way_correlation_singlet(t, delta_l)? + t.cos()))
        .collect()
}

/// Error statistics of `E_L(θ) - (-cos θ)` on a uniform grid over `[0, π]`.
pub fn deviation_stats(delta_l: f64, grid_size: usize) -> Result<FitResult> {
    check_grid(grid_size)?;
    let thetas = linspace(0.0, PI, grid_size);
    let errors = errors_on(delta_l, &thetas)?;
    let n = errors.len() as f64;
    let mut max_abs_error = 0.0;
    let mut argmax_theta = 0.0;
    for (&t, &e) in thetas.iter().zip(&errors) {
        if e.abs() > max_abs_error {
            max_abs_error = e.abs();
            argmax_theta = t;
        }
    }
    Ok(FitResult {
        delta_l_star: delta_l,
        mean_signed_error: errors.iter().sum::<f64>() / n,
        mean_abs_error: errors.iter().map(|e| e.abs()).sum::<f64>() / n,
        max_abs_error,
        rms_error: (errors.iter().map(|e| e * e).sum::<f64>() / n).sqrt(),
        argmax_theta,
        grid_size,
        objective: None,
    })
}

/// Mean signed error over `[0, π/2]`.
pub fn half_period_mean_signed_error(delta_l: f64, grid_size: usize) -> Result<f64> {
    check_grid(grid_size)?;
    let thetas = linspace(0.0, FRAC_PI_2, grid_size);
    Ok(errors_on(delta_l, &thetas)?.iter().sum::<f64>() / grid_size as f64)
}

/// Best constant `ΔL` under `objective`, reported with the full-period
/// [`deviation_stats`] at that value.
pub fn fit_delta_l(grid_size: usize, objective: Objective) -> Result<FitResult> {
    check_grid(grid_size)?;
    let (lo, hi) = FIT_BRACKET;
    let star = match objective {
        Objective::ZeroMeanSigned => {
            bisect(|dl| half_period_mean_signed_error(dl, grid_size), lo, hi, ROOT_TOL)?
        }
        Objective::MinMeanAbs => golden_section_min(
            |dl| Ok(deviation_stats(dl, grid_size)?.mean_abs_error),
            lo,
            hi,
            MIN_TOL,
        )?,
        Objective::LeastSquares => golden_section_min(
            |dl| Ok(deviation_stats(dl, grid_size)?.rms_error),
            lo,
            hi,
            MIN_TOL,
        )?,
    };
    let mut result = deviation_stats(star, grid_size)?;
    result.objective = Some(objective);
    Ok(result)
}

const SINGULAR_GAP: f64 = 1e-6;

/// The `θ`-dependent spread that would make the singlet band model equal to
/// `-cos θ` exactly, on `grid_size` interior points of `(0, π)`. Points within
/// `1e-6` of the removable singularity at `π/2` are dropped.
pub fn exact_delta_l_curve(grid_size: usize) -> Result<Vec<(f64, f64)>> {
    if grid_size == 0 {
        return Err(Error::InvalidArgument("grid_size must be positive".into()));
    }
    let grid = linspace(0.0, PI, grid_size + 2);
    Ok(grid[1..=grid_size]
        .iter()
        .filter(|&&t| {
            t > SINGULAR_GAP && t < PI - SINGULAR_GAP && (t - FRAC_PI_2).abs() >= SINGULAR_GAP
        })
        .map(|&t| (t, required_delta_l_raw(t)))
        .collect())
}
