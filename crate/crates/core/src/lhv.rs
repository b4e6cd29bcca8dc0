//! Closed-form hidden-variable response functions.
//!
//! The base model is Bell's original one: a uniformly distributed angle `λ`
//! and deterministic ±1 outcomes. The conservation-law model removes a band of
//! half-width `b(θ)` around the outcome-flip boundary `λ = π - θ` and
//! renormalizes what is left, so the observed measure depends on the
//! settings even though the density of `λ` does not.
//!
//! All closed forms live on `θ ∈ [0, π]`; the full period goes through
//! [`extend_symmetry`].

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::quantum::StateKind;
use crate::{Error, Result};

/// Smallest spread of the conserved quantity that keeps `|E| ≤ 1`.
pub const PHYSICAL_FLOOR: f64 = 0.5;

const SQRT_3: f64 = 1.732_050_807_568_877_2;

/// Lower bound for the singlet closed form: below `1/π` the denominator
/// `πΔL - sin θ` vanishes somewhere on `[0, π]`.
pub fn singlet_delta_l_min() -> f64 {
    1.0 / PI
}

/// `sin θ` on `[0, π]`, evaluated by reflection so that `θ = π` gives
/// exactly zero.
fn sin_half_period(theta: f64) -> f64 {
    if theta > FRAC_PI_2 {
        (PI - theta).sin()
    } else {
        theta.sin()
    }
}

fn check_half_period(theta: f64) -> Result<()> {
    if theta.is_finite() && (0.0..=PI).contains(&theta) {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "theta",
            value: theta,
            domain: "[0, pi]",
        })
    }
}

/// Where the excluded band sits relative to the outcome flip.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BandConvention {
    /// Band centred on the flip boundary `λ = π - θ`.
    #[default]
    BoundaryBand,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WayParams {
    /// Spread of `J_y` in units of ħ. For triplets this is the probe-only
    /// spread `ΔL_ξ`; the state contributes one more unit.
    pub delta_l: f64,
    pub kind: StateKind,
    pub band_convention: BandConvention,
}

impl WayParams {
    pub fn new(delta_l: f64, kind: StateKind) -> Result<Self> {
        if !delta_l.is_finite() || delta_l <= 0.0 {
            return Err(Error::Parameter(format!("delta_L must be positive, got {delta_l}")));
        }
        match kind {
            StateKind::Singlet if delta_l <= singlet_delta_l_min() => Err(Error::Parameter(
                format!("singlet delta_L must exceed 1/pi, got {delta_l}"),
            )),
            StateKind::Custom => Err(Error::Unsupported(kind.to_string())),
            _ => Ok(Self {
                delta_l,
                kind,
                band_convention: BandConvention::BoundaryBand,
            }),
        }
    }

    pub fn singlet(delta_l: f64) -> Result<Self> {
        Self::new(delta_l, StateKind::Singlet)
    }

    pub fn is_physical(&self) -> bool {
        self.delta_l >= PHYSICAL_FLOOR
    }

    /// Spread entering the uncertainty bound: the probe's for the singlet,
    /// probe plus one for the triplets.
    pub fn total_spread(&self) -> f64 {
        if self.kind.is_triplet() {
            self.delta_l + 1.0
        } else {
            self.delta_l
        }
    }
}

/// Bell's piecewise-linear response, `(2/π)θ - 1` on `[0, π]`.
pub fn base_correlation(theta: f64) -> Result<f64> {
    check_half_period(theta)?;
    Ok(2.0 * theta / PI - 1.0)
}

/// Extends a response defined on `[0, π]` to `[0, 2π]` with
/// `E(θ) = -E(θ - π)` on the second half.
pub fn extend_symmetry<F>(response: F, theta: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if !theta.is_finite() || !(0.0..=TAU).contains(&theta) {
        return Err(Error::Domain {
            what: "theta",
            value: theta,
            domain: "[0, 2pi]",
        });
    }
    if theta <= PI {
        response(theta)
    } else {
        Ok(-response(theta - PI)?)
    }
}

/// Half-width of the excluded `λ` band: `sin θ / (2ΔL)` for the singlet and
/// `√3 sin θ / (2(ΔL_ξ + 1))` for the triplets.
pub fn exclusion_halfwidth(theta: f64, params: &WayParams) -> f64 {
    let numerator = if params.kind.is_triplet() {
        SQRT_3 * sin_half_period(theta)
    } else {
        sin_half_period(theta)
    };
    numerator / (2.0 * params.total_spread())
}

/// Response with a band of half-width `b` removed around the flip boundary
/// and the remainder renormalized: `(2θ - π)/(π - 2b)`.
pub fn band_correlation(theta: f64, b: f64) -> Result<f64> {
    check_half_period(theta)?;
    if !b.is_finite() || b < 0.0 {
        return Err(Error::Parameter(format!("band half-width must be >= 0, got {b}")));
    }
    if b >= FRAC_PI_2 {
        return Err(Error::DegenerateBand(b));
    }
    Ok((2.0 * theta - PI) / (PI - 2.0 * b))
}

/// Singlet response `ΔL(2θ - π)/(πΔL - sin θ)`.
pub fn way_correlation_singlet(theta: f64, delta_l: f64) -> Result<f64> {
    check_half_period(theta)?;
    WayParams::singlet(delta_l)?;
    Ok(delta_l * (2.0 * theta - PI) / (PI * delta_l - sin_half_period(theta)))
}

/// Triplet response `±(ΔL_ξ + 1)(2θ - π)/(πΔL_ξ - √3 sin θ + π)`, `+` for
/// `|ψ+⟩` and `-` for `|φ-⟩`.
pub fn way_correlation_triplet(theta: f64, delta_l_xi: f64, kind: StateKind) -> Result<f64> {
    check_half_period(theta)?;
    let sign = match kind {
        StateKind::TripletPsiPlus => 1.0,
        StateKind::TripletPhiMinus => -1.0,
        other => {
            return Err(Error::Unsupported(format!("{other} is not a triplet")));
        }
    };
    WayParams::new(delta_l_xi, kind)?;
    let denom = PI * delta_l_xi - SQRT_3 * sin_half_period(theta) + PI;
    if denom <= 0.0 {
        return Err(Error::Parameter(format!(
            "delta_L_xi = {delta_l_xi} gives a non-positive denominator at theta = {theta}"
        )));
    }
    Ok(sign * (delta_l_xi + 1.0) * (2.0 * theta - PI) / denom)
}

/// Lower bound on the expected squared deviation, `sin²θ / (4ΔL²)`.
pub fn way_bound(theta: f64, delta_l: f64) -> Result<f64> {
    if !delta_l.is_finite() || delta_l <= 0.0 {
        return Err(Error::Parameter(format!("delta_L must be positive, got {delta_l}")));
    }
    let s = theta.sin();
    Ok(s * s / (4.0 * delta_l * delta_l))
}

const SINGULAR_OFFSET: f64 = 1e-6;

// sinα cosα / (π cos α - π + 2α), with the denominator written as
// 2α - 2π sin²(α/2) to avoid cancellation near α = 0.
pub(crate) fn required_delta_l_raw(alpha: f64) -> f64 {
    let (s, c) = alpha.sin_cos();
    let half = (alpha / 2.0).sin();
    s * c / (2.0 * alpha - 2.0 * PI * half * half)
}

/// Spread of the conserved quantity that makes the band model reproduce the
/// quantum single-spin expectation exactly at angle `alpha ∈ (0, π)`.
///
/// Solves `ΔL(2α - π)/(πΔL - sin α) = -cos α`. The removable singularities at
/// `0`, `π/2` and `π` are filled with two-sided limits.
pub fn single_spin_required_delta_l(alpha: f64) -> Result<f64> {
    if !alpha.is_finite() || !(0.0..=PI).contains(&alpha) {
        return Err(Error::Domain {
            what: "alpha",
            value: alpha,
            domain: "(0, pi)",
        });
    }
    let value = match [0.0, FRAC_PI_2, PI]
        .into_iter()
        .find(|s| (alpha - s).abs() < SINGULAR_OFFSET)
    {
        Some(s) => {
            0.5 * (required_delta_l_raw(s - SINGULAR_OFFSET)
                + required_delta_l_raw(s + SINGULAR_OFFSET))
        }
        None => required_delta_l_raw(alpha),
    };
    if !(value > 0.0) {
        return Err(Error::Inconsistent(format!(
            "required delta_L at alpha = {alpha} is {value}"
        )));
    }
    Ok(value)
}

/// Single-spin outcome correlation with the preparation direction for a band
/// model of spread `delta_l`; equals `cos α` when `delta_l` comes from
/// [`single_spin_required_delta_l`].
pub fn single_spin_response(alpha: f64, delta_l: f64) -> Result<f64> {
    let b = sin_half_period(alpha) / (2.0 * delta_l);
    Ok(-band_correlation(alpha, b)?)
}

/// A hidden-variable response model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum Model {
    Base,
    Way(WayParams),
}

/// Name of a model family, as used on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelId {
    Base,
    WaySinglet,
    WayTriplet,
}

impl ModelId {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelId::Base => "base",
            ModelId::WaySinglet => "way_singlet",
            ModelId::WayTriplet => "way_triplet",
        }
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "base" | "bell" => Ok(ModelId::Base),
            "way_singlet" | "way" => Ok(ModelId::WaySinglet),
            "way_triplet" => Ok(ModelId::WayTriplet),
            other => Err(Error::InvalidArgument(format!("unknown model '{other}'"))),
        }
    }
}

impl Model {
    /// Builds a model from its family name. `kind` only matters for
    /// `way_triplet`, where it picks the branch.
    pub fn from_id(id: ModelId, delta_l: f64, kind: StateKind) -> Result<Self> {
        match id {
            ModelId::Base => Ok(Model::Base),
            ModelId::WaySinglet => Ok(Model::Way(WayParams::singlet(delta_l)?)),
            ModelId::WayTriplet => {
                if !kind.is_triplet() {
                    return Err(Error::InvalidArgument(format!(
                        "way_triplet needs a triplet state, got {kind}"
                    )));
                }
                Ok(Model::Way(WayParams::new(delta_l, kind)?))
            }
        }
    }

    pub fn id(&self) -> ModelId {
        match self {
            Model::Base => ModelId::Base,
            Model::Way(p) if p.kind.is_triplet() => ModelId::WayTriplet,
            Model::Way(_) => ModelId::WaySinglet,
        }
    }

    pub fn params(&self) -> Option<WayParams> {
        match self {
            Model::Base => None,
            Model::Way(p) => Some(*p),
        }
    }

    /// Half-width of the excluded band (zero for the base model).
    pub fn halfwidth(&self, theta: f64) -> f64 {
        match self {
            Model::Base => 0.0,
            Model::Way(p) => exclusion_halfwidth(theta, p),
        }
    }

    /// `-1` for `|φ-⟩`, whose outcome products are flipped, `+1` otherwise.
    pub fn product_sign(&self) -> f64 {
        match self {
            Model::Way(p) if p.kind == StateKind::TripletPhiMinus => -1.0,
            _ => 1.0,
        }
    }

    /// Closed-form response on `[0, π]`.
    pub fn correlation(&self, theta: f64) -> Result<f64> {
        match self {
            Model::Base => base_correlation(theta),
            Model::Way(p) if p.kind.is_triplet() => {
                way_correlation_triplet(theta, p.delta_l, p.kind)
            }
            Model::Way(p) => way_correlation_singlet(theta, p.delta_l),
        }
    }

    /// Response over the full period `[0, 2π]`.
    pub fn correlation_full(&self, theta: f64) -> Result<f64> {
        extend_symmetry(|t| self.correlation(t), theta)
    }

    /// Response for detector settings `(α, β)`; depends on `|α - β|` only.
    pub fn correlation_at(&self, alpha: f64, beta: f64) -> Result<f64> {
        let theta = crate::quantum::MeasurementAngles::new(alpha, beta).theta();
        self.correlation_full(theta)
    }

    pub fn curve(&self, thetas: &[f64]) -> Result<ResponseCurve> {
        let values = thetas
            .iter()
            .map(|&t| self.correlation_full(t))
            .collect::<Result<Vec<_>>>()?;
        ResponseCurve::new(thetas.to_vec(), values, self.id().as_str().to_owned(), self.params())
    }
}

/// A response sampled on an increasing grid of angles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResponseCurve {
    pub thetas: Vec<f64>,
    pub values: Vec<f64>,
    pub model_id: String,
    pub params: Option<WayParams>,
}

impl ResponseCurve {
    pub fn new(
        thetas: Vec<f64>,
        values: Vec<f64>,
        model_id: String,
        params: Option<WayParams>,
    ) -> Result<Self> {
        if thetas.len() != values.len() {
            return Err(Error::DimensionMismatch(thetas.len(), values.len()));
        }
        if thetas.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument("thetas must be strictly increasing".into()));
        }
        Ok(Self {
            thetas,
            values,
            model_id,
            params,
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// `n` evenly spaced points on `[lo, hi]`, endpoints included.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_8};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn base_examples() {
        assert_eq!(base_correlation(0.0).unwrap(), -1.0);
        assert_eq!(base_correlation(FRAC_PI_2).unwrap(), 0.0);
        assert!(close(base_correlation(3.0 * FRAC_PI_4).unwrap(), 0.5, 1e-15));
        assert!(matches!(base_correlation(3.5), Err(Error::Domain { .. })));
        assert!(base_correlation(-0.1).is_err());
    }

    #[test]
    fn symmetry_examples() {
        assert!(close(extend_symmetry(base_correlation, 1.5 * PI).unwrap(), 0.0, 1e-15));
        assert_eq!(extend_symmetry(base_correlation, TAU).unwrap(), -1.0);
        assert_eq!(extend_symmetry(base_correlation, PI).unwrap(), 1.0);
        // the seam is continuous: E(π) = -E(0)
        let just_after = extend_symmetry(base_correlation, PI + 1e-12).unwrap();
        assert!(close(just_after, 1.0, 1e-11));
        assert!(extend_symmetry(base_correlation, 7.0).is_err());
    }

    #[test]
    fn halfwidth_examples() {
        let singlet = WayParams::singlet(0.5).unwrap();
        assert_eq!(exclusion_halfwidth(0.0, &singlet), 0.0);
        assert!(close(exclusion_halfwidth(FRAC_PI_2, &singlet), 1.0, 1e-15));
        let trip = WayParams::new(1.0, StateKind::TripletPsiPlus).unwrap();
        assert!(close(exclusion_halfwidth(FRAC_PI_2, &trip), SQRT_3 / 4.0, 1e-15));
    }

    #[test]
    fn band_examples() {
        assert!(close(band_correlation(FRAC_PI_4, 0.0).unwrap(), -0.5, 1e-15));
        assert_eq!(band_correlation(FRAC_PI_2, 1.2).unwrap(), 0.0);
        let v = band_correlation(0.0, 0.3).unwrap();
        assert!(close(v, -PI / (PI - 0.6), 1e-15));
        assert!(close(v, -1.2361, 1e-4));
        assert!(matches!(band_correlation(1.0, FRAC_PI_2), Err(Error::DegenerateBand(_))));
    }

    #[test]
    fn singlet_examples() {
        assert_eq!(way_correlation_singlet(0.0, 0.77).unwrap(), -1.0);
        assert_eq!(way_correlation_singlet(PI, 0.5).unwrap(), 1.0);
        let v = way_correlation_singlet(FRAC_PI_8, 0.77).unwrap();
        assert!(close(v, -0.8910, 1e-4), "{v}");
        assert!(matches!(way_correlation_singlet(1.0, 0.3), Err(Error::Parameter(_))));
        assert!(way_correlation_singlet(-1.0, 1.0).is_err());
    }

    #[test]
    fn triplet_examples() {
        let psi = StateKind::TripletPsiPlus;
        let phi = StateKind::TripletPhiMinus;
        assert!(close(way_correlation_triplet(0.0, 1.0, psi).unwrap(), -1.0, 1e-15));
        assert!(close(way_correlation_triplet(0.0, 1.0, phi).unwrap(), 1.0, 1e-15));
        assert_eq!(way_correlation_triplet(FRAC_PI_2, 1.0, psi).unwrap(), 0.0);
        assert_eq!(way_correlation_triplet(FRAC_PI_2, 3.0, phi).unwrap(), 0.0);
        let want = 2.0 * (-FRAC_PI_2) / (TAU - SQRT_3 * std::f64::consts::FRAC_1_SQRT_2);
        let got = way_correlation_triplet(FRAC_PI_4, 1.0, psi).unwrap();
        assert!(close(got, want, 1e-14));
        assert!(close(got, -0.6211, 1e-4));
        assert!(way_correlation_triplet(1.0, 1.0, StateKind::Singlet).is_err());
    }

    #[test]
    fn bound_examples() {
        assert_eq!(way_bound(0.0, 1.0).unwrap(), 0.0);
        assert!(close(way_bound(FRAC_PI_2, 0.5).unwrap(), 1.0, 1e-15));
        assert!(close(way_bound(FRAC_PI_4, 1.0).unwrap(), 0.125, 1e-15));
        assert!(way_bound(1.0, 0.0).is_err());
    }

    #[test]
    fn single_spin_examples() {
        let at_quarter = single_spin_required_delta_l(FRAC_PI_4).unwrap();
        let want = 0.5 / (PI * (std::f64::consts::FRAC_1_SQRT_2 - 1.0) + FRAC_PI_2);
        assert!(close(at_quarter, want, 1e-13));
        assert!(close(at_quarter, 0.768468, 1e-6));
        // series limits: 1/2 at both ends, 1/(π-2) at the quarter turn
        assert!(close(single_spin_required_delta_l(0.0).unwrap(), 0.5, 1e-6));
        assert!(close(single_spin_required_delta_l(1e-9).unwrap(), 0.5, 1e-6));
        assert!(close(single_spin_required_delta_l(FRAC_PI_2).unwrap(), 1.0 / (PI - 2.0), 1e-6));
        assert!(close(single_spin_required_delta_l(PI).unwrap(), 0.5, 1e-6));
        assert!(single_spin_required_delta_l(-0.5).is_err());
    }

    #[test]
    fn numeric_limits_agree_with_one_sided_approach() {
        // independent numeric limit: approach each singular point from one
        // side along a shrinking sequence and extrapolate linearly
        for (s, want) in [(0.0, 0.5), (FRAC_PI_2, 1.0 / (PI - 2.0))] {
            let f = |h: f64| required_delta_l_raw(s + h);
            let (h1, h2) = (1e-3, 5e-4);
            let richardson = 2.0 * f(h2) - f(h1);
            assert!(close(richardson, want, 1e-6), "{s}: {richardson}");
        }
    }

    #[test]
    fn model_ids_round_trip() {
        for id in [ModelId::Base, ModelId::WaySinglet, ModelId::WayTriplet] {
            assert_eq!(id.as_str().parse::<ModelId>().unwrap(), id);
        }
        assert!(Model::from_id(ModelId::WayTriplet, 1.0, StateKind::Singlet).is_err());
        let m = Model::from_id(ModelId::WayTriplet, 1.0, StateKind::TripletPhiMinus).unwrap();
        assert_eq!(m.id(), ModelId::WayTriplet);
        assert_eq!(m.product_sign(), -1.0);
    }

    #[test]
    fn curve_requires_increasing_thetas() {
        assert!(Model::Base.curve(&[0.0, 1.0, 1.0]).is_err());
        let c = Model::Base.curve(&linspace(0.0, TAU, 9)).unwrap();
        assert_eq!(c.values.len(), 9);
        assert!(c.max_abs() <= 1.0);
    }

    #[test]
    fn linspace_hits_endpoints() {
        let g = linspace(0.0, PI, 1000);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[999], PI);
        assert_eq!(linspace(1.0, 2.0, 1), vec![1.0]);
    }
}
