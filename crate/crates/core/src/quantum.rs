//! Exact two-qubit quantum mechanics in the computational basis
//! `|00⟩, |01⟩, |10⟩, |11⟩`.
//!
//! Everything here is small dense linear algebra (2×2 and 4×4). It is the
//! ground truth the hidden-variable models are compared against.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Tolerance used when constructing states and observables.
pub const BUILD_TOL: f64 = 1e-12;
/// Tolerance used when checking caller-supplied inputs.
pub const CHECK_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Dense square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from rows; every row must have `rows.len()` entries.
    pub fn from_rows(rows: &[&[Complex64]]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::InvalidArgument("empty matrix".into()));
        }
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch(dim, row.len()));
            }
            data.extend_from_slice(row);
        }
        Ok(Self { dim, data })
    }

    fn from_real(dim: usize, entries: &[f64]) -> Self {
        debug_assert_eq!(entries.len(), dim * dim);
        Self {
            dim,
            data: entries.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * factor).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(i, j)] = self[(j, i)].conj();
            }
        }
        out
    }

    /// Largest `|m[i][j] - conj(m[j][i])|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// Largest entrywise distance to `other` (infinite on dimension mismatch).
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    /// Applies the matrix to a state vector.
    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch(self.dim, v.len()));
        }
        Ok((0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)] * v[j]).sum())
            .collect())
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        Ok(())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

// Operator impls panic on dimension mismatch; the `try_*` forms and
// `commutator` return errors instead.
impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_mul(rhs).expect("matrix dimensions must agree")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.zip_with(rhs, |a, b| a + b).expect("matrix dimensions must agree")
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.zip_with(rhs, |a, b| a - b).expect("matrix dimensions must agree")
    }
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real(2, &[0.0, 1.0, 1.0, 0.0])
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix {
        dim: 2,
        data: vec![ZERO, -I, I, ZERO],
    }
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_real(2, &[1.0, 0.0, 0.0, -1.0])
}

/// Spin observable along a direction in the xz-plane at `alpha` radians from
/// the z-axis: `sin(α)σx + cos(α)σz`.
pub fn spin_observable(alpha: f64) -> Result<ComplexMatrix> {
    if !alpha.is_finite() {
        return Err(Error::InvalidArgument(format!("angle must be finite, got {alpha}")));
    }
    let (s, c) = alpha.sin_cos();
    Ok(ComplexMatrix::from_real(2, &[c, s, s, -c]))
}

/// Kronecker product; entry `((i,k),(j,l)) = a[i][j]·b[k][l]`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (m, n) = (a.dim, b.dim);
    let mut out = ComplexMatrix::zeros(m * n);
    for i in 0..m {
        for j in 0..m {
            let aij = a[(i, j)];
            for k in 0..n {
                for l in 0..n {
                    out[(i * n + k, j * n + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// `ab - ba`. When both inputs are Hermitian the result is checked to be
/// anti-Hermitian.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let ab = a.try_mul(b)?;
    let ba = b.try_mul(a)?;
    let c = &ab - &ba;
    if a.is_hermitian(CHECK_TOL) && b.is_hermitian(CHECK_TOL) {
        let dev = (&c + &c.adjoint())
            .data
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if dev > CHECK_TOL {
            return Err(Error::Inconsistent(format!(
                "commutator of Hermitian matrices not anti-Hermitian ({dev:e})"
            )));
        }
    }
    Ok(c)
}

/// Which two-qubit state a [`TwoQubitState`] represents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    Singlet,
    TripletPsiPlus,
    TripletPhiMinus,
    Custom,
}

impl StateKind {
    pub const BELL: [StateKind; 3] = [
        StateKind::Singlet,
        StateKind::TripletPsiPlus,
        StateKind::TripletPhiMinus,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StateKind::Singlet => "singlet",
            StateKind::TripletPsiPlus => "triplet_psi_plus",
            StateKind::TripletPhiMinus => "triplet_phi_minus",
            StateKind::Custom => "custom",
        }
    }

    pub fn is_triplet(self) -> bool {
        matches!(self, StateKind::TripletPsiPlus | StateKind::TripletPhiMinus)
    }
}

impl fmt::Display for StateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StateKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "singlet" | "psi_minus" => Ok(StateKind::Singlet),
            "triplet_psi_plus" | "psi_plus" | "psiplus" => Ok(StateKind::TripletPsiPlus),
            "triplet_phi_minus" | "phi_minus" | "phiminus" => Ok(StateKind::TripletPhiMinus),
            "custom" => Ok(StateKind::Custom),
            other => Err(Error::InvalidArgument(format!("unknown state kind '{other}'"))),
        }
    }
}

/// Anything that can be fed to [`expectation`].
pub trait StateVector {
    fn amplitudes(&self) -> &[Complex64];
}

/// Pure single-qubit state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitState(pub [Complex64; 2]);

impl QubitState {
    pub fn zero() -> Self {
        QubitState([ONE, ZERO])
    }

    /// `+1` eigenvector of [`spin_observable`]: `cos(α/2)|0⟩ + sin(α/2)|1⟩`.
    pub fn spin_up(alpha: f64) -> Self {
        let (s, c) = (alpha / 2.0).sin_cos();
        QubitState([Complex64::new(c, 0.0), Complex64::new(s, 0.0)])
    }

    /// `-1` eigenvector of [`spin_observable`]: `-sin(α/2)|0⟩ + cos(α/2)|1⟩`.
    pub fn spin_down(alpha: f64) -> Self {
        let (s, c) = (alpha / 2.0).sin_cos();
        QubitState([Complex64::new(-s, 0.0), Complex64::new(c, 0.0)])
    }

    pub fn spin(alpha: f64, up: bool) -> Self {
        if up {
            Self::spin_up(alpha)
        } else {
            Self::spin_down(alpha)
        }
    }
}

impl StateVector for QubitState {
    fn amplitudes(&self) -> &[Complex64] {
        &self.0
    }
}

/// Pure two-qubit state with amplitudes in the order `|00⟩,|01⟩,|10⟩,|11⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoQubitState {
    amplitudes: [Complex64; 4],
    kind: StateKind,
}

impl TwoQubitState {
    /// Custom state from amplitudes; the norm must be 1 within [`CHECK_TOL`].
    pub fn from_amplitudes(amplitudes: [Complex64; 4]) -> Result<Self> {
        let norm_sq: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if !norm_sq.is_finite() || (norm_sq - 1.0).abs() > CHECK_TOL {
            return Err(Error::InvalidArgument(format!(
                "state norm² = {norm_sq}, expected 1"
            )));
        }
        Ok(Self {
            amplitudes,
            kind: StateKind::Custom,
        })
    }

    pub fn product(a: &QubitState, b: &QubitState) -> Self {
        let mut amplitudes = [ZERO; 4];
        for i in 0..2 {
            for j in 0..2 {
                amplitudes[2 * i + j] = a.0[i] * b.0[j];
            }
        }
        Self {
            amplitudes,
            kind: StateKind::Custom,
        }
    }

    pub fn kind(&self) -> StateKind {
        self.kind
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

impl StateVector for TwoQubitState {
    fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }
}

/// One of the four Bell states used here. `Custom` is rejected; build custom
/// states with [`TwoQubitState::from_amplitudes`].
pub fn bell_state(kind: StateKind) -> Result<TwoQubitState> {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let amplitudes = match kind {
        StateKind::Singlet => [ZERO, h, -h, ZERO],
        StateKind::TripletPsiPlus => [ZERO, h, h, ZERO],
        StateKind::TripletPhiMinus => [h, ZERO, ZERO, -h],
        StateKind::Custom => return Err(Error::Unsupported(kind.to_string())),
    };
    Ok(TwoQubitState { amplitudes, kind })
}

/// Detector settings for the two wings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementAngles {
    pub alpha: f64,
    pub beta: f64,
}

impl MeasurementAngles {
    pub fn new(alpha: f64, beta: f64) -> Self {
        Self { alpha, beta }
    }

    /// `|α - β|` folded into `[0, 2π)`.
    pub fn theta(&self) -> f64 {
        fold_angle((self.alpha - self.beta).abs())
    }
}

/// Folds an angle into `[0, 2π)`.
pub fn fold_angle(x: f64) -> f64 {
    let t = x.rem_euclid(std::f64::consts::TAU);
    // rem_euclid can round up to exactly 2π for tiny negative inputs
    if t >= std::f64::consts::TAU {
        0.0
    } else {
        t
    }
}

/// `⟨ψ|op|ψ⟩` without any Hermiticity requirement.
pub fn braket<S: StateVector + ?Sized>(op: &ComplexMatrix, state: &S) -> Result<Complex64> {
    let amps = state.amplitudes();
    let applied = op.apply(amps)?;
    Ok(amps.iter().zip(&applied).map(|(a, b)| a.conj() * b).sum())
}

/// Expectation value of a Hermitian observable.
pub fn expectation<S: StateVector + ?Sized>(obs: &ComplexMatrix, state: &S) -> Result<f64> {
    let dev = obs.hermitian_deviation();
    if dev > CHECK_TOL {
        return Err(Error::NotHermitian(dev));
    }
    let z = braket(obs, state)?;
    if z.im.abs() > CHECK_TOL {
        return Err(Error::Inconsistent(format!(
            "expectation has imaginary part {:e}",
            z.im
        )));
    }
    Ok(z.re)
}

/// `⟨state|σα ⊗ σβ|state⟩` for a Bell state.
pub fn qm_correlation(kind: StateKind, alpha: f64, beta: f64) -> Result<f64> {
    let state = bell_state(kind)?;
    let obs = tensor(&spin_observable(alpha)?, &spin_observable(beta)?);
    expectation(&obs, &state)
}

/// Total `J_y = (σy⊗I + I⊗σy)/2` of the two qubits, in units of ħ.
pub fn j_y() -> ComplexMatrix {
    let id = ComplexMatrix::identity(2);
    let y = pauli_y();
    (&tensor(&y, &id) + &tensor(&id, &y)).scale(Complex64::new(0.5, 0.0))
}

/// Standard deviation of `J_y` in a state.
pub fn j_y_spread<S: StateVector + ?Sized>(state: &S) -> Result<f64> {
    let jy = j_y();
    let mean = expectation(&jy, state)?;
    let second = expectation(&(&jy * &jy), state)?;
    Ok((second - mean * mean).max(0.0).sqrt())
}

/// Spread of `J_y` in a Bell state, computed from the state itself.
pub fn delta_l_state(kind: StateKind) -> Result<f64> {
    j_y_spread(&bell_state(kind)?)
}

/// Known values of the `J_y` spread: the singlet carries none, the triplets one.
pub fn delta_l_table(kind: StateKind) -> Result<f64> {
    match kind {
        StateKind::Singlet => Ok(0.0),
        StateKind::TripletPsiPlus | StateKind::TripletPhiMinus => Ok(1.0),
        StateKind::Custom => Err(Error::Unsupported(kind.to_string())),
    }
}

/// Magnitude of `⟨[D, J_y]⟩` for the deviation operator of a singlet
/// measurement at settings `(α, β)`.
///
/// The post-measurement term is the Born-weighted average of
/// `⟨[σα⊗σα, J_y]⟩` over the two outcome products `|α±⟩|β∓⟩`, renormalized over
/// that pair; the probe states are orthogonal so there are no cross terms, and
/// the probe part of `J_y` commutes with system operators and drops out.
pub fn way_numerator(kind: StateKind, alpha: f64, beta: f64) -> Result<f64> {
    if kind != StateKind::Singlet {
        return Err(Error::Unsupported(format!(
            "way numerator is defined for the singlet only, got {kind}"
        )));
    }
    let state = bell_state(kind)?;
    let jy = j_y();
    let sa = spin_observable(alpha)?;
    let sb = spin_observable(beta)?;

    let pre = braket(&commutator(&tensor(&sa, &sb), &jy)?, &state)?;

    let pointer = commutator(&tensor(&sa, &sa), &jy)?;
    let outcomes = [
        TwoQubitState::product(&QubitState::spin_up(alpha), &QubitState::spin_down(beta)),
        TwoQubitState::product(&QubitState::spin_down(alpha), &QubitState::spin_up(beta)),
    ];
    let mut weights = outcomes.map(|o| o.inner(&state).norm_sqr());
    let total: f64 = weights.iter().sum();
    if total > BUILD_TOL {
        weights.iter_mut().for_each(|w| *w /= total);
    } else {
        weights = [0.5, 0.5];
    }
    let mut post = ZERO;
    for (w, outcome) in weights.iter().zip(&outcomes) {
        post += braket(&pointer, outcome)? * *w;
    }
    Ok((post - pre).norm())
}
