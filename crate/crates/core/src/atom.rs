//! Perturbative steady-state wavefunctions of the four-level and
//! three-level atoms.
//!
//! States are taken at t = 0 in the interaction picture, so the state vector
//! is the coefficient vector itself: (C_a, C_b, C_c, C_d) for the four-level
//! ladder and (C_a, C_d, C_c) for the three-level medium. The raw
//! perturbative solution always has C_a = 1.
//!
//! Damping enters through the same complex detuning substitutions used for
//! the susceptibilities: δ₂ → δ₂ + iγ_c and δ₂ + Δ → δ₂ + Δ + iγ_d for the
//! four-level ladder, δ → δ + iγ_d and Δ → Δ + i(γ_c − γ_d) for the
//! three-level medium. Level b has no decay rate, so δ₁ stays real.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::{FourLevelParams, Model, ModelParams, ThreeLevelParams};

/// Default magnitude below which a denominator counts as a pole.
pub const DEFAULT_POLE_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum DampingMode {
    #[default]
    Off,
    On,
}

impl DampingMode {
    /// Effective decay rates: `Off` zeroes them whatever the record stores.
    pub fn rates(self, gamma_c: f64, gamma_d: f64) -> (f64, f64) {
        match self {
            DampingMode::Off => (0.0, 0.0),
            DampingMode::On => (gamma_c, gamma_d),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DampingMode::Off => "off",
            DampingMode::On => "on",
        }
    }
}

impl std::str::FromStr for DampingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "on" | "true" | "1" => Ok(DampingMode::On),
            "off" | "false" | "0" => Ok(DampingMode::Off),
            other => Err(Error::InvalidConfig(format!("damping must be on|off, got `{other}`"))),
        }
    }
}

/// Detunings of the four-level ladder after the optional damping
/// substitution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderDetunings {
    /// δ₁ = ω − ω_ba, always real.
    pub delta1: f64,
    /// δ₂ = 2ω − ω_ca, plus iγ_c when damped.
    pub delta2: Complex64,
    /// Δ = ω_s − ω_dc.
    pub cap_delta: f64,
    /// δ₂ + Δ, plus iγ_d when damped.
    pub delta2_plus_cap: Complex64,
}

impl LadderDetunings {
    /// δ₂(δ₂ + Δ) − |Ω_dc|² with the damped detunings.
    pub fn denominator(&self, rabi_dc: Complex64) -> Complex64 {
        self.delta2 * self.delta2_plus_cap - rabi_dc.norm_sqr()
    }
}

/// Detunings of the three-level medium after the optional damping
/// substitution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaDetunings {
    /// δ = ω₄ − ω_da, plus iγ_d when damped.
    pub delta: Complex64,
    /// Δ = ω_s − ω_dc, plus i(γ_d − γ_c) when damped.
    pub cap_delta: Complex64,
}

impl LambdaDetunings {
    /// δ − Δ; carries iγ_c when damped.
    pub fn two_photon(&self) -> Complex64 {
        self.delta - self.cap_delta
    }

    /// |Ω_s|² − δ(δ − Δ).
    pub fn denominator(&self, rabi_s: Complex64) -> Complex64 {
        rabi_s.norm_sqr() - self.delta * self.two_photon()
    }
}

pub fn detunings_model1(p: &FourLevelParams, mode: DampingMode) -> LadderDetunings {
    let (gamma_c, gamma_d) = mode.rates(p.gamma_c, p.gamma_d);
    let delta2 = 2.0 * p.omega - p.omega_ca;
    let cap_delta = p.omega_s - p.omega_dc;
    LadderDetunings {
        delta1: p.omega - p.omega_ba,
        delta2: Complex64::new(delta2, gamma_c),
        cap_delta,
        delta2_plus_cap: Complex64::new(delta2 + cap_delta, gamma_d),
    }
}

pub fn detunings_model2(p: &ThreeLevelParams, mode: DampingMode) -> LambdaDetunings {
    let (gamma_c, gamma_d) = mode.rates(p.gamma_c, p.gamma_d);
    LambdaDetunings {
        delta: Complex64::new(p.omega4() - p.omega_da, gamma_d),
        cap_delta: Complex64::new(p.omega_s - p.omega_dc, gamma_d - gamma_c),
    }
}

pub(crate) fn guard(what: &'static str, value: Complex64, threshold: f64) -> Result<Complex64> {
    let magnitude = value.norm();
    if magnitude < threshold || !magnitude.is_finite() {
        Err(Error::Pole {
            what,
            magnitude,
            threshold,
        })
    } else {
        Ok(value)
    }
}

/// Coefficient vector of a single atom.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomState {
    amplitudes: Vec<Complex64>,
    normalized: bool,
    model: Model,
}

impl AtomState {
    /// Wraps raw amplitudes as an un-normalized state.
    pub fn raw(model: Model, amplitudes: Vec<Complex64>) -> Self {
        Self {
            amplitudes,
            normalized: false,
            model,
        }
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Multiplies every amplitude by `factor`, keeping the normalization flag
    /// only when |factor| = 1.
    pub fn scaled(mut self, factor: Complex64) -> Self {
        for c in &mut self.amplitudes {
            *c *= factor;
        }
        self.normalized &= (factor.norm() - 1.0).abs() < 1e-15;
        self
    }
}

/// Steady state of the four-level ladder, perturbative in Ω_ba and Ω_cb and
/// exact in Ω_dc.
pub fn steady_amplitudes_model1(p: &FourLevelParams, mode: DampingMode) -> Result<AtomState> {
    steady_amplitudes_model1_with(p, mode, DEFAULT_POLE_THRESHOLD)
}

pub fn steady_amplitudes_model1_with(
    p: &FourLevelParams,
    mode: DampingMode,
    pole_threshold: f64,
) -> Result<AtomState> {
    let det = detunings_model1(p, mode);
    let delta1 = guard("delta1", det.delta1.into(), pole_threshold)?;
    let denom = guard(
        "delta2*(delta2+Delta) - |rabi_dc|^2",
        det.denominator(p.rabi_dc),
        pole_threshold,
    )?;
    // C_c is written with δ₂ in its denominator and is undefined at δ₂ = 0
    // even though the reduced form below is finite there.
    guard("delta2", det.delta2, pole_threshold)?;

    let c_a = Complex64::new(1.0, 0.0);
    let c_b = -p.rabi_ba / delta1;
    let c_d = -(p.rabi_dc * p.rabi_cb * p.rabi_ba) / (delta1 * denom);
    // −(C_b Ω_cb + C_d Ω_dc*)/δ₂ with the common factor δ₂ cancelled; the
    // unreduced sum loses digits when |Ω_dc|² ≫ |δ₂(δ₂+Δ)|.
    let c_c = p.rabi_ba * p.rabi_cb * det.delta2_plus_cap / (delta1 * denom);
    Ok(AtomState::raw(Model::FourLevel, vec![c_a, c_b, c_c, c_d]))
}

/// Steady state of the three-level medium, perturbative in Ω and exact in
/// Ω_s.
pub fn steady_amplitudes_model2(p: &ThreeLevelParams, mode: DampingMode) -> Result<AtomState> {
    steady_amplitudes_model2_with(p, mode, DEFAULT_POLE_THRESHOLD)
}

pub fn steady_amplitudes_model2_with(
    p: &ThreeLevelParams,
    mode: DampingMode,
    pole_threshold: f64,
) -> Result<AtomState> {
    if p.rabi_s.norm() == 0.0 {
        return Err(Error::DegenerateInput("rabi_s = 0: C_c is undefined".into()));
    }
    let det = detunings_model2(p, mode);
    let denom = guard(
        "|rabi_s|^2 - delta*(delta-Delta)",
        det.denominator(p.rabi_s),
        pole_threshold,
    )?;

    let c_a = Complex64::new(1.0, 0.0);
    let c_d = p.rabi * det.two_photon() / denom;
    // (−Ω − δC_d)/Ω_s reduced to avoid cancellation when |δ(δ−Δ)| ≫ |Ω_s|².
    let c_c = -p.rabi * p.rabi_s.conj() / denom;
    Ok(AtomState::raw(Model::ThreeLevel, vec![c_a, c_d, c_c]))
}

/// Dispatches to the model-specific steady state.
pub fn steady_state(p: &ModelParams, mode: DampingMode, pole_threshold: f64) -> Result<AtomState> {
    match p {
        ModelParams::FourLevel(p) => steady_amplitudes_model1_with(p, mode, pole_threshold),
        ModelParams::ThreeLevel(p) => steady_amplitudes_model2_with(p, mode, pole_threshold),
    }
}

/// Rescales to unit norm. The global phase is left alone.
pub fn normalize(s: &AtomState) -> Result<AtomState> {
    let n2 = s.norm_sqr();
    if !(n2 > 0.0) || !n2.is_finite() {
        return Err(Error::DegenerateInput(format!(
            "cannot normalize state with squared norm {n2}"
        )));
    }
    let norm = n2.sqrt();
    Ok(AtomState {
        amplitudes: s.amplitudes.iter().map(|c| c / norm).collect(),
        normalized: true,
        model: s.model,
    })
}

/// ρ = |ψ⟩⟨ψ| of a normalized state.
pub fn pure_density(s: &AtomState) -> Result<DMatrix<Complex64>> {
    if !s.normalized {
        return Err(Error::DegenerateInput(
            "density matrix requires a normalized state".into(),
        ));
    }
    let n = s.amplitudes.len();
    Ok(DMatrix::from_fn(n, n, |i, j| {
        s.amplitudes[i] * s.amplitudes[j].conj()
    }))
}
