//! Linear and third-order susceptibilities of the atomic media and the
//! refractive-index and absorption quantities derived from them.
//!
//! Units are reduced; every prefactor in [`PhysicalConstants`] defaults to 1.

use num_complex::Complex64;

use crate::atom::{detunings_model1, detunings_model2, guard, DampingMode, DEFAULT_POLE_THRESHOLD};
use crate::error::{Error, Result};
use crate::params::{FourLevelParams, Model, ThreeLevelParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    Linear,
    ThirdOrder,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Susceptibility {
    pub value: Complex64,
    pub order: Order,
    pub damped: bool,
    pub model: Model,
}

/// Number density, dipole matrix elements and unit constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub number_density: f64,
    pub mu_ad: Complex64,
    pub mu_dc: Complex64,
    pub mu_cb: Complex64,
    pub mu_ba: Complex64,
    pub mu_da: Complex64,
    pub epsilon0: f64,
    pub hbar: f64,
    pub c: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        let one = Complex64::new(1.0, 0.0);
        Self {
            number_density: 1.0,
            mu_ad: one,
            mu_dc: one,
            mu_cb: one,
            mu_ba: one,
            mu_da: one,
            epsilon0: 1.0,
            hbar: 1.0,
            c: 1.0,
        }
    }
}

impl PhysicalConstants {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("number density", self.number_density),
            ("epsilon0", self.epsilon0),
            ("hbar", self.hbar),
            ("c", self.c),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::DegenerateInput(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Sum-frequency χ⁽³⁾ of the four-level ladder:
/// −Nμ_adμ_dcμ_cbμ_ba / (3ε₀ħ δ₁[(δ₂+iγ_c)(δ₂+Δ+iγ_d) − |Ω_dc|²]).
pub fn chi3_model1(
    p: &FourLevelParams,
    k: &PhysicalConstants,
    mode: DampingMode,
) -> Result<Susceptibility> {
    chi3_model1_with(p, k, mode, DEFAULT_POLE_THRESHOLD)
}

pub fn chi3_model1_with(
    p: &FourLevelParams,
    k: &PhysicalConstants,
    mode: DampingMode,
    pole_threshold: f64,
) -> Result<Susceptibility> {
    let det = detunings_model1(p, mode);
    let delta1 = guard("delta1", det.delta1.into(), pole_threshold)?;
    let denom = guard(
        "delta2*(delta2+Delta) - |rabi_dc|^2",
        det.denominator(p.rabi_dc),
        pole_threshold,
    )?;
    let numerator = -k.number_density * k.mu_ad * k.mu_dc * k.mu_cb * k.mu_ba;
    Ok(Susceptibility {
        value: numerator / (3.0 * k.epsilon0 * k.hbar * delta1 * denom),
        order: Order::ThirdOrder,
        damped: mode == DampingMode::On,
        model: Model::FourLevel,
    })
}

/// Linear χ⁽¹⁾ at ω₄ of the three-level medium:
/// (N|μ_da|²/ε₀ħ)(δ−Δ+iγ_c) / (|Ω_s|² − (δ+iγ_d)(δ−Δ+iγ_c)).
pub fn chi1_model2(
    p: &ThreeLevelParams,
    k: &PhysicalConstants,
    mode: DampingMode,
) -> Result<Susceptibility> {
    chi1_model2_with(p, k, mode, DEFAULT_POLE_THRESHOLD)
}

pub fn chi1_model2_with(
    p: &ThreeLevelParams,
    k: &PhysicalConstants,
    mode: DampingMode,
    pole_threshold: f64,
) -> Result<Susceptibility> {
    let det = detunings_model2(p, mode);
    let denom = guard(
        "|rabi_s|^2 - delta*(delta-Delta)",
        det.denominator(p.rabi_s),
        pole_threshold,
    )?;
    let prefactor = k.number_density * k.mu_da.norm_sqr() / (k.epsilon0 * k.hbar);
    Ok(Susceptibility {
        value: prefactor * det.two_photon() / denom,
        order: Order::Linear,
        damped: mode == DampingMode::On,
        model: Model::ThreeLevel,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearIndex {
    pub n0: Complex64,
    /// ε⁽¹⁾ = 1 + χ⁽¹⁾ is real and negative.
    pub negative_permittivity: bool,
    /// Re n₀ < 1: phase velocity above c.
    pub subluminal_index: bool,
}

/// n₀ = √(1 + χ⁽¹⁾) on the principal branch. On the negative real axis the
/// root with positive imaginary part is returned.
pub fn linear_index(chi1: &Susceptibility) -> LinearIndex {
    let eps = Complex64::new(1.0, 0.0) + chi1.value;
    let n0 = if eps.im == 0.0 && eps.re < 0.0 {
        Complex64::new(0.0, (-eps.re).sqrt())
    } else {
        eps.sqrt()
    };
    LinearIndex {
        n0,
        negative_permittivity: eps.im == 0.0 && eps.re < 0.0,
        subluminal_index: n0.re < 1.0,
    }
}

/// n₂ = 3χ⁽³⁾ / (4n₀²ε₀c).
pub fn nonlinear_index(
    chi3: &Susceptibility,
    n0: Complex64,
    k: &PhysicalConstants,
) -> Result<Complex64> {
    if n0.norm() == 0.0 {
        return Err(Error::DegenerateInput("n0 = 0".into()));
    }
    Ok(3.0 * chi3.value / (4.0 * n0 * n0 * k.epsilon0 * k.c))
}

/// Time-averaged intensity I = 2 Re(n₀) ε₀ c |E_s|².
pub fn wave_intensity(field: Complex64, n0: Complex64, k: &PhysicalConstants) -> f64 {
    2.0 * n0.re * k.epsilon0 * k.c * field.norm_sqr()
}

/// n = n₀ + n₂I.
pub fn total_index(n0: Complex64, n2: Complex64, intensity: f64) -> Complex64 {
    n0 + n2 * intensity
}

/// α₀ = Im(χ⁽¹⁾) ω / c.
pub fn absorption_linear(chi1: &Susceptibility, omega: f64, k: &PhysicalConstants) -> f64 {
    chi1.value.im * omega / k.c
}

/// α(I) = α₀ / (1 + I/I_s).
pub fn absorption_saturated(alpha0: f64, intensity: f64, saturation: f64) -> Result<f64> {
    if !(saturation > 0.0) {
        return Err(Error::DegenerateInput(format!(
            "saturation intensity must be positive, got {saturation}"
        )));
    }
    Ok(alpha0 / (1.0 + intensity / saturation))
}
