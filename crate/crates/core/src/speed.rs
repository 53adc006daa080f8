//! Quantum statistical speeds of a pure state family ψ(η).
//!
//! QFI uses the state derivative, F = 4[⟨ψ̇|ψ̇⟩ − |⟨ψ|ψ̇⟩|²]. HSS
//! differentiates ρ = |ψ⟩⟨ψ| entrywise, HSS = √(½ Tr[(dρ/dη)²]). The two
//! quantities never share a derivative, so the pure-state identity
//! F = 4·HSS² is a genuine cross-check of the numerics.

use num_complex::Complex64;

use crate::atom::{normalize, steady_state, AtomState, DampingMode, DEFAULT_POLE_THRESHOLD};
use crate::error::{Error, Result};
use crate::params::{ModelParams, Param};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffMethod {
    CentralDifference,
    RichardsonExtrapolated,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffConfig {
    pub method: DiffMethod,
    /// Step relative to max(1, |η|).
    pub rel_step: f64,
    /// Lower bound on the absolute step.
    pub min_step: f64,
    /// Number of halvings combined by Richardson extrapolation; 1 is a plain
    /// central difference.
    pub richardson_levels: usize,
    /// Relative disagreement between the two finest levels that triggers
    /// [`Error::StepTooLarge`].
    pub level_tolerance: f64,
}

impl Default for DiffConfig {
    fn default() -> Self {
        Self {
            method: DiffMethod::RichardsonExtrapolated,
            rel_step: 1e-6,
            min_step: 1e-9,
            richardson_levels: 2,
            level_tolerance: 1e-3,
        }
    }
}

impl DiffConfig {
    pub fn central(rel_step: f64) -> Self {
        Self {
            method: DiffMethod::CentralDifference,
            rel_step,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_step > 0.0 && self.rel_step.is_finite()) || !(self.min_step > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "finite-difference step must be positive (rel {}, min {})",
                self.rel_step, self.min_step
            )));
        }
        if self.richardson_levels < 1 {
            return Err(Error::InvalidSpec("richardson_levels must be >= 1".into()));
        }
        Ok(())
    }

    /// Absolute step at η, rounded down to a power of two so that the
    /// stencil offsets ±h, ±h/2, ... are exact binary fractions.
    pub fn step_at(&self, eta: f64) -> f64 {
        let h = (self.rel_step * eta.abs().max(1.0)).max(self.min_step);
        2f64.powi(h.log2().floor() as i32)
    }

    fn levels(&self) -> usize {
        match self.method {
            DiffMethod::CentralDifference => 1,
            DiffMethod::RichardsonExtrapolated => self.richardson_levels,
        }
    }
}

fn central<F>(f: &F, at: f64, h: f64) -> Result<Vec<Complex64>>
where
    F: Fn(f64) -> Result<Vec<Complex64>>,
{
    let plus = f(at + h)?;
    let minus = f(at - h)?;
    if plus.len() != minus.len() {
        return Err(Error::DegenerateInput("state dimension changed across the stencil".into()));
    }
    let inv = 1.0 / ((at + h) - (at - h));
    Ok(plus.iter().zip(&minus).map(|(p, m)| (p - m) * inv).collect())
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Componentwise derivative of a complex vector-valued function of one real
/// variable, by central differences with optional Richardson extrapolation
/// over successive step halvings.
pub fn differentiate<F>(f: F, at: f64, cfg: &DiffConfig) -> Result<Vec<Complex64>>
where
    F: Fn(f64) -> Result<Vec<Complex64>>,
{
    cfg.validate()?;
    let h = cfg.step_at(at);
    let levels = cfg.levels();

    // prev[j] holds the j-times extrapolated estimate of the previous level.
    let mut prev: Vec<Vec<Complex64>> = Vec::new();
    for k in 0..levels {
        let step = h / f64::from(1u32 << k);
        let raw = central(&f, at, step)?;
        if k > 0 && k + 1 == levels {
            let coarse = &prev[0];
            let diff: Vec<Complex64> = raw.iter().zip(coarse).map(|(a, b)| a - b).collect();
            let scale = norm(&raw).max(norm(coarse));
            // Rounding in f(at ± step) alone produces differences of order
            // eps/step; anything below that is noise.
            let noise = 64.0 * f64::EPSILON / step;
            let d = norm(&diff);
            if d > cfg.level_tolerance * scale + noise {
                return Err(Error::StepTooLarge {
                    relative: if scale > 0.0 { d / scale } else { f64::INFINITY },
                });
            }
        }
        let mut row = vec![raw];
        let mut factor = 1.0;
        for j in 1..=k {
            factor *= 4.0;
            let next = row[j - 1]
                .iter()
                .zip(&prev[j - 1])
                .map(|(a, b)| a + (a - b) / (factor - 1.0))
                .collect();
            row.push(next);
        }
        prev = row;
    }
    Ok(prev.pop().unwrap_or_default())
}

/// A one-parameter family of normalized states ψ(η).
pub trait StateFamily {
    /// Normalized state at η.
    fn state(&self, eta: f64) -> Result<AtomState>;

    /// The same ray before normalization. Derivatives are taken on these
    /// amplitudes and carried through the normalization analytically: with
    /// weak fields the normalized ground amplitude is 1 − O(10⁻¹⁰), and
    /// differencing it directly only measures rounding.
    fn unnormalized(&self, eta: f64) -> Result<AtomState> {
        self.state(eta)
    }
}

impl<F> StateFamily for F
where
    F: Fn(f64) -> Result<AtomState>,
{
    fn state(&self, eta: f64) -> Result<AtomState> {
        self(eta)
    }
}

/// The normalized steady state of a model, viewed as a function of one of
/// its parameters.
#[derive(Debug, Clone, Copy)]
pub struct ParamFamily {
    pub params: ModelParams,
    pub selector: Param,
    pub mode: DampingMode,
    pub pole_threshold: f64,
}

impl ParamFamily {
    pub fn new(params: ModelParams, selector: Param, mode: DampingMode) -> Result<Self> {
        params.get(selector)?;
        Ok(Self {
            params,
            selector,
            mode,
            pole_threshold: DEFAULT_POLE_THRESHOLD,
        })
    }

    /// Current value of the selected parameter.
    pub fn at(&self) -> f64 {
        self.params.get(self.selector).unwrap_or(f64::NAN)
    }
}

impl StateFamily for ParamFamily {
    fn state(&self, eta: f64) -> Result<AtomState> {
        normalize(&self.unnormalized(eta)?)
    }

    fn unnormalized(&self, eta: f64) -> Result<AtomState> {
        let p = self.params.with(self.selector, eta)?;
        steady_state(&p, self.mode, self.pole_threshold)
    }
}

fn normalized_state<S: StateFamily + ?Sized>(family: &S, eta: f64) -> Result<AtomState> {
    let s = family.state(eta)?;
    if !s.is_normalized() {
        return Err(Error::DegenerateInput(
            "state family must return normalized states".into(),
        ));
    }
    Ok(s)
}

fn amplitudes<S: StateFamily + ?Sized>(family: &S, eta: f64) -> Result<Vec<Complex64>> {
    let c = family.unnormalized(eta)?.into_amplitudes();
    if norm(&c) == 0.0 {
        return Err(Error::DegenerateInput("state has zero norm".into()));
    }
    Ok(c)
}

/// |ψ̇⟩ at η = `at`, from ψ = C/|C|:
/// ψ̇ = Ċ/|C| − C·Re⟨C|Ċ⟩/|C|³.
pub fn state_derivative<S: StateFamily + ?Sized>(
    family: &S,
    at: f64,
    cfg: &DiffConfig,
) -> Result<Vec<Complex64>> {
    let c = amplitudes(family, at)?;
    let dc = differentiate(|eta| amplitudes(family, eta), at, cfg)?;
    let n = norm(&c);
    let r: f64 = c.iter().zip(&dc).map(|(a, d)| (a.conj() * d).re).sum();
    Ok(c.iter()
        .zip(&dc)
        .map(|(a, d)| d / n - a * (r / (n * n * n)))
        .collect())
}

/// R = |C⟩⟨C| row-major.
fn outer(c: &[Complex64]) -> Vec<Complex64> {
    c.iter()
        .flat_map(|a| c.iter().map(move |b| a * b.conj()))
        .collect()
}

/// dρ/dη, row-major. R = |C⟩⟨C| is differentiated entrywise and
/// ρ = R/Tr R is carried through the quotient rule.
pub fn density_derivative<S: StateFamily + ?Sized>(
    family: &S,
    at: f64,
    cfg: &DiffConfig,
) -> Result<Vec<Complex64>> {
    let r = outer(&amplitudes(family, at)?);
    let dr = differentiate(|eta| Ok(outer(&amplitudes(family, eta)?)), at, cfg)?;
    let dim = (r.len() as f64).sqrt().round() as usize;
    let t: f64 = (0..dim).map(|i| r[i * dim + i].re).sum();
    let dt: f64 = (0..dim).map(|i| dr[i * dim + i].re).sum();
    Ok(r.iter()
        .zip(&dr)
        .map(|(x, d)| d / t - x * (dt / (t * t)))
        .collect())
}

/// Quantum Fisher information of a pure state family.
pub fn qfi_pure<S: StateFamily + ?Sized>(family: &S, at: f64, cfg: &DiffConfig) -> Result<f64> {
    let psi = normalized_state(family, at)?;
    let dpsi = state_derivative(family, at, cfg)?;
    let speed: f64 = dpsi.iter().map(|c| c.norm_sqr()).sum();
    let overlap: Complex64 = psi
        .amplitudes()
        .iter()
        .zip(&dpsi)
        .map(|(a, d)| a.conj() * d)
        .sum();
    Ok((4.0 * (speed - overlap.norm_sqr())).max(0.0))
}

/// Hilbert-Schmidt speed of a pure state family.
pub fn hss<S: StateFamily + ?Sized>(family: &S, at: f64, cfg: &DiffConfig) -> Result<f64> {
    let drho = density_derivative(family, at, cfg)?;
    let n = (drho.len() as f64).sqrt().round() as usize;
    // Tr[(dρ)²] = Σ_ij dρ_ij dρ_ji
    let mut trace = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            trace += drho[i * n + j] * drho[j * n + i];
        }
    }
    Ok((0.5 * trace.re).max(0.0).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Speeds {
    pub qfi: f64,
    pub hss: f64,
}

pub fn speeds<S: StateFamily + ?Sized>(family: &S, at: f64, cfg: &DiffConfig) -> Result<Speeds> {
    Ok(Speeds {
        qfi: qfi_pure(family, at, cfg)?,
        hss: hss(family, at, cfg)?,
    })
}

/// Smallest resolvable change δη = 1/√F.
pub fn cramer_rao_bound(fisher: f64) -> Result<f64> {
    if !(fisher > 0.0) {
        return Err(Error::DegenerateInput(format!(
            "Cramer-Rao bound needs positive Fisher information, got {fisher}"
        )));
    }
    Ok(1.0 / fisher.sqrt())
}
