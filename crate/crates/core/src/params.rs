//! Parameter records for the two atomic models and the named scalar
//! parameters that scans and statistical speeds act on.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Model {
    FourLevel,
    ThreeLevel,
}

impl Model {
    pub fn as_str(self) -> &'static str {
        match self {
            Model::FourLevel => "four-level",
            Model::ThreeLevel => "three-level",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "four-level" | "four" | "4" => Ok(Model::FourLevel),
            "three-level" | "three" | "3" => Ok(Model::ThreeLevel),
            other => Err(Error::InvalidConfig(format!("unknown model `{other}`"))),
        }
    }
}

/// Ladder a → b → c → d driven by a weak field at `omega` (twice) and a
/// strong field at `omega_s`, generating the sum frequency 2ω + ω_s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourLevelParams {
    pub omega_ba: f64,
    pub omega_ca: f64,
    pub omega_dc: f64,
    pub omega: f64,
    pub omega_s: f64,
    pub rabi_ba: Complex64,
    pub rabi_cb: Complex64,
    pub rabi_dc: Complex64,
    pub gamma_c: f64,
    pub gamma_d: f64,
}

/// Three-level medium a, d, c probed at ω₄ = 2ω + ω_s and dressed by a
/// strong coupling field on d ↔ c. ω₄ is always derived.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeLevelParams {
    pub omega_da: f64,
    pub omega_dc: f64,
    pub omega: f64,
    pub omega_s: f64,
    pub rabi: Complex64,
    pub rabi_s: Complex64,
    pub gamma_c: f64,
    pub gamma_d: f64,
}

impl ThreeLevelParams {
    /// Sum frequency ω₄ = 2ω + ω_s.
    pub fn omega4(&self) -> f64 {
        2.0 * self.omega + self.omega_s
    }
}

fn check_rates(gamma_c: f64, gamma_d: f64) -> Result<()> {
    if !(gamma_c >= 0.0 && gamma_d >= 0.0) {
        return Err(Error::DegenerateInput(format!(
            "decay rates must be non-negative (gamma_c = {gamma_c}, gamma_d = {gamma_d})"
        )));
    }
    Ok(())
}

fn check_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::DegenerateInput(format!("{name} is not finite")))
    }
}

impl FourLevelParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("omega_ba", self.omega_ba),
            ("omega_ca", self.omega_ca),
            ("omega_dc", self.omega_dc),
            ("omega", self.omega),
            ("omega_s", self.omega_s),
            ("gamma_c", self.gamma_c),
            ("gamma_d", self.gamma_d),
        ] {
            check_finite(name, v)?;
        }
        for (name, r) in [
            ("rabi_ba", self.rabi_ba),
            ("rabi_cb", self.rabi_cb),
            ("rabi_dc", self.rabi_dc),
        ] {
            check_finite(name, r.re)?;
            check_finite(name, r.im)?;
        }
        check_rates(self.gamma_c, self.gamma_d)
    }
}

impl ThreeLevelParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("omega_da", self.omega_da),
            ("omega_dc", self.omega_dc),
            ("omega", self.omega),
            ("omega_s", self.omega_s),
            ("gamma_c", self.gamma_c),
            ("gamma_d", self.gamma_d),
        ] {
            check_finite(name, v)?;
        }
        for (name, r) in [("rabi", self.rabi), ("rabi_s", self.rabi_s)] {
            check_finite(name, r.re)?;
            check_finite(name, r.im)?;
        }
        check_rates(self.gamma_c, self.gamma_d)
    }
}

/// A scalar parameter of either model. Used both as the swept variable of a
/// scan and as the estimation parameter η of QFI/HSS.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Param {
    Omega,
    OmegaS,
    OmegaBa,
    OmegaCa,
    OmegaDc,
    OmegaDa,
    RabiBa,
    RabiCb,
    RabiDc,
    Rabi,
    RabiS,
    GammaC,
    GammaD,
}

impl Param {
    pub const ALL: [Param; 13] = [
        Param::Omega,
        Param::OmegaS,
        Param::OmegaBa,
        Param::OmegaCa,
        Param::OmegaDc,
        Param::OmegaDa,
        Param::RabiBa,
        Param::RabiCb,
        Param::RabiDc,
        Param::Rabi,
        Param::RabiS,
        Param::GammaC,
        Param::GammaD,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Param::Omega => "omega",
            Param::OmegaS => "omega_s",
            Param::OmegaBa => "omega_ba",
            Param::OmegaCa => "omega_ca",
            Param::OmegaDc => "omega_dc",
            Param::OmegaDa => "omega_da",
            Param::RabiBa => "rabi_ba",
            Param::RabiCb => "rabi_cb",
            Param::RabiDc => "rabi_dc",
            Param::Rabi => "rabi",
            Param::RabiS => "rabi_s",
            Param::GammaC => "gamma_c",
            Param::GammaD => "gamma_d",
        }
    }

    /// Column-name fragment: `omega_s` becomes `omegas` so that
    /// `qfi_omegas` reads as one token.
    pub fn column_tag(self) -> String {
        self.key().replace('_', "")
    }

    pub fn is_rabi(self) -> bool {
        matches!(
            self,
            Param::RabiBa | Param::RabiCb | Param::RabiDc | Param::Rabi | Param::RabiS
        )
    }

    pub fn belongs_to(self, model: Model) -> bool {
        match model {
            Model::FourLevel => !matches!(self, Param::OmegaDa | Param::Rabi | Param::RabiS),
            Model::ThreeLevel => !matches!(
                self,
                Param::OmegaBa | Param::OmegaCa | Param::RabiBa | Param::RabiCb | Param::RabiDc
            ),
        }
    }

    pub fn for_model(model: Model) -> impl Iterator<Item = Param> {
        Param::ALL.into_iter().filter(move |p| p.belongs_to(model))
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Param {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        Param::ALL
            .into_iter()
            .find(|p| p.key() == s || p.column_tag() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown parameter `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelParams {
    FourLevel(FourLevelParams),
    ThreeLevel(ThreeLevelParams),
}

impl From<FourLevelParams> for ModelParams {
    fn from(p: FourLevelParams) -> Self {
        ModelParams::FourLevel(p)
    }
}

impl From<ThreeLevelParams> for ModelParams {
    fn from(p: ThreeLevelParams) -> Self {
        ModelParams::ThreeLevel(p)
    }
}

impl ModelParams {
    pub fn model(&self) -> Model {
        match self {
            ModelParams::FourLevel(_) => Model::FourLevel,
            ModelParams::ThreeLevel(_) => Model::ThreeLevel,
        }
    }

    /// All-zero record for `model`, the starting point of config parsing.
    pub fn zeroed(model: Model) -> Self {
        let z = Complex64::new(0.0, 0.0);
        match model {
            Model::FourLevel => FourLevelParams {
                omega_ba: 0.0,
                omega_ca: 0.0,
                omega_dc: 0.0,
                omega: 0.0,
                omega_s: 0.0,
                rabi_ba: z,
                rabi_cb: z,
                rabi_dc: z,
                gamma_c: 0.0,
                gamma_d: 0.0,
            }
            .into(),
            Model::ThreeLevel => ThreeLevelParams {
                omega_da: 0.0,
                omega_dc: 0.0,
                omega: 0.0,
                omega_s: 0.0,
                rabi: z,
                rabi_s: z,
                gamma_c: 0.0,
                gamma_d: 0.0,
            }
            .into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ModelParams::FourLevel(p) => p.validate(),
            ModelParams::ThreeLevel(p) => p.validate(),
        }
    }

    fn complex_slot(&mut self, param: Param) -> Option<&mut Complex64> {
        match (self, param) {
            (ModelParams::FourLevel(p), Param::RabiBa) => Some(&mut p.rabi_ba),
            (ModelParams::FourLevel(p), Param::RabiCb) => Some(&mut p.rabi_cb),
            (ModelParams::FourLevel(p), Param::RabiDc) => Some(&mut p.rabi_dc),
            (ModelParams::ThreeLevel(p), Param::Rabi) => Some(&mut p.rabi),
            (ModelParams::ThreeLevel(p), Param::RabiS) => Some(&mut p.rabi_s),
            _ => None,
        }
    }

    fn real_slot(&mut self, param: Param) -> Option<&mut f64> {
        match self {
            ModelParams::FourLevel(p) => match param {
                Param::Omega => Some(&mut p.omega),
                Param::OmegaS => Some(&mut p.omega_s),
                Param::OmegaBa => Some(&mut p.omega_ba),
                Param::OmegaCa => Some(&mut p.omega_ca),
                Param::OmegaDc => Some(&mut p.omega_dc),
                Param::GammaC => Some(&mut p.gamma_c),
                Param::GammaD => Some(&mut p.gamma_d),
                _ => None,
            },
            ModelParams::ThreeLevel(p) => match param {
                Param::Omega => Some(&mut p.omega),
                Param::OmegaS => Some(&mut p.omega_s),
                Param::OmegaDa => Some(&mut p.omega_da),
                Param::OmegaDc => Some(&mut p.omega_dc),
                Param::GammaC => Some(&mut p.gamma_c),
                Param::GammaD => Some(&mut p.gamma_d),
                _ => None,
            },
        }
    }

    fn missing(&self, param: Param) -> Error {
        Error::InvalidSpec(format!("{} model has no parameter {param}", self.model()))
    }

    /// Complex value of a parameter; real parameters have zero imaginary part.
    pub fn get_complex(&self, param: Param) -> Result<Complex64> {
        let mut copy = *self;
        if let Some(c) = copy.complex_slot(param) {
            return Ok(*c);
        }
        copy.real_slot(param)
            .map(|v| Complex64::new(*v, 0.0))
            .ok_or_else(|| self.missing(param))
    }

    /// Scalar value of a parameter. Rabi frequencies report their real part,
    /// which is the swept coordinate (see [`ModelParams::set`]).
    pub fn get(&self, param: Param) -> Result<f64> {
        self.get_complex(param).map(|c| c.re)
    }

    /// Sets a scalar parameter. For a Rabi frequency the real part is
    /// replaced and the imaginary part kept, so sweeping a real Rabi
    /// frequency keeps it real.
    pub fn set(&mut self, param: Param, value: f64) -> Result<()> {
        let err = self.missing(param);
        if let Some(c) = self.complex_slot(param) {
            c.re = value;
            return Ok(());
        }
        match self.real_slot(param) {
            Some(v) => {
                *v = value;
                Ok(())
            }
            None => Err(err),
        }
    }

    pub fn set_complex(&mut self, param: Param, value: Complex64) -> Result<()> {
        if param.is_rabi() {
            let err = self.missing(param);
            let slot = self.complex_slot(param).ok_or(err)?;
            *slot = value;
            Ok(())
        } else if value.im == 0.0 {
            self.set(param, value.re)
        } else {
            Err(Error::InvalidConfig(format!("{param} must be real")))
        }
    }

    pub fn with(mut self, param: Param, value: f64) -> Result<Self> {
        self.set(param, value)?;
        Ok(self)
    }
}
