//! One-dimensional parameter sweeps.
//!
//! Every grid point is evaluated independently (in parallel by default)
//! and assembled in grid order, so results do not depend on scheduling.

use std::fmt;

use rayon::prelude::*;

use crate::atom::{DampingMode, DEFAULT_POLE_THRESHOLD};
use crate::error::{Error, Result};
use crate::features::{coincidence_between, detect_features, CoincidenceReport, FeatureConfig, FeatureKind, FeatureSet};
use crate::optics::{absorption_linear, chi1_model2_with, chi3_model1_with, linear_index, PhysicalConstants, Susceptibility};
use crate::params::{Model, ModelParams, Param};
use crate::speed::{cramer_rao_bound, hss, qfi_pure, DiffConfig, ParamFamily};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantity {
    Qfi(Param),
    Hss(Param),
    /// |χ| of the model's susceptibility (χ⁽³⁾ four-level, χ⁽¹⁾ three-level).
    ChiAbs,
    ChiRe,
    ChiIm,
    /// Re n₀ (three-level only).
    N0,
    /// α₀ at ω₄ (three-level only).
    Alpha0,
}

impl Quantity {
    pub fn column(self, model: Model) -> String {
        let chi = match model {
            Model::FourLevel => "chi3",
            Model::ThreeLevel => "chi1",
        };
        match self {
            Quantity::Qfi(p) => format!("qfi_{}", p.column_tag()),
            Quantity::Hss(p) => format!("hss_{}", p.column_tag()),
            Quantity::ChiAbs => format!("{chi}_abs"),
            Quantity::ChiRe => format!("{chi}_re"),
            Quantity::ChiIm => format!("{chi}_im"),
            Quantity::N0 => "n0_re".into(),
            Quantity::Alpha0 => "alpha0".into(),
        }
    }

    /// Parses a column name (`qfi_omegas`, `chi3_abs`, `chi_abs`, ...).
    pub fn parse(token: &str, model: Model) -> Result<Self> {
        let t = token.trim();
        let bad = || Error::InvalidConfig(format!("unknown quantity `{t}` for {model} model"));
        if let Some(rest) = t.strip_prefix("qfi_") {
            return rest.parse().map(Quantity::Qfi).map_err(|_| bad());
        }
        if let Some(rest) = t.strip_prefix("hss_") {
            return rest.parse().map(Quantity::Hss).map_err(|_| bad());
        }
        let chi = match model {
            Model::FourLevel => "chi3_",
            Model::ThreeLevel => "chi1_",
        };
        let part = t
            .strip_prefix(chi)
            .or_else(|| t.strip_prefix("chi_"))
            .unwrap_or(t);
        match part {
            "abs" => Ok(Quantity::ChiAbs),
            "re" => Ok(Quantity::ChiRe),
            "im" => Ok(Quantity::ChiIm),
            "n0_re" | "n0" => Ok(Quantity::N0),
            "alpha0" => Ok(Quantity::Alpha0),
            _ => Err(bad()),
        }
    }

    fn check(self, model: Model) -> Result<()> {
        match self {
            Quantity::Qfi(p) | Quantity::Hss(p) if !p.belongs_to(model) => Err(Error::InvalidSpec(
                format!("{model} model has no parameter {p}"),
            )),
            Quantity::N0 | Quantity::Alpha0 if model == Model::FourLevel => Err(Error::InvalidSpec(
                format!("{} needs the linear susceptibility of the three-level model", self.column(model)),
            )),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FeatureRef {
    pub quantity: Quantity,
    pub kind: FeatureKind,
}

/// Request to compare one feature kind of one curve with a feature kind of
/// another, e.g. the minimum of QFI against the maximum of |χ⁽³⁾|.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CoincidenceRequest {
    pub a: FeatureRef,
    pub b: FeatureRef,
}

impl CoincidenceRequest {
    pub fn render(&self, model: Model) -> String {
        format!(
            "{}:{} ~ {}:{}",
            self.a.quantity.column(model),
            self.a.kind,
            self.b.quantity.column(model),
            self.b.kind
        )
    }

    pub fn parse(text: &str, model: Model) -> Result<Self> {
        let side = |s: &str| -> Result<FeatureRef> {
            let (q, k) = s.trim().split_once(':').ok_or_else(|| {
                Error::InvalidConfig(format!("coincidence side `{s}` must be QUANTITY:KIND"))
            })?;
            Ok(FeatureRef {
                quantity: Quantity::parse(q, model)?,
                kind: k.parse()?,
            })
        };
        let (a, b) = text
            .split_once('~')
            .ok_or_else(|| Error::InvalidConfig(format!("coincidence `{text}` must be A ~ B")))?;
        Ok(Self {
            a: side(a)?,
            b: side(b)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        let span = self.max - self.min;
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                if i + 1 == self.points {
                    self.max
                } else {
                    self.min + span * (i as f64 / last)
                }
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite() && self.min < self.max) {
            return Err(Error::InvalidSpec(format!(
                "grid needs finite min < max, got {}:{}",
                self.min, self.max
            )));
        }
        if self.points < 3 {
            return Err(Error::InvalidSpec(format!("grid needs >= 3 points, got {}", self.points)));
        }
        Ok(())
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{} ({} points, linear)", self.min, self.max, self.points)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanSpec {
    pub base: ModelParams,
    pub swept: Param,
    pub grid: Grid,
    pub quantities: Vec<Quantity>,
    pub damping: DampingMode,
    pub diff: DiffConfig,
    pub constants: PhysicalConstants,
    pub pole_threshold: f64,
    pub features: FeatureConfig,
    pub coincide: Vec<CoincidenceRequest>,
    pub tol_cells: f64,
}

impl ScanSpec {
    /// A spec with default numerics and no coincidence requests.
    pub fn new(base: ModelParams, swept: Param, grid: Grid, quantities: Vec<Quantity>, damping: DampingMode) -> Self {
        Self {
            base,
            swept,
            grid,
            quantities,
            damping,
            diff: DiffConfig::default(),
            constants: PhysicalConstants::default(),
            pole_threshold: DEFAULT_POLE_THRESHOLD,
            features: FeatureConfig::default(),
            coincide: Vec::new(),
            tol_cells: 2.0,
        }
    }

    pub fn model(&self) -> Model {
        self.base.model()
    }

    pub fn validate(&self) -> Result<()> {
        let model = self.model();
        self.grid.validate()?;
        if !self.swept.belongs_to(model) {
            return Err(Error::InvalidSpec(format!("{model} model has no parameter {}", self.swept)));
        }
        if self.quantities.is_empty() {
            return Err(Error::InvalidSpec("no quantities requested".into()));
        }
        for (i, q) in self.quantities.iter().enumerate() {
            q.check(model)?;
            if self.quantities[..i].contains(q) {
                return Err(Error::InvalidSpec(format!("duplicate quantity {}", q.column(model))));
            }
        }
        for r in &self.coincide {
            for side in [r.a, r.b] {
                if !self.quantities.contains(&side.quantity) {
                    return Err(Error::InvalidSpec(format!(
                        "coincidence refers to {} which is not scanned",
                        side.quantity.column(model)
                    )));
                }
            }
        }
        if !(self.tol_cells >= 0.0) {
            return Err(Error::InvalidSpec("tol_cells must be >= 0".into()));
        }
        if !(self.pole_threshold >= 0.0) {
            return Err(Error::InvalidSpec("pole threshold must be >= 0".into()));
        }
        self.diff.validate()?;
        self.constants.validate()
    }

    fn susceptibility(&self, p: &ModelParams) -> Result<Susceptibility> {
        match p {
            ModelParams::FourLevel(p) => chi3_model1_with(p, &self.constants, self.damping, self.pole_threshold),
            ModelParams::ThreeLevel(p) => chi1_model2_with(p, &self.constants, self.damping, self.pole_threshold),
        }
    }

    /// Value of one quantity for one parameter record.
    pub fn evaluate(&self, q: Quantity, p: &ModelParams) -> Result<f64> {
        p.validate()?;
        let family = |sel| -> Result<ParamFamily> {
            let mut fam = ParamFamily::new(*p, sel, self.damping)?;
            fam.pole_threshold = self.pole_threshold;
            Ok(fam)
        };
        match q {
            Quantity::Qfi(sel) => {
                let fam = family(sel)?;
                qfi_pure(&fam, fam.at(), &self.diff)
            }
            Quantity::Hss(sel) => {
                let fam = family(sel)?;
                hss(&fam, fam.at(), &self.diff)
            }
            Quantity::ChiAbs => Ok(self.susceptibility(p)?.value.norm()),
            Quantity::ChiRe => Ok(self.susceptibility(p)?.value.re),
            Quantity::ChiIm => Ok(self.susceptibility(p)?.value.im),
            Quantity::N0 => Ok(linear_index(&self.susceptibility(p)?).n0.re),
            Quantity::Alpha0 => {
                let ModelParams::ThreeLevel(tl) = p else {
                    return Err(Error::InvalidSpec("alpha0 needs the three-level model".into()));
                };
                Ok(absorption_linear(&self.susceptibility(p)?, tl.omega4(), &self.constants))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub quantity: Quantity,
    pub column: String,
    pub raw: Vec<Option<f64>>,
    pub normalized: Vec<Option<f64>>,
    /// max |raw| over the window; 0 for an identically zero curve.
    pub norm_max: f64,
    pub features: FeatureSet,
    /// Grid indices where evaluation failed.
    pub mask: Vec<usize>,
}

impl Curve {
    /// 1/√F at the curve's global maximum, for QFI curves.
    pub fn cramer_rao_at_peak(&self) -> Option<f64> {
        match self.quantity {
            Quantity::Qfi(_) => {
                let peak = self.raw.iter().flatten().copied().fold(f64::NAN, f64::max);
                cramer_rao_bound(peak).ok()
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoincidenceOutcome {
    pub request: CoincidenceRequest,
    pub report: CoincidenceReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub spec: ScanSpec,
    pub grid: Vec<f64>,
    pub curves: Vec<Curve>,
    pub coincidences: Vec<CoincidenceOutcome>,
}

impl ScanResult {
    pub fn curve(&self, q: Quantity) -> Option<&Curve> {
        self.curves.iter().find(|c| c.quantity == q)
    }
}

/// Divides by the largest magnitude. Identically zero curves stay zero.
pub fn max_normalize(raw: &[Option<f64>]) -> (Vec<Option<f64>>, f64) {
    let max = raw.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    if max == 0.0 {
        return (raw.iter().map(|v| v.map(|_| 0.0)).collect(), 0.0);
    }
    (raw.iter().map(|v| v.map(|x| x / max)).collect(), max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Serial,
    #[default]
    Parallel,
}

pub fn run_scan(spec: &ScanSpec) -> Result<ScanResult> {
    run_scan_with(spec, Execution::Parallel)
}

pub fn run_scan_with(spec: &ScanSpec, exec: Execution) -> Result<ScanResult> {
    spec.validate()?;
    let grid = spec.grid.values();
    let model = spec.model();

    let point = |x: &f64| -> Result<Vec<Option<f64>>> {
        let p = spec.base.with(spec.swept, *x)?;
        spec.quantities
            .iter()
            .map(|&q| match spec.evaluate(q, &p) {
                Ok(v) if v.is_finite() => Ok(Some(v)),
                Ok(_) => Ok(None),
                Err(e) if e.is_pointwise() => Ok(None),
                Err(e) => Err(e),
            })
            .collect()
    };
    let rows: Vec<Vec<Option<f64>>> = match exec {
        Execution::Serial => grid.iter().map(point).collect::<Result<_>>()?,
        Execution::Parallel => grid.par_iter().map(point).collect::<Result<_>>()?,
    };

    let mut curves = Vec::with_capacity(spec.quantities.len());
    for (k, &quantity) in spec.quantities.iter().enumerate() {
        let raw: Vec<Option<f64>> = rows.iter().map(|r| r[k]).collect();
        let mask: Vec<usize> = raw
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.is_none().then_some(i))
            .collect();
        let column = quantity.column(model);
        if 2 * mask.len() > grid.len() {
            return Err(Error::AllPoles {
                quantity: column,
                masked: mask.len(),
                total: grid.len(),
            });
        }
        let (normalized, norm_max) = max_normalize(&raw);
        let features = detect_features(&raw, &grid, &spec.features);
        curves.push(Curve {
            quantity,
            column,
            raw,
            normalized,
            norm_max,
            features,
            mask,
        });
    }

    let find = |q: Quantity| curves.iter().find(|c| c.quantity == q).map(|c| &c.features);
    let coincidences = spec
        .coincide
        .iter()
        .filter_map(|r| {
            Some(CoincidenceOutcome {
                request: *r,
                report: coincidence_between(find(r.a.quantity)?, r.a.kind, find(r.b.quantity)?, r.b.kind, spec.tol_cells),
            })
        })
        .collect();

    Ok(ScanResult {
        spec: spec.clone(),
        grid,
        curves,
        coincidences,
    })
}
