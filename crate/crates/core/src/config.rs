//! Flat `key = value` configuration files.
//!
//! One entry per line, `#` starts a comment line, keys may repeat where a
//! list makes sense (`coincide`, `inherited`, `note`). Parameter keys are
//! the transliterated symbols (`omega_ba`, `rabi_dc`, `gamma_c`, ...);
//! Rabi frequencies accept complex literals such as `3+4i`.
//!
//! ```text
//! name = fig2a
//! model = four-level
//! damping = on
//! swept = omega_dc
//! range = 0.5:1.5
//! points = 501
//! quantities = qfi_omegas, hss_omegas, chi3_abs
//! coincide = qfi_omegas:argmax ~ chi3_abs:argmax
//! omega = 3
//! rabi_dc = 10
//! ```

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use crate::atom::{DampingMode, DEFAULT_POLE_THRESHOLD};
use crate::error::{Error, Result};
use crate::features::FeatureConfig;
use crate::optics::PhysicalConstants;
use crate::params::{Model, ModelParams, Param};
use crate::scan::{CoincidenceRequest, Grid, Quantity, ScanSpec};
use crate::speed::{DiffConfig, DiffMethod};

/// Ordered key/value entries with their source line numbers.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Entries(Vec<(String, String, usize)>);

impl Entries {
    pub fn parse(text: &str) -> Result<Self> {
        let mut out = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::InvalidConfig(format!("line {}: expected `key = value`", n + 1))
            })?;
            let k = k.trim();
            if k.is_empty() {
                return Err(Error::InvalidConfig(format!("line {}: empty key", n + 1)));
            }
            out.push((k.to_string(), v.trim().to_string(), n + 1));
        }
        Ok(Self(out))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str, usize)> {
        self.0.iter().map(|(k, v, n)| (k.as_str(), v.as_str(), *n))
    }

    pub fn contains(&self, key: &str) -> bool {
        self.0.iter().any(|(k, _, _)| k == key)
    }

    /// The single value of `key`; repeated keys are an error.
    pub fn get(&self, key: &str) -> Result<Option<&str>> {
        let mut hits = self.0.iter().filter(|(k, _, _)| k == key);
        let first = hits.next();
        if let Some((_, _, n)) = hits.next() {
            return Err(Error::InvalidConfig(format!("line {n}: `{key}` given more than once")));
        }
        Ok(first.map(|(_, v, _)| v.as_str()))
    }

    pub fn all(&self, key: &str) -> Vec<&str> {
        self.0
            .iter()
            .filter(|(k, _, _)| k == key)
            .map(|(_, v, _)| v.as_str())
            .collect()
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.trim()
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("{key}: `{v}` is not a number")))
}

fn parse_usize(key: &str, v: &str) -> Result<usize> {
    v.trim()
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("{key}: `{v}` is not a non-negative integer")))
}

pub fn parse_complex(key: &str, v: &str) -> Result<Complex64> {
    let compact: String = v.chars().filter(|c| !c.is_whitespace()).collect();
    compact
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("{key}: `{v}` is not a complex number")))
}

pub fn format_complex(c: Complex64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else {
        let sign = if c.im.is_sign_negative() { '-' } else { '+' };
        format!("{}{}{}i", c.re, sign, c.im.abs())
    }
}

/// `MIN:MAX`.
pub fn parse_range(v: &str) -> Result<(f64, f64)> {
    let (a, b) = v
        .split_once(':')
        .ok_or_else(|| Error::InvalidConfig(format!("range `{v}` must be MIN:MAX")))?;
    Ok((parse_f64("range", a)?, parse_f64("range", b)?))
}

pub fn parse_quantities(v: &str, model: Model) -> Result<Vec<Quantity>> {
    v.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| Quantity::parse(t, model))
        .collect()
}

/// A parameter whose value was carried over from an earlier figure panel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Inherited {
    pub param: Param,
    pub from: String,
}

/// A scan spec plus the descriptive metadata stored alongside it.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanDocument {
    pub name: String,
    pub figure: Option<String>,
    pub spec: ScanSpec,
    pub inherited: Vec<Inherited>,
    pub notes: Vec<String>,
}

const CONSTANT_KEYS: [&str; 9] = [
    "number_density",
    "mu_ad",
    "mu_dc",
    "mu_cb",
    "mu_ba",
    "mu_da",
    "epsilon0",
    "hbar",
    "c",
];

const DOC_KEYS: [&str; 21] = [
    "name",
    "figure",
    "model",
    "damping",
    "swept",
    "range",
    "points",
    "quantities",
    "coincide",
    "tol_cells",
    "inherited",
    "note",
    "diff_method",
    "rel_step",
    "min_step",
    "richardson_levels",
    "level_tolerance",
    "pole_threshold",
    "blowup_ratio",
    // run-level keys are stripped before document parsing but tolerated here
    "precision",
    "reports",
];

fn is_doc_key(k: &str) -> bool {
    DOC_KEYS.contains(&k)
        || CONSTANT_KEYS.contains(&k)
        || k.parse::<Param>().is_ok_and(|p| p.key() == k)
        || k == "out"
}

impl ScanDocument {
    pub fn parse(text: &str) -> Result<Self> {
        Self::from_entries(&Entries::parse(text)?, None)
    }

    pub fn from_entries(e: &Entries, default_name: Option<&str>) -> Result<Self> {
        for (k, _, n) in e.iter() {
            if !is_doc_key(k) {
                return Err(Error::InvalidConfig(format!("line {n}: unknown key `{k}`")));
            }
        }
        let req = |key: &str| -> Result<&str> {
            e.get(key)?
                .ok_or_else(|| Error::InvalidConfig(format!("missing required key `{key}`")))
        };

        let name = match (e.get("name")?, default_name) {
            (Some(n), _) => n.to_string(),
            (None, Some(d)) => d.to_string(),
            (None, None) => return Err(Error::InvalidConfig("missing required key `name`".into())),
        };
        let model: Model = req("model")?.parse()?;
        let mut base = ModelParams::zeroed(model);
        for p in Param::ALL {
            let Some(v) = e.get(p.key())? else { continue };
            if !p.belongs_to(model) {
                return Err(Error::InvalidConfig(format!("{model} model has no parameter {p}")));
            }
            base.set_complex(p, parse_complex(p.key(), v)?)?;
        }

        let swept: Param = req("swept")?.parse()?;
        if !swept.belongs_to(model) {
            return Err(Error::InvalidConfig(format!("{model} model has no parameter {swept}")));
        }
        let (min, max) = parse_range(req("range")?)?;
        let points = match e.get("points")? {
            Some(v) => parse_usize("points", v)?,
            None => 501,
        };
        let damping: DampingMode = match e.get("damping")? {
            Some(v) => v.parse()?,
            None => DampingMode::Off,
        };
        let quantities = parse_quantities(req("quantities")?, model)?;
        let mut spec = ScanSpec::new(base, swept, Grid { min, max, points }, quantities, damping);

        spec.coincide = e
            .all("coincide")
            .into_iter()
            .map(|c| CoincidenceRequest::parse(c, model))
            .collect::<Result<_>>()?;
        if let Some(v) = e.get("tol_cells")? {
            spec.tol_cells = parse_f64("tol_cells", v)?;
        }

        if let Some(v) = e.get("diff_method")? {
            spec.diff.method = match v {
                "central" => DiffMethod::CentralDifference,
                "richardson" => DiffMethod::RichardsonExtrapolated,
                _ => return Err(Error::InvalidConfig(format!("diff_method must be central|richardson, got `{v}`"))),
            };
        }
        if let Some(v) = e.get("rel_step")? {
            spec.diff.rel_step = parse_f64("rel_step", v)?;
        }
        if let Some(v) = e.get("min_step")? {
            spec.diff.min_step = parse_f64("min_step", v)?;
        }
        if let Some(v) = e.get("richardson_levels")? {
            spec.diff.richardson_levels = parse_usize("richardson_levels", v)?;
        }
        if let Some(v) = e.get("level_tolerance")? {
            spec.diff.level_tolerance = parse_f64("level_tolerance", v)?;
        }
        if let Some(v) = e.get("pole_threshold")? {
            spec.pole_threshold = parse_f64("pole_threshold", v)?;
        }
        if let Some(v) = e.get("blowup_ratio")? {
            spec.features.blowup_ratio = parse_f64("blowup_ratio", v)?;
        }

        let k = &mut spec.constants;
        for key in CONSTANT_KEYS {
            let Some(v) = e.get(key)? else { continue };
            match key {
                "number_density" => k.number_density = parse_f64(key, v)?,
                "epsilon0" => k.epsilon0 = parse_f64(key, v)?,
                "hbar" => k.hbar = parse_f64(key, v)?,
                "c" => k.c = parse_f64(key, v)?,
                "mu_ad" => k.mu_ad = parse_complex(key, v)?,
                "mu_dc" => k.mu_dc = parse_complex(key, v)?,
                "mu_cb" => k.mu_cb = parse_complex(key, v)?,
                "mu_ba" => k.mu_ba = parse_complex(key, v)?,
                "mu_da" => k.mu_da = parse_complex(key, v)?,
                _ => unreachable!(),
            }
        }

        let inherited = e
            .all("inherited")
            .into_iter()
            .map(|v| {
                let (p, from) = v.split_once(" from ").ok_or_else(|| {
                    Error::InvalidConfig(format!("inherited `{v}` must read `PARAM from PANEL`"))
                })?;
                Ok(Inherited {
                    param: p.trim().parse()?,
                    from: from.trim().to_string(),
                })
            })
            .collect::<Result<_>>()?;

        Ok(Self {
            name,
            figure: e.get("figure")?.map(str::to_string),
            spec,
            inherited,
            notes: e.all("note").into_iter().map(str::to_string).collect(),
        })
    }

    /// Renders the document in the same format [`ScanDocument::parse`]
    /// reads. Numeric settings at their defaults are omitted.
    pub fn to_config(&self) -> String {
        let s = &self.spec;
        let model = s.model();
        let mut out = String::new();
        let mut kv = |k: &str, v: &dyn std::fmt::Display| {
            let _ = writeln!(out, "{k} = {v}");
        };
        kv("name", &self.name);
        if let Some(f) = &self.figure {
            kv("figure", f);
        }
        kv("model", &model);
        kv("damping", &s.damping.as_str());
        kv("swept", &s.swept);
        kv("range", &format!("{}:{}", s.grid.min, s.grid.max));
        kv("points", &s.grid.points);
        let qs: Vec<String> = s.quantities.iter().map(|q| q.column(model)).collect();
        kv("quantities", &qs.join(", "));
        for c in &s.coincide {
            kv("coincide", &c.render(model));
        }
        kv("tol_cells", &s.tol_cells);
        for p in Param::for_model(model) {
            let v = s.base.get_complex(p).unwrap_or_default();
            kv(p.key(), &format_complex(v));
        }

        let d = DiffConfig::default();
        if s.diff.method != d.method {
            kv("diff_method", &"central");
        }
        if s.diff.rel_step != d.rel_step {
            kv("rel_step", &s.diff.rel_step);
        }
        if s.diff.min_step != d.min_step {
            kv("min_step", &s.diff.min_step);
        }
        if s.diff.richardson_levels != d.richardson_levels {
            kv("richardson_levels", &s.diff.richardson_levels);
        }
        if s.diff.level_tolerance != d.level_tolerance {
            kv("level_tolerance", &s.diff.level_tolerance);
        }
        if s.pole_threshold != DEFAULT_POLE_THRESHOLD {
            kv("pole_threshold", &s.pole_threshold);
        }
        if s.features != FeatureConfig::default() {
            kv("blowup_ratio", &s.features.blowup_ratio);
        }
        let k = &s.constants;
        let dk = PhysicalConstants::default();
        for (key, v, dv) in [
            ("number_density", k.number_density, dk.number_density),
            ("epsilon0", k.epsilon0, dk.epsilon0),
            ("hbar", k.hbar, dk.hbar),
            ("c", k.c, dk.c),
        ] {
            if v != dv {
                kv(key, &v);
            }
        }
        for (key, v, dv) in [
            ("mu_ad", k.mu_ad, dk.mu_ad),
            ("mu_dc", k.mu_dc, dk.mu_dc),
            ("mu_cb", k.mu_cb, dk.mu_cb),
            ("mu_ba", k.mu_ba, dk.mu_ba),
            ("mu_da", k.mu_da, dk.mu_da),
        ] {
            if v != dv {
                kv(key, &format_complex(v));
            }
        }
        for i in &self.inherited {
            kv("inherited", &format!("{} from {}", i.param, i.from));
        }
        for n in &self.notes {
            kv("note", n);
        }
        out
    }
}

/// Per-run overrides applied on top of a preset or inline spec.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub points: Option<usize>,
    pub range: Option<(f64, f64)>,
    pub damping: Option<DampingMode>,
    pub quantities: Option<String>,
    pub tol_cells: Option<f64>,
}

impl Overrides {
    pub fn apply(&self, doc: &mut ScanDocument) -> Result<()> {
        let s = &mut doc.spec;
        if let Some(n) = self.points {
            s.grid.points = n;
        }
        if let Some((a, b)) = self.range {
            s.grid.min = a;
            s.grid.max = b;
        }
        if let Some(d) = self.damping {
            s.damping = d;
        }
        if let Some(t) = self.tol_cells {
            s.tol_cells = t;
        }
        if let Some(q) = &self.quantities {
            s.quantities = parse_quantities(q, s.model())?;
            let kept = s.quantities.clone();
            s.coincide
                .retain(|r| kept.contains(&r.a.quantity) && kept.contains(&r.b.quantity));
        }
        Ok(())
    }

    fn from_entries(e: &Entries) -> Result<Self> {
        Ok(Self {
            points: e.get("points")?.map(|v| parse_usize("points", v)).transpose()?,
            range: e.get("range")?.map(parse_range).transpose()?,
            damping: e.get("damping")?.map(str::parse).transpose()?,
            quantities: e.get("quantities")?.map(str::to_string),
            tol_cells: e.get("tol_cells")?.map(|v| parse_f64("tol_cells", v)).transpose()?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpecSource {
    Preset(String),
    Inline(Box<ScanDocument>),
}

pub const DEFAULT_PRECISION: usize = 17;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub source: SpecSource,
    /// `None` falls back to `$EITM_OUT`, then the working directory.
    pub out_dir: Option<PathBuf>,
    /// Significant digits of CSV numbers.
    pub precision: usize,
    pub features_report: bool,
    pub coincidence_report: bool,
    pub overrides: Overrides,
}

impl RunConfig {
    pub fn preset(name: &str) -> Self {
        Self {
            source: SpecSource::Preset(name.to_string()),
            out_dir: None,
            precision: DEFAULT_PRECISION,
            features_report: true,
            coincidence_report: true,
            overrides: Overrides::default(),
        }
    }

    /// Reads a run configuration. A file either names a `preset` (optionally
    /// with `points`, `range`, `damping`, `quantities`, `tol_cells`
    /// overrides) or spells out a full inline scan, never both.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("scan");
        Self::from_text(&text, stem)
    }

    pub fn from_text(text: &str, default_name: &str) -> Result<Self> {
        let e = Entries::parse(text)?;
        let out_dir = e.get("out")?.map(PathBuf::from);
        let precision = match e.get("precision")? {
            Some(v) => parse_usize("precision", v)?,
            None => DEFAULT_PRECISION,
        };
        let (features_report, coincidence_report) = match e.get("reports")? {
            None => (true, true),
            Some(v) => {
                let mut f = (false, false);
                for r in v.split(',').map(str::trim).filter(|r| !r.is_empty()) {
                    match r {
                        "features" => f.0 = true,
                        "coincidence" => f.1 = true,
                        "none" => {}
                        _ => return Err(Error::InvalidConfig(format!("unknown report `{r}`"))),
                    }
                }
                f
            }
        };

        let (source, overrides) = if let Some(name) = e.get("preset")? {
            const ALLOWED: [&str; 9] = [
                "preset", "out", "precision", "reports", "points", "range", "damping", "quantities", "tol_cells",
            ];
            if let Some((k, _, n)) = e.iter().find(|(k, _, _)| !ALLOWED.contains(k)) {
                return Err(Error::InvalidConfig(format!(
                    "line {n}: `{k}` cannot be combined with `preset`; give a preset or an inline scan, not both"
                )));
            }
            (SpecSource::Preset(name.to_string()), Overrides::from_entries(&e)?)
        } else {
            let doc = ScanDocument::from_entries(&e, Some(default_name))?;
            (SpecSource::Inline(Box::new(doc)), Overrides::default())
        };

        Ok(Self {
            source,
            out_dir,
            precision,
            features_report,
            coincidence_report,
            overrides,
        })
    }

    /// The scan document this run executes, overrides applied.
    pub fn resolve(&self) -> Result<ScanDocument> {
        let mut doc = match &self.source {
            SpecSource::Preset(name) => crate::presets::find(name)?,
            SpecSource::Inline(doc) => (**doc).clone(),
        };
        self.overrides.apply(&mut doc)?;
        doc.spec.validate()?;
        Ok(doc)
    }
}
