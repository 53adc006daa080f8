//! CSV and plain-text reports of a scan.
//!
//! CSV layout: `# key = value` metadata lines, a header row, then one row
//! per grid point. Columns are the swept parameter, each quantity's raw
//! values, then each quantity's `*_norm` values. Masked points are empty
//! cells.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::config::{format_complex, ScanDocument};
use crate::error::{Error, Result};
use crate::features::FeatureKind;
use crate::params::Param;
use crate::scan::ScanResult;

fn number(v: f64, precision: usize) -> String {
    format!("{:.*e}", precision.max(1) - 1, v)
}

fn indices(mask: &[usize]) -> String {
    if mask.is_empty() {
        return "none".into();
    }
    mask.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

pub fn render_csv(doc: &ScanDocument, result: &ScanResult, precision: usize) -> String {
    let spec = &result.spec;
    let model = spec.model();
    let mut out = String::new();
    let mut meta = |k: &str, v: &dyn std::fmt::Display| {
        let _ = writeln!(out, "# {k} = {v}");
    };
    meta("name", &doc.name);
    if let Some(f) = &doc.figure {
        meta("figure", f);
    }
    meta("model", &model);
    meta("damping", &spec.damping.as_str());
    meta("swept", &spec.swept);
    meta("grid", &spec.grid);
    for p in Param::for_model(model).filter(|&p| p != spec.swept) {
        meta(p.key(), &format_complex(spec.base.get_complex(p).unwrap_or_default()));
    }
    for i in &doc.inherited {
        meta("inherited", &format!("{} from {}", i.param, i.from));
    }
    for c in &result.curves {
        meta(&format!("norm_max {}", c.column), &number(c.norm_max, precision));
    }
    for c in &result.curves {
        meta(&format!("pole_mask {}", c.column), &indices(&c.mask));
    }

    let mut header = vec![spec.swept.key().to_string()];
    header.extend(result.curves.iter().map(|c| c.column.clone()));
    header.extend(result.curves.iter().map(|c| format!("{}_norm", c.column)));
    out.push_str(&header.join(","));
    out.push('\n');

    let cell = |v: Option<f64>| v.map(|x| number(x, precision)).unwrap_or_default();
    for (i, x) in result.grid.iter().enumerate() {
        let mut row = vec![number(*x, precision)];
        row.extend(result.curves.iter().map(|c| cell(c.raw[i])));
        row.extend(result.curves.iter().map(|c| cell(c.normalized[i])));
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

const KINDS: [FeatureKind; 6] = [
    FeatureKind::ArgMax,
    FeatureKind::ArgMin,
    FeatureKind::Max,
    FeatureKind::Min,
    FeatureKind::Zero,
    FeatureKind::Pole,
];

pub fn render_features(doc: &ScanDocument, result: &ScanResult) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "scan {} ({} over {})", doc.name, result.spec.swept, result.spec.grid);
    for c in &result.curves {
        let _ = writeln!(out, "\n[{}]", c.column);
        let _ = writeln!(out, "  norm_max = {:e}", c.norm_max);
        let _ = writeln!(out, "  masked points = {}", c.mask.len());
        for kind in KINDS {
            let found = c.features.positions(kind);
            if found.is_empty() {
                continue;
            }
            let list: Vec<String> = found
                .iter()
                .map(|(pos, loc)| format!("{loc:.9} (cell {pos:.3})"))
                .collect();
            let _ = writeln!(out, "  {kind:<6} {}", list.join(", "));
        }
        if let Some(bound) = c.cramer_rao_at_peak() {
            let _ = writeln!(out, "  cramer_rao_bound_at_peak = {bound:e}");
        }
    }
    out
}

pub fn render_coincidence(doc: &ScanDocument, result: &ScanResult) -> String {
    let model = result.spec.model();
    let mut out = String::new();
    let _ = writeln!(out, "scan {} tolerance {} grid cells", doc.name, result.spec.tol_cells);
    if result.coincidences.is_empty() {
        let _ = writeln!(out, "no coincidence requests");
    }
    for o in &result.coincidences {
        let r = &o.report;
        let verdict = if r.aligned() { "ALIGNED" } else { "NOT ALIGNED" };
        let _ = writeln!(out, "\n{} : {verdict}", o.request.render(model));
        for p in &r.pairs {
            let _ = writeln!(
                out,
                "  {:.9} ~ {:.9}  distance {:.3} cells  {}",
                p.a_location,
                p.b_location,
                p.distance,
                if p.aligned { "aligned" } else { "apart" }
            );
        }
        for (side, list) in [("a", &r.unmatched_a), ("b", &r.unmatched_b)] {
            if !list.is_empty() {
                let xs: Vec<String> = list.iter().map(|x| format!("{x:.9}")).collect();
                let _ = writeln!(out, "  unmatched {side}: {}", xs.join(", "));
            }
        }
    }
    out
}

/// Files a run produces, rendered in memory.
#[derive(Debug, Clone, PartialEq)]
pub struct Outputs {
    pub files: Vec<(String, String)>,
}

impl Outputs {
    pub fn render(doc: &ScanDocument, result: &ScanResult, precision: usize, features: bool, coincidence: bool) -> Self {
        let mut files = vec![(format!("{}.csv", doc.name), render_csv(doc, result, precision))];
        if features {
            files.push((format!("{}.features.txt", doc.name), render_features(doc, result)));
        }
        if coincidence {
            files.push((format!("{}.coincidence.txt", doc.name), render_coincidence(doc, result)));
        }
        Self { files }
    }

    /// Writes every file into `dir`, which must already exist. Nothing is
    /// written when it does not.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        let io = |path: &Path| {
            let path = path.to_path_buf();
            move |source| Error::Io { path, source }
        };
        let meta = fs::metadata(dir).map_err(io(dir))?;
        if !meta.is_dir() {
            return Err(Error::Io {
                path: dir.to_path_buf(),
                source: std::io::Error::new(std::io::ErrorKind::NotADirectory, "not a directory"),
            });
        }
        let mut written = Vec::new();
        for (name, body) in &self.files {
            let path = dir.join(name);
            fs::write(&path, body).map_err(io(&path))?;
            written.push(path);
        }
        Ok(written)
    }
}

/// A CSV file as written by [`render_csv`].
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl CsvTable {
    pub fn parse(text: &str) -> Result<Self> {
        let bad = |msg: String| Error::InvalidConfig(format!("csv: {msg}"));
        let mut meta = Vec::new();
        let mut lines = text.lines();
        let header = loop {
            let line = lines.next().ok_or_else(|| bad("no header row".into()))?;
            match line.strip_prefix('#') {
                Some(m) => {
                    let (k, v) = m.split_once('=').ok_or_else(|| bad(format!("metadata line `{line}`")))?;
                    meta.push((k.trim().to_string(), v.trim().to_string()));
                }
                None => break line,
            }
        };
        let columns: Vec<String> = header.split(',').map(str::to_string).collect();
        let rows = lines
            .enumerate()
            .map(|(n, line)| {
                let cells: Vec<&str> = line.split(',').collect();
                if cells.len() != columns.len() {
                    return Err(bad(format!("row {} has {} cells, expected {}", n + 1, cells.len(), columns.len())));
                }
                cells
                    .into_iter()
                    .map(|c| {
                        if c.is_empty() {
                            Ok(None)
                        } else {
                            c.parse().map(Some).map_err(|_| bad(format!("`{c}` is not a number")))
                        }
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        Ok(Self { meta, columns, rows })
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}
