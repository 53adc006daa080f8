//! Built-in scans, one per figure panel.
//!
//! Parameter values are the caption values. Values a caption leaves out
//! ("the same quantities ... for") come from the preceding panel and are
//! listed as `inherited`. Sweep ranges are not given anywhere and were
//! picked to bracket the feature of interest; each file says so in a note.

use crate::config::ScanDocument;
use crate::error::{Error, Result};
use crate::params::Model;

macro_rules! preset {
    ($name:literal) => {
        ($name, include_str!(concat!("../presets/", $name, ".cfg")))
    };
}

const SOURCES: [(&str, &str); 18] = [
    preset!("fig2a"),
    preset!("fig2b"),
    preset!("fig2c"),
    preset!("fig3a"),
    preset!("fig3b"),
    preset!("fig5a"),
    preset!("fig5b"),
    preset!("fig5c"),
    preset!("fig6a"),
    preset!("fig6b"),
    preset!("fig6c"),
    preset!("fig6d"),
    preset!("fig6pa"),
    preset!("fig6pb"),
    preset!("fig6pc"),
    preset!("fig7a"),
    preset!("fig7b"),
    preset!("fig7c"),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    SOURCES.iter().map(|(n, _)| *n)
}

/// Raw text of a preset file.
pub fn source(name: &str) -> Option<&'static str> {
    let name = canonical(name);
    SOURCES.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

/// `fig6'a` is accepted for `fig6pa`.
fn canonical(name: &str) -> String {
    name.trim().replace('\'', "p")
}

pub fn find(name: &str) -> Result<ScanDocument> {
    let text = source(name).ok_or_else(|| {
        let known: Vec<_> = names().collect();
        Error::InvalidConfig(format!("unknown preset `{name}` (known: {})", known.join(", ")))
    })?;
    ScanDocument::parse(text)
}

pub fn all() -> Vec<ScanDocument> {
    names()
        .map(|n| find(n).expect("built-in preset parses"))
        .collect()
}

pub fn for_model(model: Model) -> Vec<ScanDocument> {
    all().into_iter().filter(|d| d.spec.model() == model).collect()
}

/// The table printed by `list-presets`.
pub fn table(docs: &[ScanDocument]) -> String {
    use std::fmt::Write as _;
    let mut out = String::new();
    if docs.is_empty() {
        return out;
    }
    let _ = writeln!(out, "{:<8} {:<11} {:<12} {:<8} {:<10} inherited", "name", "figure", "model", "damping", "swept");
    for d in docs {
        let inherited = if d.inherited.is_empty() {
            "-".to_string()
        } else {
            d.inherited
                .iter()
                .map(|i| format!("{} ({})", i.param, i.from))
                .collect::<Vec<_>>()
                .join(", ")
        };
        let _ = writeln!(
            out,
            "{:<8} {:<11} {:<12} {:<8} {:<10} {}",
            d.name,
            d.figure.as_deref().unwrap_or("-"),
            d.spec.model().as_str(),
            d.spec.damping.as_str(),
            d.spec.swept.key(),
            inherited
        );
    }
    out
}
