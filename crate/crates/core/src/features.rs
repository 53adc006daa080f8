//! Feature detection on sampled curves and coincidence of features between
//! curves sharing a grid.
//!
//! Samples are `Option<f64>`; `None` marks a masked point (an evaluation
//! at or next to a pole). Masked points are never interpolated across.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureConfig {
    /// A sign change whose larger bracketing magnitude exceeds this multiple
    /// of the curve's median magnitude is a pole crossing.
    pub blowup_ratio: f64,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self { blowup_ratio: 1e6 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub index: usize,
    /// Parabola-refined position in grid-index units.
    pub position: f64,
    /// Parabola-refined abscissa.
    pub location: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    /// Index of the last valid sample before the sign change.
    pub index: usize,
    pub position: f64,
    pub location: f64,
    /// Masked samples lie between the bracketing samples.
    pub across_gap: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeatureSet {
    pub maxima: Vec<Extremum>,
    pub minima: Vec<Extremum>,
    pub zero_crossings: Vec<Crossing>,
    pub pole_crossings: Vec<Crossing>,
    /// Largest sample; `None` for constant or fully masked curves.
    pub global_max: Option<Extremum>,
    pub global_min: Option<Extremum>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FeatureKind {
    /// Interior local maximum.
    Max,
    /// Interior local minimum.
    Min,
    /// Global maximum over the window.
    ArgMax,
    /// Global minimum over the window.
    ArgMin,
    Zero,
    Pole,
}

impl FeatureKind {
    pub const ALL: [FeatureKind; 6] = [
        FeatureKind::Max,
        FeatureKind::Min,
        FeatureKind::ArgMax,
        FeatureKind::ArgMin,
        FeatureKind::Zero,
        FeatureKind::Pole,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FeatureKind::Max => "max",
            FeatureKind::Min => "min",
            FeatureKind::ArgMax => "argmax",
            FeatureKind::ArgMin => "argmin",
            FeatureKind::Zero => "zero",
            FeatureKind::Pole => "pole",
        }
    }
}

impl fmt::Display for FeatureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FeatureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FeatureKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s.trim())
            .ok_or_else(|| Error::InvalidConfig(format!("unknown feature kind `{s}`")))
    }
}

impl FeatureSet {
    /// (position, location) of every feature of one kind, in grid order.
    pub fn positions(&self, kind: FeatureKind) -> Vec<(f64, f64)> {
        let ext = |v: &[Extremum]| v.iter().map(|e| (e.position, e.location)).collect();
        let cross = |v: &[Crossing]| v.iter().map(|c| (c.position, c.location)).collect();
        match kind {
            FeatureKind::Max => ext(&self.maxima),
            FeatureKind::Min => ext(&self.minima),
            FeatureKind::ArgMax => ext(self.global_max.as_slice()),
            FeatureKind::ArgMin => ext(self.global_min.as_slice()),
            FeatureKind::Zero => cross(&self.zero_crossings),
            FeatureKind::Pole => cross(&self.pole_crossings),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.maxima.is_empty()
            && self.minima.is_empty()
            && self.zero_crossings.is_empty()
            && self.pole_crossings.is_empty()
            && self.global_max.is_none()
            && self.global_min.is_none()
    }
}

/// Abscissa at a fractional grid index.
fn location_at(grid: &[f64], position: f64) -> f64 {
    let last = grid.len() - 1;
    let i = (position.floor().max(0.0) as usize).min(last.saturating_sub(1));
    let t = position - i as f64;
    grid[i] + t * (grid[(i + 1).min(last)] - grid[i])
}

/// Vertex offset of the parabola through (−1, a), (0, b), (1, c), clamped to
/// half a cell.
fn vertex_offset(a: f64, b: f64, c: f64) -> f64 {
    let curvature = a - 2.0 * b + c;
    if curvature == 0.0 || !curvature.is_finite() {
        return 0.0;
    }
    (0.5 * (a - c) / curvature).clamp(-0.5, 0.5)
}

fn refine(curve: &[Option<f64>], grid: &[f64], index: usize) -> Extremum {
    let value = curve[index].unwrap_or(f64::NAN);
    let offset = match (
        index.checked_sub(1).and_then(|i| curve[i]),
        curve.get(index + 1).copied().flatten(),
    ) {
        (Some(a), Some(c)) => vertex_offset(a, value, c),
        _ => 0.0,
    };
    let position = index as f64 + offset;
    Extremum {
        index,
        position,
        location: location_at(grid, position),
        value,
    }
}

fn median_magnitude(curve: &[Option<f64>]) -> f64 {
    let mut mags: Vec<f64> = curve.iter().flatten().map(|v| v.abs()).collect();
    if mags.is_empty() {
        return 0.0;
    }
    mags.sort_by(f64::total_cmp);
    let n = mags.len();
    if n % 2 == 1 {
        mags[n / 2]
    } else {
        0.5 * (mags[n / 2 - 1] + mags[n / 2])
    }
}

/// Local extrema by three-point comparison, parabola-refined, and sign
/// changes split into zero and pole crossings.
///
/// A sign change between consecutive valid samples i < j is a pole
/// crossing when any of these hold, and a zero crossing otherwise:
/// - masked samples lie between i and j;
/// - max(|f_i|, |f_j|) ≥ `blowup_ratio` × median |f|;
/// - |f| grows toward the bracket from both sides, i.e. |f_i| > |f_(i−1)|
///   and |f_j| > |f_(j+1)| for whichever neighbours exist.
///
/// Samples that are exactly zero are skipped when looking for sign changes;
/// a sign change bracketing such samples is a zero crossing located at them.
pub fn detect_features(curve: &[Option<f64>], grid: &[f64], cfg: &FeatureConfig) -> FeatureSet {
    let mut out = FeatureSet::default();
    let n = curve.len().min(grid.len());
    if n < 3 {
        return out;
    }
    let curve = &curve[..n];
    let grid = &grid[..n];

    for i in 1..n - 1 {
        let (Some(a), Some(b), Some(c)) = (curve[i - 1], curve[i], curve[i + 1]) else {
            continue;
        };
        if b > a && b >= c {
            out.maxima.push(refine(curve, grid, i));
        } else if b < a && b <= c {
            out.minima.push(refine(curve, grid, i));
        }
    }

    let valid: Vec<(usize, f64)> = curve
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.map(|v| (i, v)))
        .collect();

    let mut hi: Option<(usize, f64)> = None;
    let mut lo: Option<(usize, f64)> = None;
    for &(i, v) in &valid {
        if hi.is_none_or(|(_, h)| v > h) {
            hi = Some((i, v));
        }
        if lo.is_none_or(|(_, l)| v < l) {
            lo = Some((i, v));
        }
    }
    if let (Some((ih, h)), Some((il, l))) = (hi, lo) {
        if h > l {
            out.global_max = Some(refine(curve, grid, ih));
            out.global_min = Some(refine(curve, grid, il));
        }
    }

    let median = median_magnitude(curve);
    let nonzero: Vec<usize> = (0..valid.len()).filter(|&w| valid[w].1 != 0.0).collect();
    for pair in nonzero.windows(2) {
        let (u, w) = (pair[0], pair[1]);
        let (i, fi) = valid[u];
        let (j, fj) = valid[w];
        if (fi < 0.0) == (fj < 0.0) {
            continue;
        }
        let across_gap = j - i != w - u;
        let (is_pole, position) = if w > u + 1 && !across_gap {
            // Exact zeros sampled between the two signs.
            let zeros = &valid[u + 1..w];
            (false, zeros.iter().map(|z| z.0 as f64).sum::<f64>() / zeros.len() as f64)
        } else if across_gap {
            (true, 0.5 * (i + j) as f64)
        } else {
            let blown_up = fi.abs().max(fj.abs()) >= cfg.blowup_ratio * median;
            let left = (u > 0 && valid[u - 1].0 + 1 == i).then(|| valid[u - 1].1);
            let right = (w + 1 < valid.len() && valid[w + 1].0 == j + 1).then(|| valid[w + 1].1);
            let grows = match (left, right) {
                (None, None) => false,
                (l, r) => l.is_none_or(|l| fi.abs() > l.abs()) && r.is_none_or(|r| fj.abs() > r.abs()),
            };
            if blown_up || grows {
                // 1/f is linear through a simple pole.
                let (ri, rj) = (1.0 / fi, 1.0 / fj);
                (true, i as f64 + ri / (ri - rj))
            } else {
                (false, i as f64 + fi / (fi - fj))
            }
        };
        let crossing = Crossing {
            index: i,
            position,
            location: location_at(grid, position),
            across_gap,
        };
        if is_pole {
            out.pole_crossings.push(crossing);
        } else {
            out.zero_crossings.push(crossing);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeaturePair {
    pub a_position: f64,
    pub b_position: f64,
    pub a_location: f64,
    pub b_location: f64,
    /// |a − b| in grid cells.
    pub distance: f64,
    pub aligned: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoincidenceReport {
    pub kind_a: FeatureKind,
    pub kind_b: FeatureKind,
    pub tol_cells: f64,
    pub pairs: Vec<FeaturePair>,
    pub unmatched_a: Vec<f64>,
    pub unmatched_b: Vec<f64>,
}

impl CoincidenceReport {
    /// At least one pair, and every pair within tolerance.
    pub fn aligned(&self) -> bool {
        !self.pairs.is_empty() && self.pairs.iter().all(|p| p.aligned)
    }

    /// The same report with the roles of A and B exchanged.
    pub fn swapped(&self) -> Self {
        let mut pairs: Vec<FeaturePair> = self
            .pairs
            .iter()
            .map(|p| FeaturePair {
                a_position: p.b_position,
                b_position: p.a_position,
                a_location: p.b_location,
                b_location: p.a_location,
                ..*p
            })
            .collect();
        pairs.sort_by(|x, y| x.a_position.total_cmp(&y.a_position));
        Self {
            kind_a: self.kind_b,
            kind_b: self.kind_a,
            tol_cells: self.tol_cells,
            pairs,
            unmatched_a: self.unmatched_b.clone(),
            unmatched_b: self.unmatched_a.clone(),
        }
    }
}

/// Greedy nearest pairing of `kind_a` features of `a` with `kind_b` features
/// of `b`. Candidate pairs are taken in order of increasing distance; ties
/// are broken on the pair's positions irrespective of which side they come
/// from, so the pairing is symmetric in A and B.
pub fn coincidence_between(
    a: &FeatureSet,
    kind_a: FeatureKind,
    b: &FeatureSet,
    kind_b: FeatureKind,
    tol_cells: f64,
) -> CoincidenceReport {
    let fa = a.positions(kind_a);
    let fb = b.positions(kind_b);

    let mut candidates: Vec<(f64, f64, f64, usize, usize)> = Vec::with_capacity(fa.len() * fb.len());
    for (ia, &(pa, _)) in fa.iter().enumerate() {
        for (ib, &(pb, _)) in fb.iter().enumerate() {
            candidates.push(((pa - pb).abs(), pa.min(pb), pa.max(pb), ia, ib));
        }
    }
    candidates.sort_by(|x, y| {
        x.0.total_cmp(&y.0)
            .then(x.1.total_cmp(&y.1))
            .then(x.2.total_cmp(&y.2))
    });

    let mut used_a = vec![false; fa.len()];
    let mut used_b = vec![false; fb.len()];
    let mut pairs = Vec::new();
    for (distance, _, _, ia, ib) in candidates {
        if used_a[ia] || used_b[ib] {
            continue;
        }
        used_a[ia] = true;
        used_b[ib] = true;
        pairs.push(FeaturePair {
            a_position: fa[ia].0,
            b_position: fb[ib].0,
            a_location: fa[ia].1,
            b_location: fb[ib].1,
            distance,
            aligned: distance <= tol_cells,
        });
    }
    pairs.sort_by(|x, y| x.a_position.total_cmp(&y.a_position));

    let leftover = |f: &[(f64, f64)], used: &[bool]| {
        f.iter()
            .zip(used)
            .filter(|(_, &u)| !u)
            .map(|(&(p, _), _)| p)
            .collect()
    };
    CoincidenceReport {
        kind_a,
        kind_b,
        tol_cells,
        unmatched_a: leftover(&fa, &used_a),
        unmatched_b: leftover(&fb, &used_b),
        pairs,
    }
}

/// Same-kind coincidence for every feature kind.
pub fn coincidence(a: &FeatureSet, b: &FeatureSet, tol_cells: f64) -> Vec<CoincidenceReport> {
    FeatureKind::ALL
        .into_iter()
        .map(|k| coincidence_between(a, k, b, k, tol_cells))
        .collect()
}
