//! Gap indices and the two gluing procedures on `X_R`.
//!
//! `N_k` is the least `n` for which `{1..n} \ R_n` contains `k` consecutive
//! positions. By nestedness this equals the least `m` with `m - max R_m >= k`,
//! and since the deficiency `m - max R_m` grows by at most one per step,
//! `N_k - max R_{N_k} = k` exactly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::language::XrShift;
use crate::model::{RestrictionFamily, Symbol, Word};

/// `m - max R_m`.
pub fn deficiency(family: &RestrictionFamily, m: u64) -> Result<u64> {
    Ok(m - family.max_special(m)?)
}

/// Search bound that is guaranteed to contain `N_1..N_k` for the built-ins
/// (`N_k <= ⌈k/2⌉² + k` for squares, `N_k <= 2k + 2` for prefix). Table
/// families are searched up to their horizon.
pub fn default_search_bound(family: &RestrictionFamily, k: u64) -> u64 {
    family.horizon().unwrap_or((k + 2) * (k + 2))
}

/// `N_k`, or `None` if it exceeds `bound`.
pub fn gap_index(family: &RestrictionFamily, k: u64, bound: u64) -> Result<Option<u64>> {
    if k < 1 {
        return Err(Error::Precondition("gap index needs k >= 1".into()));
    }
    Ok(gap_indices(family, k, bound)?.pop().flatten())
}

/// `[N_1, …, N_{k_max}]`, each `None` if beyond `bound` (or the horizon).
pub fn gap_indices(family: &RestrictionFamily, k_max: u64, bound: u64) -> Result<Vec<Option<u64>>> {
    let bound = family.horizon().map_or(bound, |h| bound.min(h));
    let mut out = Vec::with_capacity(k_max as usize);
    let mut m = 1;
    for k in 1..=k_max {
        while m <= bound && deficiency(family, m)? < k {
            m += 1;
        }
        out.push((m <= bound).then_some(m));
    }
    Ok(out)
}

fn require_gap(family: &RestrictionFamily, k: u64, bound: u64) -> Result<u64> {
    gap_index(family, k, bound)?.ok_or(Error::GapIndexNotFound { k, bound })
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GapRow {
    pub k: u64,
    #[serde(rename = "N_k")]
    pub n_k: u64,
    pub ratio: f64,
}

/// `k ↦ N_k` with the ratios `k / N_k` over a finite range.
///
/// This is a finite-scale trend only; it never certifies the limit.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GapProfile {
    pub family: String,
    pub rows: Vec<GapRow>,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// Ratio at the largest `k` in the table.
    pub last_ratio: f64,
}

impl GapProfile {
    pub fn n_k(&self, k: u64) -> Option<u64> {
        self.rows.get(k.checked_sub(1)? as usize).map(|r| r.n_k)
    }
}

pub fn weak_spec_report(family: &RestrictionFamily, k_max: u64) -> Result<GapProfile> {
    if k_max < 1 {
        return Err(Error::Precondition("k_max must be at least 1".into()));
    }
    let bound = default_search_bound(family, k_max);
    let mut rows = Vec::with_capacity(k_max as usize);
    for (i, n) in gap_indices(family, k_max, bound)?.into_iter().enumerate() {
        let k = i as u64 + 1;
        let n_k = n.ok_or(Error::GapIndexNotFound { k, bound })?;
        rows.push(GapRow {
            k,
            n_k,
            ratio: k as f64 / n_k as f64,
        });
    }
    let ratios = rows.iter().map(|r| r.ratio);
    Ok(GapProfile {
        family: family.name().to_string(),
        min_ratio: ratios.clone().fold(f64::INFINITY, f64::min),
        max_ratio: ratios.fold(f64::NEG_INFINITY, f64::max),
        last_ratio: rows.last().map_or(0.0, |r| r.ratio),
        rows,
    })
}

/// Uniform transition length `t(n) = 1 + max_{1<=j<=n} (N_j - j)`, with `t(0) = 1`.
pub fn transition_length(family: &RestrictionFamily, n: u64) -> Result<u64> {
    let bound = default_search_bound(family, n);
    let mut best = 0;
    for (i, nj) in gap_indices(family, n, bound)?.into_iter().enumerate() {
        let j = i as u64 + 1;
        let nj = nj.ok_or(Error::GapIndexNotFound { k: j, bound })?;
        best = best.max(nj - j);
    }
    Ok(1 + best)
}

/// Output of a gluing procedure.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GlueResult {
    pub output: Word,
    /// Hamming distance between each input segment and its edited copy.
    pub mistakes: Vec<usize>,
    /// Per-segment mistake budget `θ(|segment|)`; empty in weak mode.
    pub budgets: Vec<usize>,
    /// Lengths of the inserted transition words; empty in almost mode.
    pub transitions: Vec<usize>,
    pub transition_words: Vec<Word>,
}

/// Mistake budget `θ(n) = r(n-1) + 1` (`θ(0) = 0`).
pub fn theta(family: &RestrictionFamily, n: u64) -> Result<u64> {
    if n == 0 {
        return Ok(0);
    }
    Ok(family.r(n - 1)? + 1)
}

/// Glues allowed segments without inserting anything, editing each segment
/// after the first into a free word: the first symbol becomes the marker and
/// the special positions of the maximal monochromatic prefix of the
/// remainder are zeroed.
pub fn almost_glue(shift: &XrShift, segments: &[Word]) -> Result<GlueResult> {
    let family = shift.family();
    for (i, s) in segments.iter().enumerate() {
        if s.is_empty() {
            return Err(Error::Precondition(format!("segment {i} is empty")));
        }
        if !shift.is_allowed(s)? {
            return Err(Error::NotAllowed(format!("segment {i}: {s}")));
        }
    }
    let total: usize = segments.iter().map(|s| s.len()).sum();
    shift.family().check_len(total as u64)?;

    let mut output = Vec::with_capacity(total);
    let mut mistakes = Vec::with_capacity(segments.len());
    let mut budgets = Vec::with_capacity(segments.len());
    for (i, seg) in segments.iter().enumerate() {
        budgets.push(theta(family, seg.len() as u64)? as usize);
        if i == 0 {
            output.extend_from_slice(seg);
            mistakes.push(0);
            continue;
        }
        let mut edited = seg.to_vec();
        edited[0] = Symbol::MARKER;
        let rest = &mut edited[1..];
        let run = monochromatic_prefix_len(rest);
        if run > 0 && rest[0].color != 0 {
            let n = run as u64;
            for j in 1..=n {
                if family.special(j, n)? {
                    rest[(j - 1) as usize].digit = 0;
                }
            }
        }
        let edited = Word::new(edited);
        mistakes.push(edited.hamming(seg).expect("same length"));
        output.extend_from_slice(&edited);
    }
    Ok(GlueResult {
        output: Word::new(output),
        mistakes,
        budgets,
        transitions: Vec::new(),
        transition_words: Vec::new(),
    })
}

fn monochromatic_prefix_len(w: &[Symbol]) -> usize {
    match w.first() {
        None => 0,
        Some(s) => w.iter().take_while(|t| t.color == s.color).count(),
    }
}

/// Length of the marker-free monochromatic prefix of an allowed word.
fn marker_free_prefix_len(w: &[Symbol]) -> usize {
    match w.first() {
        Some(s) if !s.is_marker() => w.iter().take_while(|t| t.color == s.color).count(),
        _ => 0,
    }
}

/// Transition word `v` of length `t(|w|)` with `u·v·w` allowed.
///
/// With `j` the length of the marker-free monochromatic prefix `P` of `w`,
/// `v = O^pad · O · F` where `F` is all-zero in the color of `P` and
/// `|F| = N_j - j`, so that `F·P` is restricted of length `N_j`.
pub fn weak_transition(shift: &XrShift, w: &Word) -> Result<Word> {
    let family = shift.family();
    let t = transition_length(family, w.len() as u64)? as usize;
    let j = marker_free_prefix_len(w);
    if j == 0 {
        return Ok(Word::markers(t));
    }
    let n_j = require_gap(family, j as u64, default_search_bound(family, j as u64))? as usize;
    let filler = n_j - j;
    let mut v = Word::markers(t - filler);
    for _ in 0..filler {
        v.push(Symbol::new(w[0].color, 0));
    }
    Ok(v)
}

pub fn weak_glue(shift: &XrShift, u: &Word, w: &Word) -> Result<GlueResult> {
    for (name, x) in [("u", u), ("w", w)] {
        if !shift.is_allowed(x)? {
            return Err(Error::NotAllowed(format!("{name}: {x}")));
        }
    }
    let v = weak_transition(shift, w)?;
    let output = u.concat(&v).concat(w);
    Ok(GlueResult {
        output,
        mistakes: vec![0, 0],
        budgets: Vec::new(),
        transitions: vec![v.len()],
        transition_words: vec![v],
    })
}
