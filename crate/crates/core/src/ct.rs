//! The decomposition `C_p = Mon`, `G = good words`, `C_s = ∅` of the language
//! of `X_R`, its three gluing conditions, and the entropy comparison between
//! `G` and `C_p`.

use serde::{Deserialize, Serialize};

use crate::certify::{default_search_bound, gap_index};
use crate::counting::{check_condition, growth_witness, ln_biguint, ConditionReport, CountTable,
    GrowthWitness, Verdict, DEFAULT_CONDITION_CUTOFF};
use crate::error::{Error, Result};
use crate::language::XrShift;
use crate::model::{Symbol, Word};

/// `W = prefix · good · suffix` with `suffix` always empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub prefix: Word,
    pub good: Word,
    pub suffix: Word,
}

impl Decomposition {
    pub fn reassemble(&self) -> Word {
        self.prefix.concat(&self.good).concat(&self.suffix)
    }
}

/// Canonical split at the first marker.
pub fn decompose(shift: &XrShift, w: &Word) -> Result<Decomposition> {
    if !shift.is_allowed(w)? {
        return Err(Error::NotAllowed(w.to_string()));
    }
    let cut = w.iter().position(Symbol::is_marker).unwrap_or(w.len());
    Ok(Decomposition {
        prefix: w.slice(0, cut),
        good: w.slice(cut, w.len()),
        suffix: Word::empty(),
    })
}

/// Gluing with transition length 0: the concatenation of good words is good.
pub fn check_cond_ii(shift: &XrShift, goods: &[Word]) -> Result<bool> {
    for (i, g) in goods.iter().enumerate() {
        if !shift.is_good(g)? {
            return Err(Error::Precondition(format!("input {i} is not good: {g}")));
        }
    }
    let joined: Word = goods.iter().flat_map(|g| g.iter().copied()).collect();
    shift.is_good(&joined)
}

/// A left extension `u'` with `u'·W` good, and the bound `τ = N_{M+1} + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extension {
    pub left: Word,
    pub tau: u64,
}

/// Shortest left extension making `W` good.
///
/// For a nonempty prefix `U` of color `a` and length `ℓ`, tries lengths
/// `L = ℓ, ℓ+1, …` for a restricted word `F·U` with `F` all-zero of color
/// `a`; `L = N_ℓ` always works, so `|u'| <= N_ℓ - ℓ + 1 <= τ`.
pub fn extend_to_good(shift: &XrShift, w: &Word, max_prefix: u64) -> Result<Extension> {
    let family = shift.family();
    let d = decompose(shift, w)?;
    let ell = d.prefix.len() as u64;
    if ell > max_prefix {
        return Err(Error::Precondition(format!(
            "prefix length {ell} exceeds M = {max_prefix}"
        )));
    }
    let bound = default_search_bound(family, max_prefix + 1);
    let tau = gap_index(family, max_prefix + 1, bound)?
        .ok_or(Error::GapIndexNotFound {
            k: max_prefix + 1,
            bound,
        })?
        + 1;
    if ell == 0 {
        return Ok(Extension {
            left: Word::empty(),
            tau,
        });
    }
    let color = d.prefix[0].color;
    let upper = gap_index(family, ell, bound)?.ok_or(Error::GapIndexNotFound { k: ell, bound })?;
    for total in ell..=upper {
        family.check_len(total)?;
        let fill = total - ell;
        let fits = (1..=ell).all(|i| {
            d.prefix[(i - 1) as usize].digit == 0 || !family.is_special_unchecked(fill + i, total)
        });
        if fits {
            let mut left = Word::markers(1);
            for _ in 0..fill {
                left.push(Symbol::new(color, 0));
            }
            return Ok(Extension { left, tau });
        }
    }
    unreachable!("N_ℓ always admits a restricted completion")
}

/// Same as [`extend_to_good`], padded with leading markers to length `τ`.
pub fn extend_to_good_fixed(shift: &XrShift, w: &Word, max_prefix: u64) -> Result<Extension> {
    let ext = extend_to_good(shift, w, max_prefix)?;
    let pad = ext.tau as usize - ext.left.len();
    Ok(Extension {
        left: Word::markers(pad).concat(&ext.left),
        tau: ext.tau,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GrowthRow {
    pub n: usize,
    /// `ln(G_n) / n`.
    pub good_rate: f64,
    /// `G_n <= q^n`, exact.
    pub within_q_power: bool,
}

/// Finite-scale comparison of `ln G_n / n` with `h(C_p) = ln q`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct EntropyComparison {
    pub log_q: f64,
    pub rows: Vec<GrowthRow>,
    pub condition: ConditionReport,
    /// `G_n <= q^n` for every tabulated `n`.
    pub bound_holds: bool,
    pub witness: Option<GrowthWitness>,
}

pub fn entropy_compare(shift: &XrShift, n_max: usize) -> Result<EntropyComparison> {
    let params = shift.params();
    let family = shift.family();
    let table = CountTable::build(params, family, n_max)?;
    let q = num_bigint::BigUint::from(params.q());
    let rows: Vec<GrowthRow> = (1..=n_max)
        .map(|n| {
            let g = table.good_count(n).expect("within table");
            GrowthRow {
                n,
                good_rate: ln_biguint(g) / n as f64,
                within_q_power: *g <= q.pow(n as u32),
            }
        })
        .collect();
    let cutoff = family
        .horizon()
        .map_or(DEFAULT_CONDITION_CUTOFF, |h| h.min(DEFAULT_CONDITION_CUTOFF));
    let condition = check_condition(params.p(), params.q(), family, cutoff)?;
    let witness = if condition.verdict == Verdict::Fails {
        growth_witness(params.p(), params.q(), family, n_max as u64)?
    } else {
        None
    };
    Ok(EntropyComparison {
        log_q: (params.q() as f64).ln(),
        bound_holds: rows.iter().all(|r| r.within_q_power),
        rows,
        condition,
        witness,
    })
}
