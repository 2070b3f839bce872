//! Color-merging 1-block factor maps, monochromatic subsystems, and the
//! intrinsic-ergodicity dichotomy read off the summability condition.

use std::collections::HashSet;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;

use crate::counting::{check_condition, growth_witness, ConditionReport, GrowthWitness, Verdict,
    DEFAULT_CONDITION_CUTOFF};
use crate::error::{Error, Result};
use crate::language::XrShift;
use crate::model::{Params, RestrictionFamily, Symbol, Word};

/// Sends colors `p_to..=p_from` to `p_to`, fixes lower colors and all digits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockMap {
    from: Params,
    to: Params,
}

impl BlockMap {
    pub fn merge(p_from: u32, p_to: u32, q: u32) -> Result<Self> {
        let from = Params::new(p_from, q)?;
        let to = Params::new(p_to, q)?;
        if p_from < p_to {
            return Err(Error::Precondition(format!(
                "merge map needs p_from >= p_to, got {p_from} < {p_to}"
            )));
        }
        Ok(BlockMap { from, to })
    }

    pub fn source(&self) -> Params {
        self.from
    }

    pub fn target(&self) -> Params {
        self.to
    }

    pub fn map_symbol(&self, s: Symbol) -> Symbol {
        Symbol {
            color: s.color.min(self.to.p()),
            digit: s.digit,
        }
    }

    pub fn apply(&self, w: &Word) -> Result<Word> {
        self.from.check_word(w)?;
        Ok(w.iter().map(|s| self.map_symbol(*s)).collect())
    }
}

/// Whether the merge map carries `B_n(X_{p_from})` onto `B_n(X_{p_to})`.
pub fn verify_factor_language(
    map: &BlockMap,
    family: &RestrictionFamily,
    n: usize,
    cap: usize,
) -> Result<bool> {
    let source = XrShift::new(map.source(), family.clone());
    let target = XrShift::new(map.target(), family.clone());
    if n == 0 {
        // Both languages contain only the empty word.
        return Ok(source.enumerate_allowed(0, cap)?.count() == target.enumerate_allowed(0, cap)?.count());
    }
    let image: HashSet<Word> = source
        .params()
        .alphabet()
        .into_par_iter()
        .map(|s| -> Result<HashSet<Word>> {
            let words = source.enumerate_with_prefix(&Word::new(vec![s]), n, cap)?;
            Ok(words.map(|w| w.iter().map(|s| map.map_symbol(*s)).collect()).collect())
        })
        .try_reduce(HashSet::new, |mut a, b| {
            a.extend(b);
            Ok(a)
        })?;
    let mut count = 0usize;
    for w in target.enumerate_allowed(n, cap)? {
        if !image.contains(&w) {
            return Ok(false);
        }
        count += 1;
    }
    Ok(count == image.len())
}

/// Words of length `n` in the color-`a` monochromatic subsystem: `q^n`.
pub fn subsystem_count(params: Params, color: u32, n: u32) -> Result<BigUint> {
    if color < 1 || color > params.p() {
        return Err(Error::Precondition(format!(
            "color {color} outside 1..={}",
            params.p()
        )));
    }
    Ok(BigUint::from(params.q()).pow(n))
}

#[derive(Debug, Clone, Serialize)]
pub struct Subsystem {
    pub color: u32,
    pub entropy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Dichotomy {
    /// The condition holds: at least `p` disjoint subsystems of entropy `ln q`.
    NotIntrinsicallyErgodic,
    /// The condition fails: intrinsically ergodic by the criterion.
    IntrinsicallyErgodic,
}

/// Verdict of the intrinsic-ergodicity criterion. This evaluates the
/// criterion; it is not an independent proof.
#[derive(Debug, Clone, Serialize)]
pub struct DichotomyReport {
    pub p: u32,
    pub q: u32,
    pub family: String,
    pub verdict: Dichotomy,
    pub summary: String,
    pub basis: &'static str,
    pub condition: ConditionReport,
    pub subsystems: Vec<Subsystem>,
    pub witness: Option<GrowthWitness>,
}

pub const WITNESS_HORIZON: u64 = 200;

pub fn dichotomy_report(p: u32, q: u32, family: &RestrictionFamily) -> Result<DichotomyReport> {
    if !family.is_builtin() {
        return Err(Error::Precondition(
            "dichotomy needs a built-in family with an exact condition sum".into(),
        ));
    }
    let params = Params::new(p, q)?;
    let condition = check_condition(p, q, family, DEFAULT_CONDITION_CUTOFF)?;
    let log_q = (q as f64).ln();
    let (verdict, summary, subsystems, witness) = match condition.verdict {
        Verdict::Holds => (
            Dichotomy::NotIntrinsicallyErgodic,
            format!("NOT intrinsically ergodic; >= {p} disjoint entropy-log q subsystems exhibited"),
            (1..=params.p())
                .map(|color| Subsystem {
                    color,
                    entropy: log_q,
                })
                .collect(),
            None,
        ),
        Verdict::Fails => (
            Dichotomy::IntrinsicallyErgodic,
            "intrinsically ergodic by the summability criterion; growth witness attached".into(),
            Vec::new(),
            growth_witness(p, q, family, WITNESS_HORIZON)?,
        ),
        Verdict::Undetermined => unreachable!("built-in families have exact sums"),
    };
    Ok(DichotomyReport {
        p,
        q,
        family: family.name().to_string(),
        verdict,
        summary,
        basis: "criterion evaluation: summability condition plus exact witnesses",
        condition,
        subsystems,
        witness,
    })
}
