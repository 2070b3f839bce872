//! Replays a refutation certificate against window constraints only.
//!
//! The checker recomputes every quantity it relies on (radius depths,
//! mistake budgets, interval endpoints, the run-length inequalities) from the
//! specification and the mistake function, and never consults the builder.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

use super::refute::{Fact, Progression, RefutationCertificate, Rule, Step};
use super::{Cell, Epsilon, MistakeFunction};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepOutcome {
    pub id: String,
    pub ok: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Replay {
    pub steps: Vec<StepOutcome>,
    pub contradiction: bool,
    pub passed: bool,
}

impl Replay {
    pub fn failed_steps(&self) -> Vec<&str> {
        self.steps.iter().filter(|s| !s.ok).map(|s| s.id.as_str()).collect()
    }
}

type Check = std::result::Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// `2^e`.
fn pow2(e: u64) -> BigUint {
    BigUint::one() << e
}

/// `⌈log₂(l+1)⌉`, the bit length of `l`.
fn bits(l: &BigUint) -> u64 {
    l.bits()
}

struct Store<'a> {
    cert: &'a RefutationCertificate,
    facts: HashMap<String, Fact>,
}

impl Store<'_> {
    fn premise(&self, id: &str) -> std::result::Result<&Fact, String> {
        self.facts
            .get(id)
            .ok_or_else(|| format!("premise {id} is not an established fact"))
    }

    fn g(&self) -> &MistakeFunction {
        &self.cert.g
    }

    /// A good time at radius `eps` pins every cell `(i, t + j)` with
    /// `i + j < depth`; `(row, t)` needs `depth > row`.
    fn tracing(&self, eps: Epsilon, length: u64, budget: u64, row: u64) -> std::result::Result<String, String> {
        let g_val = self.g().eval(length);
        ensure(budget == g_val, || format!("budget {budget} but g({length}) = {g_val}"))?;
        ensure(budget < length, || {
            format!("g({length}) = {budget} leaves no good time among {length}")
        })?;
        let depth = eps.depth() as u64;
        ensure(depth > row, || {
            format!("radius {eps} pins depth {depth}, not row {row}")
        })?;
        Ok(format!("g({length}) = {budget} < {length}; depth {depth} > row {row}"))
    }

    fn check(&self, step: &Step) -> Check {
        let spec = &self.cert.specification;
        match (&step.rule, &step.conclusion) {
            (
                Rule::TraceSegments {
                    eps,
                    length,
                    budget,
                    row,
                },
                Fact::ExistsEach {
                    row: crow,
                    symbol,
                    segments,
                },
            ) => {
                ensure(*segments == spec.segments, || "segments differ from the specification".into())?;
                ensure(*symbol == spec.rest.symbol && *eps == spec.rest.eps, || {
                    "symbol or radius differ from the specification".into()
                })?;
                ensure(BigUint::from(*length) == segments.step, || {
                    format!("length {length} is not the segment length {}", segments.step)
                })?;
                ensure(crow == row, || "conclusion row differs from rule row".into())?;
                self.tracing(*eps, *length, *budget, *row)
            }
            (
                Rule::TraceSegments {
                    eps,
                    length,
                    budget,
                    row,
                },
                Fact::Exists {
                    row: crow,
                    symbol,
                    lo,
                    hi,
                },
            ) => {
                ensure(lo.is_zero() && *hi == spec.n0, || "interval is not the first segment".into())?;
                ensure(*symbol == spec.first.symbol && *eps == spec.first.eps, || {
                    "symbol or radius differ from the specification".into()
                })?;
                ensure(BigUint::from(*length) == spec.n0, || {
                    format!("length {length} is not n_0 = {}", spec.n0)
                })?;
                ensure(crow == row, || "conclusion row differs from rule row".into())?;
                self.tracing(*eps, *length, *budget, *row)
            }
            (
                Rule::Persistence { premise, to_row },
                Fact::ExistsEach {
                    row,
                    symbol,
                    segments,
                },
            ) => {
                let Fact::ExistsEach {
                    row: from,
                    symbol: ps,
                    segments: psegs,
                } = self.premise(premise)?
                else {
                    return Err("premise is not a per-segment existence".into());
                };
                ensure(*ps == Cell::B && *symbol == Cell::B, || "only b persists".into())?;
                ensure(to_row >= from && row == to_row, || {
                    format!("cannot move from row {from} to row {row}")
                })?;
                ensure(psegs == segments, || "segments changed".into())?;
                Ok(format!("b persists from row {from} to row {row}"))
            }
            (Rule::FillBetween { premise }, Fact::Forced { row, symbol, lo, hi }) => {
                let Fact::ExistsEach {
                    row: prow,
                    symbol: ps,
                    segments,
                } = self.premise(premise)?
                else {
                    return Err("premise is not a per-segment existence".into());
                };
                ensure(*ps == Cell::B && *symbol == Cell::B && prow == row, || {
                    "fill needs b's in the same row".into()
                })?;
                fill_between(*row, segments, lo, hi)
            }
            (
                Rule::GuardRun {
                    premise,
                    claimed_run,
                },
                Fact::Excluded { row, symbol, lo, hi },
            ) => {
                let Fact::Forced {
                    row: prow,
                    symbol: ps,
                    lo: run_lo,
                    hi: run_hi,
                } = self.premise(premise)?
                else {
                    return Err("premise is not a forced run".into());
                };
                ensure(*ps == Cell::B && prow == row && *symbol == Cell::C, || {
                    "guard needs a b-run and excludes c in the same row".into()
                })?;
                guard_run(*row, claimed_run, run_lo, run_hi, lo, hi)
            }
            _ => Err("rule cannot produce this kind of fact".into()),
        }
    }
}

/// One `b` in each of `count` consecutive segments of length `step`: two
/// consecutive ones are fewer than `2 step` apart, so with `2^row > 2 step`
/// every gap between them is forbidden unless filled by `b`. The run covers
/// `[n_1, n_{count-1}]` whatever the positions.
fn fill_between(row: u64, segs: &Progression, lo: &BigUint, hi: &BigUint) -> Check {
    ensure(segs.count >= BigUint::from(2u32), || {
        format!("need at least two segments, have {}", segs.count)
    })?;
    let spacing = &segs.step * 2u32;
    ensure(pow2(row) > spacing, || {
        format!("2^{row} does not exceed 2N = {spacing}")
    })?;
    let want_lo = segs.boundary(&BigUint::one());
    let want_hi = segs.boundary(&(&segs.count - 1u32)) + 1u32;
    ensure(*lo == want_lo && *hi == want_hi, || {
        format!("claimed [{lo}, {hi}) but derivable run is [{want_lo}, {want_hi})")
    })?;
    Ok(format!("2^{row} > {spacing}; b forced on [{lo}, {hi})"))
}

/// A `c` at column `t < run_lo` sits before the maximal `b`-run through
/// `[run_lo, run_hi)`; the `a`-gap in front of that run has length below
/// `run_lo`, which `X_row` forbids once `2^row ⌈log₂(l+1)⌉ > run_lo`.
fn guard_run(row: u64, claimed: &BigUint, run_lo: &BigUint, run_hi: &BigUint, lo: &BigUint, hi: &BigUint) -> Check {
    let derived = if run_hi > run_lo {
        run_hi - run_lo
    } else {
        BigUint::zero()
    };
    ensure(!claimed.is_zero(), || "claimed run is empty".into())?;
    ensure(*claimed <= derived, || {
        format!("claimed run {claimed} exceeds the forced run {derived}")
    })?;
    let bound = pow2(row) * BigUint::from(bits(claimed));
    ensure(bound > *run_lo, || {
        format!("2^{row} * ceil(log2(l+1)) with l = {claimed} = {bound} does not exceed {run_lo}")
    })?;
    ensure(lo.is_zero() && hi == run_lo, || {
        format!("excluded interval [{lo}, {hi}) is not [0, {run_lo})")
    })?;
    Ok(format!("{bound} > {run_lo}; c excluded on [0, {run_lo})"))
}

fn contradiction(exists: &Fact, excluded: &Fact) -> bool {
    match (exists, excluded) {
        (
            Fact::Exists { row, symbol, lo, hi },
            Fact::Excluded {
                row: xrow,
                symbol: xsym,
                lo: xlo,
                hi: xhi,
            },
        ) => row == xrow && symbol == xsym && lo < hi && xlo <= lo && hi <= xhi,
        _ => false,
    }
}

/// Replays every step in order; a step only sees facts established before it.
pub fn replay(cert: &RefutationCertificate) -> Replay {
    let mut store = Store {
        cert,
        facts: HashMap::new(),
    };
    let mut outcomes = Vec::new();
    let layout_ok = cert.specification.n0 == cert.specification.segments.start
        && cert.window.rows > cert.params.big_m as u64
        && cert.window.cols >= cert.specification.segments.end();
    outcomes.push(StepOutcome {
        id: "layout".into(),
        ok: layout_ok,
        detail: if layout_ok {
            "segments start at n_0 and fit the window".into()
        } else {
            "specification layout or window size is inconsistent".into()
        },
    });
    for step in &cert.steps {
        let (ok, detail) = match store.check(step) {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        if ok {
            store.facts.insert(step.id.clone(), step.conclusion.clone());
        }
        outcomes.push(StepOutcome {
            id: step.id.clone(),
            ok,
            detail,
        });
    }
    let found = match (
        store.facts.get(&cert.contradiction.exists),
        store.facts.get(&cert.contradiction.excluded),
    ) {
        (Some(a), Some(b)) => contradiction(a, b),
        _ => false,
    };
    let passed = found && outcomes.iter().all(|o| o.ok);
    Replay {
        steps: outcomes,
        contradiction: found,
        passed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::product::refute_almost_spec;

    fn one() -> Epsilon {
        Epsilon::new(1, 1).unwrap()
    }

    #[test]
    fn catalog_certificates_replay() {
        for g in [
            MistakeFunction::sqrt(one()),
            MistakeFunction::log(one()),
            MistakeFunction::by_name("zero", one()).unwrap(),
        ] {
            let cert = refute_almost_spec(&g).unwrap();
            let r = replay(&cert);
            assert!(r.passed, "{}: {:?}", g.name(), r.steps);
            assert_eq!(r.steps.len(), 6);
        }
    }

    #[test]
    fn tampered_conclusion_is_rejected() {
        let mut cert = refute_almost_spec(&MistakeFunction::log(one())).unwrap();
        if let Fact::Forced { hi, .. } = &mut cert.steps[2].conclusion {
            *hi += 1u32;
        }
        let r = replay(&cert);
        assert!(!r.passed);
        assert_eq!(r.failed_steps(), vec!["S3", "S4"]);
    }

    #[test]
    fn wrong_budget_is_rejected() {
        let mut cert = refute_almost_spec(&MistakeFunction::sqrt(one())).unwrap();
        if let Rule::TraceSegments { budget, .. } = &mut cert.steps[0].rule {
            *budget = 0;
        }
        assert!(replay(&cert).failed_steps().contains(&"S1"));
    }

    #[test]
    fn bit_length_is_ceil_log() {
        for l in 0u64..200 {
            let want = ((l + 1) as f64).log2().ceil() as u64;
            assert_eq!(bits(&BigUint::from(l)), want, "l={l}");
        }
    }
}
