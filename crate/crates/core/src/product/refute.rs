//! A certificate that no catalog mistake function works for the product
//! system.
//!
//! The specification is an all-`c` segment `[0, n_0)` followed by `s` all-`b`
//! segments `[n_{j-1}, n_j)` with `n_j = m + jN`. Five steps derive both
//! "some `c` in row `M` on `[0, m)`" and "no `c` in row `M` on `[0, n_1)`".

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::{Cell, Epsilon, MistakeFunction};
use crate::error::{Error, Result};

/// Segments `[start + (j-1) step, start + j step)` for `j = 1..=count`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Progression {
    #[serde(with = "crate::json::biguint")]
    pub start: BigUint,
    #[serde(with = "crate::json::biguint")]
    pub step: BigUint,
    #[serde(with = "crate::json::biguint")]
    pub count: BigUint,
}

impl Progression {
    /// `n_j = start + j step`.
    pub fn boundary(&self, j: &BigUint) -> BigUint {
        &self.start + j * &self.step
    }

    pub fn end(&self) -> BigUint {
        self.boundary(&self.count)
    }
}

/// Constraints on a window. Column intervals are half-open `[lo, hi)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "fact", rename_all = "kebab-case")]
pub enum Fact {
    /// Every segment of the progression has `symbol` somewhere in `row`.
    ExistsEach {
        row: u64,
        symbol: Cell,
        segments: Progression,
    },
    Exists {
        row: u64,
        symbol: Cell,
        #[serde(with = "crate::json::biguint")]
        lo: BigUint,
        #[serde(with = "crate::json::biguint")]
        hi: BigUint,
    },
    Forced {
        row: u64,
        symbol: Cell,
        #[serde(with = "crate::json::biguint")]
        lo: BigUint,
        #[serde(with = "crate::json::biguint")]
        hi: BigUint,
    },
    Excluded {
        row: u64,
        symbol: Cell,
        #[serde(with = "crate::json::biguint")]
        lo: BigUint,
        #[serde(with = "crate::json::biguint")]
        hi: BigUint,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum Rule {
    /// At most `budget < length` bad times leave a good one; at radius
    /// `eps` a good time pins cell `(row, t)`.
    TraceSegments {
        eps: Epsilon,
        length: u64,
        budget: u64,
        row: u64,
    },
    /// `b` in row `i` forces `b` below it.
    Persistence { premise: String, to_row: u64 },
    /// Consecutive `b`s less than `2^row` apart in row `row` are joined by `b`s.
    FillBetween { premise: String },
    /// A `b`-run of length at least `claimed_run` keeps `c` out of the
    /// `lo` columns before it.
    GuardRun {
        premise: String,
        #[serde(with = "crate::json::biguint")]
        claimed_run: BigUint,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub id: String,
    pub claim: String,
    pub rule: Rule,
    pub conclusion: Fact,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Contradiction {
    pub exists: String,
    pub excluded: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefutationParams {
    pub n: u32,
    pub eps: Epsilon,
    #[serde(rename = "N")]
    pub big_n: u64,
    #[serde(rename = "M")]
    pub big_m: u32,
    /// Radius for the first segment, `2^{-(M+2)}`.
    pub eps1: Epsilon,
    pub m: u64,
    #[serde(with = "crate::json::biguint")]
    pub s: BigUint,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecSegment {
    pub symbol: Cell,
    pub eps: Epsilon,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Specification {
    /// Traced over `[0, n_0)`.
    pub first: SpecSegment,
    #[serde(with = "crate::json::biguint")]
    pub n0: BigUint,
    pub rest: SpecSegment,
    pub segments: Progression,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowSize {
    pub rows: u64,
    #[serde(with = "crate::json::biguint")]
    pub cols: BigUint,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefutationCertificate {
    pub g: MistakeFunction,
    pub params: RefutationParams,
    pub k_g_eps: u64,
    pub k_g_eps1: u64,
    pub specification: Specification,
    pub window: WindowSize,
    pub steps: Vec<Step>,
    pub contradiction: Contradiction,
}

fn stuck(step: &str, detail: impl Into<String>) -> Error {
    Error::SearchExhausted {
        step: step.into(),
        detail: detail.into(),
    }
}

/// Runs the parameter chain for `g` and builds the certificate.
pub fn refute_almost_spec(g: &MistakeFunction) -> Result<RefutationCertificate> {
    let n = g.eps0.strict_exponent();
    let eps = Epsilon::pow2_neg(n).map_err(|_| stuck("n", format!("2^-{n} not representable")))?;
    let k_eps = g.k_g(eps)?;
    let big_n = k_eps + 1;
    let mut big_m = 0u32;
    while (1u128 << big_m) <= 2 * big_n as u128 {
        big_m += 1;
        if big_m > 60 {
            return Err(stuck("M", format!("no M <= 60 with 2^M > 2N = {}", 2 * big_n)));
        }
    }
    let eps1 = Epsilon::pow2_neg(big_m + 2)
        .map_err(|_| stuck("m", format!("2^-(M+2) with M = {big_m}")))?;
    let k_eps1 = g.k_g(eps1)?;
    let m = k_eps1.max(1);
    // Least s >= 3 with 2^M ⌈log₂((s-2)N + 1)⌉ > N + m: the ceiling must
    // reach c, i.e. (s-2)N >= 2^{c-1}.
    let c = (big_n + m) / (1u64 << big_m) + 1;
    let c = u32::try_from(c).map_err(|_| stuck("s", format!("log bound {c} too large")))?;
    let need = BigUint::one() << (c - 1);
    let q = (&need + BigUint::from(big_n - 1)) / BigUint::from(big_n);
    let s = BigUint::from(2u32) + q.max(BigUint::one());
    let params = RefutationParams {
        n,
        eps,
        big_n,
        big_m,
        eps1,
        m,
        s,
    };
    Ok(RefutationCertificate::build_with(g, params, k_eps, k_eps1))
}

impl RefutationCertificate {
    /// Builds the steps for the given parameters without checking that they
    /// satisfy the chain; the checker decides.
    pub fn build_with(
        g: &MistakeFunction,
        params: RefutationParams,
        k_g_eps: u64,
        k_g_eps1: u64,
    ) -> RefutationCertificate {
        let row_m = params.big_m as u64;
        let n_big = BigUint::from(params.big_n);
        let n0 = BigUint::from(params.m);
        let segments = Progression {
            start: n0.clone(),
            step: n_big.clone(),
            count: params.s.clone(),
        };
        let n1 = segments.boundary(&BigUint::one());
        let last_inner = if params.s >= BigUint::one() {
            segments.boundary(&(&params.s - 1u32))
        } else {
            n0.clone()
        };
        let claimed_run = if params.s >= BigUint::from(2u32) {
            (&params.s - 2u32) * &n_big
        } else {
            BigUint::default()
        };
        let steps = vec![
            Step {
                id: "S1".into(),
                claim: "each b-segment has a b in row 0".into(),
                rule: Rule::TraceSegments {
                    eps: params.eps,
                    length: params.big_n,
                    budget: g.eval(params.big_n),
                    row: 0,
                },
                conclusion: Fact::ExistsEach {
                    row: 0,
                    symbol: Cell::B,
                    segments: segments.clone(),
                },
            },
            Step {
                id: "S2".into(),
                claim: "persistence carries those b's to row M".into(),
                rule: Rule::Persistence {
                    premise: "S1".into(),
                    to_row: row_m,
                },
                conclusion: Fact::ExistsEach {
                    row: row_m,
                    symbol: Cell::B,
                    segments: segments.clone(),
                },
            },
            Step {
                id: "S3".into(),
                claim: "row M is b on [n_1, n_(s-1)]".into(),
                rule: Rule::FillBetween {
                    premise: "S2".into(),
                },
                conclusion: Fact::Forced {
                    row: row_m,
                    symbol: Cell::B,
                    lo: n1.clone(),
                    hi: last_inner + 1u32,
                },
            },
            Step {
                id: "S4".into(),
                claim: "no c in row M before n_1".into(),
                rule: Rule::GuardRun {
                    premise: "S3".into(),
                    claimed_run,
                },
                conclusion: Fact::Excluded {
                    row: row_m,
                    symbol: Cell::C,
                    lo: BigUint::default(),
                    hi: n1,
                },
            },
            Step {
                id: "S5".into(),
                claim: "the c-segment puts a c in row M on [0, m)".into(),
                rule: Rule::TraceSegments {
                    eps: params.eps1,
                    length: params.m,
                    budget: g.eval(params.m),
                    row: row_m,
                },
                conclusion: Fact::Exists {
                    row: row_m,
                    symbol: Cell::C,
                    lo: BigUint::default(),
                    hi: n0.clone(),
                },
            },
        ];
        RefutationCertificate {
            g: *g,
            k_g_eps,
            k_g_eps1,
            specification: Specification {
                first: SpecSegment {
                    symbol: Cell::C,
                    eps: params.eps1,
                },
                n0,
                rest: SpecSegment {
                    symbol: Cell::B,
                    eps: params.eps,
                },
                segments: segments.clone(),
            },
            window: WindowSize {
                rows: row_m + 1,
                cols: segments.end(),
            },
            params,
            steps,
            contradiction: Contradiction {
                exists: "S5".into(),
                excluded: "S4".into(),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one() -> Epsilon {
        Epsilon::new(1, 1).unwrap()
    }

    #[test]
    fn sqrt_parameters() {
        let cert = refute_almost_spec(&MistakeFunction::sqrt(one())).unwrap();
        let p = &cert.params;
        assert_eq!((p.n, p.big_n, p.big_m), (1, 8, 5));
        assert_eq!(p.eps, Epsilon::new(1, 2).unwrap());
        assert_eq!(p.eps1, Epsilon::new(1, 128).unwrap());
        assert_eq!(cert.window.rows, 6);
        assert_eq!(cert.steps.len(), 5);
    }

    #[test]
    fn zero_function_parameters() {
        let g = MistakeFunction::by_name("zero", one()).unwrap();
        let cert = refute_almost_spec(&g).unwrap();
        let p = &cert.params;
        assert_eq!((p.big_n, p.big_m, p.m), (2, 3, 1));
        assert_eq!(p.s, BigUint::from(3u32));
    }

    #[test]
    fn log_has_smaller_m() {
        let s = refute_almost_spec(&MistakeFunction::sqrt(one())).unwrap();
        let l = refute_almost_spec(&MistakeFunction::log(one())).unwrap();
        assert!(l.params.m < s.params.m);
    }

    #[test]
    fn json_round_trip() {
        let cert = refute_almost_spec(&MistakeFunction::log(one())).unwrap();
        let text = serde_json::to_string(&cert).unwrap();
        assert!(text.contains(r#""N":"#));
        let back: RefutationCertificate = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cert);
    }
}
