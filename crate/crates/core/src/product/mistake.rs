//! Catalog mistake functions and the tail index `k_g`.

use num_bigint::BigUint;
use num_integer::Roots;
use serde::{Deserialize, Serialize};

use super::Epsilon;
use crate::error::{Error, Result};

/// Largest analytic tail bound accepted when computing `k_g`.
pub const KG_SCAN_CAP: u64 = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MistakeKind {
    /// `⌈√n⌉`.
    Sqrt,
    /// `⌈log₂(n+1)⌉`.
    Log,
    /// `⌈c n^α⌉` with `c = c_num/c_den` and `α = alpha_num/alpha_den < 1`.
    Affine {
        c_num: u64,
        c_den: u64,
        alpha_num: u32,
        alpha_den: u32,
    },
}

/// A catalog mistake function together with its threshold `eps0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MistakeFunction {
    pub kind: MistakeKind,
    pub eps0: Epsilon,
}

fn ceil_sqrt(n: u64) -> u64 {
    let r = n.sqrt();
    if r * r == n {
        r
    } else {
        r + 1
    }
}

impl MistakeFunction {
    pub fn new(kind: MistakeKind, eps0: Epsilon) -> Result<Self> {
        if let MistakeKind::Affine {
            c_den,
            alpha_num,
            alpha_den,
            ..
        } = kind
        {
            if c_den == 0 || alpha_den == 0 || alpha_num >= alpha_den || alpha_den > 64 {
                return Err(Error::Precondition(
                    "affine mistake function needs c_den > 0 and 0 <= alpha < 1 (alpha_den <= 64)"
                        .into(),
                ));
            }
        }
        Ok(MistakeFunction { kind, eps0 })
    }

    pub fn sqrt(eps0: Epsilon) -> Self {
        MistakeFunction {
            kind: MistakeKind::Sqrt,
            eps0,
        }
    }

    pub fn log(eps0: Epsilon) -> Self {
        MistakeFunction {
            kind: MistakeKind::Log,
            eps0,
        }
    }

    pub fn by_name(name: &str, eps0: Epsilon) -> Result<Self> {
        match name {
            "sqrt" => Ok(Self::sqrt(eps0)),
            "log" => Ok(Self::log(eps0)),
            "zero" => Self::new(
                MistakeKind::Affine {
                    c_num: 0,
                    c_den: 1,
                    alpha_num: 0,
                    alpha_den: 1,
                },
                eps0,
            ),
            _ => Err(Error::Parse(format!(
                "unknown mistake function {name:?}; expected sqrt, log or zero"
            ))),
        }
    }

    pub fn name(&self) -> String {
        match self.kind {
            MistakeKind::Sqrt => "sqrt".into(),
            MistakeKind::Log => "log".into(),
            MistakeKind::Affine {
                c_num,
                c_den,
                alpha_num,
                alpha_den,
            } => format!("affine({c_num}/{c_den}, {alpha_num}/{alpha_den})"),
        }
    }

    /// `g(n, eps)`; the catalog entries do not depend on `eps`.
    pub fn eval(&self, n: u64) -> u64 {
        match self.kind {
            MistakeKind::Sqrt => ceil_sqrt(n),
            MistakeKind::Log => (u64::BITS - n.leading_zeros()) as u64,
            MistakeKind::Affine {
                c_num,
                c_den,
                alpha_num,
                alpha_den,
            } => {
                if c_num == 0 || n == 0 {
                    return 0;
                }
                // Least k with (k c_den)^b >= c_num^b n^a.
                let b = alpha_den;
                let rhs = BigUint::from(c_num).pow(b) * BigUint::from(n).pow(alpha_num);
                let den = BigUint::from(c_den);
                let fits = |k: u64| (BigUint::from(k) * &den).pow(b) >= rhs;
                let guess = (c_num as f64 / c_den as f64)
                    * (n as f64).powf(alpha_num as f64 / alpha_den as f64);
                let mut k = (guess.ceil() as u64).saturating_sub(2);
                while k > 0 && fits(k) {
                    k -= 1;
                }
                while !fits(k) {
                    k += 1;
                }
                k
            }
        }
    }

    /// An `m` beyond which `g(m) < m eps` is proved for this catalog entry.
    fn tail_bound(&self, eps: Epsilon) -> Result<u64> {
        let (num, den) = (eps.num() as u128, eps.den() as u128);
        let too_big = |what: String| Error::SearchExhausted {
            step: "k_g".into(),
            detail: what,
        };
        let t: u128 = match self.kind {
            // sqrt(m) >= 2/eps gives m eps >= 2 sqrt(m) >= sqrt(m) + 2.
            MistakeKind::Sqrt => {
                let v = (4 * den * den).div_ceil(num * num);
                v.max(4)
            }
            // 2^t eps > t + 1 propagates to every u >= t.
            MistakeKind::Log => {
                let mut t = 0u32;
                while !((num << t) > (t as u128 + 1) * den && (num << t) >= den) {
                    t += 1;
                    if t > 100 {
                        return Err(too_big("log tail".into()));
                    }
                }
                if t >= 64 {
                    return Err(too_big(format!("tail 2^{t}")));
                }
                1u128 << t
            }
            // m^{1-α} >= (c+1)/eps gives m eps >= (c+1) m^α >= c m^α + 1.
            MistakeKind::Affine {
                c_num,
                c_den,
                alpha_num,
                alpha_den,
            } => {
                if c_num == 0 {
                    1
                } else {
                    let b = alpha_den;
                    let lhs_coef = BigUint::from(eps.num()).pow(b) * BigUint::from(c_den).pow(b);
                    let rhs = (BigUint::from(c_num) + BigUint::from(c_den)).pow(b)
                        * BigUint::from(eps.den()).pow(b);
                    let ok = |m: u64| BigUint::from(m).pow(b - alpha_num) * &lhs_coef >= rhs;
                    let mut hi = 1u64;
                    while !ok(hi) {
                        if hi > KG_SCAN_CAP {
                            return Err(too_big(format!("affine tail beyond {KG_SCAN_CAP}")));
                        }
                        hi *= 2;
                    }
                    let mut lo = hi / 2;
                    while lo + 1 < hi {
                        let mid = lo + (hi - lo) / 2;
                        if ok(mid) {
                            hi = mid;
                        } else {
                            lo = mid;
                        }
                    }
                    hi as u128
                }
            }
        };
        if t > KG_SCAN_CAP as u128 {
            return Err(too_big(format!("tail bound {t} exceeds cap {KG_SCAN_CAP}")));
        }
        Ok(t as u64)
    }

    /// Least `n` with `g(m) < m eps` for every `m >= n`.
    pub fn k_g(&self, eps: Epsilon) -> Result<u64> {
        if eps >= self.eps0 {
            return Err(Error::Precondition(format!(
                "k_g needs eps < eps0 = {}, got {eps}",
                self.eps0
            )));
        }
        let tail = self.tail_bound(eps)?;
        let mut last_fail = 0u64;
        for m in 1..=4 * tail {
            if !eps.below_multiple(self.eval(m), m) {
                if m >= tail {
                    return Err(Error::SearchExhausted {
                        step: "k_g".into(),
                        detail: format!("{} fails at m = {m} beyond its tail bound {tail}", self.name()),
                    });
                }
                last_fail = m;
            }
        }
        Ok(last_fail + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one() -> Epsilon {
        Epsilon::new(1, 1).unwrap()
    }

    fn half() -> Epsilon {
        Epsilon::new(1, 2).unwrap()
    }

    fn scan_k_g(g: &MistakeFunction, eps: Epsilon, horizon: u64) -> u64 {
        let ok = |m: u64| (g.eval(m) as f64) < m as f64 * eps.num() as f64 / eps.den() as f64;
        (1..=horizon).rev().find(|&m| !ok(m)).map_or(1, |m| m + 1)
    }

    #[test]
    fn catalog_values() {
        let s = MistakeFunction::sqrt(one());
        assert_eq!((0..=10).map(|n| s.eval(n)).collect::<Vec<_>>(), [0, 1, 2, 2, 2, 3, 3, 3, 3, 3, 4]);
        let l = MistakeFunction::log(one());
        assert_eq!((0..=8).map(|n| l.eval(n)).collect::<Vec<_>>(), [0, 1, 2, 2, 3, 3, 3, 3, 4]);
        let a = MistakeFunction::new(
            MistakeKind::Affine {
                c_num: 3,
                c_den: 2,
                alpha_num: 1,
                alpha_den: 2,
            },
            one(),
        )
        .unwrap();
        for n in 0..2000u64 {
            let want = (1.5 * (n as f64).sqrt() - 1e-9).ceil().max(0.0) as u64;
            assert_eq!(a.eval(n), want, "n={n}");
        }
    }

    #[test]
    fn k_g_examples() {
        assert_eq!(MistakeFunction::sqrt(one()).k_g(half()).unwrap(), 7);
        assert_eq!(MistakeFunction::log(one()).k_g(half()).unwrap(), 9);
        let zero = MistakeFunction::by_name("zero", one()).unwrap();
        assert_eq!(zero.k_g(half()).unwrap(), 1);
        assert!(MistakeFunction::sqrt(half()).k_g(half()).is_err());
    }

    #[test]
    fn k_g_matches_float_scan() {
        for g in [MistakeFunction::sqrt(one()), MistakeFunction::log(one())] {
            for k in 1..=8 {
                let eps = Epsilon::pow2_neg(k).unwrap();
                assert_eq!(g.k_g(eps).unwrap(), scan_k_g(&g, eps, 1 << 20), "{} 2^-{k}", g.name());
            }
            let eps = Epsilon::new(3, 10).unwrap();
            assert_eq!(g.k_g(eps).unwrap(), scan_k_g(&g, eps, 1 << 16));
        }
    }

    #[test]
    fn nondecreasing() {
        for g in [MistakeFunction::sqrt(one()), MistakeFunction::log(one())] {
            assert!((0..5000).all(|n| g.eval(n) <= g.eval(n + 1)));
        }
    }

    #[test]
    fn oversized_tail_refused() {
        let g = MistakeFunction::sqrt(one());
        let err = g.k_g(Epsilon::pow2_neg(20).unwrap()).unwrap_err();
        assert!(matches!(err, Error::SearchExhausted { .. }));
    }
}
