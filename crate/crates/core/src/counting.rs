//! Exact counts of free, good and allowed words, and the summability
//! condition `1 + p·Σ q^{-r(j)} <= q` that separates the two entropy regimes.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json;
use crate::model::{Params, RestrictionFamily};

/// Exact tables `F_n`, `G_n`, `|B_n(X)|` for `0 <= n <= horizon`.
#[derive(Debug, Clone)]
pub struct CountTable {
    params: Params,
    family: RestrictionFamily,
    free: Vec<BigUint>,
    good: Vec<BigUint>,
    allowed: Vec<BigUint>,
}

impl CountTable {
    pub fn build(params: Params, family: &RestrictionFamily, horizon: usize) -> Result<Self> {
        family.check_len(horizon as u64)?;
        let p = BigUint::from(params.p());
        let q = BigUint::from(params.q());

        // F_0 = F_1 = 1, F_n = p·q^{(n-1) - r(n-1)}
        let mut free = Vec::with_capacity(horizon + 1);
        for n in 0..=horizon {
            if n <= 1 {
                free.push(BigUint::one());
            } else {
                let m = (n - 1) as u64;
                let e = m - family.r(m)?;
                free.push(&p * q.pow(e as u32));
            }
        }

        // G_n = Σ_{i=1}^{n} F_i·G_{n-i}
        let mut good: Vec<BigUint> = Vec::with_capacity(horizon + 1);
        for n in 0..=horizon {
            if n <= 1 {
                good.push(BigUint::one());
                continue;
            }
            let mut acc = BigUint::zero();
            for i in 1..=n {
                acc += &free[i] * &good[n - i];
            }
            good.push(acc);
        }

        // Unique first-marker parse: a marker-free monochromatic prefix of
        // length i (p·q^i choices, 1 for i = 0) followed by a good tail, or
        // a marker-free monochromatic word filling all n places.
        let mut allowed = Vec::with_capacity(horizon + 1);
        allowed.push(BigUint::one());
        let mut q_pow = vec![BigUint::one()];
        for i in 1..=horizon {
            let next = &q_pow[i - 1] * &q;
            q_pow.push(next);
        }
        for n in 1..=horizon {
            let mut acc = &p * &q_pow[n] + &good[n];
            for i in 1..n {
                acc += &p * &q_pow[i] * &good[n - i];
            }
            allowed.push(acc);
        }

        Ok(CountTable {
            params,
            family: family.clone(),
            free,
            good,
            allowed,
        })
    }

    pub fn params(&self) -> Params {
        self.params
    }

    pub fn family(&self) -> &RestrictionFamily {
        &self.family
    }

    pub fn horizon(&self) -> usize {
        self.free.len() - 1
    }

    fn at<'a>(&self, v: &'a [BigUint], n: usize) -> Result<&'a BigUint> {
        v.get(n).ok_or(Error::BeyondTable {
            n,
            horizon: self.horizon(),
        })
    }

    /// `F_n`, the number of free words of length `n`.
    pub fn free_count(&self, n: usize) -> Result<&BigUint> {
        self.at(&self.free, n)
    }

    /// `G_n`, the number of good words of length `n`.
    pub fn good_count(&self, n: usize) -> Result<&BigUint> {
        self.at(&self.good, n)
    }

    /// `|B_n(X)|`, the exact number of allowed words of length `n`.
    pub fn allowed_count(&self, n: usize) -> Result<&BigUint> {
        self.at(&self.allowed, n)
    }

    /// The over-count `1 + p·q^n + G_n + Σ_{i=1}^{n-1} (1 + p·q^i)·G_{n-i}`.
    ///
    /// Words starting with the marker are counted more than once, so this
    /// only bounds `|B_n|` from above.
    pub fn displayed_upper_count(&self, n: usize) -> Result<BigUint> {
        let g_n = self.good_count(n)?;
        let p = BigUint::from(self.params.p());
        let q = BigUint::from(self.params.q());
        let mut acc = BigUint::one() + &p * q.pow(n as u32) + g_n;
        for i in 1..n {
            acc += (BigUint::one() + &p * q.pow(i as u32)) * &self.good[n - i];
        }
        Ok(acc)
    }

    /// `ln|B_n| / n` together with the bracket `[ln q, ln q + ln(1 + n(p+1))/n]`.
    pub fn entropy_estimate(&self, n: usize) -> Result<EntropyEstimate> {
        if n == 0 {
            return Err(Error::Precondition("entropy estimate needs n >= 1".into()));
        }
        let b = self.allowed_count(n)?;
        let p = self.params.p() as u64;
        let q = BigUint::from(self.params.q());
        let q_n = q.pow(n as u32);
        let slack = BigUint::one() + BigUint::from(n as u64 * (p + 1));
        let upper = BigUint::one() + BigUint::from(n as u64 * (p + 1)) * &q_n;
        let log_q = (self.params.q() as f64).ln();
        Ok(EntropyEstimate {
            n,
            value: ln_biguint(b) / n as f64,
            lower: log_q,
            upper: log_q + ln_biguint(&slack) / n as f64,
            sandwich: q_n <= *b && *b <= upper,
        })
    }

    /// Rows `(n, F, G, B, ln|B_n|/n)` for `1 <= n <= horizon`, row 0 included
    /// with an empty estimate.
    pub fn rows(&self) -> impl Iterator<Item = CountRow<'_>> + '_ {
        (0..=self.horizon()).map(move |n| CountRow {
            n,
            free: &self.free[n],
            good: &self.good[n],
            allowed: &self.allowed[n],
            entropy: (n > 0).then(|| ln_biguint(&self.allowed[n]) / n as f64),
        })
    }
}

pub struct CountRow<'a> {
    pub n: usize,
    pub free: &'a BigUint,
    pub good: &'a BigUint,
    pub allowed: &'a BigUint,
    pub entropy: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EntropyEstimate {
    pub n: usize,
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    /// Exact check of `q^n <= |B_n| <= 1 + n(p+1)q^n`.
    pub sandwich: bool,
}

/// Natural log of a big integer, accurate to f64 precision.
pub fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("64-bit value");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

fn big_rat(n: u64, d: u64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `Σ_{n=1}^{cutoff} q^{-r(n)}` computed over the common denominator
/// `q^{r(cutoff)}`.
pub fn partial_sum(q: u32, family: &RestrictionFamily, cutoff: u64) -> Result<BigRational> {
    family.check_len(cutoff)?;
    let top = family.r(cutoff)?;
    let qb = BigUint::from(q);
    let mut num = BigUint::zero();
    for n in 1..=cutoff {
        num += qb.pow((top - family.r(n)?) as u32);
    }
    Ok(BigRational::new(num.into(), qb.pow(top as u32).into()))
}

/// `Σ_{k>=1} (2k+1)·x^k` at `x = 1/q`, via `Σ k x^k = x/(1-x)²` and
/// `Σ x^k = x/(1-x)`. This is the series `Σ q^{-⌊√n⌋}` grouped by equal
/// values of `⌊√n⌋ = k`, each of which occurs `2k + 1` times.
pub fn grouped_series_sum(q: u32) -> BigRational {
    let x = big_rat(1, q as u64);
    let one = BigRational::one();
    let om = &one - &x;
    let two = BigRational::from_integer(2.into());
    &two * &x / (&om * &om) + &x / &om
}

/// `(3q - 1) / (q - 1)²`.
pub fn closed_form_sum(q: u32) -> BigRational {
    let q = q as u64;
    big_rat(3 * q - 1, (q - 1) * (q - 1))
}

/// Partial sum, tail, and (for built-ins) the exact value of `Σ q^{-r(n)}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ConditionSum {
    pub cutoff: u64,
    #[serde(with = "json::rational")]
    pub partial: BigRational,
    #[serde(with = "json::opt_rational")]
    pub tail: Option<BigRational>,
    #[serde(with = "json::opt_rational")]
    pub exact: Option<BigRational>,
}

pub fn condition_sum(q: u32, family: &RestrictionFamily, cutoff: u64) -> Result<ConditionSum> {
    if q < 2 {
        return Err(Error::InvalidParams(format!("need q >= 2, got {q}")));
    }
    if cutoff < 1 {
        return Err(Error::Precondition("cutoff must be at least 1".into()));
    }
    let partial = partial_sum(q, family, cutoff)?;
    // Both built-ins have r(n) = ⌊√n⌋.
    let exact = family.is_builtin().then(|| grouped_series_sum(q));
    let tail = exact.as_ref().map(|e| e - &partial);
    Ok(ConditionSum {
        cutoff,
        partial,
        tail,
        exact,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Fails,
    Undetermined,
}

/// Evaluation of `1 + p·Σ q^{-r(j)} <= q`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ConditionReport {
    pub p: u32,
    pub q: u32,
    pub family: String,
    pub verdict: Verdict,
    #[serde(with = "json::opt_rational")]
    pub lhs_exact: Option<BigRational>,
    #[serde(with = "json::rational")]
    pub lhs_partial: BigRational,
    #[serde(with = "json::opt_rational")]
    pub tail_bound: Option<BigRational>,
    pub cutoff: u64,
}

pub const DEFAULT_CONDITION_CUTOFF: u64 = 1000;

/// Decides the condition exactly for built-in families.
///
/// A failing verdict is always backed by a partial sum exceeding `q`: when
/// the requested cutoff is too small for that, it is raised until it is.
/// Table-driven families get `Fails` from partial sums or `Undetermined`.
pub fn check_condition(
    p: u32,
    q: u32,
    family: &RestrictionFamily,
    cutoff: u64,
) -> Result<ConditionReport> {
    Params::new(p, q)?;
    let pb = BigRational::from_integer(p.into());
    let qb = BigRational::from_integer(q.into());
    let lhs = |s: &BigRational| BigRational::one() + &pb * s;

    let mut sums = condition_sum(q, family, cutoff)?;
    let lhs_exact = sums.exact.as_ref().map(&lhs);
    let verdict = match &lhs_exact {
        Some(e) if *e <= qb => Verdict::Holds,
        Some(_) => {
            // Partial sums increase to the exact value, which exceeds q.
            let mut c = cutoff;
            while lhs(&sums.partial) <= qb {
                c = (c * 2).max(c + 1);
                sums = condition_sum(q, family, c)?;
            }
            Verdict::Fails
        }
        None if lhs(&sums.partial) > qb => Verdict::Fails,
        None => Verdict::Undetermined,
    };
    Ok(ConditionReport {
        p,
        q,
        family: family.name().to_string(),
        verdict,
        lhs_exact,
        lhs_partial: lhs(&sums.partial),
        tail_bound: sums.tail.as_ref().map(|t| &pb * t),
        cutoff: sums.cutoff,
    })
}

/// Witness that `G_n` grows faster than `q^n`: `G_n >= (q·z)^{n-N}` for
/// `N <= n <= verified_up_to`, where `z = z_num / z_den > 1`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct GrowthWitness {
    #[serde(rename = "N")]
    pub n: u64,
    pub z_num: u64,
    pub z_den: u64,
    pub verified_up_to: u64,
}

impl GrowthWitness {
    pub fn z(&self) -> BigRational {
        big_rat(self.z_num, self.z_den)
    }

    /// `ln z`, the finite-scale excess of `h(G)` over `ln q`.
    pub fn log_z(&self) -> f64 {
        (self.z_num as f64 / self.z_den as f64).ln()
    }
}

pub const WITNESS_Z_DENOMINATOR: u64 = 1024;

/// Searches `N = 1, 2, …` for the first `N` admitting some
/// `z = 1 + a/1024` with `1 + Σ_{j=1}^{N-1} p·q^{-r(j)} > q·z^{N+1}`,
/// takes the largest such `a`, then checks `G_n >= (qz)^{n-N}` exactly.
pub fn growth_witness(
    p: u32,
    q: u32,
    family: &RestrictionFamily,
    n_max: u64,
) -> Result<Option<GrowthWitness>> {
    let report = check_condition(p, q, family, DEFAULT_CONDITION_CUTOFF.min(
        family.horizon().unwrap_or(u64::MAX),
    ))?;
    if report.verdict != Verdict::Fails {
        return Err(Error::Precondition(format!(
            "growth witness needs the summability condition to fail; verdict is {:?}",
            report.verdict
        )));
    }
    let params = Params::new(p, q)?;
    let table = CountTable::build(params, family, n_max as usize)?;
    let den = BigUint::from(WITNESS_Z_DENOMINATOR);
    let qb = BigUint::from(q);

    // lhs_N = 1 + Σ_{j=1}^{N-1} p q^{-r(j)}, kept as an exact rational.
    let mut lhs = BigRational::one();
    for n in 1..=n_max {
        if n >= 2 {
            let r = family.r(n - 1)?;
            lhs += BigRational::new(BigInt::from(p), BigInt::from(qb.pow(r as u32)));
        }
        // lhs > q·z^{N+1}  ⇔  num·den^{N+1} > q·(den + a)^{N+1}·lhs_den
        let e = (n + 1) as u32;
        let num = lhs.numer().to_biguint().expect("positive");
        let lden = lhs.denom().to_biguint().expect("positive");
        let left = &num * den.pow(e);
        let ok = |a: u64| left > &qb * (&den + BigUint::from(a)).pow(e) * &lden;
        if !ok(1) {
            continue;
        }
        let (mut lo, mut hi) = (1u64, WITNESS_Z_DENOMINATOR);
        while lo < hi {
            let mid = (lo + hi + 1) / 2;
            if ok(mid) {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        let z_num = WITNESS_Z_DENOMINATOR + lo;
        let base = &qb * BigUint::from(z_num);
        for k in n..=n_max {
            let e = (k - n) as u32;
            let g = table.good_count(k as usize)?;
            if g * den.pow(e) < base.pow(e) {
                return Err(Error::SearchExhausted {
                    step: "growth witness verification".into(),
                    detail: format!("G_{k} < (qz)^{{{k}-{n}}} with z = {z_num}/1024"),
                });
            }
        }
        return Ok(Some(GrowthWitness {
            n,
            z_num,
            z_den: WITNESS_Z_DENOMINATOR,
            verified_up_to: n_max,
        }));
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(p: u32, q: u32, fam: RestrictionFamily, n: usize) -> CountTable {
        CountTable::build(Params::new(p, q).unwrap(), &fam, n).unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn small_counts_match_hand_enumeration() {
        let t = table(2, 4, RestrictionFamily::squares(), 10);
        assert_eq!(*t.free_count(0).unwrap(), 1u32.into());
        assert_eq!(*t.free_count(1).unwrap(), 1u32.into());
        assert_eq!(*t.free_count(2).unwrap(), 2u32.into());
        assert_eq!(*t.free_count(3).unwrap(), 8u32.into());
        assert_eq!(*t.good_count(0).unwrap(), 1u32.into());
        assert_eq!(*t.good_count(2).unwrap(), 3u32.into());
        assert_eq!(*t.good_count(3).unwrap(), 13u32.into());
        assert_eq!(*t.allowed_count(1).unwrap(), 9u32.into());
        assert_eq!(*t.allowed_count(2).unwrap(), 43u32.into());
        assert!(matches!(
            t.good_count(11),
            Err(Error::BeyondTable { n: 11, horizon: 10 })
        ));
    }

    #[test]
    fn good_counts_are_nondecreasing() {
        let t = table(2, 4, RestrictionFamily::prefix(), 120);
        for n in 1..=120 {
            assert!(t.good_count(n - 1).unwrap() <= t.good_count(n).unwrap());
        }
    }

    #[test]
    fn displayed_expression_overcounts() {
        for fam in [RestrictionFamily::squares(), RestrictionFamily::prefix()] {
            let t = table(2, 4, fam, 40);
            for n in 1..=40 {
                assert!(t.displayed_upper_count(n).unwrap() >= *t.allowed_count(n).unwrap());
            }
            assert!(t.displayed_upper_count(2).unwrap() > *t.allowed_count(2).unwrap());
        }
    }

    #[test]
    fn entropy_estimate_brackets() {
        let t = table(2, 4, RestrictionFamily::squares(), 40);
        let e = t.entropy_estimate(40).unwrap();
        assert!(e.sandwich);
        assert!(e.lower <= e.value && e.value <= e.upper);
        assert!((e.upper - (4f64.ln() + 121f64.ln() / 40.0)).abs() < 1e-12);
        let e1 = t.entropy_estimate(1).unwrap();
        assert!((e1.value - 9f64.ln()).abs() < 1e-12);
        assert!(t.entropy_estimate(0).is_err());
        let mut prev = f64::INFINITY;
        for n in 1..=40 {
            let u = t.entropy_estimate(n).unwrap().upper;
            assert!(u <= prev);
            prev = u;
        }
    }

    #[test]
    fn ln_of_huge_integers() {
        let x = BigUint::from(3u32).pow(5000);
        assert!((ln_biguint(&x) - 5000.0 * 3f64.ln()).abs() < 1e-9 * 5000.0);
        assert_eq!(ln_biguint(&BigUint::one()), 0.0);
    }

    #[test]
    fn condition_sum_examples() {
        let sq = condition_sum(4, &RestrictionFamily::squares(), 3).unwrap();
        assert_eq!(sq.exact, Some(rat(11, 9)));
        assert_eq!(sq.partial, rat(3, 4));
        assert_eq!(sq.tail, Some(rat(11, 9) - rat(3, 4)));
        let pre = condition_sum(4, &RestrictionFamily::prefix(), 100).unwrap();
        assert_eq!(pre.exact, Some(rat(11, 9)));
        assert!(condition_sum(1, &RestrictionFamily::squares(), 3).is_err());
        assert!(condition_sum(4, &RestrictionFamily::squares(), 0).is_err());
    }

    #[test]
    fn grouped_series_matches_closed_form() {
        for q in 2..=10 {
            assert_eq!(grouped_series_sum(q), closed_form_sum(q), "q = {q}");
        }
    }

    #[test]
    fn condition_verdicts() {
        let sq = RestrictionFamily::squares();
        let holds = check_condition(2, 4, &sq, 100).unwrap();
        assert_eq!(holds.verdict, Verdict::Holds);
        assert_eq!(holds.lhs_exact, Some(rat(31, 9)));

        let fails = check_condition(3, 4, &sq, 100).unwrap();
        assert_eq!(fails.verdict, Verdict::Fails);
        assert_eq!(fails.lhs_exact, Some(rat(14, 3)));
        assert!(fails.lhs_partial > rat(4, 1));

        let tiny = check_condition(3, 4, &sq, 3).unwrap();
        assert_eq!(tiny.verdict, Verdict::Fails);
        assert!(tiny.cutoff > 3 && tiny.lhs_partial > rat(4, 1));

        let q2 = check_condition(2, 2, &sq, 1).unwrap();
        assert_eq!(q2.verdict, Verdict::Fails);
        assert_eq!(q2.lhs_exact, Some(rat(11, 1)));
        assert!(q2.lhs_partial > rat(2, 1));

        let big_q = check_condition(2, 16, &sq, 100).unwrap();
        assert_eq!(big_q.verdict, Verdict::Holds);
        assert_eq!(big_q.lhs_exact, Some(rat(319, 225)));
    }

    #[test]
    fn custom_families_are_undetermined_or_fail() {
        // r(n) = 1 for all n <= 50: partial sums grow linearly.
        let fam = RestrictionFamily::custom(50, &[(1, 1)]).unwrap();
        let r = check_condition(2, 4, &fam, 2).unwrap();
        assert_eq!(r.verdict, Verdict::Undetermined);
        assert!(r.tail_bound.is_none() && r.lhs_exact.is_none());
        let r = check_condition(2, 4, &fam, 50).unwrap();
        assert_eq!(r.verdict, Verdict::Fails);
        assert!(check_condition(2, 4, &fam, 51).is_err());
    }

    #[test]
    fn growth_witness_for_failing_condition() {
        let w = growth_witness(3, 4, &RestrictionFamily::squares(), 200)
            .unwrap()
            .expect("witness");
        assert!(w.n <= 16);
        assert!(w.z_num > w.z_den);
        assert_eq!(w.verified_up_to, 200);
        assert!(matches!(
            growth_witness(2, 4, &RestrictionFamily::squares(), 200),
            Err(Error::Precondition(_))
        ));
    }
}
