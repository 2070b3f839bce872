use std::fmt;
use std::str::FromStr;

use num_integer::Roots;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which built-in (or table-driven) family of special positions is in use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    /// `R_n = [1, n] ∩ {k²}`.
    Squares,
    /// `R_n = {1, …, ⌊√n⌋}`.
    Prefix,
    CustomTable,
}

/// A nested family `R_1 ⊆ R_2 ⊆ …` of special positions.
///
/// Stored through its entry function `entry(j) = min{n : j ∈ R_n}`, so that
/// `j ∈ R_n` iff `entry(j) <= n`. Positions are 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RestrictionFamily {
    repr: Repr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Repr {
    Squares,
    Prefix,
    Custom(CustomTable),
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct CustomTable {
    horizon: u64,
    // entry[j - 1]; None is infinity.
    entry: Vec<Option<u64>>,
    // r[n] for n in 0..=horizon
    r: Vec<u64>,
    // max_special[n] for n in 0..=horizon (index 0 unused)
    max_special: Vec<u64>,
}

/// On-disk form of a family.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
enum FamilyFile {
    Squares,
    Prefix,
    CustomTable { horizon: u64, entries: Vec<(u64, u64)> },
}

impl RestrictionFamily {
    pub fn squares() -> Self {
        RestrictionFamily { repr: Repr::Squares }
    }

    pub fn prefix() -> Self {
        RestrictionFamily { repr: Repr::Prefix }
    }

    /// Builds a table-driven family from `(j, entry(j))` pairs.
    ///
    /// Positions missing from the table have entry infinity. Entries larger
    /// than the horizon are kept but never become special within it.
    pub fn custom(horizon: u64, entries: &[(u64, u64)]) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::InvalidFamily("horizon must be at least 1".into()));
        }
        let len = usize::try_from(horizon)
            .map_err(|_| Error::InvalidFamily(format!("horizon {horizon} too large")))?;
        let mut entry = vec![None; len];
        for &(j, e) in entries {
            if j == 0 || j > horizon {
                return Err(Error::InvalidFamily(format!(
                    "position {j} outside 1..={horizon}"
                )));
            }
            if e < j {
                return Err(Error::InvalidFamily(format!(
                    "entry({j}) = {e} < {j}; special positions must satisfy j <= n"
                )));
            }
            let slot = &mut entry[(j - 1) as usize];
            if slot.is_some() {
                return Err(Error::InvalidFamily(format!("duplicate position {j}")));
            }
            *slot = Some(e);
        }
        if entry[0] != Some(1) {
            return Err(Error::InvalidFamily("R_1 must be {1}: entry(1) = 1".into()));
        }

        let mut r = vec![0u64; len + 1];
        let mut max_special = vec![0u64; len + 1];
        let mut new_at = vec![Vec::new(); len + 1];
        for (idx, e) in entry.iter().enumerate() {
            if let Some(e) = *e {
                if e <= horizon {
                    new_at[e as usize].push(idx as u64 + 1);
                }
            }
        }
        for n in 1..=len {
            r[n] = r[n - 1] + new_at[n].len() as u64;
            let fresh = new_at[n].iter().copied().max().unwrap_or(0);
            max_special[n] = max_special[n - 1].max(fresh);
        }

        Ok(RestrictionFamily {
            repr: Repr::Custom(CustomTable {
                horizon,
                entry,
                r,
                max_special,
            }),
        })
    }

    /// Resolves a built-in family by name (`squares` or `prefix`).
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "squares" => Ok(Self::squares()),
            "prefix" => Ok(Self::prefix()),
            other => Err(Error::InvalidFamily(format!(
                "unknown family `{other}` (expected `squares`, `prefix`, or a JSON file)"
            ))),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: FamilyFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("family file: {e}")))?;
        match file {
            FamilyFile::Squares => Ok(Self::squares()),
            FamilyFile::Prefix => Ok(Self::prefix()),
            FamilyFile::CustomTable { horizon, entries } => Self::custom(horizon, &entries),
        }
    }

    pub fn to_json(&self) -> String {
        let file = match &self.repr {
            Repr::Squares => FamilyFile::Squares,
            Repr::Prefix => FamilyFile::Prefix,
            Repr::Custom(t) => FamilyFile::CustomTable {
                horizon: t.horizon,
                entries: t
                    .entry
                    .iter()
                    .enumerate()
                    .filter_map(|(i, e)| e.map(|e| (i as u64 + 1, e)))
                    .collect(),
            },
        };
        serde_json::to_string(&file).expect("family serializes")
    }

    pub fn kind(&self) -> FamilyKind {
        match self.repr {
            Repr::Squares => FamilyKind::Squares,
            Repr::Prefix => FamilyKind::Prefix,
            Repr::Custom(_) => FamilyKind::CustomTable,
        }
    }

    pub fn is_builtin(&self) -> bool {
        !matches!(self.repr, Repr::Custom(_))
    }

    pub fn name(&self) -> &'static str {
        match self.repr {
            Repr::Squares => "squares",
            Repr::Prefix => "prefix",
            Repr::Custom(_) => "custom-table",
        }
    }

    /// Largest length the family is defined for; `None` for built-ins.
    pub fn horizon(&self) -> Option<u64> {
        match &self.repr {
            Repr::Custom(t) => Some(t.horizon),
            _ => None,
        }
    }

    pub fn check_len(&self, n: u64) -> Result<()> {
        match self.horizon() {
            Some(h) if n > h => Err(Error::BeyondHorizon { n, horizon: h }),
            _ => Ok(()),
        }
    }

    /// `min{n : j ∈ R_n}`, or `None` for infinity.
    pub fn entry(&self, j: u64) -> Option<u64> {
        if j == 0 {
            return None;
        }
        match &self.repr {
            Repr::Squares => {
                let s = j.sqrt();
                (s * s == j).then_some(j)
            }
            Repr::Prefix => j.checked_mul(j),
            Repr::Custom(t) => t.entry.get((j - 1) as usize).copied().flatten(),
        }
    }

    /// Membership test without range checks; callers guarantee `1 <= j <= n`
    /// and `n` within the horizon.
    #[inline]
    pub(crate) fn is_special_unchecked(&self, j: u64, n: u64) -> bool {
        match &self.repr {
            Repr::Squares => {
                let s = j.sqrt();
                s * s == j
            }
            Repr::Prefix => j.saturating_mul(j) <= n,
            Repr::Custom(t) => matches!(t.entry[(j - 1) as usize], Some(e) if e <= n),
        }
    }

    /// Whether position `j` is special in a word of length `n`, i.e. `j ∈ R_n`.
    pub fn special(&self, j: u64, n: u64) -> Result<bool> {
        if n < 1 || j < 1 || j > n {
            return Err(Error::PositionOutOfRange { j, n });
        }
        self.check_len(n)?;
        Ok(self.is_special_unchecked(j, n))
    }

    /// `r(n) = |R_n|`, with `r(0) = 0`.
    pub fn r(&self, n: u64) -> Result<u64> {
        self.check_len(n)?;
        Ok(match &self.repr {
            // #{j : j square, j <= n} and #{j : j² <= n} are both ⌊√n⌋.
            Repr::Squares | Repr::Prefix => n.sqrt(),
            Repr::Custom(t) => t.r[n as usize],
        })
    }

    /// `max R_n` for `n >= 1`.
    pub fn max_special(&self, n: u64) -> Result<u64> {
        if n < 1 {
            return Err(Error::PositionOutOfRange { j: 1, n });
        }
        self.check_len(n)?;
        Ok(match &self.repr {
            Repr::Squares => {
                let s = n.sqrt();
                s * s
            }
            Repr::Prefix => n.sqrt(),
            Repr::Custom(t) => t.max_special[n as usize],
        })
    }

    /// `R_n` as a sorted list of positions.
    pub fn materialize(&self, n: u64) -> Result<Vec<u64>> {
        self.check_len(n)?;
        Ok((1..=n).filter(|&j| self.is_special_unchecked(j, n)).collect())
    }
}

impl fmt::Display for RestrictionFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RestrictionFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::by_name(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Direct set constructions, independent of the entry encoding.
    fn squares_set(n: u64) -> Vec<u64> {
        (1..).map(|k| k * k).take_while(|&s| s <= n).collect()
    }

    fn prefix_set(n: u64) -> Vec<u64> {
        let mut k = 0;
        while (k + 1) * (k + 1) <= n {
            k += 1;
        }
        (1..=k).collect()
    }

    #[test]
    fn special_examples() {
        let sq = RestrictionFamily::squares();
        let pre = RestrictionFamily::prefix();
        assert!(sq.special(4, 4).unwrap());
        assert!(!sq.special(2, 100).unwrap());
        assert!(!pre.special(3, 8).unwrap());
        assert!(pre.special(3, 9).unwrap());
        assert!(sq.special(0, 4).is_err());
        assert!(sq.special(5, 4).is_err());
        assert!(sq.special(1, 0).is_err());
    }

    #[test]
    fn r_and_max_examples() {
        let sq = RestrictionFamily::squares();
        let pre = RestrictionFamily::prefix();
        assert_eq!(sq.r(10).unwrap(), 3);
        assert_eq!(pre.r(10).unwrap(), 3);
        assert_eq!(sq.r(0).unwrap(), 0);
        assert_eq!(pre.r(0).unwrap(), 0);
        assert_eq!(sq.max_special(10).unwrap(), 9);
        assert_eq!(pre.max_special(10).unwrap(), 3);
        assert_eq!(sq.max_special(1).unwrap(), 1);
        assert_eq!(pre.max_special(1).unwrap(), 1);
    }

    #[test]
    fn builtins_agree_with_materialized_sets() {
        let sq = RestrictionFamily::squares();
        let pre = RestrictionFamily::prefix();
        for n in 0..=10_000u64 {
            let s = squares_set(n);
            let p = prefix_set(n);
            assert_eq!(sq.r(n).unwrap(), s.len() as u64, "squares r({n})");
            assert_eq!(pre.r(n).unwrap(), p.len() as u64, "prefix r({n})");
            if n >= 1 {
                assert_eq!(sq.max_special(n).unwrap(), *s.last().unwrap());
                assert_eq!(pre.max_special(n).unwrap(), *p.last().unwrap());
            }
            if n <= 300 {
                assert_eq!(sq.materialize(n).unwrap(), s);
                assert_eq!(pre.materialize(n).unwrap(), p);
            }
        }
    }

    #[test]
    fn nested_and_monotone() {
        for fam in [RestrictionFamily::squares(), RestrictionFamily::prefix()] {
            for n in 1..=400u64 {
                let rn = fam.r(n).unwrap();
                assert!(fam.r(n - 1).unwrap() <= rn && rn <= n);
                for j in 1..=n {
                    if fam.special(j, n).unwrap() {
                        assert!(fam.special(j, n + 1).unwrap(), "{fam}: {j} in R_{n}");
                    }
                }
            }
        }
    }

    #[test]
    fn custom_table_round_trip_and_queries() {
        let text = r#"{"kind":"custom-table","horizon":10,"entries":[[1,1],[2,5],[7,9]]}"#;
        let fam = RestrictionFamily::from_json(text).unwrap();
        assert_eq!(fam.kind(), FamilyKind::CustomTable);
        assert_eq!(fam.horizon(), Some(10));
        assert_eq!(fam.r(4).unwrap(), 1);
        assert_eq!(fam.r(5).unwrap(), 2);
        assert_eq!(fam.r(9).unwrap(), 3);
        assert_eq!(fam.max_special(4).unwrap(), 1);
        assert_eq!(fam.max_special(8).unwrap(), 2);
        assert_eq!(fam.max_special(10).unwrap(), 7);
        assert_eq!(fam.materialize(10).unwrap(), vec![1, 2, 7]);
        assert!(matches!(
            fam.r(11),
            Err(Error::BeyondHorizon { n: 11, horizon: 10 })
        ));
        assert!(fam.special(3, 11).is_err());
        let again = RestrictionFamily::from_json(&fam.to_json()).unwrap();
        assert_eq!(again, fam);
        assert_eq!(
            RestrictionFamily::from_json(r#"{"kind":"squares"}"#).unwrap(),
            RestrictionFamily::squares()
        );
    }

    #[test]
    fn custom_table_validation() {
        assert!(RestrictionFamily::custom(5, &[(2, 2)]).is_err(), "entry(1) missing");
        assert!(RestrictionFamily::custom(5, &[(1, 2)]).is_err(), "entry(1) != 1");
        assert!(RestrictionFamily::custom(5, &[(1, 1), (3, 2)]).is_err(), "entry < j");
        assert!(RestrictionFamily::custom(5, &[(1, 1), (6, 6)]).is_err(), "past horizon");
        assert!(RestrictionFamily::custom(5, &[(1, 1), (1, 1)]).is_err(), "duplicate");
        assert!(RestrictionFamily::custom(0, &[]).is_err());
        assert!(RestrictionFamily::by_name("cubes").is_err());
    }
}
