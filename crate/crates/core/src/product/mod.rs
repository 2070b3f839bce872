//! A product system over `{a, b, c}` with weak specification but without
//! almost specification.
//!
//! Row `m` of a point lives in the shift `X_m`; `b`s persist downwards.
//! Distances are read off the agreement depth: for windows `x`, `y` let `D`
//! be the least `i + j` where they differ. Then `ρ(x, y) = 2^{-D}`, so
//! `ρ <= 2^{-n}` exactly when the cells with `i + j < n` agree.

mod checker;
mod glue;
mod mistake;
mod refute;
mod window;
mod xm;

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub use checker::{replay, Replay};
pub use glue::{random_window, weak_gap_function, weak_glue_product, weak_gap_parameters, GlueSpec};
pub use mistake::{MistakeFunction, MistakeKind, KG_SCAN_CAP};
pub use refute::{
    refute_almost_spec, Contradiction, Fact, Progression, RefutationCertificate, RefutationParams,
    Rule, SpecSegment, Specification, Step, WindowSize,
};
pub use window::{
    rho_agreement_depth, verify_tracing, window_valid, MatrixWindow, Tracing, TracingMode,
};
pub use xm::{first_forbidden, xm_is_allowed, Forbidden};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cell {
    A,
    B,
    C,
}

impl Cell {
    pub const ALL: [Cell; 3] = [Cell::A, Cell::B, Cell::C];

    pub fn as_char(self) -> char {
        match self {
            Cell::A => 'a',
            Cell::B => 'b',
            Cell::C => 'c',
        }
    }

    pub fn from_char(ch: char) -> Result<Cell> {
        match ch {
            'a' => Ok(Cell::A),
            'b' => Ok(Cell::B),
            'c' => Ok(Cell::C),
            _ => Err(Error::Parse(format!("cell must be a, b or c, got {ch:?}"))),
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_char(self.as_char())
    }
}

impl<'de> Deserialize<'de> for Cell {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let ch = char::deserialize(d)?;
        Cell::from_char(ch).map_err(serde::de::Error::custom)
    }
}

/// Parses a row such as `"aabbc"`.
pub fn parse_cells(s: &str) -> Result<Vec<Cell>> {
    s.chars().map(Cell::from_char).collect()
}

pub fn cells_to_string(cells: &[Cell]) -> String {
    cells.iter().map(|c| c.as_char()).collect()
}

/// A positive exact radius, at most 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Epsilon(Ratio<u64>);

impl Epsilon {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if num == 0 || den == 0 || num > den {
            return Err(Error::Precondition(format!(
                "radius must satisfy 0 < eps <= 1, got {num}/{den}"
            )));
        }
        Ok(Epsilon(Ratio::new(num, den)))
    }

    /// `2^{-k}`.
    pub fn pow2_neg(k: u32) -> Result<Self> {
        let den = 1u64
            .checked_shl(k)
            .filter(|_| k < 64)
            .ok_or_else(|| Error::Overflow(format!("2^-{k} as a radius")))?;
        Epsilon::new(1, den)
    }

    pub fn num(&self) -> u64 {
        *self.0.numer()
    }

    pub fn den(&self) -> u64 {
        *self.0.denom()
    }

    pub fn ratio(&self) -> Ratio<u64> {
        self.0
    }

    /// Least `d` with `2^{-d} <= eps`: balls of radius `eps` are exactly
    /// agreement to depth `d`.
    pub fn depth(&self) -> u32 {
        let (num, den) = (self.num() as u128, self.den() as u128);
        let mut d = 0;
        while (num << d) < den {
            d += 1;
        }
        d
    }

    /// Least `n` with `2^{-n} < eps`.
    pub fn strict_exponent(&self) -> u32 {
        let (num, den) = (self.num() as u128, self.den() as u128);
        let mut n = 0;
        while (num << n) <= den {
            n += 1;
        }
        n
    }

    /// `value < m * eps`, exactly.
    pub fn below_multiple(&self, value: u64, m: u64) -> bool {
        (value as u128) * (self.den() as u128) < (m as u128) * (self.num() as u128)
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num(), self.den())
    }
}

impl FromStr for Epsilon {
    type Err = Error;

    /// Accepts `a/b`, an integer, or a finite decimal such as `0.3`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("cannot read radius {s:?}"));
        if let Some((a, b)) = s.split_once('/') {
            let a = a.trim().parse().map_err(|_| bad())?;
            let b = b.trim().parse().map_err(|_| bad())?;
            return Epsilon::new(a, b);
        }
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if frac.len() > 18 || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let int: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
        let den = 10u64.pow(frac.len() as u32);
        let frac_val: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        let num = int
            .checked_mul(den)
            .and_then(|v| v.checked_add(frac_val))
            .ok_or_else(bad)?;
        Epsilon::new(num, den)
    }
}

impl Serialize for Epsilon {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            num: String,
            den: String,
        }
        Repr {
            num: self.num().to_string(),
            den: self.den().to_string(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Epsilon {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            num: String,
            den: String,
        }
        let r = Repr::deserialize(d)?;
        let num = r.num.parse().map_err(serde::de::Error::custom)?;
        let den = r.den.parse().map_err(serde::de::Error::custom)?;
        Epsilon::new(num, den).map_err(serde::de::Error::custom)
    }
}
