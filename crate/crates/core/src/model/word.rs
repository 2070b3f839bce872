use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// A two-row symbol: a color on top and a digit below.
///
/// Ordering is lexicographic by `(color, digit)`, so the marker sorts first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol {
    pub color: u32,
    pub digit: u32,
}

impl Symbol {
    /// The marker `O`, the only color-0 symbol.
    pub const MARKER: Symbol = Symbol { color: 0, digit: 0 };

    pub fn new(color: u32, digit: u32) -> Self {
        Symbol { color, digit }
    }

    pub fn is_marker(&self) -> bool {
        *self == Symbol::MARKER
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_marker() {
            f.write_str("O")
        } else {
            write!(f, "{}:{}", self.color, self.digit)
        }
    }
}

impl FromStr for Symbol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        if s == "O" {
            return Ok(Symbol::MARKER);
        }
        let (c, d) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected `c:d` or `O`, got `{s}`")))?;
        let color = c
            .parse()
            .map_err(|_| Error::Parse(format!("bad color in `{s}`")))?;
        let digit = d
            .parse()
            .map_err(|_| Error::Parse(format!("bad digit in `{s}`")))?;
        if color == 0 && digit != 0 {
            return Err(Error::Parse(format!(
                "`{s}`: color 0 is reserved for the marker"
            )));
        }
        Ok(Symbol { color, digit })
    }
}

/// A finite block of symbols.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<Symbol>);

impl Word {
    pub fn new(symbols: Vec<Symbol>) -> Self {
        Word(symbols)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn markers(k: usize) -> Self {
        Word(vec![Symbol::MARKER; k])
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn into_symbols(self) -> Vec<Symbol> {
        self.0
    }

    pub fn push(&mut self, s: Symbol) {
        self.0.push(s);
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn slice(&self, start: usize, end: usize) -> Word {
        Word(self.0[start..end].to_vec())
    }

    /// Number of positions where two equal-length words differ.
    pub fn hamming(&self, other: &Word) -> Option<usize> {
        (self.len() == other.len())
            .then(|| self.iter().zip(other.iter()).filter(|(a, b)| a != b).count())
    }
}

impl Deref for Word {
    type Target = [Symbol];

    fn deref(&self) -> &[Symbol] {
        &self.0
    }
}

impl From<Vec<Symbol>> for Word {
    fn from(v: Vec<Symbol>) -> Self {
        Word(v)
    }
}

impl FromIterator<Symbol> for Word {
    fn from_iter<I: IntoIterator<Item = Symbol>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        s.split_whitespace().map(str::parse).collect()
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_tokens_and_marker() {
        let w: Word = "1:3 O 2:0".parse().unwrap();
        assert_eq!(
            w.symbols(),
            &[Symbol::new(1, 3), Symbol::MARKER, Symbol::new(2, 0)]
        );
        assert_eq!("0:0".parse::<Symbol>().unwrap(), Symbol::MARKER);
        assert!("".parse::<Word>().unwrap().is_empty());
        assert!("0:2".parse::<Symbol>().is_err());
        assert!("12".parse::<Symbol>().is_err());
        assert!("a:1".parse::<Symbol>().is_err());
    }

    #[test]
    fn hamming_requires_equal_length() {
        let a: Word = "1:1 1:1 1:1".parse().unwrap();
        let b: Word = "O 1:0 1:1".parse().unwrap();
        assert_eq!(a.hamming(&b), Some(2));
        assert_eq!(a.hamming(&Word::empty()), None);
    }

    fn symbol() -> impl Strategy<Value = Symbol> {
        prop_oneof![
            Just(Symbol::MARKER),
            (1u32..5, 0u32..7).prop_map(|(c, d)| Symbol::new(c, d)),
        ]
    }

    proptest! {
        #[test]
        fn text_format_round_trips(v in prop::collection::vec(symbol(), 0..12)) {
            let w = Word::new(v);
            let back: Word = w.to_string().parse().unwrap();
            prop_assert_eq!(back, w);
        }
    }
}
