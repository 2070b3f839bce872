//! Parameters, alphabet, words and restriction families.

mod family;
mod word;

pub use family::{FamilyKind, RestrictionFamily};
pub use word::{Symbol, Word};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `p` nonzero colors and `q` digits per color.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Params {
    p: u32,
    q: u32,
}

impl Params {
    pub fn new(p: u32, q: u32) -> Result<Self> {
        if p < 2 || q < 2 {
            return Err(Error::InvalidParams(format!(
                "need p >= 2 and q >= 2, got p={p}, q={q}"
            )));
        }
        Ok(Params { p, q })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Size of the alphabet: the marker plus `p * q` colored symbols.
    pub fn alphabet_size(&self) -> usize {
        1 + (self.p as usize) * (self.q as usize)
    }

    /// The alphabet in lexicographic `(color, digit)` order; the marker comes first.
    pub fn alphabet(&self) -> Vec<Symbol> {
        let mut out = Vec::with_capacity(self.alphabet_size());
        out.push(Symbol::MARKER);
        for color in 1..=self.p {
            for digit in 0..self.q {
                out.push(Symbol { color, digit });
            }
        }
        out
    }

    pub fn contains(&self, s: Symbol) -> bool {
        if s.color == 0 {
            s.digit == 0
        } else {
            s.color <= self.p && s.digit < self.q
        }
    }

    pub fn check_word(&self, w: &Word) -> Result<()> {
        match w.iter().find(|s| !self.contains(**s)) {
            None => Ok(()),
            Some(s) => Err(Error::SymbolOutsideAlphabet {
                color: s.color,
                digit: s.digit,
                p: self.p,
                q: self.q,
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_reject_small_values() {
        assert!(Params::new(1, 4).is_err());
        assert!(Params::new(2, 1).is_err());
        assert!(Params::new(2, 2).is_ok());
    }

    #[test]
    fn alphabet_is_sorted_and_sized() {
        let params = Params::new(2, 4).unwrap();
        let alpha = params.alphabet();
        assert_eq!(alpha.len(), 9);
        assert_eq!(alpha[0], Symbol::MARKER);
        assert!(alpha.windows(2).all(|w| w[0] < w[1]));
        assert!(alpha.iter().all(|s| params.contains(*s)));
    }

    #[test]
    fn foreign_symbols_are_rejected() {
        let params = Params::new(2, 4).unwrap();
        assert!(!params.contains(Symbol { color: 3, digit: 0 }));
        assert!(!params.contains(Symbol { color: 1, digit: 4 }));
        assert!(!params.contains(Symbol { color: 0, digit: 1 }));
        let w: Word = "1:0 3:1".parse().unwrap();
        assert!(matches!(
            params.check_word(&w),
            Err(Error::SymbolOutsideAlphabet { color: 3, .. })
        ));
    }
}
