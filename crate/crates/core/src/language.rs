//! Word classes and membership for the language of `X_R`.
//!
//! A word is *allowed* iff it is a monochromatic word followed by a good word.
//! Good words are concatenations of free blocks `O·V` with `V` restricted, so
//! every good word parses uniquely by splitting at each marker.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Params, RestrictionFamily, Symbol, Word};

/// Enumeration refuses lengths above this unless the caller raises the cap.
pub const DEFAULT_ENUMERATION_CAP: usize = 10;

/// Color row summary of a word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "tag", content = "color")]
pub enum ColorTag {
    /// The empty word: monochromatic, no color.
    None,
    Monochromatic(u32),
    Polychromatic,
}

impl ColorTag {
    pub fn is_monochromatic(&self) -> bool {
        !matches!(self, ColorTag::Polychromatic)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordClass {
    pub tag: ColorTag,
    pub restricted: bool,
    pub free: bool,
    pub good: bool,
    pub allowed: bool,
}

/// The shift space `X_R` for fixed parameters and restriction family.
#[derive(Debug, Clone)]
pub struct XrShift {
    params: Params,
    family: RestrictionFamily,
}

impl XrShift {
    pub fn new(params: Params, family: RestrictionFamily) -> Self {
        XrShift { params, family }
    }

    pub fn params(&self) -> Params {
        self.params
    }

    pub fn family(&self) -> &RestrictionFamily {
        &self.family
    }

    fn check(&self, w: &[Symbol]) -> Result<()> {
        self.family.check_len(w.len() as u64)?;
        match w.iter().find(|s| !self.params.contains(**s)) {
            None => Ok(()),
            Some(s) => Err(Error::SymbolOutsideAlphabet {
                color: s.color,
                digit: s.digit,
                p: self.params.p(),
                q: self.params.q(),
            }),
        }
    }

    pub fn classify(&self, w: &Word) -> Result<WordClass> {
        self.check(w)?;
        Ok(WordClass {
            tag: color_tag(w),
            restricted: self.restricted(w),
            free: self.free(w),
            good: self.good(w),
            allowed: self.allowed(w),
        })
    }

    pub fn is_restricted(&self, w: &Word) -> Result<bool> {
        self.check(w)?;
        Ok(self.restricted(w))
    }

    pub fn is_free(&self, w: &Word) -> Result<bool> {
        self.check(w)?;
        Ok(self.free(w))
    }

    pub fn is_good(&self, w: &Word) -> Result<bool> {
        self.check(w)?;
        Ok(self.good(w))
    }

    pub fn is_allowed(&self, w: &Word) -> Result<bool> {
        self.is_allowed_symbols(w)
    }

    /// [`XrShift::is_allowed`] on a borrowed slice, for hot loops that reuse
    /// a buffer.
    pub fn is_allowed_symbols(&self, w: &[Symbol]) -> Result<bool> {
        self.check(w)?;
        Ok(self.allowed(w))
    }

    // The slice predicates below assume `check` already passed for a word
    // at least as long as the slice.

    /// Empty, or monochromatic in a nonzero color with digit 0 at every
    /// position of `R_{|w|}`.
    pub(crate) fn restricted(&self, w: &[Symbol]) -> bool {
        let Some(first) = w.first() else {
            return true;
        };
        if first.color == 0 {
            return false;
        }
        let n = w.len() as u64;
        w.iter().enumerate().all(|(i, s)| {
            s.color == first.color
                && (s.digit == 0 || !self.family.is_special_unchecked(i as u64 + 1, n))
        })
    }

    pub(crate) fn free(&self, w: &[Symbol]) -> bool {
        matches!(w.split_first(), Some((head, rest)) if head.is_marker() && self.restricted(rest))
    }

    pub(crate) fn good(&self, w: &[Symbol]) -> bool {
        if w.is_empty() {
            return true;
        }
        if !w[0].is_marker() {
            return false;
        }
        w[1..]
            .split(|s| s.is_marker())
            .all(|segment| self.restricted(segment))
    }

    pub(crate) fn allowed(&self, w: &[Symbol]) -> bool {
        let cut = first_marker(w).unwrap_or(w.len());
        let (head, tail) = w.split_at(cut);
        let head_mono = head.iter().all(|s| s.color == head[0].color);
        head_mono && self.good(tail)
    }

    /// All allowed words of length `n` in lexicographic order.
    pub fn enumerate_allowed(&self, n: usize, cap: usize) -> Result<AllowedWords<'_>> {
        if n > cap {
            return Err(Error::EnumerationCap { n, cap });
        }
        self.family.check_len(n as u64)?;
        Ok(AllowedWords::new(self, Vec::new(), n))
    }

    /// Allowed words of length `n` whose first symbols are `prefix`.
    pub fn enumerate_with_prefix(
        &self,
        prefix: &Word,
        n: usize,
        cap: usize,
    ) -> Result<AllowedWords<'_>> {
        if n > cap {
            return Err(Error::EnumerationCap { n, cap });
        }
        self.family.check_len(n as u64)?;
        self.check(prefix)?;
        if prefix.len() > n || !self.allowed(prefix) {
            return Ok(AllowedWords::exhausted(self));
        }
        Ok(AllowedWords::new(self, prefix.to_vec(), n))
    }

    /// `|B_n(X)|` by enumeration, sharded over the first symbol.
    pub fn count_allowed_brute(&self, n: usize, cap: usize) -> Result<u64> {
        if n > cap {
            return Err(Error::EnumerationCap { n, cap });
        }
        if n == 0 {
            return Ok(1);
        }
        let shards = self.params.alphabet();
        shards
            .par_iter()
            .map(|s| Ok(self.enumerate_with_prefix(&Word::new(vec![*s]), n, cap)?.count() as u64))
            .sum()
    }
}

fn first_marker(w: &[Symbol]) -> Option<usize> {
    w.iter().position(Symbol::is_marker)
}

fn color_tag(w: &[Symbol]) -> ColorTag {
    match w.first() {
        None => ColorTag::None,
        Some(s) if w.iter().all(|t| t.color == s.color) => ColorTag::Monochromatic(s.color),
        Some(_) => ColorTag::Polychromatic,
    }
}

/// Depth-first enumeration of allowed words.
///
/// The language is factorial, so any prefix that is not allowed is pruned.
pub struct AllowedWords<'a> {
    shift: &'a XrShift,
    alphabet: Vec<Symbol>,
    target: usize,
    base: usize,
    buf: Vec<Symbol>,
    // next alphabet index to try at each depth above `base`
    cursor: Vec<usize>,
    done: bool,
}

impl<'a> AllowedWords<'a> {
    fn new(shift: &'a XrShift, prefix: Vec<Symbol>, target: usize) -> Self {
        let base = prefix.len();
        AllowedWords {
            shift,
            alphabet: shift.params.alphabet(),
            target,
            base,
            buf: prefix,
            cursor: vec![0],
            done: false,
        }
    }

    fn exhausted(shift: &'a XrShift) -> Self {
        let mut it = Self::new(shift, Vec::new(), 0);
        it.done = true;
        it
    }
}

impl Iterator for AllowedWords<'_> {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        if self.done {
            return None;
        }
        if self.buf.len() == self.target {
            // Only reachable when the prefix already has the target length.
            self.done = true;
            return Some(Word::new(self.buf.clone()));
        }
        while let Some(idx) = self.cursor.last_mut() {
            if *idx == self.alphabet.len() {
                self.cursor.pop();
                if self.buf.len() == self.base {
                    break;
                }
                self.buf.pop();
                continue;
            }
            let s = self.alphabet[*idx];
            *idx += 1;
            self.buf.push(s);
            if !self.shift.allowed(&self.buf) {
                self.buf.pop();
                continue;
            }
            if self.buf.len() == self.target {
                let out = Word::new(self.buf.clone());
                self.buf.pop();
                return Some(out);
            }
            self.cursor.push(0);
        }
        self.done = true;
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shift(p: u32, q: u32, fam: RestrictionFamily) -> XrShift {
        XrShift::new(Params::new(p, q).unwrap(), fam)
    }

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn classify_examples() {
        let x = shift(2, 4, RestrictionFamily::squares());
        assert_eq!(x.classify(&w("1:3 1:2")).unwrap().tag, ColorTag::Monochromatic(1));
        assert_eq!(x.classify(&w("1:3 2:1")).unwrap().tag, ColorTag::Polychromatic);
        assert_eq!(x.classify(&w("O O")).unwrap().tag, ColorTag::Monochromatic(0));
        let empty = x.classify(&Word::empty()).unwrap();
        assert_eq!(empty.tag, ColorTag::None);
        assert!(empty.restricted && empty.good && empty.allowed && !empty.free);
        assert!(x.classify(&w("3:1")).is_err());
    }

    #[test]
    fn restricted_examples() {
        let x = shift(2, 4, RestrictionFamily::squares());
        assert!(x.is_restricted(&w("1:0 1:3")).unwrap());
        assert!(!x.is_restricted(&w("1:1")).unwrap());
        assert!(x.is_restricted(&Word::empty()).unwrap());
        assert!(!x.is_restricted(&w("O")).unwrap());
        assert!(!x.is_restricted(&w("1:0 2:0")).unwrap());
    }

    #[test]
    fn free_examples() {
        let x = shift(2, 4, RestrictionFamily::squares());
        assert!(x.is_free(&w("O")).unwrap());
        assert!(x.is_free(&w("O 1:0 1:3")).unwrap());
        assert!(!x.is_free(&w("1:0 O")).unwrap());
        assert!(!x.is_free(&Word::empty()).unwrap());
    }

    #[test]
    fn good_examples() {
        let x = shift(2, 4, RestrictionFamily::squares());
        assert!(x.is_good(&w("O O")).unwrap());
        assert!(x.is_good(&w("O 1:0 O 2:0")).unwrap());
        assert!(!x.is_good(&w("1:0 O")).unwrap());
        assert!(!x.is_good(&w("O 1:1")).unwrap());
    }

    #[test]
    fn allowed_examples() {
        let x = shift(2, 4, RestrictionFamily::squares());
        assert!(x.is_allowed(&w("1:3 1:2 1:1")).unwrap());
        assert!(x.is_allowed(&w("1:2 O 2:0")).unwrap());
        assert!(!x.is_allowed(&w("1:3 2:1")).unwrap());
        assert!(!x.is_allowed(&w("1:3 2:1 O")).unwrap());
        assert!(x.is_allowed(&w("O O O")).unwrap());
    }

    #[test]
    fn enumeration_examples() {
        let x = shift(2, 4, RestrictionFamily::squares());
        assert_eq!(x.enumerate_allowed(0, 10).unwrap().count(), 1);
        let ones: Vec<Word> = x.enumerate_allowed(1, 10).unwrap().collect();
        assert_eq!(ones.len(), 9);
        assert_eq!(ones[0], w("O"));
        let twos: Vec<Word> = x.enumerate_allowed(2, 10).unwrap().collect();
        assert_eq!(twos.len(), 43);
        assert!(twos.windows(2).all(|p| p[0] < p[1]));
        assert!(matches!(
            x.enumerate_allowed(11, 10),
            Err(Error::EnumerationCap { n: 11, cap: 10 })
        ));
    }

    #[test]
    fn prefixed_enumeration_shards_partition_the_language() {
        let x = shift(2, 3, RestrictionFamily::prefix());
        let all: Vec<Word> = x.enumerate_allowed(4, 10).unwrap().collect();
        let mut sharded = Vec::new();
        for s in x.params().alphabet() {
            sharded.extend(x.enumerate_with_prefix(&Word::new(vec![s]), 4, 10).unwrap());
        }
        assert_eq!(sharded, all);
        assert_eq!(x.count_allowed_brute(4, 10).unwrap(), all.len() as u64);
        assert_eq!(
            x.enumerate_with_prefix(&w("1:0 2:0"), 4, 10).unwrap().count(),
            0
        );
        assert_eq!(x.enumerate_with_prefix(&w("O 1:0"), 2, 10).unwrap().count(), 1);
    }

    #[test]
    fn custom_family_beyond_horizon_is_refused() {
        let fam = RestrictionFamily::custom(4, &[(1, 1), (3, 4)]).unwrap();
        let x = shift(2, 4, fam);
        assert!(x.is_allowed(&w("O 1:0 1:1")).unwrap());
        assert!(matches!(
            x.is_allowed(&w("O 1:0 1:1 1:1 1:1")),
            Err(Error::BeyondHorizon { .. })
        ));
        assert!(x.enumerate_allowed(5, 10).is_err());
    }
}
