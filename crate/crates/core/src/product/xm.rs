//! Forbidden factors of `X_m`: `bc`, `cb`, and `x a^k y^l` with
//! `1 <= k <= 2^m ⌈log₂(l+1)⌉`.
//!
//! Appending `a`s to a word free of these factors never creates one, so
//! factor-freeness is the same as membership in the language.

use serde::Serialize;

use super::Cell;

/// The first forbidden factor found, as a column span `[start, end)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Forbidden {
    pub start: usize,
    pub end: usize,
    /// Length of the separating `a`-run, `0` for `bc`/`cb`.
    pub gap: usize,
    /// Length of the run after the gap.
    pub run: usize,
}

/// `2^m ⌈log₂(l+1)⌉`, saturating.
pub(crate) fn threshold(m: u32, l: u64) -> u128 {
    let log = u64::BITS - l.leading_zeros();
    if m >= 100 {
        return u128::MAX;
    }
    (log as u128) << m
}

fn runs(word: &[Cell]) -> Vec<(Cell, usize, usize)> {
    let mut out: Vec<(Cell, usize, usize)> = Vec::new();
    for (i, &c) in word.iter().enumerate() {
        match out.last_mut() {
            Some((prev, _, len)) if *prev == c => *len += 1,
            _ => out.push((c, i, 1)),
        }
    }
    out
}

pub fn first_forbidden(word: &[Cell], m: u32) -> Option<Forbidden> {
    let rs = runs(word);
    for (idx, &(x, start, len)) in rs.iter().enumerate() {
        if x == Cell::A {
            continue;
        }
        let Some(&(next, nstart, nlen)) = rs.get(idx + 1) else {
            break;
        };
        if next != Cell::A {
            return Some(Forbidden {
                start: start + len - 1,
                end: nstart + 1,
                gap: 0,
                run: nlen,
            });
        }
        let Some(&(_, ystart, ylen)) = rs.get(idx + 2) else {
            break;
        };
        if (nlen as u128) <= threshold(m, ylen as u64) {
            return Some(Forbidden {
                start: start + len - 1,
                end: ystart + ylen,
                gap: nlen,
                run: ylen,
            });
        }
    }
    None
}

pub fn xm_is_allowed(word: &[Cell], m: u32) -> bool {
    first_forbidden(word, m).is_none()
}

#[cfg(test)]
mod tests {
    use super::super::parse_cells;
    use super::*;

    fn ok(s: &str, m: u32) -> bool {
        xm_is_allowed(&parse_cells(s).unwrap(), m)
    }

    /// Literal factor scan against the forbidden set, for short words.
    fn oracle(w: &[Cell], m: u32) -> bool {
        let n = w.len();
        for i in 0..n {
            for j in i + 2..=n {
                let f = &w[i..j];
                if f == [Cell::B, Cell::C] || f == [Cell::C, Cell::B] {
                    return false;
                }
                if f[0] == Cell::A {
                    continue;
                }
                let k = f[1..].iter().take_while(|&&c| c == Cell::A).count();
                let rest = &f[1 + k..];
                if k == 0 || rest.is_empty() || !matches!(rest[0], Cell::B | Cell::C) {
                    continue;
                }
                if rest.iter().any(|&c| c != rest[0]) {
                    continue;
                }
                let l = rest.len() as u64;
                let bound = (1u64 << m) * (64 - l.leading_zeros()) as u64;
                if k as u64 <= bound {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn examples() {
        assert!(!ok("bab", 0));
        assert!(ok("baab", 0));
        assert!(!ok("baab", 1));
        for m in 0..5 {
            assert!(!ok("bc", m));
            assert!(!ok("cb", m));
            assert!(ok("bbbb", m));
            assert!(ok("cccc", m));
            assert!(ok("aaaa", m));
            assert!(ok("", m));
        }
        // l = 3 needs k > 2.
        assert!(!ok("caabbb", 0));
        assert!(ok("caaabbb", 0));
        assert!(ok("caaab", 0));
    }

    #[test]
    fn agrees_with_factor_scan() {
        for len in 0..=8u32 {
            for code in 0..3usize.pow(len) {
                let mut c = code;
                let w: Vec<Cell> = (0..len)
                    .map(|_| {
                        let cell = Cell::ALL[c % 3];
                        c /= 3;
                        cell
                    })
                    .collect();
                for m in 0..=2 {
                    assert_eq!(xm_is_allowed(&w, m), oracle(&w, m), "{:?} m={m}", w);
                }
            }
        }
    }

    #[test]
    fn reports_span() {
        let f = first_forbidden(&parse_cells("ccabb").unwrap(), 0).unwrap();
        assert_eq!((f.start, f.end, f.gap, f.run), (1, 5, 1, 2));
        assert!(threshold(200, 5) == u128::MAX);
    }
}
