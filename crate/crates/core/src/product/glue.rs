//! Explicit gluing for weak specification: copy the top `m` rows of each
//! segment, fill the gaps with `a`, and put `b` below.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::xm::threshold;
use super::{xm_is_allowed, Cell, Epsilon, MatrixWindow};
use crate::error::{Error, Result};

/// `(n, m)` with `n` least such that `2^{-n} < eps` and `m = 2^n`.
pub fn weak_gap_parameters(eps: Epsilon) -> Result<(u32, u64)> {
    let n = eps.strict_exponent();
    let m = 1u64
        .checked_shl(n)
        .filter(|_| n < 64)
        .ok_or_else(|| Error::Overflow(format!("m = 2^{n}")))?;
    Ok((n, m))
}

/// `M_eps(l) = 2^m (⌈log₂(l+m)⌉ + 1) + m`.
pub fn weak_gap_function(eps: Epsilon, l: u64) -> Result<u64> {
    let (_, m) = weak_gap_parameters(eps)?;
    let overflow = || Error::Overflow(format!("M_eps({l}) at eps = {eps}"));
    let lm = l.checked_add(m).ok_or_else(overflow)?;
    let ceil_log = if lm <= 1 { 0 } else { u64::BITS - (lm - 1).leading_zeros() };
    let pow = u32::try_from(m)
        .ok()
        .and_then(|m| 1u64.checked_shl(m).filter(|_| m < 64))
        .ok_or_else(overflow)?;
    pow.checked_mul(ceil_log as u64 + 1)
        .and_then(|v| v.checked_add(m))
        .ok_or_else(overflow)
}

/// One orbit segment `S^{[alpha, beta]}(x)` of a specification.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlueSpec {
    pub window: MatrixWindow,
    pub alpha: usize,
    pub beta: usize,
}

/// Builds a window of `m + 1` rows and `r = alpha_1 + beta_K + m` columns
/// tracing every segment at radius `eps`. With no segments the window has
/// `m` columns of `a` above a row of `b`.
pub fn weak_glue_product(specs: &[GlueSpec], eps: Epsilon) -> Result<MatrixWindow> {
    let (_, m) = weak_gap_parameters(eps)?;
    let m = usize::try_from(m).map_err(|_| Error::Overflow("m".into()))?;
    let mut prev_beta = 0usize;
    for (k, s) in specs.iter().enumerate() {
        if s.alpha > s.beta {
            return Err(Error::Precondition(format!(
                "segment {}: alpha {} > beta {}",
                k + 1,
                s.alpha,
                s.beta
            )));
        }
        let need = weak_gap_function(eps, (s.beta - s.alpha) as u64)?;
        let gap = s.alpha.checked_sub(prev_beta).unwrap_or(0) as u64;
        if s.alpha <= prev_beta || gap < need {
            return Err(Error::Precondition(format!(
                "segment {}: gap alpha_k - beta_(k-1) = {} is below M_eps = {need}",
                k + 1,
                s.alpha as i128 - prev_beta as i128
            )));
        }
        if s.window.rows() < m || s.window.cols() <= s.beta + m {
            return Err(Error::WindowTooSmall(format!(
                "segment {} needs {m} rows and {} columns, got {}x{}",
                k + 1,
                s.beta + m + 1,
                s.window.rows(),
                s.window.cols()
            )));
        }
        prev_beta = s.beta;
    }
    let cols = match (specs.first(), specs.last()) {
        (Some(first), Some(last)) => first.alpha + last.beta + m,
        _ => m,
    };
    let mut out = MatrixWindow::filled(m + 1, cols, Cell::A);
    for j in 0..cols {
        out.set(m, j, Cell::B);
    }
    for s in specs {
        for i in 0..m {
            for j in s.alpha..=s.beta + m {
                out.set(i, j, s.window.get(i, j));
            }
        }
    }
    Ok(out)
}

fn random_row<R: Rng + ?Sized>(rng: &mut R, cols: usize, m: u32) -> Vec<Cell> {
    let mut row = Vec::with_capacity(cols);
    while row.len() < cols {
        let sym = if rng.gen_bool(0.5) { Cell::B } else { Cell::C };
        let run = rng.gen_range(1..=4);
        row.extend(std::iter::repeat(sym).take(run));
        let need = threshold(m, 4).min(64) as usize;
        let gap = rng.gen_range(need / 2..=need + 3);
        row.extend(std::iter::repeat(Cell::A).take(gap));
    }
    let skip = rng.gen_range(0..cols.max(1));
    let skip = skip.min(row.len());
    row.rotate_left(skip);
    row.truncate(cols);
    row
}

/// A random valid window. Rows failing `X_i` are replaced by all-`b` rows.
pub fn random_window<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> MatrixWindow {
    let mut out: Vec<Vec<Cell>> = Vec::with_capacity(rows);
    for i in 0..rows {
        let candidate: Vec<Cell> = match out.last() {
            None => random_row(rng, cols, 0),
            Some(above) => above
                .iter()
                .map(|&c| if rng.gen_bool(0.2) { Cell::B } else { c })
                .collect(),
        };
        if xm_is_allowed(&candidate, i as u32) {
            out.push(candidate);
        } else {
            out.push(vec![Cell::B; cols]);
        }
    }
    if rows == 0 {
        return MatrixWindow::filled(0, cols, Cell::B);
    }
    MatrixWindow::from_rows(out).expect("rows have equal length")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::product::{verify_tracing, window_valid, TracingMode};
    use rand::SeedableRng;

    fn eps(s: &str) -> Epsilon {
        s.parse().unwrap()
    }

    #[test]
    fn gap_function_examples() {
        assert_eq!(weak_gap_parameters(eps("0.3")).unwrap(), (2, 4));
        assert_eq!(weak_gap_function(eps("0.3"), 4).unwrap(), 68);
        assert_eq!(weak_gap_function(eps("0.3"), 12).unwrap(), 84);
        let mut prev = 0;
        for l in 0..2000 {
            let v = weak_gap_function(eps("0.3"), l).unwrap();
            assert!(v >= prev);
            prev = v;
        }
        assert!(weak_gap_function(eps("1/64"), 1).is_err());
    }

    #[test]
    fn gap_function_formula_oracle() {
        for (e, m) in [("0.6", 2u64), ("0.3", 4), ("0.2", 8)] {
            for l in 0..300u64 {
                let ceil_log = (((l + m) as f64).log2() - 1e-12).ceil().max(0.0) as u64;
                let want = (1u64 << m) * (ceil_log + 1) + m;
                assert_eq!(weak_gap_function(eps(e), l).unwrap(), want, "l={l}");
            }
        }
    }

    #[test]
    fn single_segment_formula() {
        let e = eps("0.3");
        let src = MatrixWindow::filled(5, 100, Cell::C);
        let alpha = weak_gap_function(e, 3).unwrap() as usize;
        let spec = GlueSpec {
            window: src,
            alpha,
            beta: alpha + 3,
        };
        let out = weak_glue_product(&[spec.clone()], e).unwrap();
        assert_eq!((out.rows(), out.cols()), (5, 2 * alpha + 3 + 4));
        for i in 0..4 {
            for j in 0..out.cols() {
                let want = if (alpha..=alpha + 7).contains(&j) { Cell::C } else { Cell::A };
                assert_eq!(out.get(i, j), want);
            }
        }
        assert!(out.row(4).iter().all(|&c| c == Cell::B));
        assert!(window_valid(&out));
        let t = verify_tracing(&out, &spec.window, alpha, alpha + 3, e, TracingMode::Exact).unwrap();
        assert!(t.ok);
    }

    #[test]
    fn minimal_gaps_trace_exactly() {
        let e = eps("0.3");
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let l1 = 5;
        let a1 = weak_gap_function(e, l1).unwrap() as usize;
        let l2 = 9;
        let a2 = a1 + l1 as usize + weak_gap_function(e, l2).unwrap() as usize;
        let specs = vec![
            GlueSpec {
                window: random_window(&mut rng, 4, a1 + 20),
                alpha: a1,
                beta: a1 + l1 as usize,
            },
            GlueSpec {
                window: random_window(&mut rng, 4, a2 + 20),
                alpha: a2,
                beta: a2 + l2 as usize,
            },
        ];
        let out = weak_glue_product(&specs, e).unwrap();
        assert!(window_valid(&out));
        for s in &specs {
            let t = verify_tracing(&out, &s.window, s.alpha, s.beta, e, TracingMode::Exact).unwrap();
            assert!(t.ok);
        }
        let mut tight = specs.clone();
        tight[1].alpha -= 1;
        tight[1].beta -= 1;
        let err = weak_glue_product(&tight, e).unwrap_err();
        assert!(err.to_string().contains("segment 2"), "{err}");
    }

    #[test]
    fn empty_specification() {
        let out = weak_glue_product(&[], eps("0.3")).unwrap();
        assert_eq!((out.rows(), out.cols()), (5, 4));
        assert!(window_valid(&out));
    }

    #[test]
    fn random_windows_are_valid() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(1);
        let mut saw_c = false;
        for _ in 0..200 {
            let w = random_window(&mut rng, 5, 60);
            assert!(window_valid(&w));
            saw_c |= w.row(0).contains(&Cell::C);
        }
        assert!(saw_c);
    }
}
