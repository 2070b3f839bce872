//! Finite windows of points of the product system, their validity, the
//! agreement depth behind `ρ`, and tracing of orbit segments.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{cells_to_string, parse_cells, xm_is_allowed, Cell, Epsilon};
use crate::error::{Error, Result};

/// Rows `0..rows` and columns `0..cols` of a point; row `i` is checked
/// against `X_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MatrixWindow {
    rows: usize,
    cols: usize,
    cells: Vec<Cell>,
}

impl MatrixWindow {
    pub fn filled(rows: usize, cols: usize, cell: Cell) -> Self {
        MatrixWindow {
            rows,
            cols,
            cells: vec![cell; rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Cell>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Parse("window rows have different lengths".into()));
        }
        Ok(MatrixWindow {
            rows: rows.len(),
            cols,
            cells: rows.into_iter().flatten().collect(),
        })
    }

    pub fn parse(rows: &[&str]) -> Result<Self> {
        Self::from_rows(rows.iter().map(|r| parse_cells(r)).collect::<Result<_>>()?)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Cell {
        assert!(i < self.rows && j < self.cols, "cell ({i}, {j}) outside window");
        self.cells[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, cell: Cell) {
        assert!(i < self.rows && j < self.cols, "cell ({i}, {j}) outside window");
        self.cells[i * self.cols + j] = cell;
    }

    pub fn row(&self, i: usize) -> &[Cell] {
        &self.cells[i * self.cols..(i + 1) * self.cols]
    }

    /// `S^k`: drop the first `k` columns.
    pub fn shift(&self, k: usize) -> MatrixWindow {
        let k = k.min(self.cols);
        let cols = self.cols - k;
        let cells = (0..self.rows)
            .flat_map(|i| self.row(i)[k..].iter().copied())
            .collect();
        MatrixWindow {
            rows: self.rows,
            cols,
            cells,
        }
    }

    pub fn grid(&self) -> Vec<String> {
        (0..self.rows).map(|i| cells_to_string(self.row(i))).collect()
    }
}

impl fmt::Display for MatrixWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, line) in self.grid().iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{line}")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct WindowRepr {
    rows: usize,
    cols: usize,
    grid: Vec<String>,
}

impl Serialize for MatrixWindow {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        WindowRepr {
            rows: self.rows,
            cols: self.cols,
            grid: self.grid(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MatrixWindow {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = WindowRepr::deserialize(d)?;
        let rows: Vec<&str> = repr.grid.iter().map(String::as_str).collect();
        let w = MatrixWindow::parse(&rows).map_err(serde::de::Error::custom)?;
        if w.rows != repr.rows || (w.rows > 0 && w.cols != repr.cols) {
            return Err(serde::de::Error::custom("grid does not match rows/cols"));
        }
        Ok(w)
    }
}

/// Each row `i` is in `X_i` and `entry(i+1, j) ∈ {b, entry(i, j)}`.
pub fn window_valid(w: &MatrixWindow) -> bool {
    let rows_ok = (0..w.rows()).all(|i| xm_is_allowed(w.row(i), i as u32));
    rows_ok
        && (1..w.rows()).all(|i| {
            (0..w.cols()).all(|j| {
                let below = w.get(i, j);
                below == Cell::B || below == w.get(i - 1, j)
            })
        })
}

/// Least `i + j` over disagreeing cells, or `rows + cols - 1` if the windows
/// agree everywhere.
pub fn rho_agreement_depth(x: &MatrixWindow, y: &MatrixWindow) -> Result<usize> {
    if (x.rows, x.cols) != (y.rows, y.cols) {
        return Err(Error::Precondition(format!(
            "window shapes differ: {}x{} vs {}x{}",
            x.rows, x.cols, y.rows, y.cols
        )));
    }
    let full = (x.rows + x.cols).saturating_sub(1);
    let mut best = full;
    for i in 0..x.rows.min(full) {
        for j in 0..x.cols.min(best.saturating_sub(i)) {
            if x.get(i, j) != y.get(i, j) {
                best = best.min(i + j);
                break;
            }
        }
    }
    Ok(best)
}

/// Agreement of `S^t y` and `S^t x` on the cells `i + j < depth`.
fn agrees_at(y: &MatrixWindow, x: &MatrixWindow, t: usize, depth: usize) -> Result<bool> {
    if depth == 0 {
        return Ok(true);
    }
    let last_col = t + depth - 1;
    for w in [x, y] {
        if w.rows < depth || w.cols <= last_col {
            return Err(Error::WindowTooSmall(format!(
                "radius depth {depth} at time {t} needs {depth} rows and {} columns, window is {}x{}",
                last_col + 1,
                w.rows,
                w.cols
            )));
        }
    }
    for i in 0..depth {
        for j in 0..depth - i {
            if x.get(i, t + j) != y.get(i, t + j) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TracingMode {
    Exact,
    /// At most this many bad times.
    Mistakes(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Tracing {
    pub ok: bool,
    pub mistake_times: Vec<usize>,
}

/// Compares `S^t y` with `S^t x` for `alpha <= t <= beta` at radius `eps`.
pub fn verify_tracing(
    y: &MatrixWindow,
    x: &MatrixWindow,
    alpha: usize,
    beta: usize,
    eps: Epsilon,
    mode: TracingMode,
) -> Result<Tracing> {
    if alpha > beta {
        return Err(Error::Precondition(format!("empty segment [{alpha}, {beta}]")));
    }
    let depth = eps.depth() as usize;
    let mut bad = Vec::new();
    for t in alpha..=beta {
        if !agrees_at(y, x, t, depth)? {
            bad.push(t);
        }
    }
    let ok = match mode {
        TracingMode::Exact => bad.is_empty(),
        TracingMode::Mistakes(budget) => bad.len() as u64 <= budget,
    };
    Ok(Tracing {
        ok,
        mistake_times: bad,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validity_examples() {
        assert!(window_valid(&MatrixWindow::filled(4, 10, Cell::B)));
        assert!(window_valid(&MatrixWindow::filled(4, 10, Cell::C)));
        assert!(window_valid(&MatrixWindow::filled(0, 0, Cell::C)));
        let w = MatrixWindow::parse(&["aaa", "aba", "aca"]).unwrap();
        assert!(!window_valid(&w));
        let w = MatrixWindow::parse(&["aca", "aba", "abb"]).unwrap();
        assert!(window_valid(&w));
        // Row 1 is checked against X_1: "baab" needs a gap of at least 3 there.
        let w = MatrixWindow::parse(&["baab", "baab"]).unwrap();
        assert!(!window_valid(&w));
        assert!(window_valid(&MatrixWindow::parse(&["baab", "bbbb"]).unwrap()));
    }

    #[test]
    fn depth_examples() {
        let x = MatrixWindow::filled(4, 6, Cell::A);
        assert_eq!(rho_agreement_depth(&x, &x).unwrap(), 9);
        let mut y = x.clone();
        y.set(0, 0, Cell::B);
        assert_eq!(rho_agreement_depth(&x, &y).unwrap(), 0);
        let mut y = x.clone();
        y.set(2, 3, Cell::B);
        y.set(3, 5, Cell::B);
        assert_eq!(rho_agreement_depth(&x, &y).unwrap(), 5);
        assert!(rho_agreement_depth(&x, &MatrixWindow::filled(3, 6, Cell::A)).is_err());
    }

    #[test]
    fn depth_matches_brute_minimum() {
        let x = MatrixWindow::filled(5, 7, Cell::A);
        for i in 0..5 {
            for j in 0..7 {
                let mut y = x.clone();
                y.set(i, j, Cell::C);
                assert_eq!(rho_agreement_depth(&x, &y).unwrap(), i + j);
            }
        }
    }

    #[test]
    fn tracing_examples() {
        let a = MatrixWindow::filled(3, 12, Cell::A);
        let c = MatrixWindow::filled(3, 12, Cell::C);
        let quarter = Epsilon::new(1, 4).unwrap();
        let t = verify_tracing(&a, &c, 0, 5, quarter, TracingMode::Exact).unwrap();
        assert!(!t.ok);
        assert_eq!(t.mistake_times, (0..=5).collect::<Vec<_>>());
        let t = verify_tracing(&a, &c, 0, 5, quarter, TracingMode::Mistakes(6)).unwrap();
        assert!(t.ok);
        let t = verify_tracing(&a, &a, 0, 5, quarter, TracingMode::Exact).unwrap();
        assert!(t.ok && t.mistake_times.is_empty());
        assert!(matches!(
            verify_tracing(&a, &a, 0, 11, quarter, TracingMode::Exact),
            Err(Error::WindowTooSmall(_))
        ));
    }

    #[test]
    fn shift_drops_columns() {
        let w = MatrixWindow::parse(&["abc", "bbc"]).unwrap();
        assert_eq!(w.shift(1).grid(), vec!["bc", "bc"]);
        assert_eq!(w.shift(5).cols(), 0);
    }

    #[test]
    fn serde_round_trip() {
        let w = MatrixWindow::parse(&["abc", "bbc"]).unwrap();
        let text = serde_json::to_string(&w).unwrap();
        assert_eq!(text, r#"{"rows":2,"cols":3,"grid":["abc","bbc"]}"#);
        assert_eq!(serde_json::from_str::<MatrixWindow>(&text).unwrap(), w);
    }
}
