//! Rectangular cell grids with value semantics.

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::symbol::Symbol;

/// Zero-indexed (row, col) position.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Coord {
    pub row: usize,
    pub col: usize,
}

impl Coord {
    pub fn new(row: usize, col: usize) -> Coord {
        Coord { row, col }
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.row, self.col)
    }
}

impl fmt::Debug for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.row, self.col)
    }
}

#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug)]
pub enum CellState {
    /// Not decided yet; prints as "*".
    Unknown,
    /// Holds a symbol from the instance alphabet.
    Assigned(Symbol),
    /// Structural, never assignable (Light-Up walls); prints as "w".
    Blocked,
}

impl CellState {
    pub fn token(self) -> &'static str {
        match self {
            CellState::Unknown => "*",
            CellState::Assigned(s) => s.as_str(),
            CellState::Blocked => "w",
        }
    }

    pub fn symbol(self) -> Option<Symbol> {
        match self {
            CellState::Assigned(s) => Some(s),
            _ => None,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GridError {
    #[error("cell ({row}, {col}) out of bounds for {rows}x{cols} grid")]
    OutOfBounds { row: usize, col: usize, rows: usize, cols: usize },
    #[error("grid dimensions must be at least 2x2, got {rows}x{cols}")]
    TooSmall { rows: usize, cols: usize },
    #[error("ragged rows: row {row} has {got} cells, expected {expected}")]
    Ragged { row: usize, got: usize, expected: usize },
    #[error("unknown cell token {token:?} at ({row}, {col})")]
    BadToken { token: String, row: usize, col: usize },
}

/// Row-major grid of cell states. All mutation goes through bounds-checked
/// accessors; the solver and the assignment op copy-on-write instead of
/// mutating shared state.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Grid {
    rows: usize,
    cols: usize,
    cells: Vec<CellState>,
}

impl Grid {
    pub fn new(rows: usize, cols: usize) -> Result<Grid, GridError> {
        if rows < 2 || cols < 2 {
            return Err(GridError::TooSmall { rows, cols });
        }
        Ok(Grid { rows, cols, cells: vec![CellState::Unknown; rows * cols] })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    fn index(&self, at: Coord) -> Result<usize, GridError> {
        if at.row >= self.rows || at.col >= self.cols {
            return Err(GridError::OutOfBounds {
                row: at.row,
                col: at.col,
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(at.row * self.cols + at.col)
    }

    pub fn contains(&self, at: Coord) -> bool {
        at.row < self.rows && at.col < self.cols
    }

    pub fn get(&self, at: Coord) -> Result<CellState, GridError> {
        Ok(self.cells[self.index(at)?])
    }

    pub fn set(&mut self, at: Coord, state: CellState) -> Result<(), GridError> {
        let i = self.index(at)?;
        self.cells[i] = state;
        Ok(())
    }

    /// Copy with one cell replaced; the receiver is untouched.
    pub fn with(&self, at: Coord, state: CellState) -> Result<Grid, GridError> {
        let mut next = self.clone();
        next.set(at, state)?;
        Ok(next)
    }

    pub fn coords(&self) -> impl Iterator<Item = Coord> + '_ {
        let cols = self.cols;
        (0..self.rows).flat_map(move |r| (0..cols).map(move |c| Coord::new(r, c)))
    }

    pub fn unknown_cells(&self) -> Vec<Coord> {
        self.coords()
            .filter(|&c| self.get(c) == Ok(CellState::Unknown))
            .collect()
    }

    /// True when no Unknown cells remain (Blocked cells count as decided).
    pub fn is_complete(&self) -> bool {
        !self.cells.contains(&CellState::Unknown)
    }

    /// Orthogonal neighbours, clipped to the grid.
    pub fn neighbors4(&self, at: Coord) -> Vec<Coord> {
        let mut out = Vec::with_capacity(4);
        if at.row > 0 {
            out.push(Coord::new(at.row - 1, at.col));
        }
        if at.col > 0 {
            out.push(Coord::new(at.row, at.col - 1));
        }
        if at.row + 1 < self.rows {
            out.push(Coord::new(at.row + 1, at.col));
        }
        if at.col + 1 < self.cols {
            out.push(Coord::new(at.row, at.col + 1));
        }
        out
    }

    /// All eight neighbours, clipped to the grid.
    pub fn neighbors8(&self, at: Coord) -> Vec<Coord> {
        let mut out = Vec::with_capacity(8);
        for dr in -1i64..=1 {
            for dc in -1i64..=1 {
                if dr == 0 && dc == 0 {
                    continue;
                }
                let r = at.row as i64 + dr;
                let c = at.col as i64 + dc;
                if r >= 0 && c >= 0 && (r as usize) < self.rows && (c as usize) < self.cols {
                    out.push(Coord::new(r as usize, c as usize));
                }
            }
        }
        out
    }

    /// Nested-list text with `", "` separators: `[[3, *, *, 2], [*, ...]]`.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.len() * 3 + self.rows * 4);
        out.push('[');
        for r in 0..self.rows {
            if r > 0 {
                out.push_str(", ");
            }
            out.push('[');
            for c in 0..self.cols {
                if c > 0 {
                    out.push_str(", ");
                }
                out.push_str(self.cells[r * self.cols + c].token());
            }
            out.push(']');
        }
        out.push(']');
        out
    }

    /// Perception-style token rows ("*" unknown, "w" blocked, symbol text).
    pub fn token_rows(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.cells[r * self.cols + c].token().to_string()).collect())
            .collect()
    }

    /// Parses token rows; "*" maps to Unknown and any table symbol to
    /// Assigned. Blocked is a per-instance notion ("w" doubles as the Binairo
    /// white circle), so instance loading re-marks wall cells afterwards.
    pub fn from_tokens(rows: &[Vec<String>]) -> Result<Grid, GridError> {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.len());
        let mut grid = Grid::new(height, width)?;
        for (r, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(GridError::Ragged { row: r, got: row.len(), expected: width });
            }
            for (c, token) in row.iter().enumerate() {
                let state = if token == "*" {
                    CellState::Unknown
                } else {
                    match Symbol::parse(token) {
                        Some(s) => CellState::Assigned(s),
                        None => {
                            return Err(GridError::BadToken { token: token.clone(), row: r, col: c })
                        }
                    }
                };
                grid.set(Coord::new(r, c), state)?;
            }
        }
        Ok(grid)
    }
}

impl Serialize for Grid {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        self.token_rows().serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Grid {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<String>>::deserialize(de)?;
        Grid::from_tokens(&rows).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::SYM_S;

    #[test]
    fn bounds_checked() {
        let g = Grid::new(4, 4).unwrap();
        assert!(g.get(Coord::new(3, 3)).is_ok());
        assert_eq!(
            g.get(Coord::new(4, 0)),
            Err(GridError::OutOfBounds { row: 4, col: 0, rows: 4, cols: 4 })
        );
        assert!(Grid::new(1, 5).is_err());
    }

    #[test]
    fn with_does_not_mutate() {
        let g = Grid::new(2, 2).unwrap();
        let h = g.with(Coord::new(0, 0), CellState::Assigned(SYM_S)).unwrap();
        assert_eq!(g.get(Coord::new(0, 0)).unwrap(), CellState::Unknown);
        assert_eq!(h.get(Coord::new(0, 0)).unwrap(), CellState::Assigned(SYM_S));
    }

    #[test]
    fn text_format() {
        let mut g = Grid::new(2, 2).unwrap();
        g.set(Coord::new(0, 0), CellState::Assigned(Symbol::digit(3))).unwrap();
        g.set(Coord::new(1, 1), CellState::Blocked).unwrap();
        assert_eq!(g.to_text(), "[[3, *], [*, w]]");
    }

    #[test]
    fn token_roundtrip() {
        let mut g = Grid::new(3, 2).unwrap();
        g.set(Coord::new(2, 1), CellState::Assigned(Symbol::digit(7))).unwrap();
        let back = Grid::from_tokens(&g.token_rows()).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn serde_is_nested_token_arrays() {
        let mut g = Grid::new(2, 2).unwrap();
        g.set(Coord::new(0, 1), CellState::Assigned(Symbol::digit(2))).unwrap();
        let json = serde_json::to_string(&g).unwrap();
        assert_eq!(json, r#"[["*","2"],["*","*"]]"#);
        let back: Grid = serde_json::from_str(&json).unwrap();
        assert_eq!(back, g);
    }
}
