//! Playable puzzle instances: structural clues, revealed conditions, the
//! hidden solution, and the state-level operations (assignment, violation
//! checking, candidate elimination, solved test) everything else builds on.
//!
//! Instances serialize to a canonical JSON object with fixed field order
//! `{definition_id, rows, cols, structures, conditions, solution?, seed,
//! difficulty}` so hashes are byte-stable.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::constraint::{check_all, Constraint, Violation};
use crate::grid::{CellState, Coord, Grid, GridError};
use crate::rules::{self, PuzzleDefinition, PuzzleId, RuleError};
use crate::symbol::{Symbol, SYM_E, SYM_TR};

#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Difficulty {
    Easy,
    Medium,
    Hard,
}

impl Difficulty {
    pub const ALL: [Difficulty; 3] = [Difficulty::Easy, Difficulty::Medium, Difficulty::Hard];

    pub fn name(self) -> &'static str {
        match self {
            Difficulty::Easy => "easy",
            Difficulty::Medium => "medium",
            Difficulty::Hard => "hard",
        }
    }

    pub fn parse(s: &str) -> Option<Difficulty> {
        Difficulty::ALL.into_iter().find(|d| d.name() == s)
    }

    /// Closed interval for the fraction of cells revealed as conditions,
    /// as exact rationals (numerator, denominator).
    pub fn reveal_ratio_range(self) -> ((u32, u32), (u32, u32)) {
        match self {
            Difficulty::Easy => ((1, 4), (3, 4)),
            Difficulty::Medium => ((1, 4), (1, 2)),
            Difficulty::Hard => ((3, 20), (2, 5)),
        }
    }
}

impl std::fmt::Display for Difficulty {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Cage {
    pub cells: Vec<Coord>,
    pub target: u32,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Inequality {
    pub small: Coord,
    pub large: Coord,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Dot {
    pub a: Coord,
    pub b: Coord,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ViewClues {
    pub top: Vec<u32>,
    pub bottom: Vec<u32>,
    pub left: Vec<u32>,
    pub right: Vec<u32>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Wall {
    pub at: Coord,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub count: Option<u32>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct NumberClue {
    pub at: Coord,
    pub count: u32,
}

/// Structural clue bundle. Which fields are meaningful depends on the
/// puzzle (see the registry's `structures_schema`); unused fields stay None
/// and vanish from the canonical JSON.
#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Structures {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub regions: Option<Vec<Vec<usize>>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub color_groups: Option<Vec<Vec<usize>>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cages: Option<Vec<Cage>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub parity: Option<Vec<Vec<bool>>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub row_counts: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub col_counts: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub row_sums: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub col_sums: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub row_runs: Option<Vec<Vec<u32>>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub col_runs: Option<Vec<Vec<u32>>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub inequalities: Option<Vec<Inequality>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub dots: Option<Vec<Dot>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub view_clues: Option<ViewClues>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub walls: Option<Vec<Wall>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub number_clues: Option<Vec<NumberClue>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub thermometers: Option<Vec<Vec<Coord>>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fleet: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub givens: Option<Vec<Vec<u32>>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trees: Option<Vec<Coord>>,
}

/// A revealed solution cell (Sudoku-style hint). Structural clues live in
/// [`Structures`], not here.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Condition {
    pub cell: Coord,
    pub value: Symbol,
}

#[derive(Error, Debug)]
pub enum InstanceError {
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("state shape {got_rows}x{got_cols} does not match instance {rows}x{cols}")]
    ShapeMismatch { rows: usize, cols: usize, got_rows: usize, got_cols: usize },
    #[error("cell {cell} is outside the {rows}x{cols} grid")]
    OutOfBounds { cell: Coord, rows: usize, cols: usize },
    #[error("cell {cell} is not assignable: {reason}")]
    CellNotAssignable { cell: Coord, reason: String },
    #[error("invalid instance: {detail}")]
    BadInstance { detail: String },
}

fn bad(detail: impl Into<String>) -> InstanceError {
    InstanceError::BadInstance { detail: detail.into() }
}

/// One playable puzzle: definition reference, structural clues, revealed
/// conditions, and (for generated instances) the hidden full solution.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawInstance")]
pub struct PuzzleInstance {
    pub definition_id: PuzzleId,
    pub rows: usize,
    pub cols: usize,
    pub structures: Structures,
    pub conditions: Vec<Condition>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solution: Option<Grid>,
    pub seed: u64,
    pub difficulty: Difficulty,
    #[serde(skip)]
    constraints: Vec<Constraint>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    definition_id: PuzzleId,
    rows: usize,
    cols: usize,
    #[serde(default)]
    structures: Structures,
    #[serde(default)]
    conditions: Vec<Condition>,
    #[serde(default)]
    solution: Option<Grid>,
    seed: u64,
    difficulty: Difficulty,
}

impl TryFrom<RawInstance> for PuzzleInstance {
    type Error = InstanceError;

    fn try_from(raw: RawInstance) -> Result<Self, Self::Error> {
        PuzzleInstance::new(
            raw.definition_id,
            raw.rows,
            raw.cols,
            raw.structures,
            raw.conditions,
            raw.solution,
            raw.seed,
            raw.difficulty,
        )
    }
}

impl PartialEq for PuzzleInstance {
    fn eq(&self, other: &Self) -> bool {
        // The compiled constraint list is a pure function of the rest.
        self.definition_id == other.definition_id
            && self.rows == other.rows
            && self.cols == other.cols
            && self.structures == other.structures
            && self.conditions == other.conditions
            && self.solution == other.solution
            && self.seed == other.seed
            && self.difficulty == other.difficulty
    }
}

impl PuzzleInstance {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        definition_id: PuzzleId,
        rows: usize,
        cols: usize,
        structures: Structures,
        conditions: Vec<Condition>,
        solution: Option<Grid>,
        seed: u64,
        difficulty: Difficulty,
    ) -> Result<Self, InstanceError> {
        let def = definition_id.definition();
        let constraints = rules::instantiate(def, rows, cols, &structures)?;
        let alphabet = def.alphabet(rows);

        let mut fixed: Vec<(Coord, CellState)> = Vec::new();
        if let Some(walls) = &structures.walls {
            fixed.extend(walls.iter().map(|w| (w.at, CellState::Blocked)));
        }
        if let Some(trees) = &structures.trees {
            fixed.extend(trees.iter().map(|&at| (at, CellState::Assigned(SYM_TR))));
        }
        if let Some(clues) = &structures.number_clues {
            fixed.extend(clues.iter().map(|c| (c.at, CellState::Assigned(SYM_E))));
        }

        for (i, cond) in conditions.iter().enumerate() {
            if cond.cell.row >= rows || cond.cell.col >= cols {
                return Err(InstanceError::OutOfBounds { cell: cond.cell, rows, cols });
            }
            if conditions[..i].iter().any(|o| o.cell == cond.cell) {
                return Err(bad(format!("two conditions target cell {}", cond.cell)));
            }
            if fixed.iter().any(|&(at, _)| at == cond.cell) {
                return Err(bad(format!("condition at {} overlaps a structural cell", cond.cell)));
            }
            if !alphabet.contains(&cond.value) {
                return Err(bad(format!(
                    "condition value {:?} at {} is outside the alphabet",
                    cond.value.as_str(),
                    cond.cell
                )));
            }
        }

        let solution = match solution {
            None => None,
            Some(mut grid) => {
                if grid.rows() != rows || grid.cols() != cols {
                    return Err(InstanceError::ShapeMismatch {
                        rows,
                        cols,
                        got_rows: grid.rows(),
                        got_cols: grid.cols(),
                    });
                }
                // Token form cannot distinguish a wall from Binairo's white
                // piece; re-mark structural cells authoritatively.
                for &(at, state) in &fixed {
                    if let CellState::Blocked = state {
                        grid.set(at, CellState::Blocked)?;
                    }
                }
                for &(at, state) in &fixed {
                    let got = grid.get(at)?;
                    if got != state {
                        return Err(bad(format!(
                            "solution cell {at} holds {:?} but the structure fixes {:?}",
                            got.token(),
                            state.token()
                        )));
                    }
                }
                if !grid.is_complete() {
                    return Err(bad("solution grid has undecided cells"));
                }
                for at in grid.coords() {
                    if fixed.iter().any(|&(f, _)| f == at) {
                        continue;
                    }
                    match grid.get(at)? {
                        CellState::Assigned(v) if alphabet.contains(&v) => {}
                        other => {
                            return Err(bad(format!(
                                "solution cell {at} holds {:?}, not an alphabet symbol",
                                other.token()
                            )))
                        }
                    }
                }
                for cond in &conditions {
                    if grid.get(cond.cell)? != CellState::Assigned(cond.value) {
                        return Err(bad(format!(
                            "condition {}={} disagrees with the solution",
                            cond.cell,
                            cond.value.as_str()
                        )));
                    }
                }
                let violations = check_all(&constraints, &grid);
                if let Some(v) = violations.first() {
                    return Err(bad(format!("solution violates {}: {}", v.constraint, v.detail)));
                }
                Some(grid)
            }
        };

        Ok(PuzzleInstance {
            definition_id,
            rows,
            cols,
            structures,
            conditions,
            solution,
            seed,
            difficulty,
            constraints,
        })
    }

    pub fn definition(&self) -> &'static PuzzleDefinition {
        self.definition_id.definition()
    }

    /// Symbols an empty cell may take, in fixed candidate order.
    pub fn alphabet(&self) -> Vec<Symbol> {
        self.definition().alphabet(self.rows)
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Cells decided by structures alone: walls, trees, revealed numbers.
    pub fn fixed_cells(&self) -> Vec<(Coord, CellState)> {
        let mut fixed = Vec::new();
        if let Some(walls) = &self.structures.walls {
            fixed.extend(walls.iter().map(|w| (w.at, CellState::Blocked)));
        }
        if let Some(trees) = &self.structures.trees {
            fixed.extend(trees.iter().map(|&at| (at, CellState::Assigned(SYM_TR))));
        }
        if let Some(clues) = &self.structures.number_clues {
            fixed.extend(clues.iter().map(|c| (c.at, CellState::Assigned(SYM_E))));
        }
        fixed
    }

    /// The starting grid: all Unknown except structural cells and conditions.
    pub fn initial_state(&self) -> Grid {
        let mut grid = Grid::new(self.rows, self.cols).expect("validated size");
        for (at, state) in self.fixed_cells() {
            grid.set(at, state).expect("validated bounds");
        }
        for cond in &self.conditions {
            grid.set(cond.cell, CellState::Assigned(cond.value)).expect("validated bounds");
        }
        grid
    }

    fn check_shape(&self, state: &Grid) -> Result<(), InstanceError> {
        if state.rows() != self.rows || state.cols() != self.cols {
            return Err(InstanceError::ShapeMismatch {
                rows: self.rows,
                cols: self.cols,
                got_rows: state.rows(),
                got_cols: state.cols(),
            });
        }
        Ok(())
    }

    /// Returns a new state with `value` assigned at `cell`; the input state
    /// is untouched.
    pub fn apply_assignment(
        &self,
        state: &Grid,
        cell: Coord,
        value: Symbol,
    ) -> Result<Grid, InstanceError> {
        self.check_shape(state)?;
        if cell.row >= self.rows || cell.col >= self.cols {
            return Err(InstanceError::OutOfBounds { cell, rows: self.rows, cols: self.cols });
        }
        match state.get(cell).expect("bounds checked") {
            CellState::Unknown => {}
            CellState::Assigned(v) => {
                return Err(InstanceError::CellNotAssignable {
                    cell,
                    reason: format!("already holds {:?}", v.as_str()),
                })
            }
            CellState::Blocked => {
                return Err(InstanceError::CellNotAssignable { cell, reason: "blocked cell".into() })
            }
        }
        if !self.alphabet().contains(&value) {
            return Err(InstanceError::CellNotAssignable {
                cell,
                reason: format!("value {:?} is outside the alphabet", value.as_str()),
            });
        }
        Ok(state.with(cell, CellState::Assigned(value)).expect("bounds checked"))
    }

    /// All immediate rule violations in a (possibly partial) state.
    pub fn check_constraints(&self, state: &Grid) -> Result<Vec<Violation>, InstanceError> {
        self.check_shape(state)?;
        Ok(check_all(&self.constraints, state))
    }

    /// Values whose assignment at `cell` produces zero violations
    /// (one-step elimination, not arc consistency).
    pub fn candidates(
        &self,
        state: &Grid,
        cell: Coord,
    ) -> Result<Vec<Symbol>, InstanceError> {
        self.check_shape(state)?;
        if cell.row >= self.rows || cell.col >= self.cols {
            return Err(InstanceError::OutOfBounds { cell, rows: self.rows, cols: self.cols });
        }
        if state.get(cell).expect("bounds checked") != CellState::Unknown {
            return Err(InstanceError::CellNotAssignable {
                cell,
                reason: "only Unknown cells have candidates".into(),
            });
        }
        let mut out = Vec::new();
        for value in self.alphabet() {
            let next = state.with(cell, CellState::Assigned(value)).expect("bounds checked");
            if check_all(&self.constraints, &next).is_empty() {
                out.push(value);
            }
        }
        Ok(out)
    }

    /// True iff the state is complete, violation-free, and respects every
    /// condition and structural cell.
    pub fn is_solved(&self, state: &Grid) -> Result<bool, InstanceError> {
        self.check_shape(state)?;
        if !state.is_complete() {
            return Ok(false);
        }
        let alphabet = self.alphabet();
        for (at, want) in self.fixed_cells() {
            if state.get(at).expect("validated bounds") != want {
                return Ok(false);
            }
        }
        let fixed = self.fixed_cells();
        for at in state.coords() {
            if fixed.iter().any(|&(f, _)| f == at) {
                continue;
            }
            match state.get(at).expect("in range") {
                CellState::Assigned(v) if alphabet.contains(&v) => {}
                _ => return Ok(false),
            }
        }
        for cond in &self.conditions {
            if state.get(cond.cell).expect("validated bounds") != CellState::Assigned(cond.value) {
                return Ok(false);
            }
        }
        Ok(check_all(&self.constraints, state).is_empty())
    }

    /// Hash over everything a player sees (structures + conditions), seed
    /// and solution excluded. Hex SHA-256 of the canonical JSON.
    pub fn conditions_hash(&self) -> String {
        #[derive(Serialize)]
        struct Key<'a> {
            definition_id: PuzzleId,
            rows: usize,
            cols: usize,
            structures: &'a Structures,
            conditions: &'a [Condition],
            difficulty: Difficulty,
        }
        let key = Key {
            definition_id: self.definition_id,
            rows: self.rows,
            cols: self.cols,
            structures: &self.structures,
            conditions: &self.conditions,
            difficulty: self.difficulty,
        };
        sha_hex(&serde_json::to_vec(&key).expect("serializable"))
    }

    /// Hash over the full solution (structures included, conditions and
    /// seed excluded). None when the solution is absent.
    pub fn solution_hash(&self) -> Option<String> {
        #[derive(Serialize)]
        struct Key<'a> {
            definition_id: PuzzleId,
            rows: usize,
            cols: usize,
            structures: &'a Structures,
            solution: &'a Grid,
        }
        let solution = self.solution.as_ref()?;
        let key = Key {
            definition_id: self.definition_id,
            rows: self.rows,
            cols: self.cols,
            structures: &self.structures,
            solution,
        };
        Some(sha_hex(&serde_json::to_vec(&key).expect("serializable")))
    }

    /// Canonical JSON text (compact, fixed field order).
    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }
}

fn sha_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}


#[cfg(test)]
mod tests {
    use super::fixtures::{grid, worked_sudoku};
    use super::*;

    #[test]
    fn canonical_json_field_order() {
        let inst = worked_sudoku();
        let json = inst.to_canonical_json();
        let keys = ["definition_id", "rows", "cols", "structures", "conditions", "solution", "seed", "difficulty"];
        let mut last = 0;
        for key in keys {
            let at = json.find(&format!("\"{key}\":")).unwrap_or_else(|| panic!("{key} missing"));
            assert!(at > last || key == "definition_id", "{key} out of order");
            last = at;
        }
        assert!(json.starts_with("{\"definition_id\":\"sudoku\",\"rows\":4,\"cols\":4,\"structures\":{}"));
        let back: PuzzleInstance = serde_json::from_str(&json).unwrap();
        assert_eq!(back, inst);
        assert_eq!(back.to_canonical_json(), json);
    }

    #[test]
    fn apply_assignment_is_pure() {
        let inst = worked_sudoku();
        let state = inst.initial_state();
        assert_eq!(state.to_text(), "[[3, *, *, 2], [*, *, *, *], [*, *, *, *], [*, 2, 3, *]]");
        let next = inst.apply_assignment(&state, Coord::new(0, 1), Symbol::digit(1)).unwrap();
        assert_eq!(next.to_text(), "[[3, 1, *, 2], [*, *, *, *], [*, *, *, *], [*, 2, 3, *]]");
        // Input unchanged.
        assert_eq!(state.to_text(), "[[3, *, *, 2], [*, *, *, *], [*, *, *, *], [*, 2, 3, *]]");

        let full = inst.solution.clone().unwrap();
        let err = inst.apply_assignment(&full, Coord::new(0, 1), Symbol::digit(1)).unwrap_err();
        assert!(matches!(err, InstanceError::CellNotAssignable { .. }));
        let err = inst.apply_assignment(&state, Coord::new(4, 0), Symbol::digit(1)).unwrap_err();
        assert!(matches!(err, InstanceError::OutOfBounds { .. }));
    }

    #[test]
    fn check_constraints_flags_duplicates() {
        let inst = PuzzleInstance::new(
            PuzzleId::Sudoku,
            4,
            4,
            Structures::default(),
            vec![],
            None,
            0,
            Difficulty::Easy,
        )
        .unwrap();
        let bad_state = grid(&["2 3 4 1", "4 4 1 2", "4 2 1 3", "3 1 2 4"]);
        let violations = inst.check_constraints(&bad_state).unwrap();
        assert!(violations.iter().any(|v| v.scope == "row 1"));
        assert!(violations.iter().any(|v| v.scope == "column 0"));

        let good = grid(&["1 2 3 4", "3 4 1 2", "2 1 4 3", "4 3 2 1"]);
        assert!(inst.check_constraints(&good).unwrap().is_empty());
        assert!(inst.check_constraints(&Grid::new(4, 4).unwrap()).unwrap().is_empty());
    }

    #[test]
    fn candidates_eliminate_per_constraint() {
        let inst = worked_sudoku();
        let state = inst.initial_state();
        let c01 = inst.candidates(&state, Coord::new(0, 1)).unwrap();
        assert_eq!(c01, vec![Symbol::digit(1), Symbol::digit(4)]);

        let empty = PuzzleInstance::new(
            PuzzleId::Sudoku,
            4,
            4,
            Structures::default(),
            vec![],
            None,
            0,
            Difficulty::Easy,
        )
        .unwrap();
        let blank = Grid::new(4, 4).unwrap();
        assert_eq!(empty.candidates(&blank, Coord::new(2, 2)).unwrap().len(), 4);

        // Row holds 1,2,3 and the column holds 4: every value collides.
        let dead = grid(&["1 2 3 *", "* * * *", "* * * 4", "* * * *"]);
        assert!(empty.candidates(&dead, Coord::new(0, 3)).unwrap().is_empty());

        let err = empty.candidates(&dead, Coord::new(0, 0)).unwrap_err();
        assert!(matches!(err, InstanceError::CellNotAssignable { .. }));
    }

    #[test]
    fn is_solved_requires_conditions() {
        let inst = worked_sudoku();
        let solution = inst.solution.clone().unwrap();
        assert!(inst.is_solved(&solution).unwrap());

        // Valid Latin square that ignores the clue (0,0)=3.
        let latin = grid(&["1 2 3 4", "3 4 1 2", "2 1 4 3", "4 3 2 1"]);
        assert!(!inst.is_solved(&latin).unwrap());

        let partial = inst.initial_state();
        assert!(!inst.is_solved(&partial).unwrap());
    }

    #[test]
    fn constructor_rejects_inconsistencies() {
        // Condition contradicting the solution.
        let err = PuzzleInstance::new(
            PuzzleId::Sudoku,
            4,
            4,
            Structures::default(),
            vec![Condition { cell: Coord::new(0, 0), value: Symbol::digit(1) }],
            Some(grid(&["3 1 4 2", "2 4 1 3", "1 3 2 4", "4 2 3 1"])),
            0,
            Difficulty::Easy,
        )
        .unwrap_err();
        assert!(err.to_string().contains("disagrees"));

        // Duplicate condition cells.
        let err = PuzzleInstance::new(
            PuzzleId::Sudoku,
            4,
            4,
            Structures::default(),
            vec![
                Condition { cell: Coord::new(0, 0), value: Symbol::digit(1) },
                Condition { cell: Coord::new(0, 0), value: Symbol::digit(2) },
            ],
            None,
            0,
            Difficulty::Easy,
        )
        .unwrap_err();
        assert!(err.to_string().contains("two conditions"));

        // Solution violating a constraint.
        let err = PuzzleInstance::new(
            PuzzleId::Sudoku,
            4,
            4,
            Structures::default(),
            vec![],
            Some(grid(&["2 3 4 1", "4 4 1 2", "4 2 1 3", "3 1 2 4"])),
            0,
            Difficulty::Easy,
        )
        .unwrap_err();
        assert!(err.to_string().contains("violates"));

        // Condition value outside the alphabet.
        let err = PuzzleInstance::new(
            PuzzleId::Sudoku,
            4,
            4,
            Structures::default(),
            vec![Condition { cell: Coord::new(0, 0), value: crate::symbol::SYM_S }],
            None,
            0,
            Difficulty::Easy,
        )
        .unwrap_err();
        assert!(err.to_string().contains("alphabet"));
    }

    #[test]
    fn hashes_ignore_seed_but_track_content() {
        let a = worked_sudoku();
        let mut b = worked_sudoku();
        b.seed = 999;
        assert_eq!(a.conditions_hash(), b.conditions_hash());
        assert_eq!(a.solution_hash(), b.solution_hash());

        let fewer = PuzzleInstance::new(
            PuzzleId::Sudoku,
            4,
            4,
            Structures::default(),
            a.conditions[..3].to_vec(),
            a.solution.clone(),
            7,
            Difficulty::Easy,
        )
        .unwrap();
        assert_ne!(a.conditions_hash(), fewer.conditions_hash());
        assert_eq!(a.solution_hash(), fewer.solution_hash());
        assert_eq!(a.conditions_hash().len(), 64);
    }

    #[test]
    fn light_up_walls_become_blocked() {
        let structures = Structures {
            walls: Some(vec![
                Wall { at: Coord::new(0, 1), count: Some(1) },
                Wall { at: Coord::new(1, 1), count: None },
            ]),
            ..Structures::default()
        };
        let inst = PuzzleInstance::new(
            PuzzleId::LightUp,
            3,
            3,
            structures,
            vec![],
            None,
            0,
            Difficulty::Easy,
        )
        .unwrap();
        let state = inst.initial_state();
        assert_eq!(state.get(Coord::new(0, 1)).unwrap(), CellState::Blocked);
        assert_eq!(state.to_text(), "[[*, w, *], [*, w, *], [*, *, *]]");
        // A wall cell can never be assigned.
        let err = inst.apply_assignment(&state, Coord::new(1, 1), SYM_E).unwrap_err();
        assert!(matches!(err, InstanceError::CellNotAssignable { .. }));
    }

    #[test]
    fn trees_and_number_clues_prefill() {
        let structures = Structures {
            trees: Some(vec![Coord::new(0, 0)]),
            row_counts: Some(vec![1, 0, 0]),
            col_counts: Some(vec![0, 1, 0]),
            ..Structures::default()
        };
        let inst = PuzzleInstance::new(
            PuzzleId::TreesAndTents,
            3,
            3,
            structures,
            vec![],
            None,
            0,
            Difficulty::Easy,
        )
        .unwrap();
        assert_eq!(inst.initial_state().get(Coord::new(0, 0)).unwrap(), CellState::Assigned(SYM_TR));

        let structures = Structures {
            number_clues: Some(vec![NumberClue { at: Coord::new(1, 1), count: 2 }]),
            ..Structures::default()
        };
        let inst = PuzzleInstance::new(
            PuzzleId::FieldExplore,
            3,
            3,
            structures,
            vec![],
            None,
            0,
            Difficulty::Easy,
        )
        .unwrap();
        assert_eq!(inst.initial_state().get(Coord::new(1, 1)).unwrap(), CellState::Assigned(SYM_E));
    }
}
