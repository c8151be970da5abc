//! Registry of the 20 puzzle definitions: identity, taxonomy, prompt text,
//! per-difficulty sizes, alphabets, and compilation of structural clues into
//! concrete [`Constraint`] lists.
//!
//! The registry is a static table — extending it is a code change, and
//! lookups are plain reads.

pub mod prompts;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constraint::{Constraint, TouchMode};
use crate::grid::Coord;
use crate::instance::{Difficulty, Structures};
use crate::symbol::{self, Symbol, SYM_B, SYM_E, SYM_S, SYM_TT, SYM_W};
use prompts::PromptSet;

#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PuzzleId {
    Aquarium,
    BattleShips,
    Binairo,
    ColoredSudoku,
    FieldExplore,
    Futoshiki,
    Hitori,
    JigsawSudoku,
    Kakurasu,
    Kakuro,
    KillerSudoku,
    LightUp,
    Nonogram,
    OddEvenSudoku,
    Renzoku,
    Skyscraper,
    StarBattle,
    Sudoku,
    Thermometers,
    TreesAndTents,
}

#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tag {
    Counting,
    Arithmetic,
    Comparison,
    Matching,
    Unidirectionality,
    Connectivity,
    Uniqueness,
}

impl Tag {
    pub fn name(self) -> &'static str {
        match self {
            Tag::Counting => "counting",
            Tag::Arithmetic => "arithmetic",
            Tag::Comparison => "comparison",
            Tag::Matching => "matching",
            Tag::Unidirectionality => "unidirectionality",
            Tag::Connectivity => "connectivity",
            Tag::Uniqueness => "uniqueness",
        }
    }
}

/// How cells take values: the assignable symbol set per grid size.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
enum AlphabetKind {
    /// Digits 1..=N.
    Digits,
    /// Binairo's white/black pieces.
    Pieces,
    /// Select-or-leave: `s` marks the selection, `e` leaves the cell.
    Shade,
    /// Trees-and-Tents: every non-tree cell becomes `e` or `tt`.
    Tents,
}

#[derive(Error, Debug, PartialEq)]
pub enum RuleError {
    #[error("no puzzle named {given:?}; valid ids: {}", valid.join(", "))]
    NotRegistered { given: String, valid: Vec<&'static str> },
    #[error("{puzzle}: illegal size {rows}x{cols}: {reason}")]
    IllegalSize { puzzle: PuzzleId, rows: usize, cols: usize, reason: String },
    #[error("{puzzle}: missing structure field {field:?}")]
    MissingStructure { puzzle: PuzzleId, field: &'static str },
    #[error("{puzzle}: bad structure: {detail}")]
    BadStructure { puzzle: PuzzleId, detail: String },
}

#[derive(Debug)]
pub struct PuzzleDefinition {
    pub id: PuzzleId,
    pub taxonomy: &'static [Tag],
    pub prompts: &'static PromptSet,
    /// Structure fields this puzzle reads (documentation + catalog).
    pub structures_schema: &'static [&'static str],
    /// Whether instances reveal solution cells as conditions (Sudoku-style
    /// hints) rather than carrying all information in structures.
    pub reveal_based: bool,
    alphabet_kind: AlphabetKind,
}

macro_rules! def {
    ($id:ident, $prompts:ident, $kind:ident, $reveal:expr, [$($tag:ident),+], [$($field:literal),*]) => {
        PuzzleDefinition {
            id: PuzzleId::$id,
            taxonomy: &[$(Tag::$tag),+],
            prompts: &prompts::$prompts,
            structures_schema: &[$($field),*],
            reveal_based: $reveal,
            alphabet_kind: AlphabetKind::$kind,
        }
    };
}

static DEFS: [PuzzleDefinition; 20] = [
    def!(Aquarium, AQUARIUM, Shade, false, [Counting, Unidirectionality], ["regions", "row_counts", "col_counts"]),
    def!(BattleShips, BATTLE_SHIPS, Shade, false, [Counting, Connectivity], ["fleet", "row_counts", "col_counts"]),
    def!(Binairo, BINAIRO, Pieces, true, [Counting], []),
    def!(ColoredSudoku, COLORED_SUDOKU, Digits, true, [Uniqueness, Counting], ["color_groups"]),
    def!(FieldExplore, FIELD_EXPLORE, Shade, false, [Counting, Matching], ["number_clues"]),
    def!(Futoshiki, FUTOSHIKI, Digits, true, [Uniqueness, Comparison], ["inequalities"]),
    def!(Hitori, HITORI, Shade, false, [Uniqueness, Connectivity], ["givens"]),
    def!(JigsawSudoku, JIGSAW_SUDOKU, Digits, true, [Uniqueness, Counting], ["regions"]),
    def!(Kakurasu, KAKURASU, Shade, false, [Arithmetic, Counting], ["row_sums", "col_sums"]),
    def!(Kakuro, KAKURO, Digits, true, [Arithmetic, Counting], ["row_sums", "col_sums"]),
    def!(KillerSudoku, KILLER_SUDOKU, Digits, true, [Uniqueness, Arithmetic], ["cages"]),
    def!(LightUp, LIGHT_UP, Shade, false, [Counting, Unidirectionality], ["walls"]),
    def!(Nonogram, NONOGRAM, Shade, false, [Counting], ["row_runs", "col_runs"]),
    def!(OddEvenSudoku, ODD_EVEN_SUDOKU, Digits, true, [Uniqueness, Counting], ["parity"]),
    def!(Renzoku, RENZOKU, Digits, true, [Uniqueness, Arithmetic], ["dots"]),
    def!(Skyscraper, SKYSCRAPER, Digits, false, [Uniqueness, Comparison], ["view_clues"]),
    def!(StarBattle, STAR_BATTLE, Shade, false, [Uniqueness, Counting], ["regions"]),
    def!(Sudoku, SUDOKU, Digits, true, [Uniqueness, Counting], []),
    def!(Thermometers, THERMOMETERS, Shade, false, [Counting, Unidirectionality], ["thermometers", "row_counts", "col_counts"]),
    def!(TreesAndTents, TREES_AND_TENTS, Tents, false, [Counting, Matching], ["trees", "row_counts", "col_counts"]),
];

impl PuzzleId {
    pub const ALL: [PuzzleId; 20] = [
        PuzzleId::Aquarium,
        PuzzleId::BattleShips,
        PuzzleId::Binairo,
        PuzzleId::ColoredSudoku,
        PuzzleId::FieldExplore,
        PuzzleId::Futoshiki,
        PuzzleId::Hitori,
        PuzzleId::JigsawSudoku,
        PuzzleId::Kakurasu,
        PuzzleId::Kakuro,
        PuzzleId::KillerSudoku,
        PuzzleId::LightUp,
        PuzzleId::Nonogram,
        PuzzleId::OddEvenSudoku,
        PuzzleId::Renzoku,
        PuzzleId::Skyscraper,
        PuzzleId::StarBattle,
        PuzzleId::Sudoku,
        PuzzleId::Thermometers,
        PuzzleId::TreesAndTents,
    ];

    pub fn id(self) -> &'static str {
        match self {
            PuzzleId::Aquarium => "aquarium",
            PuzzleId::BattleShips => "battle-ships",
            PuzzleId::Binairo => "binairo",
            PuzzleId::ColoredSudoku => "colored-sudoku",
            PuzzleId::FieldExplore => "field-explore",
            PuzzleId::Futoshiki => "futoshiki",
            PuzzleId::Hitori => "hitori",
            PuzzleId::JigsawSudoku => "jigsaw-sudoku",
            PuzzleId::Kakurasu => "kakurasu",
            PuzzleId::Kakuro => "kakuro",
            PuzzleId::KillerSudoku => "killer-sudoku",
            PuzzleId::LightUp => "light-up",
            PuzzleId::Nonogram => "nonogram",
            PuzzleId::OddEvenSudoku => "odd-even-sudoku",
            PuzzleId::Renzoku => "renzoku",
            PuzzleId::Skyscraper => "skyscraper",
            PuzzleId::StarBattle => "star-battle",
            PuzzleId::Sudoku => "sudoku",
            PuzzleId::Thermometers => "thermometers",
            PuzzleId::TreesAndTents => "trees-and-tents",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            PuzzleId::Aquarium => "Aquarium",
            PuzzleId::BattleShips => "Battle-Ships",
            PuzzleId::Binairo => "Binairo",
            PuzzleId::ColoredSudoku => "Colored-Sudoku",
            PuzzleId::FieldExplore => "Field-Explore",
            PuzzleId::Futoshiki => "Futoshiki",
            PuzzleId::Hitori => "Hitori",
            PuzzleId::JigsawSudoku => "Jigsaw-Sudoku",
            PuzzleId::Kakurasu => "Kakurasu",
            PuzzleId::Kakuro => "Kakuro",
            PuzzleId::KillerSudoku => "Killer-Sudoku",
            PuzzleId::LightUp => "Light-Up",
            PuzzleId::Nonogram => "Nonogram",
            PuzzleId::OddEvenSudoku => "Odd-Even-Sudoku",
            PuzzleId::Renzoku => "Renzoku",
            PuzzleId::Skyscraper => "Skyscraper",
            PuzzleId::StarBattle => "Star-Battle",
            PuzzleId::Sudoku => "Sudoku",
            PuzzleId::Thermometers => "Thermometers",
            PuzzleId::TreesAndTents => "Trees-and-Tents",
        }
    }

    pub fn parse(s: &str) -> Option<PuzzleId> {
        PuzzleId::ALL.into_iter().find(|p| p.id() == s)
    }

    pub fn definition(self) -> &'static PuzzleDefinition {
        let ix = PuzzleId::ALL.iter().position(|p| *p == self).expect("id in ALL");
        &DEFS[ix]
    }

    pub fn prompts(self) -> &'static PromptSet {
        self.definition().prompts
    }

    /// Grid side length per difficulty; None when the difficulty does not
    /// exist for this puzzle (block puzzles stop at 9x9 because the next
    /// size, 16x16, is too large).
    pub fn size_for(self, difficulty: Difficulty) -> Option<usize> {
        let [e, m, h] = match self {
            PuzzleId::Aquarium => [4, 6, 8],
            PuzzleId::BattleShips => [6, 7, 8],
            PuzzleId::Binairo => [4, 6, 8],
            PuzzleId::ColoredSudoku => [4, 6, 8],
            PuzzleId::FieldExplore => [4, 6, 8],
            PuzzleId::Futoshiki => [4, 6, 8],
            PuzzleId::Hitori => [4, 6, 8],
            PuzzleId::JigsawSudoku => [4, 6, 8],
            PuzzleId::Kakurasu => [4, 6, 8],
            PuzzleId::Kakuro => [4, 6, 8],
            PuzzleId::KillerSudoku => [4, 9, 0],
            PuzzleId::LightUp => [4, 6, 8],
            PuzzleId::Nonogram => [4, 6, 8],
            PuzzleId::OddEvenSudoku => [4, 9, 0],
            PuzzleId::Renzoku => [4, 6, 8],
            PuzzleId::Skyscraper => [5, 6, 8],
            PuzzleId::StarBattle => [5, 6, 8],
            PuzzleId::Sudoku => [4, 9, 0],
            PuzzleId::Thermometers => [4, 6, 8],
            PuzzleId::TreesAndTents => [6, 7, 8],
        };
        let n = match difficulty {
            Difficulty::Easy => e,
            Difficulty::Medium => m,
            Difficulty::Hard => h,
        };
        (n != 0).then_some(n)
    }
}

impl fmt::Display for PuzzleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl PuzzleDefinition {
    /// Symbols an empty cell may be assigned, in fixed candidate order.
    pub fn alphabet(&self, n: usize) -> Vec<Symbol> {
        match self.alphabet_kind {
            AlphabetKind::Digits => symbol::digits(n as u32),
            AlphabetKind::Pieces => vec![SYM_W, SYM_B],
            AlphabetKind::Shade => vec![SYM_S, SYM_E],
            AlphabetKind::Tents => vec![SYM_E, SYM_TT],
        }
    }

    /// Does this puzzle divide into sqrt(N) blocks (the Sudoku family)?
    pub fn uses_blocks(&self) -> bool {
        matches!(
            self.id,
            PuzzleId::Sudoku | PuzzleId::KillerSudoku | PuzzleId::OddEvenSudoku
        )
    }

    pub fn legal_size(&self, rows: usize, cols: usize) -> Result<(), RuleError> {
        let illegal = |reason: String| RuleError::IllegalSize { puzzle: self.id, rows, cols, reason };
        if rows != cols {
            return Err(illegal("grid must be square".into()));
        }
        let n = rows;
        if self.uses_blocks() {
            if n == 4 || n == 9 {
                return Ok(());
            }
            return Err(illegal("block grids must be 4x4 or 9x9".into()));
        }
        if !(3..=12).contains(&n) {
            return Err(illegal("side length must be between 3 and 12".into()));
        }
        if self.id == PuzzleId::Binairo && n < 3 {
            return Err(illegal("adjacency rule needs at least 3 cells per line".into()));
        }
        Ok(())
    }
}

/// Finds a definition by its stable id string.
pub fn lookup(id: &str) -> Result<&'static PuzzleDefinition, RuleError> {
    PuzzleId::parse(id).map(PuzzleId::definition).ok_or_else(|| RuleError::NotRegistered {
        given: id.to_string(),
        valid: PuzzleId::ALL.iter().map(|p| p.id()).collect(),
    })
}

pub fn taxonomy_of(id: &str) -> Result<&'static [Tag], RuleError> {
    lookup(id).map(|d| d.taxonomy)
}

/// Machine-readable registry dump: ids, names, sizes, taxonomy, rule text.
pub fn catalog() -> serde_json::Value {
    let puzzles: Vec<serde_json::Value> = PuzzleId::ALL
        .iter()
        .map(|&id| {
            let def = id.definition();
            let mut sizes = serde_json::Map::new();
            for d in [Difficulty::Easy, Difficulty::Medium, Difficulty::Hard] {
                sizes.insert(
                    d.name().to_string(),
                    id.size_for(d).map_or(serde_json::Value::Null, |n| n.into()),
                );
            }
            serde_json::json!({
                "id": id.id(),
                "name": id.display_name(),
                "taxonomy": def.taxonomy.iter().map(|t| t.name()).collect::<Vec<_>>(),
                "sizes": sizes,
                "reveal_based": def.reveal_based,
                "structures": def.structures_schema,
                "rule": def.prompts.rule,
            })
        })
        .collect();
    serde_json::json!({ "puzzles": puzzles })
}

fn row_coords(r: usize, cols: usize) -> Vec<Coord> {
    (0..cols).map(|c| Coord::new(r, c)).collect()
}

fn col_coords(c: usize, rows: usize) -> Vec<Coord> {
    (0..rows).map(|r| Coord::new(r, c)).collect()
}

fn line_all_different(n: usize) -> Vec<Constraint> {
    let mut out = Vec::with_capacity(2 * n);
    for r in 0..n {
        out.push(Constraint::AllDifferent { scope: format!("row {r}"), cells: row_coords(r, n) });
    }
    for c in 0..n {
        out.push(Constraint::AllDifferent {
            scope: format!("column {c}"),
            cells: col_coords(c, n),
        });
    }
    out
}

fn block_all_different(n: usize) -> Vec<Constraint> {
    let root = int_sqrt(n).expect("block sizes are perfect squares");
    let mut out = Vec::with_capacity(n);
    for br in 0..root {
        for bc in 0..root {
            let mut cells = Vec::with_capacity(n);
            for r in 0..root {
                for c in 0..root {
                    cells.push(Coord::new(br * root + r, bc * root + c));
                }
            }
            out.push(Constraint::AllDifferent {
                scope: format!("block {}", br * root + bc),
                cells,
            });
        }
    }
    out
}

fn int_sqrt(n: usize) -> Option<usize> {
    let r = (n as f64).sqrt().round() as usize;
    (r * r == n).then_some(r)
}

/// Groups a rows x cols id-grid into ordered (id, cells) buckets.
fn group_cells(ids: &[Vec<usize>]) -> BTreeMap<usize, Vec<Coord>> {
    let mut groups: BTreeMap<usize, Vec<Coord>> = BTreeMap::new();
    for (r, row) in ids.iter().enumerate() {
        for (c, &id) in row.iter().enumerate() {
            groups.entry(id).or_default().push(Coord::new(r, c));
        }
    }
    groups
}

fn orthogonally_connected(cells: &[Coord]) -> bool {
    if cells.is_empty() {
        return false;
    }
    let mut seen = vec![false; cells.len()];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut reached = 1;
    while let Some(i) = stack.pop() {
        let a = cells[i];
        for (j, &b) in cells.iter().enumerate() {
            if !seen[j] && a.row.abs_diff(b.row) + a.col.abs_diff(b.col) == 1 {
                seen[j] = true;
                reached += 1;
                stack.push(j);
            }
        }
    }
    reached == cells.len()
}

struct Check<'a> {
    def: &'a PuzzleDefinition,
    n: usize,
}

impl<'a> Check<'a> {
    fn bad(&self, detail: impl Into<String>) -> RuleError {
        RuleError::BadStructure { puzzle: self.def.id, detail: detail.into() }
    }

    fn need<'b, T>(&self, field: &'b Option<T>, name: &'static str) -> Result<&'b T, RuleError> {
        field.as_ref().ok_or(RuleError::MissingStructure { puzzle: self.def.id, field: name })
    }

    fn id_grid<'b>(
        &self,
        field: &'b Option<Vec<Vec<usize>>>,
        name: &'static str,
    ) -> Result<&'b Vec<Vec<usize>>, RuleError> {
        let grid = self.need(field, name)?;
        if grid.len() != self.n || grid.iter().any(|row| row.len() != self.n) {
            return Err(self.bad(format!("{name} must be a {0}x{0} grid", self.n)));
        }
        Ok(grid)
    }

    fn counts<'b>(
        &self,
        field: &'b Option<Vec<u32>>,
        name: &'static str,
        max: u32,
    ) -> Result<&'b Vec<u32>, RuleError> {
        let v = self.need(field, name)?;
        if v.len() != self.n {
            return Err(self.bad(format!("{name} must have {} entries", self.n)));
        }
        if let Some(x) = v.iter().find(|&&x| x > max) {
            return Err(self.bad(format!("{name} entry {x} exceeds {max}")));
        }
        Ok(v)
    }

    fn in_bounds(&self, at: Coord, what: &str) -> Result<(), RuleError> {
        if at.row >= self.n || at.col >= self.n {
            return Err(self.bad(format!("{what} {at} outside the {0}x{0} grid", self.n)));
        }
        Ok(())
    }
}

/// Compiles a puzzle's structural clues into bound constraints.
pub fn instantiate(
    def: &PuzzleDefinition,
    rows: usize,
    cols: usize,
    structures: &Structures,
) -> Result<Vec<Constraint>, RuleError> {
    def.legal_size(rows, cols)?;
    let n = rows;
    let ck = Check { def, n };
    let mut out: Vec<Constraint> = Vec::new();
    match def.id {
        PuzzleId::Aquarium => {
            let regions = ck.id_grid(&structures.regions, "regions")?;
            for (id, cells) in group_cells(regions) {
                if !orthogonally_connected(&cells) {
                    return Err(ck.bad(format!("region {id} is not connected")));
                }
                out.push(Constraint::GravityFillRegion {
                    scope: format!("region {id}"),
                    cells,
                    fill: SYM_S,
                });
            }
            push_line_counts(&mut out, n, structures, &ck, SYM_S)?;
        }
        PuzzleId::BattleShips => {
            let fleet = ck.need(&structures.fleet, "fleet")?.clone();
            if fleet.is_empty() || fleet.iter().any(|&s| s == 0 || s as usize > n) {
                return Err(ck.bad("fleet must list ship lengths between 1 and N"));
            }
            let total: u32 = fleet.iter().sum();
            let rc = ck.counts(&structures.row_counts, "row_counts", n as u32)?;
            let cc = ck.counts(&structures.col_counts, "col_counts", n as u32)?;
            if rc.iter().sum::<u32>() != total || cc.iter().sum::<u32>() != total {
                return Err(ck.bad("row/column counts must sum to the fleet total"));
            }
            out.push(Constraint::FleetComposition { fleet, ship: SYM_S });
            out.push(Constraint::NoTouch { symbol: SYM_S, mode: TouchMode::DiagonalOnly });
            push_line_counts(&mut out, n, structures, &ck, SYM_S)?;
        }
        PuzzleId::Binairo => {
            for r in 0..n {
                out.push(Constraint::MaxRunLength {
                    scope: format!("row {r}"),
                    cells: row_coords(r, n),
                    limit: 2,
                });
            }
            for c in 0..n {
                out.push(Constraint::MaxRunLength {
                    scope: format!("column {c}"),
                    cells: col_coords(c, n),
                    limit: 2,
                });
            }
        }
        PuzzleId::ColoredSudoku => {
            let colors = ck.id_grid(&structures.color_groups, "color_groups")?;
            let groups = group_cells(colors);
            if groups.len() != n || groups.values().any(|cells| cells.len() != n) {
                return Err(ck.bad(format!("need exactly {n} colors with {n} cells each")));
            }
            out.extend(line_all_different(n));
            for (id, cells) in groups {
                out.push(Constraint::AllDifferent { scope: format!("color {id}"), cells });
            }
        }
        PuzzleId::FieldExplore => {
            let clues = ck.need(&structures.number_clues, "number_clues")?;
            if clues.is_empty() {
                return Err(ck.bad("at least one revealed number is required"));
            }
            for (i, clue) in clues.iter().enumerate() {
                ck.in_bounds(clue.at, "number clue")?;
                if clue.count > 8 {
                    return Err(ck.bad(format!("clue {} exceeds 8 neighbours", clue.count)));
                }
                if clues[..i].iter().any(|other| other.at == clue.at) {
                    return Err(ck.bad(format!("duplicate number clue at {}", clue.at)));
                }
                out.push(Constraint::NeighborMineCount {
                    center: clue.at,
                    symbol: SYM_S,
                    target: clue.count,
                });
            }
        }
        PuzzleId::Futoshiki => {
            let edges = ck.need(&structures.inequalities, "inequalities")?;
            out.extend(line_all_different(n));
            for (i, e) in edges.iter().enumerate() {
                ck.in_bounds(e.small, "inequality endpoint")?;
                ck.in_bounds(e.large, "inequality endpoint")?;
                if e.small.row.abs_diff(e.large.row) + e.small.col.abs_diff(e.large.col) != 1 {
                    return Err(ck.bad(format!("inequality {} - {} is not an edge", e.small, e.large)));
                }
                if edges[..i].iter().any(|o| {
                    (o.small == e.small && o.large == e.large)
                        || (o.small == e.large && o.large == e.small)
                }) {
                    return Err(ck.bad(format!("duplicate inequality on {} - {}", e.small, e.large)));
                }
                out.push(Constraint::InequalityEdge {
                    small: e.small,
                    large: e.large,
                    max_value: n as u32,
                });
            }
        }
        PuzzleId::Hitori => {
            let givens = ck.need(&structures.givens, "givens")?;
            if givens.len() != n || givens.iter().any(|row| row.len() != n) {
                return Err(ck.bad(format!("givens must be a {n}x{n} grid")));
            }
            if givens.iter().flatten().any(|&v| v == 0 || v as usize > n) {
                return Err(ck.bad("given numbers must lie in 1..=N"));
            }
            for r in 0..n {
                out.push(Constraint::AllDifferentGiven {
                    scope: format!("row {r}"),
                    cells: row_coords(r, n),
                    values: givens[r].clone(),
                    keep: SYM_E,
                });
            }
            for c in 0..n {
                out.push(Constraint::AllDifferentGiven {
                    scope: format!("column {c}"),
                    cells: col_coords(c, n),
                    values: (0..n).map(|r| givens[r][c]).collect(),
                    keep: SYM_E,
                });
            }
            out.push(Constraint::NoTouch { symbol: SYM_S, mode: TouchMode::Orthogonal });
            out.push(Constraint::Connectivity { shade: SYM_S });
        }
        PuzzleId::JigsawSudoku => {
            let regions = ck.id_grid(&structures.regions, "regions")?;
            let groups = group_cells(regions);
            if groups.len() != n || groups.values().any(|cells| cells.len() != n) {
                return Err(ck.bad(format!("need exactly {n} regions with {n} cells each")));
            }
            out.extend(line_all_different(n));
            for (id, cells) in groups {
                if !orthogonally_connected(&cells) {
                    return Err(ck.bad(format!("region {id} is not connected")));
                }
                out.push(Constraint::AllDifferent { scope: format!("region {id}"), cells });
            }
        }
        PuzzleId::Kakurasu => {
            let max = (n * (n + 1) / 2) as u32;
            let rs = ck.counts(&structures.row_sums, "row_sums", max)?;
            let cs = ck.counts(&structures.col_sums, "col_sums", max)?;
            let weights: Vec<u32> = (1..=n as u32).collect();
            for (r, &target) in rs.iter().enumerate() {
                out.push(Constraint::WeightedLineSum {
                    scope: format!("row {r}"),
                    cells: row_coords(r, n),
                    weights: weights.clone(),
                    target,
                    fill: SYM_S,
                });
            }
            for (c, &target) in cs.iter().enumerate() {
                out.push(Constraint::WeightedLineSum {
                    scope: format!("column {c}"),
                    cells: col_coords(c, n),
                    weights: weights.clone(),
                    target,
                    fill: SYM_S,
                });
            }
        }
        PuzzleId::Kakuro => {
            let max = (n * n) as u32;
            let rs = ck.counts(&structures.row_sums, "row_sums", max)?;
            let cs = ck.counts(&structures.col_sums, "col_sums", max)?;
            for (r, &target) in rs.iter().enumerate() {
                out.push(Constraint::LineSum {
                    scope: format!("row {r}"),
                    cells: row_coords(r, n),
                    target,
                    min_value: 1,
                    max_value: n as u32,
                });
            }
            for (c, &target) in cs.iter().enumerate() {
                out.push(Constraint::LineSum {
                    scope: format!("column {c}"),
                    cells: col_coords(c, n),
                    target,
                    min_value: 1,
                    max_value: n as u32,
                });
            }
            out.push(Constraint::AdjacentNotEqual { scope: "grid".into() });
        }
        PuzzleId::KillerSudoku => {
            let cages = ck.need(&structures.cages, "cages")?;
            let mut covered = vec![false; n * n];
            out.extend(line_all_different(n));
            out.extend(block_all_different(n));
            for (i, cage) in cages.iter().enumerate() {
                if cage.cells.is_empty() {
                    return Err(ck.bad(format!("cage {i} is empty")));
                }
                for &at in &cage.cells {
                    ck.in_bounds(at, "cage cell")?;
                    if std::mem::replace(&mut covered[at.row * n + at.col], true) {
                        return Err(ck.bad(format!("cell {at} belongs to two cages")));
                    }
                }
                if !orthogonally_connected(&cage.cells) {
                    return Err(ck.bad(format!("cage {i} is not connected")));
                }
                let size = cage.cells.len() as u32;
                if cage.target < size || cage.target > size * n as u32 {
                    return Err(ck.bad(format!("cage {i} target {} is unreachable", cage.target)));
                }
                out.push(Constraint::LineSum {
                    scope: format!("cage {i}"),
                    cells: cage.cells.clone(),
                    target: cage.target,
                    min_value: 1,
                    max_value: n as u32,
                });
            }
            if !covered.iter().all(|&c| c) {
                return Err(ck.bad("cages must cover every cell"));
            }
        }
        PuzzleId::LightUp => {
            let walls = ck.need(&structures.walls, "walls")?;
            out.push(Constraint::Illumination { bulb: SYM_S, open: SYM_E });
            for (i, wall) in walls.iter().enumerate() {
                ck.in_bounds(wall.at, "wall")?;
                if walls[..i].iter().any(|other| other.at == wall.at) {
                    return Err(ck.bad(format!("duplicate wall at {}", wall.at)));
                }
                if let Some(count) = wall.count {
                    if count > 4 {
                        return Err(ck.bad(format!("wall count {count} exceeds 4")));
                    }
                    out.push(Constraint::AdjacencyCount {
                        center: wall.at,
                        symbol: SYM_S,
                        target: count,
                    });
                }
            }
        }
        PuzzleId::Nonogram => {
            let rr = ck.need(&structures.row_runs, "row_runs")?;
            let cr = ck.need(&structures.col_runs, "col_runs")?;
            if rr.len() != n || cr.len() != n {
                return Err(ck.bad(format!("need run clues for all {n} rows and columns")));
            }
            let fits = |runs: &Vec<u32>| {
                runs.iter().all(|&x| x >= 1)
                    && runs.iter().sum::<u32>() as usize + runs.len().saturating_sub(1) <= n
            };
            if !rr.iter().all(fits) || !cr.iter().all(fits) {
                return Err(ck.bad("run clues must fit in the line"));
            }
            let row_total: u32 = rr.iter().flatten().sum();
            let col_total: u32 = cr.iter().flatten().sum();
            if row_total != col_total {
                return Err(ck.bad("row and column run totals disagree"));
            }
            for (r, runs) in rr.iter().enumerate() {
                out.push(Constraint::RunLengths {
                    scope: format!("row {r}"),
                    cells: row_coords(r, n),
                    runs: runs.clone(),
                    fill: SYM_S,
                });
            }
            for (c, runs) in cr.iter().enumerate() {
                out.push(Constraint::RunLengths {
                    scope: format!("column {c}"),
                    cells: col_coords(c, n),
                    runs: runs.clone(),
                    fill: SYM_S,
                });
            }
        }
        PuzzleId::OddEvenSudoku => {
            let parity = ck.need(&structures.parity, "parity")?;
            if parity.len() != n || parity.iter().any(|row| row.len() != n) {
                return Err(ck.bad(format!("parity must be a {n}x{n} grid")));
            }
            out.extend(line_all_different(n));
            out.extend(block_all_different(n));
            for (r, row) in parity.iter().enumerate() {
                for (c, &even) in row.iter().enumerate() {
                    out.push(Constraint::ParityMask { cell: Coord::new(r, c), even });
                }
            }
        }
        PuzzleId::Renzoku => {
            let dots = ck.need(&structures.dots, "dots")?;
            for (i, d) in dots.iter().enumerate() {
                ck.in_bounds(d.a, "dot endpoint")?;
                ck.in_bounds(d.b, "dot endpoint")?;
                if d.a.row.abs_diff(d.b.row) + d.a.col.abs_diff(d.b.col) != 1 {
                    return Err(ck.bad(format!("dot {} - {} is not an edge", d.a, d.b)));
                }
                if dots[..i]
                    .iter()
                    .any(|o| (o.a == d.a && o.b == d.b) || (o.a == d.b && o.b == d.a))
                {
                    return Err(ck.bad(format!("duplicate dot on {} - {}", d.a, d.b)));
                }
            }
            out.extend(line_all_different(n));
            let has_dot = |a: Coord, b: Coord| {
                dots.iter().any(|d| (d.a == a && d.b == b) || (d.a == b && d.b == a))
            };
            for r in 0..n {
                for c in 0..n {
                    let at = Coord::new(r, c);
                    if c + 1 < n {
                        let right = Coord::new(r, c + 1);
                        out.push(Constraint::ConsecutiveEdge {
                            a: at,
                            b: right,
                            consecutive: has_dot(at, right),
                        });
                    }
                    if r + 1 < n {
                        let down = Coord::new(r + 1, c);
                        out.push(Constraint::ConsecutiveEdge {
                            a: at,
                            b: down,
                            consecutive: has_dot(at, down),
                        });
                    }
                }
            }
        }
        PuzzleId::Skyscraper => {
            let clues = ck.need(&structures.view_clues, "view_clues")?;
            for (side, v) in [
                ("top", &clues.top),
                ("bottom", &clues.bottom),
                ("left", &clues.left),
                ("right", &clues.right),
            ] {
                if v.len() != n {
                    return Err(ck.bad(format!("{side} clues must have {n} entries")));
                }
                if v.iter().any(|&x| x == 0 || x as usize > n) {
                    return Err(ck.bad(format!("{side} clues must lie in 1..=N")));
                }
            }
            out.extend(line_all_different(n));
            for c in 0..n {
                out.push(Constraint::Visibility {
                    scope: format!("top column {c}"),
                    cells: col_coords(c, n),
                    clue: clues.top[c],
                });
                out.push(Constraint::Visibility {
                    scope: format!("bottom column {c}"),
                    cells: col_coords(c, n).into_iter().rev().collect(),
                    clue: clues.bottom[c],
                });
            }
            for r in 0..n {
                out.push(Constraint::Visibility {
                    scope: format!("left row {r}"),
                    cells: row_coords(r, n),
                    clue: clues.left[r],
                });
                out.push(Constraint::Visibility {
                    scope: format!("right row {r}"),
                    cells: row_coords(r, n).into_iter().rev().collect(),
                    clue: clues.right[r],
                });
            }
        }
        PuzzleId::StarBattle => {
            let regions = ck.id_grid(&structures.regions, "regions")?;
            let groups = group_cells(regions);
            if groups.len() != n {
                return Err(ck.bad(format!("need exactly {n} regions")));
            }
            for r in 0..n {
                out.push(Constraint::LineCount {
                    scope: format!("row {r}"),
                    cells: row_coords(r, n),
                    symbol: SYM_S,
                    target: 1,
                });
            }
            for c in 0..n {
                out.push(Constraint::LineCount {
                    scope: format!("column {c}"),
                    cells: col_coords(c, n),
                    symbol: SYM_S,
                    target: 1,
                });
            }
            for (id, cells) in groups {
                if !orthogonally_connected(&cells) {
                    return Err(ck.bad(format!("region {id} is not connected")));
                }
                out.push(Constraint::LineCount {
                    scope: format!("region {id}"),
                    cells,
                    symbol: SYM_S,
                    target: 1,
                });
            }
            out.push(Constraint::NoTouch { symbol: SYM_S, mode: TouchMode::Any });
        }
        PuzzleId::Sudoku => {
            out.extend(line_all_different(n));
            out.extend(block_all_different(n));
        }
        PuzzleId::Thermometers => {
            let thermos = ck.need(&structures.thermometers, "thermometers")?;
            let mut used = vec![false; n * n];
            for (i, path) in thermos.iter().enumerate() {
                if path.is_empty() {
                    return Err(ck.bad(format!("thermometer {i} is empty")));
                }
                for (k, &at) in path.iter().enumerate() {
                    ck.in_bounds(at, "thermometer cell")?;
                    if std::mem::replace(&mut used[at.row * n + at.col], true) {
                        return Err(ck.bad(format!("cell {at} is on two thermometers")));
                    }
                    if k > 0 {
                        let prev = path[k - 1];
                        if prev.row.abs_diff(at.row) + prev.col.abs_diff(at.col) != 1 {
                            return Err(ck.bad(format!("thermometer {i} breaks at {at}")));
                        }
                    }
                }
                out.push(Constraint::GravityFillPath {
                    scope: format!("thermometer {i}"),
                    cells: path.clone(),
                    fill: SYM_S,
                });
            }
            let outside: Vec<Coord> = (0..n * n)
                .filter(|&i| !used[i])
                .map(|i| Coord::new(i / n, i % n))
                .collect();
            if !outside.is_empty() {
                out.push(Constraint::LineCount {
                    scope: "outside thermometers".into(),
                    cells: outside,
                    symbol: SYM_S,
                    target: 0,
                });
            }
            push_line_counts(&mut out, n, structures, &ck, SYM_S)?;
        }
        PuzzleId::TreesAndTents => {
            let trees = ck.need(&structures.trees, "trees")?.clone();
            for (i, &at) in trees.iter().enumerate() {
                ck.in_bounds(at, "tree")?;
                if trees[..i].contains(&at) {
                    return Err(ck.bad(format!("duplicate tree at {at}")));
                }
            }
            let rc = ck.counts(&structures.row_counts, "row_counts", n as u32)?;
            let cc = ck.counts(&structures.col_counts, "col_counts", n as u32)?;
            let tents = trees.len() as u32;
            if rc.iter().sum::<u32>() != tents || cc.iter().sum::<u32>() != tents {
                return Err(ck.bad("tent counts must sum to the number of trees"));
            }
            out.push(Constraint::Bijection { trees, tent: SYM_TT });
            out.push(Constraint::NoTouch { symbol: SYM_TT, mode: TouchMode::Any });
            push_line_counts(&mut out, n, structures, &ck, SYM_TT)?;
        }
    }
    Ok(out)
}

/// Shared "counts on the sides" pattern: one LineCount per row and column.
fn push_line_counts(
    out: &mut Vec<Constraint>,
    n: usize,
    structures: &Structures,
    ck: &Check<'_>,
    symbol: Symbol,
) -> Result<(), RuleError> {
    let rc = ck.counts(&structures.row_counts, "row_counts", n as u32)?;
    for (r, &target) in rc.iter().enumerate() {
        out.push(Constraint::LineCount {
            scope: format!("row {r}"),
            cells: row_coords(r, n),
            symbol,
            target,
        });
    }
    let cc = ck.counts(&structures.col_counts, "col_counts", n as u32)?;
    for (c, &target) in cc.iter().enumerate() {
        out.push(Constraint::LineCount {
            scope: format!("column {c}"),
            cells: col_coords(c, n),
            symbol,
            target,
        });
    }
    Ok(())
}
