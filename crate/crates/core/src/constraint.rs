//! The closed set of constraint primitives the 20 puzzle rule-sets compile to.
//!
//! Every constraint checks a possibly partial grid. Partial-state semantics:
//! a violation is reported only when the assigned cells already force a
//! contradiction (duplicate present, sum/count exceeded or unreachable, no
//! completion of a line run pattern, a provably unmatchable tent, two
//! decided-open cells provably disconnected). A half-empty row never violates
//! uniqueness. Complete grids additionally get exact checks (sums equal,
//! fleet multiset equal, full illumination coverage).

use serde::{Deserialize, Serialize};

use crate::grid::{CellState, Coord, Grid};
use crate::symbol::Symbol;

/// Reporting label for each primitive; the registry instantiates concrete
/// [`Constraint`] values that map onto these kinds.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum ConstraintKind {
    AllDifferent,
    LineSum,
    WeightedLineSum,
    LineCount,
    RunLengths,
    MaxRunLength,
    NoTouch,
    AdjacencyCount,
    ParityMask,
    InequalityEdge,
    ConsecutiveEdge,
    Visibility,
    Illumination,
    GravityFill,
    Bijection,
    Connectivity,
    FleetComposition,
    NeighborMineCount,
    AdjacentNotEqual,
}

impl ConstraintKind {
    pub fn name(self) -> &'static str {
        match self {
            ConstraintKind::AllDifferent => "AllDifferent",
            ConstraintKind::LineSum => "LineSum",
            ConstraintKind::WeightedLineSum => "WeightedLineSum",
            ConstraintKind::LineCount => "LineCount",
            ConstraintKind::RunLengths => "RunLengths",
            ConstraintKind::MaxRunLength => "MaxRunLength",
            ConstraintKind::NoTouch => "NoTouch",
            ConstraintKind::AdjacencyCount => "AdjacencyCount",
            ConstraintKind::ParityMask => "ParityMask",
            ConstraintKind::InequalityEdge => "InequalityEdge",
            ConstraintKind::ConsecutiveEdge => "ConsecutiveEdge",
            ConstraintKind::Visibility => "Visibility",
            ConstraintKind::Illumination => "Illumination",
            ConstraintKind::GravityFill => "GravityFill",
            ConstraintKind::Bijection => "Bijection",
            ConstraintKind::Connectivity => "Connectivity",
            ConstraintKind::FleetComposition => "FleetComposition",
            ConstraintKind::NeighborMineCount => "NeighborMineCount",
            ConstraintKind::AdjacentNotEqual => "AdjacentNotEqual",
        }
    }
}

/// One broken constraint: which rule, where, and why.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Violation {
    pub constraint: String,
    pub scope: String,
    pub cells: Vec<Coord>,
    pub detail: String,
}

/// Adjacency pattern for [`Constraint::NoTouch`].
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum TouchMode {
    /// No two marked cells orthogonally adjacent (Hitori shading).
    Orthogonal,
    /// No two marked cells diagonally adjacent; orthogonal contact allowed
    /// (Battle-Ships, where orthogonal runs form one ship).
    DiagonalOnly,
    /// No contact at all, orthogonal or diagonal (stars, tents).
    Any,
}

/// Which cells a constraint reads; drives the solver's incidence lists.
pub enum Touches {
    All,
    Cells(Vec<Coord>),
}

#[derive(Clone, Debug)]
pub enum Constraint {
    /// Assigned symbols in `cells` pairwise distinct.
    AllDifferent { scope: String, cells: Vec<Coord> },
    /// Hitori: among cells assigned `keep`, the structural `values` must be
    /// pairwise distinct. Reports as AllDifferent.
    AllDifferentGiven { scope: String, cells: Vec<Coord>, values: Vec<u32>, keep: Symbol },
    /// Digit cells summing to `target`; every cell contributes at least
    /// `min_value` and at most `max_value` once filled.
    LineSum { scope: String, cells: Vec<Coord>, target: u32, min_value: u32, max_value: u32 },
    /// Kakurasu: sum of `weights[i]` over cells assigned `fill` equals `target`.
    WeightedLineSum { scope: String, cells: Vec<Coord>, weights: Vec<u32>, target: u32, fill: Symbol },
    /// Exactly `target` cells assigned `symbol`.
    LineCount { scope: String, cells: Vec<Coord>, symbol: Symbol, target: u32 },
    /// Nonogram line: shaded runs along `cells` (in order) must realize `runs`.
    RunLengths { scope: String, cells: Vec<Coord>, runs: Vec<u32>, fill: Symbol },
    /// Binairo: no run of more than `limit` equal assigned symbols along `cells`.
    MaxRunLength { scope: String, cells: Vec<Coord>, limit: usize },
    /// Grid-wide adjacency ban for `symbol`.
    NoTouch { symbol: Symbol, mode: TouchMode },
    /// Light-Up numbered wall: exactly `target` cells assigned `symbol` among
    /// the four neighbours of `center`.
    AdjacencyCount { center: Coord, symbol: Symbol, target: u32 },
    /// Field-Explore clue: exactly `target` cells assigned `symbol` among the
    /// eight neighbours of `center`.
    NeighborMineCount { center: Coord, symbol: Symbol, target: u32 },
    /// Odd-Even-Sudoku: the digit at `cell` must have the given parity.
    ParityMask { cell: Coord, even: bool },
    /// Futoshiki: digit at `small` < digit at `large`; `max_value` caps the scale.
    InequalityEdge { small: Coord, large: Coord, max_value: u32 },
    /// Renzoku: |a - b| == 1 iff `consecutive`.
    ConsecutiveEdge { a: Coord, b: Coord, consecutive: bool },
    /// Skyscraper: the count of left-to-right maxima along `cells` equals `clue`.
    Visibility { scope: String, cells: Vec<Coord>, clue: u32 },
    /// Light-Up: bulbs never see each other; on complete grids every open
    /// cell must be lit. Walls are Blocked cells.
    Illumination { bulb: Symbol, open: Symbol },
    /// Aquarium region: water fills bottom rows first with a flat level, so no
    /// open cell may sit on or below a filled row of the same region.
    GravityFillRegion { scope: String, cells: Vec<Coord>, fill: Symbol },
    /// Thermometer: `cells` run bulb to tip; fill is a prefix.
    GravityFillPath { scope: String, cells: Vec<Coord>, fill: Symbol },
    /// Trees-and-Tents: a perfect matching must pair `trees` with adjacent
    /// `tent` cells, one-to-one.
    Bijection { trees: Vec<Coord>, tent: Symbol },
    /// Hitori: cells not shaded with `shade` form one orthogonal component.
    Connectivity { shade: Symbol },
    /// Battle-Ships: orthogonal components of `ship` cells are straight lines
    /// whose lengths form exactly the `fleet` multiset.
    FleetComposition { fleet: Vec<u32>, ship: Symbol },
    /// Kakuro variant: orthogonally adjacent digits differ.
    AdjacentNotEqual { scope: String },
}

fn assigned(grid: &Grid, at: Coord) -> Option<Symbol> {
    grid.get(at).ok().and_then(CellState::symbol)
}

fn is_unknown(grid: &Grid, at: Coord) -> bool {
    grid.get(at) == Ok(CellState::Unknown)
}

impl Constraint {
    pub fn kind(&self) -> ConstraintKind {
        match self {
            Constraint::AllDifferent { .. } | Constraint::AllDifferentGiven { .. } => {
                ConstraintKind::AllDifferent
            }
            Constraint::LineSum { .. } => ConstraintKind::LineSum,
            Constraint::WeightedLineSum { .. } => ConstraintKind::WeightedLineSum,
            Constraint::LineCount { .. } => ConstraintKind::LineCount,
            Constraint::RunLengths { .. } => ConstraintKind::RunLengths,
            Constraint::MaxRunLength { .. } => ConstraintKind::MaxRunLength,
            Constraint::NoTouch { .. } => ConstraintKind::NoTouch,
            Constraint::AdjacencyCount { .. } => ConstraintKind::AdjacencyCount,
            Constraint::ParityMask { .. } => ConstraintKind::ParityMask,
            Constraint::InequalityEdge { .. } => ConstraintKind::InequalityEdge,
            Constraint::ConsecutiveEdge { .. } => ConstraintKind::ConsecutiveEdge,
            Constraint::Visibility { .. } => ConstraintKind::Visibility,
            Constraint::Illumination { .. } => ConstraintKind::Illumination,
            Constraint::GravityFillRegion { .. } | Constraint::GravityFillPath { .. } => {
                ConstraintKind::GravityFill
            }
            Constraint::Bijection { .. } => ConstraintKind::Bijection,
            Constraint::Connectivity { .. } => ConstraintKind::Connectivity,
            Constraint::FleetComposition { .. } => ConstraintKind::FleetComposition,
            Constraint::NeighborMineCount { .. } => ConstraintKind::NeighborMineCount,
            Constraint::AdjacentNotEqual { .. } => ConstraintKind::AdjacentNotEqual,
        }
    }

    pub fn scope_label(&self) -> String {
        match self {
            Constraint::AllDifferent { scope, .. }
            | Constraint::AllDifferentGiven { scope, .. }
            | Constraint::LineSum { scope, .. }
            | Constraint::WeightedLineSum { scope, .. }
            | Constraint::LineCount { scope, .. }
            | Constraint::RunLengths { scope, .. }
            | Constraint::MaxRunLength { scope, .. }
            | Constraint::Visibility { scope, .. }
            | Constraint::GravityFillRegion { scope, .. }
            | Constraint::GravityFillPath { scope, .. }
            | Constraint::AdjacentNotEqual { scope } => scope.clone(),
            Constraint::NoTouch { symbol, .. } => format!("touch({symbol})"),
            Constraint::AdjacencyCount { center, .. } => format!("wall {center}"),
            Constraint::NeighborMineCount { center, .. } => format!("clue {center}"),
            Constraint::ParityMask { cell, .. } => format!("parity {cell}"),
            Constraint::InequalityEdge { small, large, .. } => format!("{small} < {large}"),
            Constraint::ConsecutiveEdge { a, b, .. } => format!("edge {a}-{b}"),
            Constraint::Illumination { .. } => "illumination".to_string(),
            Constraint::Bijection { .. } => "tree-tent matching".to_string(),
            Constraint::Connectivity { .. } => "connectivity".to_string(),
            Constraint::FleetComposition { .. } => "fleet".to_string(),
        }
    }

    fn violation(&self, cells: Vec<Coord>, detail: String) -> Violation {
        Violation {
            constraint: self.kind().name().to_string(),
            scope: self.scope_label(),
            cells,
            detail,
        }
    }

    /// Cells whose assignment can change this constraint's verdict.
    pub fn touches(&self) -> Touches {
        match self {
            Constraint::AllDifferent { cells, .. }
            | Constraint::AllDifferentGiven { cells, .. }
            | Constraint::LineSum { cells, .. }
            | Constraint::WeightedLineSum { cells, .. }
            | Constraint::LineCount { cells, .. }
            | Constraint::RunLengths { cells, .. }
            | Constraint::MaxRunLength { cells, .. }
            | Constraint::Visibility { cells, .. }
            | Constraint::GravityFillRegion { cells, .. }
            | Constraint::GravityFillPath { cells, .. } => Touches::Cells(cells.clone()),
            Constraint::AdjacencyCount { center, .. }
            | Constraint::NeighborMineCount { center, .. } => {
                // Conservative superset: the centre plus its 8-neighbourhood.
                let mut v = vec![*center];
                for dr in -1i64..=1 {
                    for dc in -1i64..=1 {
                        let (r, c) = (center.row as i64 + dr, center.col as i64 + dc);
                        if r >= 0 && c >= 0 {
                            v.push(Coord::new(r as usize, c as usize));
                        }
                    }
                }
                Touches::Cells(v)
            }
            Constraint::ParityMask { cell, .. } => Touches::Cells(vec![*cell]),
            Constraint::InequalityEdge { small, large, .. } => Touches::Cells(vec![*small, *large]),
            Constraint::ConsecutiveEdge { a, b, .. } => Touches::Cells(vec![*a, *b]),
            Constraint::NoTouch { .. }
            | Constraint::Illumination { .. }
            | Constraint::Bijection { .. }
            | Constraint::Connectivity { .. }
            | Constraint::FleetComposition { .. }
            | Constraint::AdjacentNotEqual { .. } => Touches::All,
        }
    }

    /// First violation decidable on `grid`, or None.
    pub fn find_violation(&self, grid: &Grid) -> Option<Violation> {
        match self {
            Constraint::AllDifferent { cells, .. } => self.check_all_different(grid, cells),
            Constraint::AllDifferentGiven { cells, values, keep, .. } => {
                self.check_all_different_given(grid, cells, values, *keep)
            }
            Constraint::LineSum { cells, target, min_value, max_value, .. } => {
                self.check_line_sum(grid, cells, *target, *min_value, *max_value)
            }
            Constraint::WeightedLineSum { cells, weights, target, fill, .. } => {
                self.check_weighted_sum(grid, cells, weights, *target, *fill)
            }
            Constraint::LineCount { cells, symbol, target, .. } => {
                self.check_line_count(grid, cells, *symbol, *target)
            }
            Constraint::RunLengths { cells, runs, fill, .. } => {
                self.check_run_lengths(grid, cells, runs, *fill)
            }
            Constraint::MaxRunLength { cells, limit, .. } => {
                self.check_max_run(grid, cells, *limit)
            }
            Constraint::NoTouch { symbol, mode } => self.check_no_touch(grid, *symbol, *mode),
            Constraint::AdjacencyCount { center, symbol, target } => {
                self.check_neighbor_count(grid, grid.neighbors4(*center), *symbol, *target)
            }
            Constraint::NeighborMineCount { center, symbol, target } => {
                self.check_neighbor_count(grid, grid.neighbors8(*center), *symbol, *target)
            }
            Constraint::ParityMask { cell, even } => self.check_parity(grid, *cell, *even),
            Constraint::InequalityEdge { small, large, max_value } => {
                self.check_inequality(grid, *small, *large, *max_value)
            }
            Constraint::ConsecutiveEdge { a, b, consecutive } => {
                self.check_consecutive(grid, *a, *b, *consecutive)
            }
            Constraint::Visibility { cells, clue, .. } => self.check_visibility(grid, cells, *clue),
            Constraint::Illumination { bulb, open } => self.check_illumination(grid, *bulb, *open),
            Constraint::GravityFillRegion { cells, fill, .. } => {
                self.check_gravity_region(grid, cells, *fill)
            }
            Constraint::GravityFillPath { cells, fill, .. } => {
                self.check_gravity_path(grid, cells, *fill)
            }
            Constraint::Bijection { trees, tent } => self.check_bijection(grid, trees, *tent),
            Constraint::Connectivity { shade } => self.check_connectivity(grid, *shade),
            Constraint::FleetComposition { fleet, ship } => self.check_fleet(grid, fleet, *ship),
            Constraint::AdjacentNotEqual { .. } => self.check_adjacent_not_equal(grid),
        }
    }

    /// Extra solver-only pruning: states that cannot reach any solution even
    /// though no immediate violation exists yet. Kept separate from
    /// [`find_violation`] so action-validity and candidate semantics stay at
    /// the "immediate rule violation" level the queries define.
    pub fn prunes_search(&self, grid: &Grid) -> bool {
        match self {
            Constraint::Illumination { bulb, open } => {
                self.lightup_has_unlightable_cell(grid, *bulb, *open)
            }
            _ => false,
        }
    }

    fn check_all_different(&self, grid: &Grid, cells: &[Coord]) -> Option<Violation> {
        let mut seen: Vec<(Symbol, Coord)> = Vec::with_capacity(cells.len());
        for &at in cells {
            if let Some(sym) = assigned(grid, at) {
                if let Some(&(_, prev)) = seen.iter().find(|(s, _)| *s == sym) {
                    return Some(self.violation(
                        vec![prev, at],
                        format!("duplicate {sym} at {prev} and {at}"),
                    ));
                }
                seen.push((sym, at));
            }
        }
        None
    }

    fn check_all_different_given(
        &self,
        grid: &Grid,
        cells: &[Coord],
        values: &[u32],
        keep: Symbol,
    ) -> Option<Violation> {
        let mut seen: Vec<(u32, Coord)> = Vec::new();
        for (&at, &value) in cells.iter().zip(values) {
            if assigned(grid, at) == Some(keep) {
                if let Some(&(_, prev)) = seen.iter().find(|(v, _)| *v == value) {
                    return Some(self.violation(
                        vec![prev, at],
                        format!("kept cells {prev} and {at} repeat {value}"),
                    ));
                }
                seen.push((value, at));
            }
        }
        None
    }

    fn check_line_sum(
        &self,
        grid: &Grid,
        cells: &[Coord],
        target: u32,
        min_value: u32,
        max_value: u32,
    ) -> Option<Violation> {
        let mut sum = 0u32;
        let mut open = 0u32;
        for &at in cells {
            match assigned(grid, at) {
                Some(sym) => sum += sym.as_digit().unwrap_or(0),
                None if is_unknown(grid, at) => open += 1,
                None => {}
            }
        }
        if sum + min_value * open > target {
            return Some(self.violation(
                cells.to_vec(),
                format!("sum must exceed target {target} (already {sum} with {open} open)"),
            ));
        }
        if sum + max_value * open < target {
            return Some(self.violation(
                cells.to_vec(),
                format!("sum cannot reach target {target} (at most {})", sum + max_value * open),
            ));
        }
        None
    }

    fn check_weighted_sum(
        &self,
        grid: &Grid,
        cells: &[Coord],
        weights: &[u32],
        target: u32,
        fill: Symbol,
    ) -> Option<Violation> {
        let mut sum = 0u32;
        let mut open = 0u32;
        for (&at, &w) in cells.iter().zip(weights) {
            if assigned(grid, at) == Some(fill) {
                sum += w;
            } else if is_unknown(grid, at) {
                open += w;
            }
        }
        if sum > target {
            return Some(
                self.violation(cells.to_vec(), format!("weighted sum {sum} exceeds {target}")),
            );
        }
        if sum + open < target {
            return Some(self.violation(
                cells.to_vec(),
                format!("weighted sum cannot reach {target} (at most {})", sum + open),
            ));
        }
        None
    }

    fn check_line_count(
        &self,
        grid: &Grid,
        cells: &[Coord],
        symbol: Symbol,
        target: u32,
    ) -> Option<Violation> {
        let mut count = 0u32;
        let mut open = 0u32;
        for &at in cells {
            if assigned(grid, at) == Some(symbol) {
                count += 1;
            } else if is_unknown(grid, at) {
                open += 1;
            }
        }
        if count > target {
            return Some(
                self.violation(cells.to_vec(), format!("{count} x {symbol} exceeds target {target}")),
            );
        }
        if count + open < target {
            return Some(self.violation(
                cells.to_vec(),
                format!("cannot reach {target} x {symbol} (at most {})", count + open),
            ));
        }
        None
    }

    fn check_run_lengths(
        &self,
        grid: &Grid,
        cells: &[Coord],
        runs: &[u32],
        fill: Symbol,
    ) -> Option<Violation> {
        // Cell classes along the line: forced fill, forced gap, or free.
        let n = cells.len();
        let state: Vec<Option<bool>> = cells
            .iter()
            .map(|&at| match grid.get(at).ok()? {
                CellState::Unknown => None,
                CellState::Assigned(s) => Some(s == fill),
                CellState::Blocked => Some(false),
            })
            .collect();
        // feasible[i][j]: cells[i..] can realize runs[j..].
        let m = runs.len();
        let mut feasible = vec![vec![false; m + 1]; n + 1];
        feasible[n][m] = true;
        for i in (0..n).rev() {
            // No runs left: the rest must all be gaps.
            feasible[i][m] = state[i] != Some(true) && feasible[i + 1][m];
        }
        for j in (0..m).rev() {
            let len = runs[j] as usize;
            for i in (0..n).rev() {
                let mut ok = false;
                // Lay a gap at i.
                if state[i] != Some(true) {
                    ok = feasible[i + 1][j];
                }
                // Lay the run at i, followed by a gap (or line end).
                if !ok && i + len <= n && (i..i + len).all(|k| state[k] != Some(false)) {
                    if i + len == n {
                        ok = j + 1 == m;
                    } else if state[i + len] != Some(true) {
                        ok = feasible[i + len + 1][j + 1];
                    }
                }
                feasible[i][j] = ok;
            }
        }
        if feasible[0][0] {
            None
        } else {
            Some(self.violation(cells.to_vec(), format!("no completion realizes runs {runs:?}")))
        }
    }

    fn check_max_run(&self, grid: &Grid, cells: &[Coord], limit: usize) -> Option<Violation> {
        let mut run: Vec<Coord> = Vec::new();
        let mut current: Option<Symbol> = None;
        for &at in cells {
            let sym = assigned(grid, at);
            if sym.is_some() && sym == current {
                run.push(at);
            } else {
                run.clear();
                run.push(at);
                current = sym;
            }
            if current.is_some() && run.len() > limit {
                return Some(self.violation(
                    run.clone(),
                    format!("run of {} {} exceeds limit {limit}", run.len(), current.unwrap()),
                ));
            }
        }
        None
    }

    fn check_no_touch(&self, grid: &Grid, symbol: Symbol, mode: TouchMode) -> Option<Violation> {
        // Forward offsets only, so each pair is inspected once.
        let offsets: &[(i64, i64)] = match mode {
            TouchMode::Orthogonal => &[(0, 1), (1, 0)],
            TouchMode::DiagonalOnly => &[(1, -1), (1, 1)],
            TouchMode::Any => &[(0, 1), (1, -1), (1, 0), (1, 1)],
        };
        for at in grid.coords() {
            if assigned(grid, at) != Some(symbol) {
                continue;
            }
            for &(dr, dc) in offsets {
                let (r, c) = (at.row as i64 + dr, at.col as i64 + dc);
                if r < 0 || c < 0 {
                    continue;
                }
                let other = Coord::new(r as usize, c as usize);
                if grid.contains(other) && assigned(grid, other) == Some(symbol) {
                    return Some(self.violation(
                        vec![at, other],
                        format!("{symbol} cells touch at {at} and {other}"),
                    ));
                }
            }
        }
        None
    }

    fn check_neighbor_count(
        &self,
        grid: &Grid,
        neighbors: Vec<Coord>,
        symbol: Symbol,
        target: u32,
    ) -> Option<Violation> {
        let mut count = 0u32;
        let mut open = 0u32;
        for &at in &neighbors {
            if assigned(grid, at) == Some(symbol) {
                count += 1;
            } else if is_unknown(grid, at) {
                open += 1;
            }
        }
        if count > target {
            return Some(
                self.violation(neighbors, format!("{count} adjacent {symbol} exceeds {target}")),
            );
        }
        if count + open < target {
            return Some(self.violation(
                neighbors,
                format!("cannot reach {target} adjacent {symbol} (at most {})", count + open),
            ));
        }
        None
    }

    fn check_parity(&self, grid: &Grid, cell: Coord, even: bool) -> Option<Violation> {
        let digit = assigned(grid, cell)?.as_digit()?;
        if (digit % 2 == 0) != even {
            let want = if even { "even" } else { "odd" };
            return Some(self.violation(vec![cell], format!("{digit} at {cell} must be {want}")));
        }
        None
    }

    fn check_inequality(
        &self,
        grid: &Grid,
        small: Coord,
        large: Coord,
        max_value: u32,
    ) -> Option<Violation> {
        let a = assigned(grid, small).and_then(Symbol::as_digit);
        let b = assigned(grid, large).and_then(Symbol::as_digit);
        match (a, b) {
            (Some(a), Some(b)) if a >= b => {
                Some(self.violation(vec![small, large], format!("{a} is not less than {b}")))
            }
            (Some(a), None) if a == max_value => Some(self.violation(
                vec![small, large],
                format!("{a} at {small} leaves nothing larger for {large}"),
            )),
            (None, Some(b)) if b == 1 => Some(self.violation(
                vec![small, large],
                format!("1 at {large} leaves nothing smaller for {small}"),
            )),
            _ => None,
        }
    }

    fn check_consecutive(
        &self,
        grid: &Grid,
        a: Coord,
        b: Coord,
        consecutive: bool,
    ) -> Option<Violation> {
        let x = assigned(grid, a).and_then(Symbol::as_digit)?;
        let y = assigned(grid, b).and_then(Symbol::as_digit)?;
        let diff = x.abs_diff(y);
        if consecutive && diff != 1 {
            return Some(
                self.violation(vec![a, b], format!("{x} and {y} must be consecutive (dot)")),
            );
        }
        if !consecutive && diff == 1 {
            return Some(
                self.violation(vec![a, b], format!("{x} and {y} must not be consecutive (no dot)")),
            );
        }
        None
    }

    fn check_visibility(&self, grid: &Grid, cells: &[Coord], clue: u32) -> Option<Violation> {
        let n = cells.len() as u32;
        let mut seen = 0u32;
        let mut tallest = 0u32;
        let mut prefix = 0usize;
        for &at in cells {
            match assigned(grid, at).and_then(Symbol::as_digit) {
                Some(h) => {
                    if h > tallest {
                        tallest = h;
                        seen += 1;
                    }
                    prefix += 1;
                }
                None => break,
            }
        }
        let rest = (cells.len() - prefix) as u32;
        if seen > clue {
            return Some(self.violation(
                cells.to_vec(),
                format!("already {seen} visible, clue is {clue}"),
            ));
        }
        let at_most = seen + rest.min(n - tallest);
        if at_most < clue {
            return Some(self.violation(
                cells.to_vec(),
                format!("at most {at_most} can become visible, clue is {clue}"),
            ));
        }
        None
    }

    /// Bulbs light along rows/cols until a Blocked wall. Immediate violation:
    /// a bulb seeing a bulb. Complete grids only: an `open` cell out of every
    /// bulb's reach.
    fn check_illumination(&self, grid: &Grid, bulb: Symbol, open: Symbol) -> Option<Violation> {
        if let Some(v) = self.bulbs_see_each_other(grid, bulb) {
            return Some(v);
        }
        if grid.is_complete() {
            let lit = lit_mask(grid, bulb);
            for at in grid.coords() {
                if assigned(grid, at) == Some(open) && !lit[at.row * grid.cols() + at.col] {
                    return Some(
                        self.violation(vec![at], format!("cell {at} is never illuminated")),
                    );
                }
            }
        }
        None
    }

    fn bulbs_see_each_other(&self, grid: &Grid, bulb: Symbol) -> Option<Violation> {
        // Scan every row and column, resetting at walls.
        for r in 0..grid.rows() {
            let mut last: Option<Coord> = None;
            for c in 0..grid.cols() {
                let at = Coord::new(r, c);
                match grid.get(at).ok()? {
                    CellState::Blocked => last = None,
                    CellState::Assigned(s) if s == bulb => {
                        if let Some(prev) = last {
                            return Some(self.violation(
                                vec![prev, at],
                                format!("bulbs at {prev} and {at} illuminate each other"),
                            ));
                        }
                        last = Some(at);
                    }
                    _ => {}
                }
            }
        }
        for c in 0..grid.cols() {
            let mut last: Option<Coord> = None;
            for r in 0..grid.rows() {
                let at = Coord::new(r, c);
                match grid.get(at).ok()? {
                    CellState::Blocked => last = None,
                    CellState::Assigned(s) if s == bulb => {
                        if let Some(prev) = last {
                            return Some(self.violation(
                                vec![prev, at],
                                format!("bulbs at {prev} and {at} illuminate each other"),
                            ));
                        }
                        last = Some(at);
                    }
                    _ => {}
                }
            }
        }
        None
    }

    /// A decided-open cell with no remaining way to be lit dooms the branch
    /// even though it is not an "immediate" rule violation.
    fn lightup_has_unlightable_cell(&self, grid: &Grid, bulb: Symbol, open: Symbol) -> bool {
        if grid.is_complete() {
            return false; // complete grids are fully judged by find_violation
        }
        let lit = lit_mask(grid, bulb);
        'cells: for at in grid.coords() {
            if assigned(grid, at) != Some(open) || lit[at.row * grid.cols() + at.col] {
                continue;
            }
            // Any Unknown cell on its sight lines could still become a bulb.
            for (dr, dc) in [(0i64, 1i64), (0, -1), (1, 0), (-1, 0)] {
                let (mut r, mut c) = (at.row as i64 + dr, at.col as i64 + dc);
                while r >= 0 && c >= 0 && (r as usize) < grid.rows() && (c as usize) < grid.cols() {
                    match grid.get(Coord::new(r as usize, c as usize)) {
                        Ok(CellState::Blocked) => break,
                        Ok(CellState::Unknown) => continue 'cells,
                        _ => {}
                    }
                    r += dr;
                    c += dc;
                }
            }
            return true;
        }
        false
    }

    fn check_gravity_region(&self, grid: &Grid, cells: &[Coord], fill: Symbol) -> Option<Violation> {
        let mut lowest_open: Option<Coord> = None;
        let mut highest_fill: Option<Coord> = None;
        for &at in cells {
            match assigned(grid, at) {
                Some(s) if s == fill => {
                    if highest_fill.map_or(true, |p| at.row < p.row) {
                        highest_fill = Some(at);
                    }
                }
                Some(_) => {
                    if lowest_open.map_or(true, |p| at.row > p.row) {
                        lowest_open = Some(at);
                    }
                }
                None => {}
            }
        }
        if let (Some(fill_at), Some(open_at)) = (highest_fill, lowest_open) {
            if open_at.row >= fill_at.row {
                return Some(self.violation(
                    vec![fill_at, open_at],
                    format!("water at {fill_at} but {open_at} on or below that level is empty"),
                ));
            }
        }
        None
    }

    fn check_gravity_path(&self, grid: &Grid, cells: &[Coord], fill: Symbol) -> Option<Violation> {
        let mut first_gap: Option<Coord> = None;
        for &at in cells {
            match assigned(grid, at) {
                Some(s) if s == fill => {
                    if let Some(gap) = first_gap {
                        return Some(self.violation(
                            vec![gap, at],
                            format!("filled {at} past the empty cell {gap} (fill from the bulb)"),
                        ));
                    }
                }
                Some(_) => {
                    if first_gap.is_none() {
                        first_gap = Some(at);
                    }
                }
                None => {
                    // An unknown cell may still become filled; a later fill
                    // after an assigned gap is what breaks the prefix rule.
                }
            }
        }
        None
    }

    fn check_bijection(&self, grid: &Grid, trees: &[Coord], tent: Symbol) -> Option<Violation> {
        let tents: Vec<Coord> =
            grid.coords().filter(|&at| assigned(grid, at) == Some(tent)).collect();
        // Every tree must claim a distinct adjacent cell that can still hold
        // a tent (assigned tent or unknown).
        let tree_options: Vec<Vec<usize>> = trees
            .iter()
            .map(|&tree| {
                grid.neighbors4(tree)
                    .into_iter()
                    .filter(|&nb| {
                        assigned(grid, nb) == Some(tent) || is_unknown(grid, nb)
                    })
                    .map(|nb| nb.row * grid.cols() + nb.col)
                    .collect()
            })
            .collect();
        if max_bipartite_matching(&tree_options) < trees.len() {
            return Some(self.violation(
                trees.to_vec(),
                "some tree can no longer be paired with its own tent".to_string(),
            ));
        }
        // Every placed tent must claim a distinct adjacent tree.
        let tent_options: Vec<Vec<usize>> = tents
            .iter()
            .map(|&t| {
                grid.neighbors4(t)
                    .into_iter()
                    .filter_map(|nb| trees.iter().position(|&tr| tr == nb))
                    .collect()
            })
            .collect();
        if max_bipartite_matching(&tent_options) < tents.len() {
            return Some(self.violation(
                tents,
                "some tent cannot claim its own adjacent tree".to_string(),
            ));
        }
        None
    }

    fn check_connectivity(&self, grid: &Grid, shade: Symbol) -> Option<Violation> {
        // Walkable: anything that is not (yet) shaded. Anchors: cells already
        // decided open; all of them must sit in one walkable component.
        let cols = grid.cols();
        let anchors: Vec<Coord> = grid
            .coords()
            .filter(|&at| matches!(grid.get(at), Ok(CellState::Assigned(s)) if s != shade))
            .collect();
        if anchors.len() <= 1 {
            return None;
        }
        let mut seen = vec![false; grid.len()];
        let mut queue = vec![anchors[0]];
        seen[anchors[0].row * cols + anchors[0].col] = true;
        while let Some(at) = queue.pop() {
            for nb in grid.neighbors4(at) {
                let idx = nb.row * cols + nb.col;
                let walkable = match grid.get(nb) {
                    Ok(CellState::Assigned(s)) => s != shade,
                    Ok(CellState::Unknown) => true,
                    _ => false,
                };
                if walkable && !seen[idx] {
                    seen[idx] = true;
                    queue.push(nb);
                }
            }
        }
        for &at in &anchors[1..] {
            if !seen[at.row * cols + at.col] {
                return Some(self.violation(
                    vec![anchors[0], at],
                    format!("open cells {} and {at} are cut off from each other", anchors[0]),
                ));
            }
        }
        None
    }

    fn check_fleet(&self, grid: &Grid, fleet: &[u32], ship: Symbol) -> Option<Violation> {
        let cols = grid.cols();
        let total: u32 = fleet.iter().sum();
        let longest = fleet.iter().copied().max().unwrap_or(0);
        let mut seen = vec![false; grid.len()];
        let mut lengths: Vec<u32> = Vec::new();
        let mut ship_cells = 0u32;
        let mut open = 0u32;
        for at in grid.coords() {
            if is_unknown(grid, at) {
                open += 1;
                continue;
            }
            if assigned(grid, at) != Some(ship) || seen[at.row * cols + at.col] {
                continue;
            }
            // Flood one component.
            let mut comp = vec![at];
            let mut queue = vec![at];
            seen[at.row * cols + at.col] = true;
            while let Some(cur) = queue.pop() {
                for nb in grid.neighbors4(cur) {
                    if assigned(grid, nb) == Some(ship) && !seen[nb.row * cols + nb.col] {
                        seen[nb.row * cols + nb.col] = true;
                        comp.push(nb);
                        queue.push(nb);
                    }
                }
            }
            ship_cells += comp.len() as u32;
            let straight = comp.iter().all(|c| c.row == comp[0].row)
                || comp.iter().all(|c| c.col == comp[0].col);
            if !straight {
                return Some(
                    self.violation(comp, "ship cells must form a straight line".to_string()),
                );
            }
            if comp.len() as u32 > longest {
                return Some(self.violation(
                    comp.clone(),
                    format!("ship of length {} exceeds the largest in the fleet", comp.len()),
                ));
            }
            lengths.push(comp.len() as u32);
        }
        if ship_cells > total {
            return Some(self.violation(
                Vec::new(),
                format!("{ship_cells} ship cells exceed the fleet total {total}"),
            ));
        }
        if ship_cells + open < total {
            return Some(self.violation(
                Vec::new(),
                format!("only {} cells can still be ships, fleet needs {total}", ship_cells + open),
            ));
        }
        if grid.is_complete() {
            let mut want = fleet.to_vec();
            want.sort_unstable();
            lengths.sort_unstable();
            if lengths != want {
                return Some(self.violation(
                    Vec::new(),
                    format!("ship lengths {lengths:?} do not match the fleet {want:?}"),
                ));
            }
        }
        None
    }

    fn check_adjacent_not_equal(&self, grid: &Grid) -> Option<Violation> {
        for at in grid.coords() {
            let Some(sym) = assigned(grid, at) else { continue };
            for other in [Coord::new(at.row, at.col + 1), Coord::new(at.row + 1, at.col)] {
                if grid.contains(other) && assigned(grid, other) == Some(sym) {
                    return Some(self.violation(
                        vec![at, other],
                        format!("adjacent cells {at} and {other} both hold {sym}"),
                    ));
                }
            }
        }
        None
    }
}

/// Cells lit by any bulb (bulb cells themselves count as lit).
fn lit_mask(grid: &Grid, bulb: Symbol) -> Vec<bool> {
    let cols = grid.cols();
    let mut lit = vec![false; grid.len()];
    for at in grid.coords() {
        if assigned(grid, at) != Some(bulb) {
            continue;
        }
        lit[at.row * cols + at.col] = true;
        for (dr, dc) in [(0i64, 1i64), (0, -1), (1, 0), (-1, 0)] {
            let (mut r, mut c) = (at.row as i64 + dr, at.col as i64 + dc);
            while r >= 0 && c >= 0 && (r as usize) < grid.rows() && (c as usize) < cols {
                let cur = Coord::new(r as usize, c as usize);
                if grid.get(cur) == Ok(CellState::Blocked) {
                    break;
                }
                lit[cur.row * cols + cur.col] = true;
                r += dr;
                c += dc;
            }
        }
    }
    lit
}

/// Kuhn's augmenting-path matching. `options[i]` lists the right-side ids
/// available to left node `i`; returns the size of a maximum matching.
fn max_bipartite_matching(options: &[Vec<usize>]) -> usize {
    fn try_assign(
        left: usize,
        options: &[Vec<usize>],
        owner: &mut std::collections::HashMap<usize, usize>,
        visited: &mut Vec<bool>,
    ) -> bool {
        for &right in &options[left] {
            if let Some(&holder) = owner.get(&right) {
                if !visited[holder] {
                    visited[holder] = true;
                    if try_assign(holder, options, owner, visited) {
                        owner.insert(right, left);
                        return true;
                    }
                }
            } else {
                owner.insert(right, left);
                return true;
            }
        }
        false
    }

    let mut owner: std::collections::HashMap<usize, usize> = std::collections::HashMap::new();
    let mut matched = 0;
    for left in 0..options.len() {
        let mut visited = vec![false; options.len()];
        visited[left] = true;
        if try_assign(left, options, &mut owner, &mut visited) {
            matched += 1;
        }
    }
    matched
}

/// Runs every constraint and collects one violation per broken constraint.
pub fn check_all(constraints: &[Constraint], grid: &Grid) -> Vec<Violation> {
    constraints.iter().filter_map(|c| c.find_violation(grid)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::{SYM_E, SYM_S, SYM_TT};

    fn grid_of(tokens: &[&str]) -> Grid {
        let rows: Vec<Vec<String>> = tokens
            .iter()
            .map(|r| r.split_whitespace().map(str::to_string).collect())
            .collect();
        Grid::from_tokens(&rows).unwrap()
    }

    fn line(cells: &[(usize, usize)]) -> Vec<Coord> {
        cells.iter().map(|&(r, c)| Coord::new(r, c)).collect()
    }

    #[test]
    fn all_different_partial_and_dup() {
        let c = Constraint::AllDifferent {
            scope: "row 0".into(),
            cells: line(&[(0, 0), (0, 1), (0, 2), (0, 3)]),
        };
        assert!(c.find_violation(&grid_of(&["1 * * 2", "* * * *"])).is_none());
        let v = c.find_violation(&grid_of(&["1 * 1 *", "* * * *"])).unwrap();
        assert_eq!(v.constraint, "AllDifferent");
        assert_eq!(v.cells, line(&[(0, 0), (0, 2)]));
    }

    #[test]
    fn line_sum_bounds() {
        let c = Constraint::LineSum {
            scope: "cage".into(),
            cells: line(&[(0, 0), (0, 1)]),
            target: 5,
            min_value: 1,
            max_value: 4,
        };
        assert!(c.find_violation(&grid_of(&["1 * *", "* * *"])).is_none());
        // 1 + at most 4 = 5 reachable; 4+4=8 > 5 forced? 4 + min 1 = 5 ok.
        assert!(c.find_violation(&grid_of(&["4 * *", "* * *"])).is_none());
        // 2 assigned cells summing wrong.
        assert!(c.find_violation(&grid_of(&["4 2 *", "* * *"])).is_some());
        // Unreachable: 1 + 1 < 5 complete.
        assert!(c.find_violation(&grid_of(&["1 1 *", "* * *"])).is_some());
    }

    #[test]
    fn run_lengths_dp() {
        let cells = line(&[(0, 0), (0, 1), (0, 2), (0, 3)]);
        let c = Constraint::RunLengths {
            scope: "row 0".into(),
            cells,
            runs: vec![2, 1],
            fill: SYM_S,
        };
        assert!(c.find_violation(&grid_of(&["* * * *", "* * * *"])).is_none());
        assert!(c.find_violation(&grid_of(&["s s e s", "* * * *"])).is_none());
        // "s e s e" cannot place runs [2,1].
        assert!(c.find_violation(&grid_of(&["s e s e", "* * * *"])).is_some());
        // Middle gap forced: "e s" prefix leaves only 3 cells for 2+1+gap.
        assert!(c.find_violation(&grid_of(&["e * * *", "* * * *"])).is_some());
    }

    #[test]
    fn max_run_window() {
        let cells = line(&[(0, 0), (0, 1), (0, 2), (0, 3)]);
        let c = Constraint::MaxRunLength { scope: "row 0".into(), cells, limit: 2 };
        assert!(c.find_violation(&grid_of(&["w w * w", "* * * *"])).is_none());
        assert!(c.find_violation(&grid_of(&["w w w *", "* * * *"])).is_some());
        assert!(c.find_violation(&grid_of(&["b w w b", "* * * *"])).is_none());
    }

    #[test]
    fn no_touch_modes() {
        let diag = Constraint::NoTouch { symbol: SYM_S, mode: TouchMode::DiagonalOnly };
        assert!(diag.find_violation(&grid_of(&["s s *", "* * *"])).is_none());
        assert!(diag.find_violation(&grid_of(&["s * *", "* s *"])).is_some());
        let any = Constraint::NoTouch { symbol: SYM_S, mode: TouchMode::Any };
        assert!(any.find_violation(&grid_of(&["s s *", "* * *"])).is_some());
        let orth = Constraint::NoTouch { symbol: SYM_S, mode: TouchMode::Orthogonal };
        assert!(orth.find_violation(&grid_of(&["s * *", "* s *"])).is_none());
        assert!(orth.find_violation(&grid_of(&["s * *", "s * *"])).is_some());
    }

    #[test]
    fn visibility_bounds() {
        let cells = line(&[(0, 0), (0, 1), (0, 2), (0, 3)]);
        let c = Constraint::Visibility { scope: "left row 0".into(), cells, clue: 2 };
        assert!(c.find_violation(&grid_of(&["* * * *", "* * * *"])).is_none());
        // 4 first: exactly 1 visible ever, clue 2 unreachable.
        assert!(c.find_violation(&grid_of(&["4 * * *", "* * * *"])).is_some());
        // 1 2 3 already shows 3 > 2.
        assert!(c.find_violation(&grid_of(&["1 2 3 *", "* * * *"])).is_some());
        assert!(c.find_violation(&grid_of(&["2 * * *", "* * * *"])).is_none());
    }

    #[test]
    fn illumination_immediate_and_complete() {
        // "w" tokens are walls here, so re-mark them Blocked the way
        // instance loading does.
        let walled = |tokens: &[&str]| {
            let mut g = grid_of(tokens);
            for at in g.coords().collect::<Vec<_>>() {
                if g.get(at).unwrap() == CellState::Assigned(crate::symbol::SYM_W) {
                    g.set(at, CellState::Blocked).unwrap();
                }
            }
            g
        };
        let c = Constraint::Illumination { bulb: SYM_S, open: SYM_E };
        // Bulbs see each other along a row.
        assert!(c.find_violation(&grid_of(&["s * s", "* * *"])).is_some());
        // Wall between them blocks the sight line.
        assert!(c.find_violation(&walled(&["s w s", "* * *"])).is_none());
        // Complete grid with an unlit cell.
        assert!(c.find_violation(&walled(&["s w e", "e w e"])).is_some());
        // Complete and fully lit.
        assert!(c.find_violation(&grid_of(&["s e e", "e s e"])).is_none());
        // Partial: coverage not judged yet.
        assert!(c.find_violation(&walled(&["s w *", "* w e"])).is_none());
        // An unknown on the sight line keeps the cell lightable (no prune)...
        assert!(!c.prunes_search(&walled(&["s w *", "* w e"])));
        // ...but a boxed-in open cell dooms the branch.
        assert!(c.find_violation(&walled(&["s w e", "* w e"])).is_none());
        assert!(c.prunes_search(&walled(&["s w e", "* w e"])));
    }

    #[test]
    fn gravity_region_levels() {
        let c = Constraint::GravityFillRegion {
            scope: "region 0".into(),
            cells: line(&[(0, 0), (0, 1), (1, 0), (1, 1)]),
            fill: SYM_S,
        };
        assert!(c.find_violation(&grid_of(&["* * *", "s s *"])).is_none());
        // Water above an empty cell in the same region.
        assert!(c.find_violation(&grid_of(&["s * *", "e * *"])).is_some());
        // Uneven level within one row.
        assert!(c.find_violation(&grid_of(&["s e *", "* * *"])).is_some());
    }

    #[test]
    fn gravity_path_prefix() {
        let c = Constraint::GravityFillPath {
            scope: "thermometer 0".into(),
            cells: line(&[(1, 0), (0, 0), (0, 1)]),
            fill: SYM_S,
        };
        assert!(c.find_violation(&grid_of(&["s *", "s *"])).is_none());
        // Gap between bulb and a later filled cell.
        assert!(c.find_violation(&grid_of(&["e s", "s *"])).is_some());
        assert!(c.find_violation(&grid_of(&["* s", "e *"])).is_some());
    }

    #[test]
    fn bijection_matching() {
        let trees = vec![Coord::new(0, 0), Coord::new(0, 2)];
        let c = Constraint::Bijection { trees, tent: SYM_TT };
        // Open board: fine.
        assert!(c.find_violation(&grid_of(&["tr * tr", "* * *"])).is_none());
        // A tent beside a tree is fine; a tent reaching no tree is not.
        assert!(c.find_violation(&grid_of(&["tr * tr", "* * tt"])).is_none());
        assert!(c
            .find_violation(&grid_of(&["tr * tr", "* * *", "* * tt"]))
            .is_some());
        // Two trees squeezed onto one shared open neighbour.
        assert!(c.find_violation(&grid_of(&["tr * tr", "* * e"])).is_none());
        assert!(c.find_violation(&grid_of(&["tr * tr", "e * e"])).is_some());
    }

    #[test]
    fn connectivity_forced_split() {
        let c = Constraint::Connectivity { shade: SYM_S };
        assert!(c.find_violation(&grid_of(&["e s e", "* * *"])).is_none());
        assert!(c.find_violation(&grid_of(&["e s e", "s s *"])).is_some());
    }

    #[test]
    fn fleet_partial_and_complete() {
        let c = Constraint::FleetComposition { fleet: vec![2, 1], ship: SYM_S };
        assert!(c.find_violation(&grid_of(&["s s *", "* * *", "* * *"])).is_none());
        // Bent component.
        assert!(c.find_violation(&grid_of(&["s s *", "s * *", "* * *"])).is_some());
        // Too long.
        assert!(c.find_violation(&grid_of(&["s s s", "* * *", "* * *"])).is_some());
        // Complete with wrong multiset.
        assert!(c.find_violation(&grid_of(&["s e e", "e e e", "e e s"])).is_some());
        // Complete and right.
        assert!(c.find_violation(&grid_of(&["s s e", "e e e", "s e e"])).is_none());
    }

    #[test]
    fn adjacent_not_equal() {
        let c = Constraint::AdjacentNotEqual { scope: "grid".into() };
        assert!(c.find_violation(&grid_of(&["1 2", "2 1"])).is_none());
        assert!(c.find_violation(&grid_of(&["1 1", "* *"])).is_some());
        assert!(c.find_violation(&grid_of(&["1 2", "1 *"])).is_some());
    }
}
