//! Solution-first generation: build a full solution plus its structural
//! clues, then reveal a difficulty-dependent fraction of cells.
//!
//! Everything is a pure function of (puzzle, size, seed); the reveal pass
//! draws from a separate RNG stream so clue layout and solution content
//! stay independently reproducible.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::grid::{CellState, Coord, Grid};
use crate::instance::{
    Cage, Condition, Difficulty, Dot, Inequality, InstanceError, NumberClue, PuzzleInstance,
    Structures, ViewClues, Wall,
};
use crate::rules::{PuzzleId, RuleError};
use crate::symbol::{Symbol, SYM_B, SYM_E, SYM_S, SYM_TR, SYM_TT, SYM_W};

const STREAM_SOLUTION: u64 = 0;
const STREAM_REVEAL: u64 = 1;

#[derive(Clone, Debug)]
pub struct DifficultyProfile {
    pub level: Difficulty,
    pub size: (usize, usize),
    /// Inclusive bounds on the revealed fraction, as exact rationals.
    pub reveal_ratio_range: ((u32, u32), (u32, u32)),
}

impl DifficultyProfile {
    /// The stock profile for a puzzle at a difficulty level; None when the
    /// level does not exist for that puzzle.
    pub fn standard(puzzle: PuzzleId, level: Difficulty) -> Option<Self> {
        let n = puzzle.size_for(level)?;
        Some(DifficultyProfile { level, size: (n, n), reveal_ratio_range: level.reveal_ratio_range() })
    }

    /// Test hook: force every cell to be revealed.
    pub fn with_full_reveal(mut self) -> Self {
        self.reveal_ratio_range = ((1, 1), (1, 1));
        self
    }
}

#[derive(Error, Debug)]
pub enum GenerateError {
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error("generation failed for {puzzle} at {rows}x{cols} (seed {seed}): {detail}")]
    GenerationFailed { puzzle: &'static str, rows: usize, cols: usize, seed: u64, detail: String },
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Inclusive reveal-count window for `total` cells under an exact rational
/// ratio range: the smallest and largest k with lo <= k/total <= hi.
pub fn reveal_bounds(total: usize, range: ((u32, u32), (u32, u32))) -> (usize, usize) {
    let ((la, lb), (ha, hb)) = range;
    let lo = (la as usize * total).div_ceil(lb as usize);
    let hi = (ha as usize * total) / hb as usize;
    (lo, hi)
}

/// Exact rational check that k/total lies within the ratio range.
pub fn within_reveal_range(k: usize, total: usize, range: ((u32, u32), (u32, u32))) -> bool {
    let ((la, lb), (ha, hb)) = range;
    k * lb as usize >= la as usize * total && k * hb as usize <= ha as usize * total
}

/// Builds a complete solution grid and its structural clues.
pub fn generate_solution(
    puzzle: PuzzleId,
    size: (usize, usize),
    seed: u64,
) -> Result<(Grid, Structures), GenerateError> {
    let def = puzzle.definition();
    def.legal_size(size.0, size.1)?;
    let n = size.0;
    let mut rng = rng_for(seed, STREAM_SOLUTION);
    let made = match puzzle {
        PuzzleId::Aquarium => aquarium(n, &mut rng),
        PuzzleId::BattleShips => battle_ships(n, &mut rng),
        PuzzleId::Binairo => binairo(n, &mut rng),
        PuzzleId::ColoredSudoku => colored_sudoku(n, &mut rng),
        PuzzleId::FieldExplore => field_explore(n, &mut rng),
        PuzzleId::Futoshiki => futoshiki(n, &mut rng),
        PuzzleId::Hitori => hitori(n, &mut rng),
        PuzzleId::JigsawSudoku => jigsaw_sudoku(n, &mut rng),
        PuzzleId::Kakurasu => kakurasu(n, &mut rng),
        PuzzleId::Kakuro => kakuro(n, &mut rng),
        PuzzleId::KillerSudoku => killer_sudoku(n, &mut rng),
        PuzzleId::LightUp => light_up(n, &mut rng),
        PuzzleId::Nonogram => nonogram(n, &mut rng),
        PuzzleId::OddEvenSudoku => odd_even_sudoku(n, &mut rng),
        PuzzleId::Renzoku => renzoku(n, &mut rng),
        PuzzleId::Skyscraper => skyscraper(n, &mut rng),
        PuzzleId::StarBattle => star_battle(n, &mut rng),
        PuzzleId::Sudoku => sudoku(n, &mut rng),
        PuzzleId::Thermometers => thermometers(n, &mut rng),
        PuzzleId::TreesAndTents => trees_and_tents(n, &mut rng),
    };
    made.map_err(|detail| GenerateError::GenerationFailed {
        puzzle: puzzle.id(),
        rows: size.0,
        cols: size.1,
        seed,
        detail,
    })
}

/// Turns a solution into a playable instance by revealing cells. Reveal-based
/// puzzles get a condition count sampled uniformly from the profile's exact
/// rational window; the others are posed blank (their difficulty lives in the
/// structures).
pub fn reveal_clues(
    puzzle: PuzzleId,
    solution: &Grid,
    structures: &Structures,
    profile: &DifficultyProfile,
    seed: u64,
) -> Result<PuzzleInstance, GenerateError> {
    let def = puzzle.definition();
    let conditions = if def.reveal_based {
        let mut cells: Vec<Coord> = solution.coords().collect();
        let total = cells.len();
        let (lo, hi) = reveal_bounds(total, profile.reveal_ratio_range);
        if lo > hi || hi > total {
            return Err(GenerateError::GenerationFailed {
                puzzle: puzzle.id(),
                rows: solution.rows(),
                cols: solution.cols(),
                seed,
                detail: format!("reveal window [{lo}, {hi}] is unusable for {total} cells"),
            });
        }
        let mut rng = rng_for(seed, STREAM_REVEAL);
        let k = rng.random_range(lo..=hi);
        cells.shuffle(&mut rng);
        cells.truncate(k);
        cells.sort();
        cells
            .into_iter()
            .map(|cell| Condition {
                cell,
                value: solution.get(cell).expect("in range").symbol().expect("complete"),
            })
            .collect()
    } else {
        Vec::new()
    };
    Ok(PuzzleInstance::new(
        puzzle,
        solution.rows(),
        solution.cols(),
        structures.clone(),
        conditions,
        Some(solution.clone()),
        seed,
        profile.level,
    )?)
}

/// One-call pipeline: solution, then reveal.
pub fn generate_instance(
    puzzle: PuzzleId,
    profile: &DifficultyProfile,
    seed: u64,
) -> Result<PuzzleInstance, GenerateError> {
    let (solution, structures) = generate_solution(puzzle, profile.size, seed)?;
    reveal_clues(puzzle, &solution, &structures, profile, seed)
}

type Made = Result<(Grid, Structures), String>;

// ---- grid-building helpers ----

fn digits_grid(values: &[Vec<u32>]) -> Grid {
    let n = values.len();
    let mut g = Grid::new(n, n).expect("positive size");
    for (r, row) in values.iter().enumerate() {
        for (c, &v) in row.iter().enumerate() {
            g.set(Coord::new(r, c), CellState::Assigned(Symbol::digit(v))).expect("in range");
        }
    }
    g
}

fn two_tone_grid(n: usize, marked: &[Vec<bool>], on: Symbol, off: Symbol) -> Grid {
    let mut g = Grid::new(n, n).expect("positive size");
    for r in 0..n {
        for c in 0..n {
            let sym = if marked[r][c] { on } else { off };
            g.set(Coord::new(r, c), CellState::Assigned(sym)).expect("in range");
        }
    }
    g
}

fn random_mask(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Vec<Vec<bool>> {
    (0..n).map(|_| (0..n).map(|_| rng.random_bool(p)).collect()).collect()
}

fn line_counts(marked: &[Vec<bool>]) -> (Vec<u32>, Vec<u32>) {
    let n = marked.len();
    let rows = marked.iter().map(|row| row.iter().filter(|&&m| m).count() as u32).collect();
    let cols = (0..n).map(|c| (0..n).filter(|&r| marked[r][c]).count() as u32).collect();
    (rows, cols)
}

fn orth_neighbors(n: usize, at: Coord) -> Vec<Coord> {
    let mut out = Vec::with_capacity(4);
    if at.row > 0 {
        out.push(Coord::new(at.row - 1, at.col));
    }
    if at.row + 1 < n {
        out.push(Coord::new(at.row + 1, at.col));
    }
    if at.col > 0 {
        out.push(Coord::new(at.row, at.col - 1));
    }
    if at.col + 1 < n {
        out.push(Coord::new(at.row, at.col + 1));
    }
    out
}

fn king_neighbors(n: usize, at: Coord) -> Vec<Coord> {
    let mut out = Vec::with_capacity(8);
    for dr in -1i32..=1 {
        for dc in -1i32..=1 {
            if dr == 0 && dc == 0 {
                continue;
            }
            let (r, c) = (at.row as i32 + dr, at.col as i32 + dc);
            if r >= 0 && c >= 0 && (r as usize) < n && (c as usize) < n {
                out.push(Coord::new(r as usize, c as usize));
            }
        }
    }
    out
}

// ---- Latin-square family ----

/// Randomized backtracking fill of a Latin square, optionally with square
/// blocks and/or an irregular region partition as extra all-different zones.
struct LatinFiller<'a> {
    n: usize,
    block: Option<usize>,
    regions: Option<&'a [Vec<usize>]>,
    grid: Vec<Vec<u32>>,
    nodes: u64,
}

impl<'a> LatinFiller<'a> {
    fn run(
        n: usize,
        block: Option<usize>,
        regions: Option<&'a [Vec<usize>]>,
        rng: &mut ChaCha8Rng,
    ) -> Option<Vec<Vec<u32>>> {
        let mut f = LatinFiller { n, block, regions, grid: vec![vec![0; n]; n], nodes: 0 };
        if f.fill(0, rng) == Some(true) {
            Some(f.grid)
        } else {
            None
        }
    }

    fn conflicts(&self, r: usize, c: usize, v: u32) -> bool {
        for k in 0..self.n {
            if self.grid[r][k] == v || self.grid[k][c] == v {
                return true;
            }
        }
        if let Some(b) = self.block {
            let (br, bc) = (r / b * b, c / b * b);
            for i in br..br + b {
                for j in bc..bc + b {
                    if self.grid[i][j] == v {
                        return true;
                    }
                }
            }
        }
        if let Some(regions) = self.regions {
            let id = regions[r][c];
            for i in 0..self.n {
                for j in 0..self.n {
                    if regions[i][j] == id && self.grid[i][j] == v {
                        return true;
                    }
                }
            }
        }
        false
    }

    /// Some(true) filled, Some(false) exhausted, None node cap hit.
    fn fill(&mut self, idx: usize, rng: &mut ChaCha8Rng) -> Option<bool> {
        if idx == self.n * self.n {
            return Some(true);
        }
        self.nodes += 1;
        if self.nodes > 200_000 {
            return None;
        }
        let (r, c) = (idx / self.n, idx % self.n);
        let mut values: Vec<u32> = (1..=self.n as u32).collect();
        values.shuffle(rng);
        for v in values {
            if !self.conflicts(r, c, v) {
                self.grid[r][c] = v;
                match self.fill(idx + 1, rng) {
                    Some(true) => return Some(true),
                    Some(false) => {}
                    None => return None,
                }
                self.grid[r][c] = 0;
            }
        }
        Some(false)
    }
}

fn latin(n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<u32>> {
    LatinFiller::run(n, None, None, rng).expect("plain Latin fill always succeeds")
}

fn block_latin(n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<u32>> {
    let b = (n as f64).sqrt() as usize;
    LatinFiller::run(n, Some(b), None, rng).expect("block Latin fill always succeeds")
}

fn sudoku(n: usize, rng: &mut ChaCha8Rng) -> Made {
    Ok((digits_grid(&block_latin(n, rng)), Structures::default()))
}

fn odd_even_sudoku(n: usize, rng: &mut ChaCha8Rng) -> Made {
    let values = block_latin(n, rng);
    let parity = values.iter().map(|row| row.iter().map(|v| v % 2 == 0).collect()).collect();
    Ok((digits_grid(&values), Structures { parity: Some(parity), ..Structures::default() }))
}

fn colored_sudoku(n: usize, rng: &mut ChaCha8Rng) -> Made {
    let values = latin(n, rng);
    // (value - row) mod n partitions the board into n classes that each hold
    // every value exactly once and hit every row and column once.
    let mut relabel: Vec<usize> = (0..n).collect();
    relabel.shuffle(rng);
    let colors: Vec<Vec<usize>> = values
        .iter()
        .enumerate()
        .map(|(r, row)| {
            row.iter().map(|&v| relabel[(v as usize - 1 + n - (r % n)) % n]).collect()
        })
        .collect();
    Ok((digits_grid(&values), Structures { color_groups: Some(colors), ..Structures::default() }))
}

fn jigsaw_sudoku(n: usize, rng: &mut ChaCha8Rng) -> Made {
    for _ in 0..40 {
        let regions = jigsaw_partition(n, rng);
        if let Some(values) = LatinFiller::run(n, None, Some(&regions), rng) {
            return Ok((
                digits_grid(&values),
                Structures { regions: Some(regions), ..Structures::default() },
            ));
        }
    }
    Err("no fillable region layout found".into())
}

/// Equal-size connected regions: start from row bands and repeatedly swap
/// adjacent cross-border cell pairs when both regions stay connected.
fn jigsaw_partition(n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let mut labels: Vec<Vec<usize>> = (0..n).map(|r| vec![r; n]).collect();
    let connected = |labels: &Vec<Vec<usize>>, id: usize| {
        let cells: Vec<Coord> = (0..n * n)
            .map(|i| Coord::new(i / n, i % n))
            .filter(|&at| labels[at.row][at.col] == id)
            .collect();
        let mut seen = vec![false; n * n];
        let mut stack = vec![cells[0]];
        seen[cells[0].row * n + cells[0].col] = true;
        let mut reached = 0;
        while let Some(at) = stack.pop() {
            reached += 1;
            for nb in orth_neighbors(n, at) {
                let ix = nb.row * n + nb.col;
                if !seen[ix] && labels[nb.row][nb.col] == id {
                    seen[ix] = true;
                    stack.push(nb);
                }
            }
        }
        reached == cells.len()
    };
    for _ in 0..n * n * 8 {
        let a = Coord::new(rng.random_range(0..n), rng.random_range(0..n));
        let across: Vec<Coord> = orth_neighbors(n, a)
            .into_iter()
            .filter(|nb| labels[nb.row][nb.col] != labels[a.row][a.col])
            .collect();
        let Some(&b) = across.choose(rng) else {
            continue;
        };
        let (la, lb) = (labels[a.row][a.col], labels[b.row][b.col]);
        labels[a.row][a.col] = lb;
        labels[b.row][b.col] = la;
        if !connected(&labels, la) || !connected(&labels, lb) {
            labels[a.row][a.col] = la;
            labels[b.row][b.col] = lb;
        }
    }
    labels
}

fn futoshiki(n: usize, rng: &mut ChaCha8Rng) -> Made {
    let values = latin(n, rng);
    let mut inequalities = Vec::new();
    let mut edges = Vec::new();
    for r in 0..n {
        for c in 0..n {
            if c + 1 < n {
                edges.push((Coord::new(r, c), Coord::new(r, c + 1)));
            }
            if r + 1 < n {
                edges.push((Coord::new(r, c), Coord::new(r + 1, c)));
            }
        }
    }
    for &(a, b) in &edges {
        if rng.random_bool(0.3) {
            inequalities.push(orient(&values, a, b));
        }
    }
    if inequalities.is_empty() {
        let &(a, b) = edges.choose(rng).expect("grid has edges");
        inequalities.push(orient(&values, a, b));
    }
    Ok((
        digits_grid(&values),
        Structures { inequalities: Some(inequalities), ..Structures::default() },
    ))
}

fn orient(values: &[Vec<u32>], a: Coord, b: Coord) -> Inequality {
    if values[a.row][a.col] < values[b.row][b.col] {
        Inequality { small: a, large: b }
    } else {
        Inequality { small: b, large: a }
    }
}

fn renzoku(n: usize, rng: &mut ChaCha8Rng) -> Made {
    let values = latin(n, rng);
    // Dots are exhaustive: an edge is dotted iff its values are consecutive.
    let mut dots = Vec::new();
    for r in 0..n {
        for c in 0..n {
            if c + 1 < n && values[r][c].abs_diff(values[r][c + 1]) == 1 {
                dots.push(Dot { a: Coord::new(r, c), b: Coord::new(r, c + 1) });
            }
            if r + 1 < n && values[r][c].abs_diff(values[r + 1][c]) == 1 {
                dots.push(Dot { a: Coord::new(r, c), b: Coord::new(r + 1, c) });
            }
        }
    }
    Ok((digits_grid(&values), Structures { dots: Some(dots), ..Structures::default() }))
}

fn skyscraper(n: usize, rng: &mut ChaCha8Rng) -> Made {
    let values = latin(n, rng);
    let see = |line: &[u32]| -> u32 {
        let mut tallest = 0;
        let mut count = 0;
        for &h in line {
            if h > tallest {
                tallest = h;
                count += 1;
            }
        }
        count
    };
    let col = |c: usize| -> Vec<u32> { (0..n).map(|r| values[r][c]).collect() };
    let clues = ViewClues {
        top: (0..n).map(|c| see(&col(c))).collect(),
        bottom: (0..n).map(|c| see(&col(c).into_iter().rev().collect::<Vec<_>>())).collect(),
        left: (0..n).map(|r| see(&values[r])).collect(),
        right: (0..n)
            .map(|r| see(&values[r].iter().rev().copied().collect::<Vec<_>>()))
            .collect(),
    };
    Ok((digits_grid(&values), Structures { view_clues: Some(clues), ..Structures::default() }))
}

fn kakuro(n: usize, rng: &mut ChaCha8Rng) -> Made {
    // Digits 1..=N with no equal orthogonal neighbours; row-major greedy
    // always succeeds because at most two neighbours are already set.
    let mut values = vec![vec![0u32; n]; n];
    for r in 0..n {
        for c in 0..n {
            let mut choices: Vec<u32> = (1..=n as u32)
                .filter(|&v| (r == 0 || values[r - 1][c] != v) && (c == 0 || values[r][c - 1] != v))
                .collect();
            choices.shuffle(rng);
            values[r][c] = choices[0];
        }
    }
    let row_sums = values.iter().map(|row| row.iter().sum()).collect();
    let col_sums = (0..n).map(|c| (0..n).map(|r| values[r][c]).sum()).collect();
    Ok((
        digits_grid(&values),
        Structures { row_sums: Some(row_sums), col_sums: Some(col_sums), ..Structures::default() },
    ))
}

fn killer_sudoku(n: usize, rng: &mut ChaCha8Rng) -> Made {
    let values = block_latin(n, rng);
    let mut assigned = vec![vec![false; n]; n];
    let mut cages = Vec::new();
    for r in 0..n {
        for c in 0..n {
            if assigned[r][c] {
                continue;
            }
            let want = rng.random_range(1..=4);
            let mut cells = vec![Coord::new(r, c)];
            assigned[r][c] = true;
            while cells.len() < want {
                let frontier: Vec<Coord> = cells
                    .iter()
                    .flat_map(|&at| orth_neighbors(n, at))
                    .filter(|nb| !assigned[nb.row][nb.col])
                    .collect();
                let Some(&next) = frontier.choose(rng) else { break };
                assigned[next.row][next.col] = true;
                cells.push(next);
            }
            let target = cells.iter().map(|at| values[at.row][at.col]).sum();
            cages.push(Cage { cells, target });
        }
    }
    Ok((digits_grid(&values), Structures { cages: Some(cages), ..Structures::default() }))
}

fn kakurasu(n: usize, rng: &mut ChaCha8Rng) -> Made {
    let marked = random_mask(n, 0.5, rng);
    let row_sums = marked
        .iter()
        .map(|row| row.iter().enumerate().map(|(j, &m)| if m { j as u32 + 1 } else { 0 }).sum())
        .collect();
    let col_sums = (0..n)
        .map(|j| (0..n).map(|i| if marked[i][j] { i as u32 + 1 } else { 0 }).sum())
        .collect();
    Ok((
        two_tone_grid(n, &marked, SYM_S, SYM_E),
        Structures { row_sums: Some(row_sums), col_sums: Some(col_sums), ..Structures::default() },
    ))
}

fn binairo(n: usize, rng: &mut ChaCha8Rng) -> Made {
    // Row-major fill checking the two cells behind in each direction covers
    // every triple exactly once.
    let mut marked = vec![vec![false; n]; n];
    fn fill(marked: &mut Vec<Vec<bool>>, n: usize, idx: usize, rng: &mut ChaCha8Rng) -> bool {
        if idx == n * n {
            return true;
        }
        let (r, c) = (idx / n, idx % n);
        let mut options = [true, false];
        if rng.random_bool(0.5) {
            options.swap(0, 1);
        }
        for v in options {
            let row_run = c >= 2 && marked[r][c - 1] == v && marked[r][c - 2] == v;
            let col_run = r >= 2 && marked[r - 1][c] == v && marked[r - 2][c] == v;
            if !row_run && !col_run {
                marked[r][c] = v;
                if fill(marked, n, idx + 1, rng) {
                    return true;
                }
            }
        }
        false
    }
    if !fill(&mut marked, n, 0, rng) {
        return Err("no run-limited double-tone fill found".into());
    }
    Ok((two_tone_grid(n, &marked, SYM_B, SYM_W), Structures::default()))
}

fn nonogram(n: usize, rng: &mut ChaCha8Rng) -> Made {
    let marked = random_mask(n, 0.5, rng);
    let runs_of = |line: Vec<bool>| -> Vec<u32> {
        let mut runs = Vec::new();
        let mut len = 0u32;
        for m in line {
            if m {
                len += 1;
            } else if len > 0 {
                runs.push(len);
                len = 0;
            }
        }
        if len > 0 {
            runs.push(len);
        }
        runs
    };
    let row_runs = marked.iter().map(|row| runs_of(row.clone())).collect();
    let col_runs = (0..n).map(|c| runs_of((0..n).map(|r| marked[r][c]).collect())).collect();
    Ok((
        two_tone_grid(n, &marked, SYM_S, SYM_E),
        Structures { row_runs: Some(row_runs), col_runs: Some(col_runs), ..Structures::default() },
    ))
}

fn aquarium(n: usize, rng: &mut ChaCha8Rng) -> Made {
    let regions = grown_partition(n, n, rng);
    let mut marked = vec![vec![false; n]; n];
    for id in 0..n {
        let rows: Vec<usize> = (0..n)
            .filter(|&r| (0..n).any(|c| regions[r][c] == id))
            .collect();
        // Water level: everything from this row down is filled; one past the
        // deepest row means the region stays dry.
        let mut levels = rows.clone();
        levels.push(rows[rows.len() - 1] + 1);
        let level = *levels.choose(rng).expect("region has rows");
        for r in 0..n {
            for c in 0..n {
                if regions[r][c] == id && r >= level {
                    marked[r][c] = true;
                }
            }
        }
    }
    let (row_counts, col_counts) = line_counts(&marked);
    Ok((
        two_tone_grid(n, &marked, SYM_S, SYM_E),
        Structures {
            regions: Some(regions),
            row_counts: Some(row_counts),
            col_counts: Some(col_counts),
            ..Structures::default()
        },
    ))
}

/// Covers the board with `k` connected regions grown from random seed cells.
fn grown_partition(n: usize, k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let mut labels = vec![vec![usize::MAX; n]; n];
    let mut cells: Vec<Coord> = (0..n * n).map(|i| Coord::new(i / n, i % n)).collect();
    cells.shuffle(rng);
    let mut frontiers: Vec<Vec<Coord>> = Vec::new();
    for (id, &seed) in cells[..k].iter().enumerate() {
        labels[seed.row][seed.col] = id;
        frontiers.push(orth_neighbors(n, seed));
    }
    let mut remaining = n * n - k;
    while remaining > 0 {
        let open: Vec<usize> = (0..k).filter(|&id| !frontiers[id].is_empty()).collect();
        let &id = open.choose(rng).expect("some region can grow");
        let pick = rng.random_range(0..frontiers[id].len());
        let at = frontiers[id].swap_remove(pick);
        if labels[at.row][at.col] != usize::MAX {
            continue;
        }
        labels[at.row][at.col] = id;
        remaining -= 1;
        for nb in orth_neighbors(n, at) {
            if labels[nb.row][nb.col] == usize::MAX {
                frontiers[id].push(nb);
            }
        }
    }
    labels
}

fn thermometers(n: usize, rng: &mut ChaCha8Rng) -> Made {
    'attempt: for _ in 0..50 {
        let mut taken = vec![vec![false; n]; n];
        let mut free: Vec<Coord> = (0..n * n).map(|i| Coord::new(i / n, i % n)).collect();
        free.shuffle(rng);
        let mut paths: Vec<Vec<Coord>> = Vec::new();
        for &start in &free {
            if taken[start.row][start.col] {
                continue;
            }
            let mut path = vec![start];
            taken[start.row][start.col] = true;
            loop {
                let tail = *path.last().expect("nonempty");
                let nexts: Vec<Coord> = orth_neighbors(n, tail)
                    .into_iter()
                    .filter(|nb| !taken[nb.row][nb.col])
                    .collect();
                if nexts.is_empty() || (path.len() >= 2 && rng.random_bool(0.35)) {
                    break;
                }
                let &next = nexts.choose(rng).expect("nonempty");
                taken[next.row][next.col] = true;
                path.push(next);
            }
            if path.len() == 1 {
                // Fold the stranded cell into a neighbouring path's end.
                let at = path[0];
                let mut folded = false;
                for existing in paths.iter_mut() {
                    let tail = *existing.last().expect("nonempty");
                    let head = existing[0];
                    if orth_neighbors(n, at).contains(&tail) {
                        existing.push(at);
                        folded = true;
                        break;
                    }
                    if orth_neighbors(n, at).contains(&head) {
                        existing.insert(0, at);
                        folded = true;
                        break;
                    }
                }
                if !folded {
                    continue 'attempt;
                }
            } else {
                paths.push(path);
            }
        }
        let mut marked = vec![vec![false; n]; n];
        for path in &paths {
            let fill = rng.random_range(0..=path.len());
            for &at in &path[..fill] {
                marked[at.row][at.col] = true;
            }
        }
        let (row_counts, col_counts) = line_counts(&marked);
        return Ok((
            two_tone_grid(n, &marked, SYM_S, SYM_E),
            Structures {
                row_counts: Some(row_counts),
                col_counts: Some(col_counts),
                thermometers: Some(paths),
                ..Structures::default()
            },
        ));
    }
    Err("no full path cover found".into())
}

fn light_up(n: usize, rng: &mut ChaCha8Rng) -> Made {
    let mut wall = random_mask(n, 0.18, rng);
    if !wall.iter().flatten().any(|&w| w) {
        wall[rng.random_range(0..n)][rng.random_range(0..n)] = true;
    }
    let mut bulb = vec![vec![false; n]; n];
    let sees_bulb = |bulb: &Vec<Vec<bool>>, at: Coord| -> bool {
        let scans: [(i32, i32); 4] = [(-1, 0), (1, 0), (0, -1), (0, 1)];
        for (dr, dc) in scans {
            let (mut r, mut c) = (at.row as i32 + dr, at.col as i32 + dc);
            while r >= 0 && c >= 0 && (r as usize) < n && (c as usize) < n {
                if wall[r as usize][c as usize] {
                    break;
                }
                if bulb[r as usize][c as usize] {
                    return true;
                }
                r += dr;
                c += dc;
            }
        }
        false
    };
    let mut open: Vec<Coord> = (0..n * n)
        .map(|i| Coord::new(i / n, i % n))
        .filter(|at| !wall[at.row][at.col])
        .collect();
    open.shuffle(rng);
    // Greedy bulbs, then force any still-dark cell (which by definition sees
    // no bulb, so it can safely host one) until everything is lit.
    for &at in &open {
        if !sees_bulb(&bulb, at) && rng.random_bool(0.5) {
            bulb[at.row][at.col] = true;
        }
    }
    loop {
        let dark: Vec<Coord> = open
            .iter()
            .copied()
            .filter(|&at| !bulb[at.row][at.col] && !sees_bulb(&bulb, at))
            .collect();
        let Some(&at) = dark.first() else { break };
        bulb[at.row][at.col] = true;
    }
    let mut walls = Vec::new();
    for r in 0..n {
        for c in 0..n {
            if !wall[r][c] {
                continue;
            }
            let at = Coord::new(r, c);
            let count = if rng.random_bool(0.5) {
                Some(orth_neighbors(n, at).iter().filter(|nb| bulb[nb.row][nb.col]).count() as u32)
            } else {
                None
            };
            walls.push(Wall { at, count });
        }
    }
    let mut g = Grid::new(n, n).expect("positive size");
    for r in 0..n {
        for c in 0..n {
            let state = if wall[r][c] {
                CellState::Blocked
            } else if bulb[r][c] {
                CellState::Assigned(SYM_S)
            } else {
                CellState::Assigned(SYM_E)
            };
            g.set(Coord::new(r, c), state).expect("in range");
        }
    }
    Ok((g, Structures { walls: Some(walls), ..Structures::default() }))
}

fn star_battle(n: usize, rng: &mut ChaCha8Rng) -> Made {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut placed = false;
    for _ in 0..20_000 {
        perm.shuffle(rng);
        if (1..n).all(|r| perm[r].abs_diff(perm[r - 1]) >= 2) {
            placed = true;
            break;
        }
    }
    if !placed {
        return Err("no star placement avoids touching".into());
    }
    let stars: Vec<Coord> = perm.iter().enumerate().map(|(r, &c)| Coord::new(r, c)).collect();
    let regions = grown_partition_from(n, &stars, rng);
    let mut marked = vec![vec![false; n]; n];
    for &at in &stars {
        marked[at.row][at.col] = true;
    }
    Ok((
        two_tone_grid(n, &marked, SYM_S, SYM_E),
        Structures { regions: Some(regions), ..Structures::default() },
    ))
}

/// Like `grown_partition` but with caller-chosen seed cells.
fn grown_partition_from(n: usize, seeds: &[Coord], rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let k = seeds.len();
    let mut labels = vec![vec![usize::MAX; n]; n];
    let mut frontiers: Vec<Vec<Coord>> = Vec::new();
    for (id, &seed) in seeds.iter().enumerate() {
        labels[seed.row][seed.col] = id;
        frontiers.push(orth_neighbors(n, seed));
    }
    let mut remaining = n * n - k;
    while remaining > 0 {
        let open: Vec<usize> = (0..k).filter(|&id| !frontiers[id].is_empty()).collect();
        let &id = open.choose(rng).expect("some region can grow");
        let pick = rng.random_range(0..frontiers[id].len());
        let at = frontiers[id].swap_remove(pick);
        if labels[at.row][at.col] != usize::MAX {
            continue;
        }
        labels[at.row][at.col] = id;
        remaining -= 1;
        for nb in orth_neighbors(n, at) {
            if labels[nb.row][nb.col] == usize::MAX {
                frontiers[id].push(nb);
            }
        }
    }
    labels
}

fn fleet_for(n: usize) -> Vec<u32> {
    match n {
        0..=3 => vec![2, 1],
        4 => vec![2, 1, 1],
        5 => vec![3, 2, 1],
        6 => vec![3, 2, 2, 1],
        7 => vec![3, 3, 2, 2, 1],
        8 => vec![4, 3, 3, 2, 2, 1],
        9 => vec![4, 3, 3, 2, 2, 1, 1],
        _ => vec![4, 4, 3, 3, 2, 2, 1, 1],
    }
}

fn battle_ships(n: usize, rng: &mut ChaCha8Rng) -> Made {
    let fleet = fleet_for(n);
    'restart: for _ in 0..60 {
        let mut ship = vec![vec![false; n]; n];
        for &len in &fleet {
            let len = len as usize;
            let mut done = false;
            for _ in 0..300 {
                let horizontal = rng.random_bool(0.5);
                let (dr, dc) = if horizontal { (0, 1) } else { (1, 0) };
                let r0 = rng.random_range(0..n - dr * (len - 1));
                let c0 = rng.random_range(0..n - dc * (len - 1));
                let cells: Vec<Coord> =
                    (0..len).map(|k| Coord::new(r0 + dr * k, c0 + dc * k)).collect();
                let blocked = cells.iter().any(|&at| {
                    ship[at.row][at.col]
                        || king_neighbors(n, at).iter().any(|nb| ship[nb.row][nb.col])
                });
                if !blocked {
                    for &at in &cells {
                        ship[at.row][at.col] = true;
                    }
                    done = true;
                    break;
                }
            }
            if !done {
                continue 'restart;
            }
        }
        let (row_counts, col_counts) = line_counts(&ship);
        return Ok((
            two_tone_grid(n, &ship, SYM_S, SYM_E),
            Structures {
                row_counts: Some(row_counts),
                col_counts: Some(col_counts),
                fleet: Some(fleet),
                ..Structures::default()
            },
        ));
    }
    Err("fleet does not fit without touching".into())
}

fn trees_and_tents(n: usize, rng: &mut ChaCha8Rng) -> Made {
    let target = (n * n / 6).max(1);
    let mut tent = vec![vec![false; n]; n];
    let mut tree = vec![vec![false; n]; n];
    let mut trees = Vec::new();
    for _ in 0..n * n * 8 {
        if trees.len() >= target {
            break;
        }
        let at = Coord::new(rng.random_range(0..n), rng.random_range(0..n));
        if tent[at.row][at.col] || tree[at.row][at.col] {
            continue;
        }
        if king_neighbors(n, at).iter().any(|nb| tent[nb.row][nb.col]) {
            continue;
        }
        let spots: Vec<Coord> = orth_neighbors(n, at)
            .into_iter()
            .filter(|nb| !tent[nb.row][nb.col] && !tree[nb.row][nb.col])
            .collect();
        let Some(&home) = spots.choose(rng) else { continue };
        tent[at.row][at.col] = true;
        tree[home.row][home.col] = true;
        trees.push(home);
    }
    if trees.is_empty() {
        return Err("no tree-tent pair fits".into());
    }
    trees.sort();
    let (row_counts, col_counts) = line_counts(&tent);
    let mut g = Grid::new(n, n).expect("positive size");
    for r in 0..n {
        for c in 0..n {
            let state = if tree[r][c] {
                CellState::Assigned(SYM_TR)
            } else if tent[r][c] {
                CellState::Assigned(SYM_TT)
            } else {
                CellState::Assigned(SYM_E)
            };
            g.set(Coord::new(r, c), state).expect("in range");
        }
    }
    Ok((
        g,
        Structures {
            row_counts: Some(row_counts),
            col_counts: Some(col_counts),
            trees: Some(trees),
            ..Structures::default()
        },
    ))
}

fn hitori(n: usize, rng: &mut ChaCha8Rng) -> Made {
    let mut givens = latin(n, rng);
    let mut shaded = vec![vec![false; n]; n];
    let mut order: Vec<Coord> = (0..n * n).map(|i| Coord::new(i / n, i % n)).collect();
    order.shuffle(rng);
    let mut count = 0;
    let target = (n * n / 4).max(1);
    for &at in &order {
        if count >= target {
            break;
        }
        if orth_neighbors(n, at).iter().any(|nb| shaded[nb.row][nb.col]) {
            continue;
        }
        shaded[at.row][at.col] = true;
        if unshaded_connected(n, &shaded) {
            count += 1;
        } else {
            shaded[at.row][at.col] = false;
        }
    }
    // Give every shaded cell a duplicate of an unshaded value in its row or
    // column, so the shading actually removes repeats.
    for r in 0..n {
        for c in 0..n {
            if !shaded[r][c] {
                continue;
            }
            let mut sources: Vec<u32> = (0..n)
                .filter(|&k| k != c && !shaded[r][k])
                .map(|k| givens[r][k])
                .chain((0..n).filter(|&k| k != r && !shaded[k][c]).map(|k| givens[k][c]))
                .collect();
            sources.shuffle(rng);
            if let Some(&v) = sources.first() {
                givens[r][c] = v;
            }
        }
    }
    Ok((
        two_tone_grid(n, &shaded, SYM_S, SYM_E),
        Structures { givens: Some(givens), ..Structures::default() },
    ))
}

fn unshaded_connected(n: usize, shaded: &[Vec<bool>]) -> bool {
    let open: Vec<Coord> = (0..n * n)
        .map(|i| Coord::new(i / n, i % n))
        .filter(|at| !shaded[at.row][at.col])
        .collect();
    if open.is_empty() {
        return true;
    }
    let mut seen = vec![false; n * n];
    let mut stack = vec![open[0]];
    seen[open[0].row * n + open[0].col] = true;
    let mut reached = 0;
    while let Some(at) = stack.pop() {
        reached += 1;
        for nb in orth_neighbors(n, at) {
            let ix = nb.row * n + nb.col;
            if !seen[ix] && !shaded[nb.row][nb.col] {
                seen[ix] = true;
                stack.push(nb);
            }
        }
    }
    reached == open.len()
}

fn field_explore(n: usize, rng: &mut ChaCha8Rng) -> Made {
    let mut mine = random_mask(n, 0.2, rng);
    if !mine.iter().flatten().any(|&m| m) {
        mine[rng.random_range(0..n)][rng.random_range(0..n)] = true;
    }
    if mine.iter().flatten().all(|&m| m) {
        mine[rng.random_range(0..n)][rng.random_range(0..n)] = false;
    }
    let mut clues = Vec::new();
    for r in 0..n {
        for c in 0..n {
            let at = Coord::new(r, c);
            if !mine[r][c] && rng.random_bool(0.4) {
                let count =
                    king_neighbors(n, at).iter().filter(|nb| mine[nb.row][nb.col]).count() as u32;
                clues.push(NumberClue { at, count });
            }
        }
    }
    if clues.is_empty() {
        let safe: Vec<Coord> = (0..n * n)
            .map(|i| Coord::new(i / n, i % n))
            .filter(|at| !mine[at.row][at.col])
            .collect();
        let &at = safe.choose(rng).expect("some cell is safe");
        let count = king_neighbors(n, at).iter().filter(|nb| mine[nb.row][nb.col]).count() as u32;
        clues.push(NumberClue { at, count });
    }
    Ok((
        two_tone_grid(n, &mine, SYM_S, SYM_E),
        Structures { number_clues: Some(clues), ..Structures::default() },
    ))
}
