//! DFS solver with process-of-elimination.
//!
//! Cell order is minimum-remaining-values with row-major tie-breaking; value
//! order is alphabet order. Both are fixed so identical inputs produce
//! identical solutions and trajectories on any thread count.

use serde::Serialize;

use crate::constraint::{Touches, Violation};
use crate::grid::{CellState, Coord, Grid};
use crate::instance::{InstanceError, PuzzleInstance};
use crate::symbol::Symbol;

#[derive(Clone, Debug)]
pub struct SolveLimits {
    /// Search-node budget (a node = one expansion of an incomplete state).
    pub max_nodes: u64,
    /// Enumeration cap for counting runs.
    pub max_solutions: usize,
    /// Budget for the rendered trajectory text.
    pub max_trace_chars: usize,
}

impl Default for SolveLimits {
    fn default() -> Self {
        SolveLimits { max_nodes: 200_000, max_solutions: 1, max_trace_chars: 8192 }
    }
}

#[derive(Clone, PartialEq, Debug)]
pub enum SolveOutcome {
    Solved(Grid),
    Unsat,
    BudgetExceeded { nodes: u64 },
}

#[derive(Clone, PartialEq, Debug)]
pub enum CountOutcome {
    /// Exact count, saturated at the requested cap.
    Count(usize),
    BudgetExceeded { nodes: u64 },
}

#[derive(Clone, Debug)]
pub enum TraceOutcome {
    Trace(Box<Trajectory>),
    Unsat,
    /// `rendered_chars` is set when the node budget held but the rendered
    /// text outgrew `max_trace_chars`.
    BudgetExceeded { nodes: u64, rendered_chars: Option<usize> },
}

#[derive(Clone, PartialEq, Debug)]
pub enum ActionCheck {
    Valid,
    Invalid(Vec<Violation>),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct Placement {
    pub cell: Coord,
    pub value: Symbol,
}

/// Candidate values for one cell, in alphabet order.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct CellCandidates {
    pub cell: Coord,
    pub values: Vec<Symbol>,
}

#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct Step {
    pub placed: Placement,
    pub candidate_count_before: usize,
    /// The candidates that were not chosen, in alphabet order.
    pub alternatives: Vec<Symbol>,
    pub resulting_state: Grid,
    pub candidates_after: Vec<CellCandidates>,
    /// True when this branch was undone; the default rendering skips it.
    pub backtracked: bool,
}

#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct Trajectory {
    pub initial_state: Grid,
    pub initial_candidates: Vec<CellCandidates>,
    /// Chronological placements, including undone branches.
    pub steps: Vec<Step>,
    pub final_state: Grid,
}

/// Formats "Cell (r, c): v1, v2 Cell (r, c): ..." candidate entries.
fn candidate_entries(map: &[CellCandidates]) -> String {
    map.iter()
        .map(|e| format!("Cell {}: {}", e.cell, join_symbols(&e.values)))
        .collect::<Vec<_>>()
        .join(" ")
}

fn join_symbols(values: &[Symbol]) -> String {
    values.iter().map(|v| v.as_str()).collect::<Vec<_>>().join(", ")
}

impl Trajectory {
    /// Steps on the successful line, in order.
    pub fn printed_steps(&self) -> impl Iterator<Item = &Step> {
        self.steps.iter().filter(|s| !s.backtracked)
    }

    /// Renders the reasoning-trace text: initial state and candidates, one
    /// block per surviving step, ending with the solution line. Undone
    /// branches are omitted and steps renumbered, so the text reads as a
    /// straight derivation.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("Initial State: ");
        out.push_str(&self.initial_state.to_text());
        if !self.initial_candidates.is_empty() {
            out.push_str("\nInitial possible numbers for empty cells: ");
            out.push_str(&candidate_entries(&self.initial_candidates));
        }
        let printed: Vec<&Step> = self.printed_steps().collect();
        for (i, step) in printed.iter().enumerate() {
            let alternatives = if step.alternatives.is_empty() {
                String::new()
            } else {
                format!(" ({} were alternatives)", join_symbols(&step.alternatives))
            };
            out.push_str(&format!(
                "\nStep {}: Placing {} at {}. This cell had {} possible values{}",
                i + 1,
                step.placed.value.as_str(),
                step.placed.cell,
                step.candidate_count_before,
                alternatives
            ));
            out.push_str("\nResulting State: ");
            out.push_str(&step.resulting_state.to_text());
            if i + 1 < printed.len() && !step.candidates_after.is_empty() {
                out.push_str("\nPossible numbers for remaining empty cells: ");
                out.push_str(&candidate_entries(&step.candidates_after));
            }
        }
        out.push_str("\nSolution: ");
        out.push_str(&self.final_state.to_text());
        out
    }

    /// Ablation rendering: every branch in chronological order, dead ones
    /// followed by an explicit backtrack line. Same block grammar otherwise.
    pub fn to_text_including_undone(&self) -> String {
        let mut out = String::new();
        out.push_str("Initial State: ");
        out.push_str(&self.initial_state.to_text());
        if !self.initial_candidates.is_empty() {
            out.push_str("\nInitial possible numbers for empty cells: ");
            out.push_str(&candidate_entries(&self.initial_candidates));
        }
        for (i, step) in self.steps.iter().enumerate() {
            let alternatives = if step.alternatives.is_empty() {
                String::new()
            } else {
                format!(" ({} were alternatives)", join_symbols(&step.alternatives))
            };
            out.push_str(&format!(
                "\nStep {}: Placing {} at {}. This cell had {} possible values{}",
                i + 1,
                step.placed.value.as_str(),
                step.placed.cell,
                step.candidate_count_before,
                alternatives
            ));
            out.push_str("\nResulting State: ");
            out.push_str(&step.resulting_state.to_text());
            if step.backtracked {
                out.push_str(&format!(
                    "\nBacktrack: removing {} from {}",
                    step.placed.value.as_str(),
                    step.placed.cell
                ));
            }
            if i + 1 < self.steps.len() && !step.candidates_after.is_empty() {
                out.push_str("\nPossible numbers for remaining empty cells: ");
                out.push_str(&candidate_entries(&step.candidates_after));
            }
        }
        out.push_str("\nSolution: ");
        out.push_str(&self.final_state.to_text());
        out
    }

    /// Replays the successful line from the initial state, checking that
    /// every recorded state matches, every candidate list agrees with a
    /// fresh `candidates()` call, and the end state is solved.
    pub fn verify_replay(&self, instance: &PuzzleInstance) -> Result<(), String> {
        let mut state = self.initial_state.clone();
        check_candidate_map(instance, &state, &self.initial_candidates)
            .map_err(|e| format!("initial candidates: {e}"))?;
        for (i, step) in self.printed_steps().enumerate() {
            if step.candidate_count_before != step.alternatives.len() + 1 {
                return Err(format!(
                    "step {}: count {} != alternatives {} + 1",
                    i + 1,
                    step.candidate_count_before,
                    step.alternatives.len()
                ));
            }
            let fresh = instance
                .candidates(&state, step.placed.cell)
                .map_err(|e| format!("step {}: {e}", i + 1))?;
            if !fresh.contains(&step.placed.value) {
                return Err(format!("step {}: placed value was not a candidate", i + 1));
            }
            if fresh.len() != step.candidate_count_before {
                return Err(format!("step {}: stale candidate count", i + 1));
            }
            state = instance
                .apply_assignment(&state, step.placed.cell, step.placed.value)
                .map_err(|e| format!("step {}: {e}", i + 1))?;
            if state != step.resulting_state {
                return Err(format!("step {}: resulting state mismatch", i + 1));
            }
            check_candidate_map(instance, &state, &step.candidates_after)
                .map_err(|e| format!("step {}: {e}", i + 1))?;
        }
        if state != self.final_state {
            return Err("final state mismatch".into());
        }
        match instance.is_solved(&state) {
            Ok(true) => Ok(()),
            Ok(false) => Err("final state is not solved".into()),
            Err(e) => Err(e.to_string()),
        }
    }
}

/// Asserts a recorded candidate map equals a fresh recomputation: same
/// cells (all Unknown cells), same values, same (count, row, col) order.
fn check_candidate_map(
    instance: &PuzzleInstance,
    state: &Grid,
    recorded: &[CellCandidates],
) -> Result<(), String> {
    let mut fresh: Vec<CellCandidates> = state
        .unknown_cells()
        .into_iter()
        .map(|cell| {
            instance
                .candidates(state, cell)
                .map(|values| CellCandidates { cell, values })
                .map_err(|e| e.to_string())
        })
        .collect::<Result<_, _>>()?;
    fresh.sort_by_key(|e| (e.values.len(), e.cell.row, e.cell.col));
    if fresh != recorded {
        return Err("candidate map disagrees with fresh recomputation".into());
    }
    Ok(())
}

struct Search<'a> {
    instance: &'a PuzzleInstance,
    alphabet: Vec<Symbol>,
    /// Per-cell (row-major) indices of constraints whose scope can be
    /// affected by that cell. Sound because the search only evaluates
    /// violation-free base states.
    incidence: Vec<Vec<usize>>,
    max_nodes: u64,
    cap: usize,
    trace: bool,
    nodes: u64,
    found: usize,
    first: Option<Grid>,
    steps: Vec<Step>,
}

#[derive(Debug)]
struct NodeBudget;

impl<'a> Search<'a> {
    fn new(instance: &'a PuzzleInstance, max_nodes: u64, cap: usize, trace: bool) -> Self {
        let cols = instance.cols;
        let mut incidence = vec![Vec::new(); instance.rows * cols];
        for (i, constraint) in instance.constraints().iter().enumerate() {
            match constraint.touches() {
                Touches::All => {
                    for list in &mut incidence {
                        list.push(i);
                    }
                }
                Touches::Cells(cells) => {
                    for at in cells {
                        if at.row < instance.rows && at.col < cols {
                            incidence[at.row * cols + at.col].push(i);
                        }
                    }
                }
            }
        }
        Search {
            instance,
            alphabet: instance.alphabet(),
            incidence,
            max_nodes,
            cap,
            trace,
            nodes: 0,
            found: 0,
            first: None,
            steps: Vec::new(),
        }
    }

    /// One-step elimination restricted to constraints touching the cell;
    /// equals `PuzzleInstance::candidates` whenever the base state is
    /// violation-free.
    fn cell_candidates(&self, state: &Grid, cell: Coord) -> Vec<Symbol> {
        let constraints = self.instance.constraints();
        let incident = &self.incidence[cell.row * self.instance.cols + cell.col];
        let mut out = Vec::new();
        'next_value: for &value in &self.alphabet {
            let next = state.with(cell, CellState::Assigned(value)).expect("cell in range");
            for &ci in incident {
                if constraints[ci].find_violation(&next).is_some() {
                    continue 'next_value;
                }
            }
            out.push(value);
        }
        out
    }

    fn candidate_map(&self, state: &Grid) -> Vec<CellCandidates> {
        let mut map: Vec<CellCandidates> = state
            .unknown_cells()
            .into_iter()
            .map(|cell| CellCandidates { cell, values: self.cell_candidates(state, cell) })
            .collect();
        map.sort_by_key(|e| (e.values.len(), e.cell.row, e.cell.col));
        map
    }

    fn prune(&self, state: &Grid) -> bool {
        self.instance.constraints().iter().any(|c| c.prunes_search(state))
    }

    /// Returns Ok(true) when the search should stop (cap reached).
    fn dfs(&mut self, state: &Grid) -> Result<bool, NodeBudget> {
        if state.is_complete() {
            if self.instance.is_solved(state).unwrap_or(false) {
                if self.first.is_none() {
                    self.first = Some(state.clone());
                }
                self.found += 1;
                return Ok(self.found >= self.cap);
            }
            return Ok(false);
        }
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return Err(NodeBudget);
        }
        let map = self.candidate_map(state);
        let (cell, values) = {
            let best = &map[0];
            if best.values.is_empty() {
                return Ok(false);
            }
            (best.cell, best.values.clone())
        };
        for &value in &values {
            let next = state.with(cell, CellState::Assigned(value)).expect("cell in range");
            let step_index = if self.trace {
                let candidates_after = self.candidate_map(&next);
                let alternatives =
                    values.iter().copied().filter(|&v| v != value).collect::<Vec<_>>();
                self.steps.push(Step {
                    placed: Placement { cell, value },
                    candidate_count_before: values.len(),
                    alternatives,
                    resulting_state: next.clone(),
                    candidates_after,
                    backtracked: false,
                });
                Some(self.steps.len() - 1)
            } else {
                None
            };
            let stop = if self.prune(&next) { false } else { self.dfs(&next)? };
            if stop {
                return Ok(true);
            }
            // This branch is dead (or counting continues past it): any step
            // recorded for it was undone.
            if let Some(ix) = step_index {
                self.steps[ix].backtracked = true;
            }
        }
        Ok(false)
    }
}

/// Finds one solution. `Unsat` is definitive (exhaustive within budget).
pub fn solve(instance: &PuzzleInstance, limits: &SolveLimits) -> SolveOutcome {
    solve_stats(instance, limits).0
}

/// Like `solve`, also reporting how many search nodes were expanded.
pub fn solve_stats(instance: &PuzzleInstance, limits: &SolveLimits) -> (SolveOutcome, u64) {
    debug_assert!(limits.max_nodes > 0 && limits.max_solutions > 0 && limits.max_trace_chars > 0);
    let initial = instance.initial_state();
    let mut search = Search::new(instance, limits.max_nodes, 1, false);
    if !check_start(instance, &initial) {
        return (SolveOutcome::Unsat, 0);
    }
    let outcome = match search.dfs(&initial) {
        Ok(true) => SolveOutcome::Solved(search.first.expect("recorded on success")),
        Ok(false) => SolveOutcome::Unsat,
        Err(NodeBudget) => SolveOutcome::BudgetExceeded { nodes: search.nodes },
    };
    (outcome, search.nodes)
}

/// Counts solutions, saturating at `cap`.
pub fn count_solutions(instance: &PuzzleInstance, cap: usize) -> CountOutcome {
    count_solutions_within(instance, cap, 5_000_000)
}

pub fn count_solutions_within(instance: &PuzzleInstance, cap: usize, max_nodes: u64) -> CountOutcome {
    assert!(cap >= 1, "cap must be positive");
    let initial = instance.initial_state();
    if !check_start(instance, &initial) {
        return CountOutcome::Count(0);
    }
    let mut search = Search::new(instance, max_nodes, cap, false);
    match search.dfs(&initial) {
        Ok(_) => CountOutcome::Count(search.found),
        Err(NodeBudget) => CountOutcome::BudgetExceeded { nodes: search.nodes },
    }
}

/// Solves while recording the stepwise elimination trajectory.
pub fn solve_with_trace(instance: &PuzzleInstance, limits: &SolveLimits) -> TraceOutcome {
    let initial = instance.initial_state();
    if !check_start(instance, &initial) {
        return TraceOutcome::Unsat;
    }
    let mut search = Search::new(instance, limits.max_nodes, 1, true);
    let initial_candidates = search.candidate_map(&initial);
    match search.dfs(&initial) {
        Ok(true) => {
            let trajectory = Trajectory {
                initial_state: initial,
                initial_candidates,
                steps: std::mem::take(&mut search.steps),
                final_state: search.first.expect("recorded on success"),
            };
            let rendered = trajectory.to_text().len();
            if rendered > limits.max_trace_chars {
                TraceOutcome::BudgetExceeded {
                    nodes: search.nodes,
                    rendered_chars: Some(rendered),
                }
            } else {
                TraceOutcome::Trace(Box::new(trajectory))
            }
        }
        Ok(false) => TraceOutcome::Unsat,
        Err(NodeBudget) => TraceOutcome::BudgetExceeded { nodes: search.nodes, rendered_chars: None },
    }
}

/// A start state with violations (contradictory givens) or a doomed branch
/// needs no search at all.
fn check_start(instance: &PuzzleInstance, initial: &Grid) -> bool {
    instance.check_constraints(initial).map(|v| v.is_empty()).unwrap_or(false)
        && !instance.constraints().iter().any(|c| c.prunes_search(initial))
}

/// Step-level legality: does assigning `value` at `cell` break any rule
/// right now? Long-term solvability is deliberately ignored.
pub fn valid_action(
    instance: &PuzzleInstance,
    state: &Grid,
    cell: Coord,
    value: Symbol,
) -> Result<ActionCheck, InstanceError> {
    let next = instance.apply_assignment(state, cell, value)?;
    let violations = instance.check_constraints(&next)?;
    Ok(if violations.is_empty() { ActionCheck::Valid } else { ActionCheck::Invalid(violations) })
}
