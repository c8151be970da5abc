//! Independent oracles for the acceptance suite.
//!
//! The enumerator here deliberately shares nothing with the solver's search:
//! cells are visited in fixed row-major order, there is no value ordering,
//! no candidate propagation and no heuristics — just assign, check, recurse.
//! Agreement between the two is therefore evidence about the solver, not a
//! tautology.

use gridforge_core::grid::{CellState, Coord, Grid};
use gridforge_core::instance::{Condition, PuzzleInstance};
use gridforge_core::symbol::Symbol;
use rand::seq::SliceRandom;
use rand::Rng;

/// Every solution reachable from the instance's initial state, up to `cap`.
/// Partial states that already violate a constraint are pruned (the
/// constraint predicate is the shared ground truth; the search strategy is
/// what this oracle keeps independent).
pub fn enumerate_solutions(instance: &PuzzleInstance, cap: usize) -> Vec<Grid> {
    let mut state = instance.initial_state();
    if instance.check_constraints(&state).map_or(true, |v| !v.is_empty()) {
        return Vec::new();
    }
    let cells = state.unknown_cells();
    let alphabet = instance.alphabet();
    let mut found = Vec::new();
    descend(instance, &cells, 0, &mut state, &alphabet, &mut found, cap);
    found
}

fn descend(
    instance: &PuzzleInstance,
    cells: &[Coord],
    depth: usize,
    state: &mut Grid,
    alphabet: &[Symbol],
    found: &mut Vec<Grid>,
    cap: usize,
) {
    if found.len() >= cap {
        return;
    }
    if depth == cells.len() {
        if instance.is_solved(state).unwrap_or(false) {
            found.push(state.clone());
        }
        return;
    }
    let at = cells[depth];
    for &value in alphabet {
        state.set(at, CellState::Assigned(value)).expect("cell is in bounds");
        if instance.check_constraints(state).map_or(false, |v| v.is_empty()) {
            descend(instance, cells, depth + 1, state, alphabet, found, cap);
        }
    }
    state.set(at, CellState::Unknown).expect("cell is in bounds");
}

/// A copy of `instance` with extra conditions (values taken from its stored
/// solution) so that at most `max_unknown` cells stay empty. Keeps the
/// enumeration space exhaustible.
pub fn cap_unknowns(
    instance: &PuzzleInstance,
    max_unknown: usize,
    rng: &mut impl Rng,
) -> PuzzleInstance {
    let mut unknowns = instance.initial_state().unknown_cells();
    if unknowns.len() <= max_unknown {
        return instance.clone();
    }
    let solution = instance.solution.clone().expect("generated instances store a solution");
    unknowns.shuffle(rng);
    let mut conditions = instance.conditions.clone();
    for at in unknowns.split_off(max_unknown) {
        let value = solution
            .get(at)
            .expect("cell is in bounds")
            .symbol()
            .expect("solution cells are assigned");
        conditions.push(Condition { cell: at, value });
    }
    PuzzleInstance::new(
        instance.definition_id,
        instance.rows,
        instance.cols,
        instance.structures.clone(),
        conditions,
        Some(solution),
        instance.seed,
        instance.difficulty,
    )
    .expect("conditioning solution cells keeps the instance valid")
}

fn permutations(values: &[u32]) -> Vec<Vec<u32>> {
    if values.len() <= 1 {
        return vec![values.to_vec()];
    }
    let mut out = Vec::new();
    for (i, &head) in values.iter().enumerate() {
        let mut rest = values.to_vec();
        rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// Reference count of complete 4x4 block grids, built from first principles:
/// every choice of four permutation rows, filtered by column and 2x2-block
/// uniqueness.
pub fn block_grid_4x4_count_by_permutations() -> usize {
    let perms = permutations(&[1, 2, 3, 4]);
    let mut count = 0;
    for a in &perms {
        for b in &perms {
            for c in &perms {
                for d in &perms {
                    let rows = [a, b, c, d];
                    let cols_ok = (0..4).all(|j| {
                        let mut seen = [false; 5];
                        rows.iter().all(|row| !std::mem::replace(&mut seen[row[j] as usize], true))
                    });
                    if !cols_ok {
                        continue;
                    }
                    let blocks_ok = [(0, 0), (0, 2), (2, 0), (2, 2)].iter().all(|&(r, c)| {
                        let mut seen = [false; 5];
                        (r..r + 2).all(|i| {
                            (c..c + 2).all(|j| {
                                !std::mem::replace(&mut seen[rows[i][j] as usize], true)
                            })
                        })
                    });
                    if blocks_ok {
                        count += 1;
                    }
                }
            }
        }
    }
    count
}
