//! Evaluation query emission: four question kinds per puzzle, posed against
//! either a rendered image or a text board, with machine-computed ground
//! truth. Question wording comes verbatim from the frozen prompt sets in
//! [`crate::rules::prompts`]; only `{Rule}`, `{row}`, `{col}` and the value
//! slot are substituted.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{CellState, Coord};
use crate::instance::{InstanceError, PuzzleInstance};
use crate::render;
use crate::rules::PuzzleId;
use crate::solver::{self, ActionCheck};
use crate::symbol::{Symbol, SYM_S};

/// Evaluation protocol defaults: five independent runs of twenty boards.
pub const RUNS_PER_CONFIG: usize = 5;
pub const INSTANCES_PER_RUN: usize = 20;

#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum QueryKind {
    #[serde(rename = "cell-at")]
    CellAt,
    #[serde(rename = "direct-solution")]
    DirectSolution,
    #[serde(rename = "valid-action")]
    ValidAction,
    #[serde(rename = "cot-solution")]
    CoTSolution,
}

impl QueryKind {
    pub const ALL: [QueryKind; 4] = [
        QueryKind::CellAt,
        QueryKind::DirectSolution,
        QueryKind::ValidAction,
        QueryKind::CoTSolution,
    ];

    pub fn id(self) -> &'static str {
        match self {
            QueryKind::CellAt => "cell-at",
            QueryKind::DirectSolution => "direct-solution",
            QueryKind::ValidAction => "valid-action",
            QueryKind::CoTSolution => "cot-solution",
        }
    }

    pub fn parse(s: &str) -> Option<QueryKind> {
        QueryKind::ALL.into_iter().find(|k| k.id() == s)
    }

    /// Cell-level kinds take a target; board-level kinds must not.
    pub fn takes_target(self) -> bool {
        matches!(self, QueryKind::CellAt | QueryKind::ValidAction)
    }
}

impl std::fmt::Display for QueryKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.id())
    }
}

/// Cell (and, where the wording has a slot for it, value) a query asks about.
#[derive(Copy, Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Target {
    pub cell: Coord,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub value: Option<Symbol>,
}

impl Target {
    pub fn cell(row: usize, col: usize) -> Target {
        Target { cell: Coord::new(row, col), value: None }
    }

    pub fn assign(row: usize, col: usize, value: Symbol) -> Target {
        Target { cell: Coord::new(row, col), value: Some(value) }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Modality {
    Image { path: String },
    Text { board: String },
}

/// How the caller wants the board presented.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum ModalityChoice<'a> {
    Image { path: &'a str },
    Text,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GroundTruth {
    /// What the queried cell shows, in the query's own vocabulary.
    CellContent { expected: String },
    ActionValidity { valid: bool },
    /// The posed board plus, when known, one satisfying completion. Any
    /// completion that passes the grader is accepted at scoring time.
    Solution { perception: Vec<Vec<String>>, solution: Option<Vec<Vec<String>>> },
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct QueryRecord {
    pub id: String,
    pub puzzle: PuzzleId,
    pub kind: QueryKind,
    pub prompt: String,
    pub modality: Modality,
    pub ground_truth: GroundTruth,
}

#[derive(Error, Debug)]
pub enum QueryError {
    #[error("{kind} queries need a target {what}")]
    MissingTarget { kind: QueryKind, what: &'static str },
    #[error("target cell ({}, {}) is outside the {rows}x{cols} board", cell.row, cell.col)]
    OutOfBounds { cell: Coord, rows: usize, cols: usize },
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error("writing {path}: {source}")]
    Io { path: String, source: io::Error },
}

/// Builds one query record. `target` is required for cell-level kinds and
/// ignored by board-level ones; the value slot is implied for puzzles whose
/// wording fixes the action ("shade", "place a star", "a light bulb", ...).
pub fn emit_query(
    instance: &PuzzleInstance,
    kind: QueryKind,
    target: Option<Target>,
    modality: ModalityChoice<'_>,
) -> Result<QueryRecord, QueryError> {
    let prompts = instance.definition_id.prompts();
    let template = match kind {
        QueryKind::CellAt => prompts.cell_at,
        QueryKind::DirectSolution => prompts.direct,
        QueryKind::ValidAction => prompts.valid_action,
        QueryKind::CoTSolution => prompts.cot,
    };

    let target = if kind.takes_target() {
        let t = target.ok_or(QueryError::MissingTarget { kind, what: "cell" })?;
        if t.cell.row >= instance.rows || t.cell.col >= instance.cols {
            return Err(QueryError::OutOfBounds {
                cell: t.cell,
                rows: instance.rows,
                cols: instance.cols,
            });
        }
        Some(t)
    } else {
        None
    };

    let (prompt, acted_value) = fill_template(template, prompts.rule, kind, target.as_ref())?;

    let ground_truth = match kind {
        QueryKind::CellAt => GroundTruth::CellContent {
            expected: cell_content(instance, target.expect("checked").cell),
        },
        QueryKind::ValidAction => {
            let t = target.expect("checked");
            let value = acted_value.ok_or(QueryError::MissingTarget { kind, what: "value" })?;
            GroundTruth::ActionValidity { valid: action_is_valid(instance, t.cell, value)? }
        }
        QueryKind::DirectSolution | QueryKind::CoTSolution => GroundTruth::Solution {
            perception: render::display_rows(instance),
            solution: instance.solution.as_ref().map(|g| g.token_rows()),
        },
    };

    let modality = match modality {
        ModalityChoice::Image { path } => Modality::Image { path: path.to_string() },
        ModalityChoice::Text => Modality::Text { board: encode_text_board(instance) },
    };

    let mut id = format!(
        "{}-{}-s{}-{}",
        instance.definition_id.id(),
        instance.difficulty,
        instance.seed,
        kind.id()
    );
    if let Some(t) = target {
        write!(id, "-r{}c{}", t.cell.row, t.cell.col).expect("write to string");
        if let Some(v) = acted_value {
            write!(id, "-{v}").expect("write to string");
        }
    }

    Ok(QueryRecord { id, puzzle: instance.definition_id, kind, prompt, modality, ground_truth })
}

/// Substitutes the placeholders and resolves the acted-on value for
/// valid-action queries (explicit slot, the Binairo piece slot, or the
/// wording-implied "s" for shade/star/bulb/fill actions).
fn fill_template(
    template: &str,
    rule: &str,
    kind: QueryKind,
    target: Option<&Target>,
) -> Result<(String, Option<Symbol>), QueryError> {
    let mut text = template.replacen("{Rule}", rule, 1);
    let mut acted = None;
    if let Some(t) = target {
        text = text
            .replace("{row}", &t.cell.row.to_string())
            .replace("{col}", &t.cell.col.to_string());
        if kind == QueryKind::ValidAction {
            let slot = if template.contains("{value}") {
                Some("{value}")
            } else if template.contains("{b, w}") {
                Some("{b, w}")
            } else {
                None
            };
            match slot {
                Some(slot) => {
                    let v = t.value.ok_or(QueryError::MissingTarget { kind, what: "value" })?;
                    text = text.replace(slot, v.as_str());
                    acted = Some(v);
                }
                // "shade" / "place a star" / "a light bulb" / "assign
                // filled" all mean placing the selection mark.
                None => acted = Some(t.value.unwrap_or(SYM_S)),
            }
        }
    }
    Ok((text, acted))
}

/// Immediate-rule validity, treating an attempt to overwrite a given or a
/// structural cell as invalid rather than as a caller error.
fn action_is_valid(
    instance: &PuzzleInstance,
    cell: Coord,
    value: Symbol,
) -> Result<bool, QueryError> {
    match solver::valid_action(instance, &instance.initial_state(), cell, value) {
        Ok(ActionCheck::Valid) => Ok(true),
        Ok(ActionCheck::Invalid(_)) => Ok(false),
        Err(InstanceError::CellNotAssignable { .. }) => Ok(false),
        Err(e) => Err(e.into()),
    }
}

/// What the posed board shows at one cell, phrased in the vocabulary the
/// puzzle's cell-at question offers.
fn cell_content(instance: &PuzzleInstance, cell: Coord) -> String {
    let state = instance.initial_state().get(cell).expect("bounds checked");
    let token = state.token();
    match instance.definition_id {
        // The answer is the cell's (row weight, column weight) pair.
        PuzzleId::Kakurasu => format!("({}, {})", cell.col + 1, cell.row + 1),
        // Every cell shows its given number; shading is the solution layer.
        PuzzleId::Hitori => {
            instance.structures.givens.as_ref().expect("validated")[cell.row][cell.col].to_string()
        }
        PuzzleId::Aquarium => match state {
            CellState::Assigned(_) => "water".into(),
            _ => "empty".into(),
        },
        PuzzleId::BattleShips => match state {
            CellState::Assigned(s) if s == SYM_S => "ship".into(),
            CellState::Assigned(_) => "empty".into(),
            _ => "unknown".into(),
        },
        PuzzleId::FieldExplore => match state {
            CellState::Assigned(_) => "number".into(),
            _ => "hidden".into(),
        },
        PuzzleId::LightUp => token.into(),
        PuzzleId::Nonogram => match state {
            CellState::Assigned(s) if s == SYM_S => "shaded".into(),
            _ => "empty".into(),
        },
        PuzzleId::StarBattle => match state {
            CellState::Assigned(s) if s == SYM_S => "star".into(),
            _ => "empty".into(),
        },
        PuzzleId::Thermometers => match state {
            CellState::Assigned(s) if s == SYM_S => "filled".into(),
            _ => "empty".into(),
        },
        PuzzleId::TreesAndTents => match token {
            "tr" => "tree".into(),
            "tt" => "tent".into(),
            _ => "empty".into(),
        },
        // Binairo answers with the piece letter, digit puzzles with the
        // digit; unknown cells are "empty" throughout.
        _ => match state {
            CellState::Unknown => "empty".into(),
            _ => token.into(),
        },
    }
}

/// Nested-list board plus labeled structural clue lists — the text-modality
/// stand-in for the screenshot.
pub fn encode_text_board(instance: &PuzzleInstance) -> String {
    let mut out = nested(&render::display_rows(instance));
    let s = &instance.structures;
    let coord = |c: &Coord| format!("({}, {})", c.row, c.col);

    if let Some(regions) = &s.regions {
        push_line(&mut out, "regions", &nested_nums(regions));
    }
    if let Some(groups) = &s.color_groups {
        push_line(&mut out, "color_groups", &nested_nums(groups));
    }
    if let Some(cages) = &s.cages {
        let body = cages
            .iter()
            .map(|c| {
                format!(
                    "{{cells: [{}], target: {}}}",
                    c.cells.iter().map(&coord).collect::<Vec<_>>().join(", "),
                    c.target
                )
            })
            .collect::<Vec<_>>()
            .join(", ");
        push_line(&mut out, "cages", &format!("[{body}]"));
    }
    if let Some(parity) = &s.parity {
        let rows: Vec<Vec<String>> = parity
            .iter()
            .map(|row| row.iter().map(|&even| if even { "even" } else { "odd" }.into()).collect())
            .collect();
        push_line(&mut out, "parity", &nested(&rows));
    }
    if let Some(v) = &s.row_counts {
        push_line(&mut out, "row_counts", &num_list(v));
    }
    if let Some(v) = &s.col_counts {
        push_line(&mut out, "col_counts", &num_list(v));
    }
    if let Some(v) = &s.row_sums {
        push_line(&mut out, "row_sums", &num_list(v));
    }
    if let Some(v) = &s.col_sums {
        push_line(&mut out, "col_sums", &num_list(v));
    }
    if let Some(runs) = &s.row_runs {
        push_line(&mut out, "row_runs", &nested_nums(runs));
    }
    if let Some(runs) = &s.col_runs {
        push_line(&mut out, "col_runs", &nested_nums(runs));
    }
    if let Some(ineqs) = &s.inequalities {
        let body = ineqs
            .iter()
            .map(|q| format!("{} < {}", coord(&q.small), coord(&q.large)))
            .collect::<Vec<_>>()
            .join(", ");
        push_line(&mut out, "inequalities", &format!("[{body}]"));
    }
    if let Some(dots) = &s.dots {
        let body = dots
            .iter()
            .map(|d| format!("({}, {})", coord(&d.a), coord(&d.b)))
            .collect::<Vec<_>>()
            .join(", ");
        push_line(&mut out, "dots", &format!("[{body}]"));
    }
    if let Some(views) = &s.view_clues {
        push_line(&mut out, "view_top", &num_list(&views.top));
        push_line(&mut out, "view_bottom", &num_list(&views.bottom));
        push_line(&mut out, "view_left", &num_list(&views.left));
        push_line(&mut out, "view_right", &num_list(&views.right));
    }
    if let Some(walls) = &s.walls {
        let body = walls
            .iter()
            .map(|w| match w.count {
                Some(k) => format!("({}, {k})", coord(&w.at)),
                None => format!("({}, none)", coord(&w.at)),
            })
            .collect::<Vec<_>>()
            .join(", ");
        push_line(&mut out, "walls", &format!("[{body}]"));
    }
    if let Some(thermos) = &s.thermometers {
        let body = thermos
            .iter()
            .map(|path| format!("[{}]", path.iter().map(&coord).collect::<Vec<_>>().join(", ")))
            .collect::<Vec<_>>()
            .join(", ");
        push_line(&mut out, "thermometers", &format!("[{body}]"));
    }
    if let Some(fleet) = &s.fleet {
        push_line(&mut out, "fleet", &num_list(fleet));
    }
    if let Some(givens) = &s.givens {
        push_line(&mut out, "givens", &nested_nums(givens));
    }
    // Trees and number clues already appear as board tokens.
    out
}

fn push_line(out: &mut String, label: &str, body: &str) {
    out.push('\n');
    out.push_str(label);
    out.push_str(": ");
    out.push_str(body);
}

fn nested(rows: &[Vec<String>]) -> String {
    format!(
        "[{}]",
        rows.iter().map(|r| format!("[{}]", r.join(", "))).collect::<Vec<_>>().join(", ")
    )
}

fn nested_nums<T: std::fmt::Display>(rows: &[Vec<T>]) -> String {
    format!(
        "[{}]",
        rows.iter().map(|r| num_list(r)).collect::<Vec<_>>().join(", ")
    )
}

fn num_list<T: std::fmt::Display>(xs: &[T]) -> String {
    format!("[{}]", xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "))
}

/// Seed plan for the evaluation protocol: `runs` lists of `per_run` distinct
/// instance seeds, all derived from one base seed on a dedicated stream so
/// the composition never collides with generation streams.
pub fn run_seeds(base_seed: u64, runs: usize, per_run: usize) -> Vec<Vec<u64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(base_seed);
    rng.set_stream(2);
    let mut seen = HashSet::new();
    (0..runs)
        .map(|_| {
            (0..per_run)
                .map(|_| loop {
                    let s: u64 = rng.random();
                    if seen.insert(s) {
                        break s;
                    }
                })
                .collect()
        })
        .collect()
}

pub fn to_jsonl(records: &[QueryRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("record serializes"));
        out.push('\n');
    }
    out
}

pub fn write_jsonl(records: &[QueryRecord], path: &Path) -> Result<(), QueryError> {
    let io_err = |source| QueryError::Io { path: path.display().to_string(), source };
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(io_err)?;
    }
    fs::write(path, to_jsonl(records)).map_err(io_err)
}

pub fn read_jsonl(body: &str) -> Result<Vec<QueryRecord>, serde_json::Error> {
    body.lines().filter(|l| !l.trim().is_empty()).map(serde_json::from_str).collect()
}
