//! Scoring of model responses: cell-token normalization, perception and
//! solution grading, run-level aggregation, and the reward terms used for
//! group-relative policy optimization.
//!
//! Everything here is pure and deterministic. Unparseable responses are
//! graded incorrect — never dropped — so success rates always divide by the
//! number of asked queries.

pub mod repair;

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::grid::{CellState, Coord, Grid};
use crate::instance::PuzzleInstance;
use crate::query::{GroundTruth, QueryKind, QueryRecord, INSTANCES_PER_RUN, RUNS_PER_CONFIG};
use crate::render;
use crate::symbol::{Symbol, SYM_E};

pub use repair::{repair_structured, ParseOutcome};

#[derive(Error, Debug)]
pub enum GradeError {
    #[error("unrecognized cell token {token:?}")]
    UnknownToken { token: String },
    #[error("advantage groups need at least two rollouts, got {len}")]
    GroupTooSmall { len: usize },
    #[error("{puzzle}/{kind} run {run}: expected {want} records, found {got}")]
    IncompleteRun { puzzle: String, kind: String, run: usize, want: usize, got: usize },
    #[error("query {id}: ground truth does not fit a {kind} query")]
    TruthMismatch { id: String, kind: QueryKind },
    #[error("query {id}: solution grading needs the posed instance")]
    MissingInstance { id: String },
    #[error("writing {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

// ---------------------------------------------------------------------------
// Token normalization

fn clean_token(token: &str) -> String {
    token
        .trim()
        .trim_matches(|c| c == '"' || c == '\'')
        .trim()
        .to_ascii_lowercase()
}

/// Canonical form of one cell token: blank spellings (`""`, `"0"`, `"."`,
/// `"_"`, `"*"`) collapse to `"*"`, alphabet tokens lowercase, digit strings
/// pass through. Unrecognized text is an error and grades as incorrect at
/// the call site. Idempotent over its own outputs.
pub fn normalize_cell_token(token: &str) -> Result<String, GradeError> {
    let lower = clean_token(token);
    if matches!(lower.as_str(), "" | "0" | "." | "_" | "*") {
        return Ok("*".to_string());
    }
    if Symbol::parse(&lower).is_some() || lower.bytes().all(|b| b.is_ascii_digit()) {
        return Ok(lower);
    }
    Err(GradeError::UnknownToken { token: token.to_string() })
}

// ---------------------------------------------------------------------------
// Perception grading

#[derive(Copy, Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct PerceptionGrade {
    pub exact: bool,
    pub cell_accuracy: f64,
}

/// Compares a claimed board reading against the displayed board. Cells are
/// token-normalized before comparison; accuracy divides matches over the
/// larger of the two cell counts, so a truncated or padded reading loses the
/// missing or invented cells.
pub fn grade_perception(pred: &[Vec<String>], truth: &[Vec<String>]) -> PerceptionGrade {
    let cells = |g: &[Vec<String>]| g.iter().map(Vec::len).sum::<usize>();
    let total = cells(pred).max(cells(truth));
    if total == 0 {
        return PerceptionGrade { exact: true, cell_accuracy: 1.0 };
    }
    let mut matches = 0usize;
    for (p_row, t_row) in pred.iter().zip(truth) {
        for (p, t) in p_row.iter().zip(t_row) {
            if let (Ok(a), Ok(b)) = (normalize_cell_token(p), normalize_cell_token(t)) {
                if a == b {
                    matches += 1;
                }
            }
        }
    }
    let same_shape =
        pred.len() == truth.len() && pred.iter().zip(truth).all(|(a, b)| a.len() == b.len());
    PerceptionGrade {
        exact: same_shape && matches == total,
        cell_accuracy: matches as f64 / total as f64,
    }
}

// ---------------------------------------------------------------------------
// Solution grading

/// Whether `pred` is a complete assignment that satisfies every constraint
/// and extends the posed conditions. Any valid completion passes; the
/// generator's stored solution is not privileged. Structural cells may echo
/// either their token or the number printed on the board (a numbered wall or
/// count clue), since that is what a reader of the image sees.
pub fn grade_solution(pred: &[Vec<String>], instance: &PuzzleInstance) -> bool {
    if pred.len() != instance.rows || pred.iter().any(|r| r.len() != instance.cols) {
        return false;
    }
    let fixed: BTreeMap<Coord, CellState> = instance.fixed_cells().into_iter().collect();
    let mut printed: BTreeMap<Coord, String> = BTreeMap::new();
    if let Some(walls) = &instance.structures.walls {
        for w in walls {
            if let Some(k) = w.count {
                printed.insert(w.at, k.to_string());
            }
        }
    }
    if let Some(clues) = &instance.structures.number_clues {
        for c in clues {
            printed.insert(c.at, c.count.to_string());
        }
    }

    let mut grid = match Grid::new(instance.rows, instance.cols) {
        Ok(g) => g,
        Err(_) => return false,
    };
    for (r, row) in pred.iter().enumerate() {
        for (c, cell) in row.iter().enumerate() {
            let at = Coord::new(r, c);
            let raw = clean_token(cell);
            let echoes_print = printed.get(&at).is_some_and(|p| *p == raw);
            let state = match fixed.get(&at) {
                Some(CellState::Blocked) => {
                    if raw != "w" && !echoes_print {
                        return false;
                    }
                    CellState::Blocked
                }
                Some(CellState::Assigned(sym)) => {
                    if raw != sym.as_str() && !(*sym == SYM_E && echoes_print) {
                        return false;
                    }
                    CellState::Assigned(*sym)
                }
                _ => {
                    let Ok(tok) = normalize_cell_token(cell) else { return false };
                    if tok == "*" {
                        return false;
                    }
                    match Symbol::parse(&tok) {
                        Some(sym) => CellState::Assigned(sym),
                        None => return false,
                    }
                }
            };
            if grid.set(at, state).is_err() {
                return false;
            }
        }
    }
    for cond in &instance.conditions {
        if grid.get(cond.cell) != Ok(CellState::Assigned(cond.value)) {
            return false;
        }
    }
    instance.is_solved(&grid).unwrap_or(false)
}

// ---------------------------------------------------------------------------
// Scalar-answer grading (cell-at and valid-action queries)

/// Vocabulary words a cell-at query can answer with, beyond alphabet tokens,
/// digit strings, and `(column, row)` weight pairs.
const ANSWER_WORDS: [&str; 11] = [
    "empty", "water", "ship", "unknown", "number", "hidden", "shaded", "star", "filled", "tree",
    "tent",
];

fn canon_answer(text: &str) -> String {
    let mut s: String = text
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect::<String>()
        .to_ascii_lowercase();
    while s.ends_with('.') {
        s.pop();
    }
    s.trim_matches(|c| c == '"' || c == '\'').to_string()
}

/// Reads a `(3, 2)` style integer pair starting at byte `i`; returns the
/// canonical pair text and the index past the closing parenthesis.
fn read_pair(lower: &str, i: usize) -> Option<(String, usize)> {
    let bytes = lower.as_bytes();
    let mut j = i + 1;
    let mut nums = Vec::new();
    for round in 0..2 {
        while j < bytes.len() && bytes[j].is_ascii_whitespace() {
            j += 1;
        }
        let start = j;
        while j < bytes.len() && bytes[j].is_ascii_digit() {
            j += 1;
        }
        if j == start {
            return None;
        }
        nums.push(&lower[start..j]);
        while j < bytes.len() && bytes[j].is_ascii_whitespace() {
            j += 1;
        }
        let want = if round == 0 { b',' } else { b')' };
        if bytes.get(j) != Some(&want) {
            return None;
        }
        j += 1;
    }
    Some((format!("({},{})", nums[0], nums[1]), j))
}

/// Splits free text into answer-candidate tokens: alphanumeric runs (with
/// `*`, `_`, `.`) and parenthesized integer pairs, lowercased in order.
fn answer_tokens(raw: &str) -> Vec<String> {
    let lower = raw.to_ascii_lowercase();
    let bytes = lower.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        if b == b'(' {
            if let Some((tok, end)) = read_pair(&lower, i) {
                out.push(tok);
                i = end;
                continue;
            }
            i += 1;
        } else if b.is_ascii_alphanumeric() || matches!(b, b'*' | b'_' | b'.') {
            let start = i;
            while i < bytes.len()
                && (bytes[i].is_ascii_alphanumeric() || matches!(bytes[i], b'*' | b'_' | b'.'))
            {
                i += 1;
            }
            let tok = lower[start..i].trim_matches('.');
            if !tok.is_empty() {
                out.push(tok.to_string());
            }
        } else {
            i += 1;
        }
    }
    out
}

fn is_answer_token(tok: &str) -> bool {
    tok == "*"
        || tok.starts_with('(')
        || (!tok.is_empty() && tok.bytes().all(|b| b.is_ascii_digit()))
        || Symbol::parse(tok).is_some()
        || ANSWER_WORDS.contains(&tok)
}

fn lookup_ci<'a>(map: &'a serde_json::Map<String, Value>, key: &str) -> Option<&'a Value> {
    map.iter().find(|(k, _)| k.eq_ignore_ascii_case(key)).map(|(_, v)| v)
}

fn scalar_text_value(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        Value::Bool(b) => Some(b.to_string()),
        _ => None,
    }
}

fn answer_field_text(value: &Value) -> Option<String> {
    let map = value.as_object()?;
    ["answer", "solution", "value", "content", "verdict", "final"]
        .iter()
        .find_map(|key| lookup_ci(map, key).and_then(scalar_text_value))
}

/// Grades a cell-content answer. Accepts the bare token, a structured
/// `{"answer": ...}` field, or prose; in prose the last recognizable answer
/// token is the model's answer, so trailing pleasantries do not change the
/// grade. Nothing recognizable grades incorrect.
pub fn grade_cell_at(response: &str, expected: &str) -> bool {
    let want = canon_answer(expected);
    if canon_answer(response) == want {
        return true;
    }
    if let Some((value, _)) = repair_structured(response) {
        if let Some(text) = answer_field_text(&value) {
            if canon_answer(&text) == want {
                return true;
            }
        }
    }
    answer_tokens(response)
        .into_iter()
        .rev()
        .find(|t| is_answer_token(t))
        .is_some_and(|t| canon_answer(&t) == want)
}

fn read_verdict(text: &str) -> Option<bool> {
    match canon_answer(text).as_str() {
        "valid" | "yes" | "true" => Some(true),
        "invalid" | "no" | "false" => Some(false),
        _ => None,
    }
}

/// Grades a validity verdict. The last `valid`/`invalid` word wins (a
/// preceding `not` flips it); a structured answer field is honored first.
/// No verdict at all grades incorrect.
pub fn grade_valid_action(response: &str, valid: bool) -> bool {
    let mut verdict: Option<bool> = None;
    if let Some((value, _)) = repair_structured(response) {
        verdict = answer_field_text(&value).as_deref().and_then(read_verdict);
        if verdict.is_none() {
            verdict = value
                .as_object()
                .and_then(|m| lookup_ci(m, "answer"))
                .and_then(Value::as_bool);
        }
    }
    if verdict.is_none() {
        let mut prev = String::new();
        for tok in answer_tokens(response) {
            match tok.as_str() {
                "valid" => verdict = Some(prev != "not"),
                "invalid" => verdict = Some(prev == "not"),
                _ => {}
            }
            prev = tok;
        }
    }
    verdict == Some(valid)
}

// ---------------------------------------------------------------------------
// Response interpretation

/// A model response digested into its addressable parts.
#[derive(Clone, Debug)]
pub struct Interpreted {
    pub outcome: ParseOutcome,
    pub perception: Option<Vec<Vec<String>>>,
    pub think: Option<String>,
    pub answer: Option<Vec<Vec<String>>>,
    pub answer_text: Option<String>,
}

fn extract_tag(raw: &str, tag: &str) -> Option<String> {
    let lower = raw.to_ascii_lowercase();
    let open = format!("<{tag}>");
    let close = format!("</{tag}>");
    let start = lower.rfind(&open)? + open.len();
    let end = lower[start..].find(&close).map_or(raw.len(), |i| start + i);
    Some(raw[start..end].to_string())
}

fn value_to_grid(v: &Value) -> Option<Vec<Vec<String>>> {
    let rows = v.as_array()?;
    if rows.is_empty() || !rows.iter().all(Value::is_array) {
        return None;
    }
    let mut grid = Vec::with_capacity(rows.len());
    for row in rows {
        let cells = row.as_array()?;
        let mut toks = Vec::with_capacity(cells.len());
        for cell in cells {
            toks.push(match cell {
                Value::Null => String::new(),
                other => scalar_text_value(other)?,
            });
        }
        grid.push(toks);
    }
    Some(grid)
}

/// Parses one tag body into a grid; reports whether strict JSON sufficed.
fn grid_from_text(body: &str) -> (Option<Vec<Vec<String>>>, bool) {
    let trimmed = body.trim();
    if trimmed.is_empty() {
        return (None, true);
    }
    match repair_structured(trimmed) {
        Some((value, oc)) => {
            let grid = match &value {
                Value::Object(map) => ["answer", "solution", "perception", "final", "output"]
                    .iter()
                    .find_map(|k| lookup_ci(map, k))
                    .and_then(value_to_grid),
                other => value_to_grid(other),
            };
            (grid, oc == ParseOutcome::Structured)
        }
        None => (None, true),
    }
}

/// Digests a raw response. `<perception>`/`<think>`/`<answer>` tags take
/// priority (the trained output format); otherwise the whole text goes
/// through structured repair, honoring `answer`/`solution` object fields or
/// a bare grid. The outcome records how much tolerance was needed.
pub fn interpret(raw: &str) -> Interpreted {
    let mut out = Interpreted {
        outcome: ParseOutcome::Unparseable,
        perception: None,
        think: extract_tag(raw, "think").map(|b| b.trim().to_string()),
        answer: None,
        answer_text: None,
    };
    let tagged_perception = extract_tag(raw, "perception");
    let tagged_answer = extract_tag(raw, "answer");
    if tagged_perception.is_some() || tagged_answer.is_some() {
        let mut all_strict = true;
        if let Some(body) = tagged_perception {
            let (grid, strict) = grid_from_text(&body);
            all_strict &= strict;
            out.perception = grid;
        }
        if let Some(body) = tagged_answer {
            let (grid, strict) = grid_from_text(&body);
            all_strict &= strict;
            out.answer = grid;
            if out.answer.is_none() {
                let text = body.trim();
                if !text.is_empty() {
                    out.answer_text = Some(text.to_string());
                }
            }
        }
        let usable =
            out.perception.is_some() || out.answer.is_some() || out.answer_text.is_some();
        out.outcome = match (usable, all_strict) {
            (false, _) => ParseOutcome::Unparseable,
            (true, true) => ParseOutcome::Structured,
            (true, false) => ParseOutcome::Repaired,
        };
        return out;
    }

    if let Some((value, outcome)) = repair_structured(raw) {
        match &value {
            Value::Object(map) => {
                out.perception = lookup_ci(map, "perception").and_then(value_to_grid);
                if out.think.is_none() {
                    out.think = lookup_ci(map, "think")
                        .or_else(|| lookup_ci(map, "reasoning"))
                        .and_then(Value::as_str)
                        .map(str::to_string);
                }
                for key in ["answer", "solution", "final", "output"] {
                    if let Some(v) = lookup_ci(map, key) {
                        out.answer = value_to_grid(v);
                        if out.answer.is_none() {
                            out.answer_text = scalar_text_value(v);
                        }
                        break;
                    }
                }
            }
            arr @ Value::Array(_) => out.answer = value_to_grid(arr),
            other => out.answer_text = scalar_text_value(other),
        }
        let usable = out.perception.is_some()
            || out.answer.is_some()
            || out.answer_text.is_some()
            || out.think.is_some();
        out.outcome = if usable { outcome } else { ParseOutcome::Unparseable };
    }
    out
}

// ---------------------------------------------------------------------------
// Per-record grading

/// One raw model response, keyed to its query and evaluation run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResponseRecord {
    pub query_id: String,
    #[serde(default)]
    pub run: usize,
    pub response: String,
}

pub fn read_responses_jsonl(body: &str) -> serde_json::Result<Vec<ResponseRecord>> {
    body.lines().filter(|l| !l.trim().is_empty()).map(serde_json::from_str).collect()
}

use crate::rules::PuzzleId;

/// The verdict on one response. `cell_accuracy` is present for solution
/// queries only (the perception read-back score).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GradedRecord {
    pub query_id: String,
    pub puzzle: PuzzleId,
    pub kind: QueryKind,
    pub run: usize,
    pub correct: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cell_accuracy: Option<f64>,
    pub parse: ParseOutcome,
}

fn scalar_outcome(response: &str, recognized: bool) -> ParseOutcome {
    match repair_structured(response) {
        Some((_, ParseOutcome::Structured)) => ParseOutcome::Structured,
        Some(_) => ParseOutcome::Repaired,
        None if recognized => ParseOutcome::Repaired,
        None => ParseOutcome::Unparseable,
    }
}

/// Grades one response against its query. Solution queries need the posed
/// instance (the grader checks constraints, not string equality).
pub fn grade_record(
    query: &QueryRecord,
    response: &str,
    run: usize,
    instance: Option<&PuzzleInstance>,
) -> Result<GradedRecord, GradeError> {
    let (correct, cell_accuracy, parse) = match (query.kind, &query.ground_truth) {
        (QueryKind::CellAt, GroundTruth::CellContent { expected }) => {
            let correct = grade_cell_at(response, expected);
            let recognized = answer_tokens(response).iter().any(|t| is_answer_token(t));
            (correct, None, scalar_outcome(response, recognized))
        }
        (QueryKind::ValidAction, GroundTruth::ActionValidity { valid }) => {
            let correct = grade_valid_action(response, *valid);
            // A verdict was found iff the response grades true against
            // exactly one polarity.
            let recognized =
                grade_valid_action(response, true) != grade_valid_action(response, false);
            (correct, None, scalar_outcome(response, recognized))
        }
        (
            QueryKind::DirectSolution | QueryKind::CoTSolution,
            GroundTruth::Solution { perception, .. },
        ) => {
            let instance =
                instance.ok_or_else(|| GradeError::MissingInstance { id: query.id.clone() })?;
            let interp = interpret(response);
            let correct = interp.answer.as_deref().is_some_and(|g| grade_solution(g, instance));
            let accuracy = interp
                .perception
                .as_deref()
                .map_or(0.0, |p| grade_perception(p, perception).cell_accuracy);
            (correct, Some(accuracy), interp.outcome)
        }
        _ => return Err(GradeError::TruthMismatch { id: query.id.clone(), kind: query.kind }),
    };
    Ok(GradedRecord {
        query_id: query.id.clone(),
        puzzle: query.puzzle,
        kind: query.kind,
        run,
        correct,
        cell_accuracy,
        parse,
    })
}

// ---------------------------------------------------------------------------
// Aggregation

/// The evaluation protocol: how many runs, how many instances per run, and
/// how to treat short runs. Strict mode refuses them; lenient mode scores
/// them pro rata and flags the group.
#[derive(Copy, Clone, Debug, Serialize, Deserialize)]
pub struct RunProtocol {
    pub runs: usize,
    pub per_run: usize,
    pub lenient: bool,
    /// Use the sample (n-1) standard deviation instead of the population
    /// one. Off by default: the runs are the whole protocol, not a sample.
    pub sample_std: bool,
}

impl Default for RunProtocol {
    fn default() -> Self {
        RunProtocol {
            runs: RUNS_PER_CONFIG,
            per_run: INSTANCES_PER_RUN,
            lenient: false,
            sample_std: false,
        }
    }
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

/// Population standard deviation (divides by n).
pub fn population_std(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / xs.len() as f64).sqrt()
}

/// Sample standard deviation (divides by n-1); zero for fewer than two points.
pub fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

fn is_false(b: &bool) -> bool {
    !*b
}

/// Success statistics for one puzzle/query-kind group.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KindStats {
    pub mean: f64,
    pub std_dev: f64,
    pub run_rates: Vec<f64>,
    pub samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_cell_accuracy: Option<f64>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub pro_rata: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MetricsReport {
    pub runs: usize,
    pub per_run: usize,
    /// puzzle id -> query kind id -> per-run success statistics.
    pub puzzles: BTreeMap<String, BTreeMap<String, KindStats>>,
    /// taxonomy tag -> query kind id -> mean of member-puzzle rates.
    pub taxonomy: BTreeMap<String, BTreeMap<String, f64>>,
}

impl MetricsReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Rolls graded records up into per-run rates, then means and standard
/// deviations per puzzle and query kind, plus the taxonomy view (each tag
/// averages the mean rates of its member puzzles).
pub fn aggregate(
    records: &[GradedRecord],
    protocol: &RunProtocol,
) -> Result<MetricsReport, GradeError> {
    let mut groups: BTreeMap<(String, String), (PuzzleId, Vec<&GradedRecord>)> = BTreeMap::new();
    for rec in records {
        groups
            .entry((rec.puzzle.id().to_string(), rec.kind.id().to_string()))
            .or_insert_with(|| (rec.puzzle, Vec::new()))
            .1
            .push(rec);
    }

    let mut puzzles: BTreeMap<String, BTreeMap<String, KindStats>> = BTreeMap::new();
    let mut taxonomy_rates: BTreeMap<String, BTreeMap<String, Vec<f64>>> = BTreeMap::new();
    for ((puzzle, kind), (id, recs)) in &groups {
        let mut run_rates = Vec::with_capacity(protocol.runs);
        let mut pro_rata = false;
        for run in 0..protocol.runs {
            let in_run: Vec<_> = recs.iter().filter(|r| r.run == run).collect();
            if in_run.len() != protocol.per_run {
                if !protocol.lenient || in_run.is_empty() {
                    return Err(GradeError::IncompleteRun {
                        puzzle: puzzle.clone(),
                        kind: kind.clone(),
                        run,
                        want: protocol.per_run,
                        got: in_run.len(),
                    });
                }
                pro_rata = true;
            }
            let correct = in_run.iter().filter(|r| r.correct).count();
            run_rates.push(correct as f64 / in_run.len() as f64);
        }
        let accs: Vec<f64> = recs.iter().filter_map(|r| r.cell_accuracy).collect();
        let group_mean = mean(&run_rates);
        let std_dev =
            if protocol.sample_std { sample_std(&run_rates) } else { population_std(&run_rates) };
        for tag in id.definition().taxonomy {
            taxonomy_rates
                .entry(tag.name().to_string())
                .or_default()
                .entry(kind.clone())
                .or_default()
                .push(group_mean);
        }
        puzzles.entry(puzzle.clone()).or_default().insert(
            kind.clone(),
            KindStats {
                mean: group_mean,
                std_dev,
                run_rates,
                samples: recs.len(),
                mean_cell_accuracy: (!accs.is_empty()).then(|| mean(&accs)),
                pro_rata,
            },
        );
    }
    let taxonomy = taxonomy_rates
        .into_iter()
        .map(|(tag, kinds)| {
            (tag, kinds.into_iter().map(|(k, rates)| (k, mean(&rates))).collect())
        })
        .collect();
    Ok(MetricsReport { runs: protocol.runs, per_run: protocol.per_run, puzzles, taxonomy })
}

/// Flat per-record verdicts, one CSV row per graded response.
pub fn records_csv(records: &[GradedRecord]) -> String {
    let mut out = String::from("query_id,puzzle,kind,run,correct,cell_accuracy,parse\n");
    for r in records {
        let acc = r.cell_accuracy.map(|a| format!("{a:.6}")).unwrap_or_default();
        let parse = match r.parse {
            ParseOutcome::Structured => "structured",
            ParseOutcome::Repaired => "repaired",
            ParseOutcome::Unparseable => "unparseable",
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.query_id,
            r.puzzle.id(),
            r.kind.id(),
            r.run,
            r.correct,
            acc,
            parse
        ));
    }
    out
}

/// Writes the two plot-feed files next to a report: `radar.json` (taxonomy
/// view) and `bars.json` (per-puzzle mean and spread).
pub fn write_plot_data(report: &MetricsReport, dir: &Path) -> Result<(), GradeError> {
    let io_err =
        |path: &Path, source| GradeError::Io { path: path.display().to_string(), source };
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let radar = dir.join("radar.json");
    let radar_body = serde_json::to_string_pretty(&report.taxonomy).expect("serializes");
    std::fs::write(&radar, radar_body).map_err(|e| io_err(&radar, e))?;
    let bars: BTreeMap<&String, BTreeMap<&String, Value>> = report
        .puzzles
        .iter()
        .map(|(p, kinds)| {
            (
                p,
                kinds
                    .iter()
                    .map(|(k, s)| {
                        (k, serde_json::json!({ "mean": s.mean, "std_dev": s.std_dev }))
                    })
                    .collect(),
            )
        })
        .collect();
    let bars_path = dir.join("bars.json");
    let bars_body = serde_json::to_string_pretty(&bars).expect("serializes");
    std::fs::write(&bars_path, bars_body).map_err(|e| io_err(&bars_path, e))?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Rewards for policy-gradient fine-tuning

/// Weights for the reward terms. `perception` of `None` leaves the
/// perception read-back unscored (the pre-perception training setup).
#[derive(Copy, Clone, Debug, Serialize, Deserialize)]
pub struct RewardWeights {
    pub succ: f64,
    pub fmt: f64,
    pub perception: Option<f64>,
}

impl Default for RewardWeights {
    fn default() -> Self {
        RewardWeights { succ: 1.0, fmt: 1.0, perception: None }
    }
}

#[derive(Copy, Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct Reward {
    pub r_succ: f64,
    pub r_fmt: f64,
    pub r_perc: f64,
    pub r_total: f64,
}

/// Scores one rollout against the posed instance. Format asks only that an
/// answer grid was extractable; success requires the grid to actually solve
/// the instance; perception (when weighted) requires an exact read of the
/// displayed board.
pub fn reward(response: &str, instance: &PuzzleInstance, weights: &RewardWeights) -> Reward {
    let interp = interpret(response);
    let r_fmt = f64::from(interp.answer.is_some());
    let r_succ =
        f64::from(interp.answer.as_deref().is_some_and(|g| grade_solution(g, instance)));
    let r_perc = match (&weights.perception, &interp.perception) {
        (Some(_), Some(p)) => {
            f64::from(grade_perception(p, &render::display_rows(instance)).exact)
        }
        _ => 0.0,
    };
    let r_total =
        weights.succ * r_succ + weights.fmt * r_fmt + weights.perception.unwrap_or(0.0) * r_perc;
    Reward { r_succ, r_fmt, r_perc, r_total }
}

/// Group-relative advantages: each rollout's reward standardized against its
/// group's population statistics. A zero-variance group yields all-zero
/// advantages rather than dividing by zero.
pub fn group_advantage(rewards: &[f64]) -> Result<Vec<f64>, GradeError> {
    if rewards.len() < 2 {
        return Err(GradeError::GroupTooSmall { len: rewards.len() });
    }
    let m = mean(rewards);
    let s = population_std(rewards);
    if s == 0.0 {
        return Ok(vec![0.0; rewards.len()]);
    }
    Ok(rewards.iter().map(|r| (r - m) / s).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{generate_instance, DifficultyProfile};
    use crate::instance::fixtures;
    use crate::instance::Difficulty;
    use crate::query::{emit_query, ModalityChoice, Target};

    fn rows(grid: &[&str]) -> Vec<Vec<String>> {
        grid.iter().map(|r| r.split_whitespace().map(str::to_string).collect()).collect()
    }

    #[test]
    fn blank_spellings_collapse_to_star() {
        for blank in ["0", "", ".", "_", "*", " * ", "\"0\""] {
            assert_eq!(normalize_cell_token(blank).unwrap(), "*", "blank {blank:?}");
        }
        for kept in ["3", "s", "e", "w", "b", "tr", "tt", "12", " B "] {
            let got = normalize_cell_token(kept).unwrap();
            assert_eq!(got, kept.trim().to_ascii_lowercase());
            // Idempotent: a normalized token normalizes to itself.
            assert_eq!(normalize_cell_token(&got).unwrap(), got);
        }
        assert!(normalize_cell_token("**").is_err());
        assert!(normalize_cell_token("x!").is_err());
    }

    #[test]
    fn perception_grading_scores_cells_and_shape() {
        let truth = rows(&["3 * * 2", "* * * *"]);
        let same = grade_perception(&truth, &truth);
        assert!(same.exact);
        assert_eq!(same.cell_accuracy, 1.0);

        // One cell shifted: both the vacated and the occupied position miss.
        let shift = grade_perception(&rows(&["* 2 * *"]), &rows(&["* * 2 *"]));
        assert!(!shift.exact);
        assert_eq!(shift.cell_accuracy, 0.5);

        // Shape mismatch scores the overlap and charges for the remainder.
        let short = grade_perception(&rows(&["3 *"]), &truth);
        assert!(!short.exact);
        assert_eq!(short.cell_accuracy, 2.0 / 8.0);

        // Blank spellings compare equal after normalization.
        let blanks = grade_perception(&rows(&["0 _"]), &rows(&["* ."]));
        assert!(blanks.exact);
    }

    #[test]
    fn solution_grading_accepts_any_valid_completion() {
        use crate::grid::Coord;
        use crate::instance::{Condition, Structures};
        // Only one given, so several completions are valid.
        let loose = PuzzleInstance::new(
            crate::rules::PuzzleId::Sudoku,
            4,
            4,
            Structures::default(),
            vec![Condition { cell: Coord::new(0, 0), value: Symbol::digit(3) }],
            None,
            1,
            Difficulty::Easy,
        )
        .unwrap();
        let a = rows(&["3 1 4 2", "2 4 1 3", "1 3 2 4", "4 2 3 1"]);
        let b = rows(&["3 4 1 2", "1 2 3 4", "4 3 2 1", "2 1 4 3"]);
        assert!(grade_solution(&a, &loose));
        assert!(grade_solution(&b, &loose));

        let worked = fixtures::worked_sudoku();
        assert!(grade_solution(&a, &worked));
        // A grid with duplicate digits in a column fails on constraints.
        let broken = rows(&["2 3 4 1", "4 4 1 2", "4 2 1 3", "3 1 2 4"]);
        assert!(!grade_solution(&broken, &worked));
        // A valid grid that ignores a given fails on the conditions.
        let ignores_given = rows(&["1 2 3 4", "3 4 1 2", "2 1 4 3", "4 3 2 1"]);
        assert!(!grade_solution(&ignores_given, &worked));
        // Unfilled cells and wrong shapes never pass.
        let starred = rows(&["3 1 4 2", "2 4 1 3", "1 3 2 4", "4 2 3 *"]);
        assert!(!grade_solution(&starred, &worked));
        assert!(!grade_solution(&a[..3].to_vec(), &worked));
    }

    #[test]
    fn structural_cells_accept_their_printed_form() {
        // Field-explore count clues display a number; echoing it is as good
        // as the token.
        let (fe, clue) = (0..50)
            .find_map(|seed| {
                let profile =
                    DifficultyProfile::standard(PuzzleId::FieldExplore, Difficulty::Easy)?;
                let inst = generate_instance(PuzzleId::FieldExplore, &profile, seed).ok()?;
                let clue = inst.structures.number_clues.as_ref()?.first().cloned()?;
                Some((inst, clue))
            })
            .expect("an easy field-explore board with a clue");
        let mut tokens = fe.solution.as_ref().unwrap().token_rows();
        assert!(grade_solution(&tokens, &fe));
        tokens[clue.at.row][clue.at.col] = clue.count.to_string();
        assert!(grade_solution(&tokens, &fe));
        tokens[clue.at.row][clue.at.col] = (clue.count + 1).to_string();
        assert!(!grade_solution(&tokens, &fe));

        // Numbered light-up walls likewise accept their printed count.
        let (lu, wall) = (0..50)
            .find_map(|seed| {
                let profile = DifficultyProfile::standard(PuzzleId::LightUp, Difficulty::Easy)?;
                let inst = generate_instance(PuzzleId::LightUp, &profile, seed).ok()?;
                let wall = inst
                    .structures
                    .walls
                    .as_ref()?
                    .iter()
                    .find(|w| w.count.is_some())
                    .cloned()?;
                Some((inst, wall))
            })
            .expect("an easy light-up board with a numbered wall");
        let mut tokens = lu.solution.as_ref().unwrap().token_rows();
        assert!(grade_solution(&tokens, &lu));
        tokens[wall.at.row][wall.at.col] = wall.count.unwrap().to_string();
        assert!(grade_solution(&tokens, &lu));
        tokens[wall.at.row][wall.at.col] = "s".to_string();
        assert!(!grade_solution(&tokens, &lu));
    }

    #[test]
    fn cell_at_grading_tolerates_wrappers() {
        assert!(grade_cell_at("3", "3"));
        assert!(grade_cell_at("The answer is 3.", "3"));
        assert!(grade_cell_at("{\"answer\": \"3\"}", "3"));
        assert!(grade_cell_at("{\"answer\": 3}", "3"));
        assert!(grade_cell_at("empty", "empty"));
        assert!(grade_cell_at("That cell is empty.", "empty"));
        assert!(grade_cell_at("(3, 2)", "(3, 2)"));
        assert!(grade_cell_at("(3,2)", "(3, 2)"));
        assert!(grade_cell_at("the pair is (3, 2)", "(3, 2)"));
        assert!(!grade_cell_at("4", "3"));
        assert!(!grade_cell_at("I cannot tell.", "3"));
        assert!(!grade_cell_at("", "3"));
    }

    #[test]
    fn valid_action_grading_reads_the_verdict() {
        assert!(grade_valid_action("valid", true));
        assert!(grade_valid_action("Invalid.", false));
        assert!(grade_valid_action("This move is invalid", false));
        assert!(grade_valid_action("{\"answer\": \"valid\"}", true));
        assert!(grade_valid_action("{\"answer\": true}", true));
        assert!(grade_valid_action("It is not valid", false));
        assert!(!grade_valid_action("valid", false));
        // No verdict at all grades incorrect against either truth.
        assert!(!grade_valid_action("I am unsure.", true));
        assert!(!grade_valid_action("I am unsure.", false));
    }

    #[test]
    fn interpret_reads_tagged_and_object_responses() {
        let tagged = "<perception>\n[[3, *], [*, 1]]\n</perception>\n<think>\nrows\n</think>\n<answer>\n[[3, 2], [2, 1]]\n</answer>";
        let got = interpret(tagged);
        assert_eq!(got.perception, Some(rows(&["3 *", "* 1"])));
        assert_eq!(got.answer, Some(rows(&["3 2", "2 1"])));
        assert_eq!(got.think.as_deref(), Some("rows"));
        // Bare `*` tokens need the relaxed reader.
        assert_eq!(got.outcome, ParseOutcome::Repaired);

        let object = "{\"perception\": [[1, 2]], \"answer\": [[2, 1]]}";
        let got = interpret(object);
        assert_eq!(got.outcome, ParseOutcome::Structured);
        assert_eq!(got.perception, Some(rows(&["1 2"])));
        assert_eq!(got.answer, Some(rows(&["2 1"])));

        let bare = "[[1, 2], [2, 1]]";
        assert_eq!(interpret(bare).answer, Some(rows(&["1 2", "2 1"])));

        let prose = "Working it through...\nSolution: [[4, 3], [3, 4]] is my answer.";
        let got = interpret(prose);
        assert_eq!(got.answer, Some(rows(&["4 3", "3 4"])));
        assert_eq!(got.outcome, ParseOutcome::Repaired);

        assert_eq!(interpret("no structure here").outcome, ParseOutcome::Unparseable);
    }

    #[test]
    fn grade_record_covers_every_query_kind() {
        let inst = fixtures::worked_sudoku();
        let cell = emit_query(&inst, QueryKind::CellAt, Some(Target::cell(0, 0)), ModalityChoice::Text).unwrap();
        let rec = grade_record(&cell, "3", 0, None).unwrap();
        assert!(rec.correct);
        assert_eq!(rec.cell_accuracy, None);

        let action = emit_query(
            &inst,
            QueryKind::ValidAction,
            Some(Target::assign(0, 1, Symbol::digit(1))),
            ModalityChoice::Text,
        )
        .unwrap();
        assert!(grade_record(&action, "valid", 0, None).unwrap().correct);
        assert!(!grade_record(&action, "invalid", 0, None).unwrap().correct);

        let direct =
            emit_query(&inst, QueryKind::DirectSolution, None, ModalityChoice::Text).unwrap();
        let good = "{\"answer\": [[3, 1, 4, 2], [2, 4, 1, 3], [1, 3, 2, 4], [4, 2, 3, 1]]}";
        let rec = grade_record(&direct, good, 2, Some(&inst)).unwrap();
        assert!(rec.correct);
        assert_eq!(rec.run, 2);
        // No perception was offered, so read-back accuracy is zero.
        assert_eq!(rec.cell_accuracy, Some(0.0));
        assert_eq!(rec.parse, ParseOutcome::Structured);

        let rec = grade_record(&direct, "gibberish", 0, Some(&inst)).unwrap();
        assert!(!rec.correct);
        assert_eq!(rec.parse, ParseOutcome::Unparseable);

        assert!(matches!(
            grade_record(&direct, good, 0, None),
            Err(GradeError::MissingInstance { .. })
        ));
        // A record whose truth does not match its kind is a caller bug.
        let mut mismatched = cell.clone();
        mismatched.ground_truth = GroundTruth::ActionValidity { valid: true };
        assert!(matches!(
            grade_record(&mismatched, "3", 0, None),
            Err(GradeError::TruthMismatch { .. })
        ));
    }

    #[test]
    fn prose_wrapping_never_changes_the_grade() {
        let inst = fixtures::worked_sudoku();
        let direct =
            emit_query(&inst, QueryKind::DirectSolution, None, ModalityChoice::Text).unwrap();
        let core = "{\"answer\": [[3, 1, 4, 2], [2, 4, 1, 3], [1, 3, 2, 4], [4, 2, 3, 1]]}";
        let wrapped = format!("Sure! Here is my working.\n{core}\nHope that helps.");
        let plain = grade_record(&direct, core, 0, Some(&inst)).unwrap();
        let noisy = grade_record(&direct, &wrapped, 0, Some(&inst)).unwrap();
        assert!(plain.correct && noisy.correct);

        assert_eq!(
            grade_cell_at("3", "3"),
            grade_cell_at("Sure! Here goes.\n3\nDone now.", "3")
        );
        assert_eq!(
            grade_valid_action("valid", true),
            grade_valid_action("Sure! Here goes.\nvalid\nDone now.", true)
        );
    }

    fn synthetic(run: usize, idx: usize, correct: bool) -> GradedRecord {
        GradedRecord {
            query_id: format!("sudoku-easy-s{idx}-direct-solution"),
            puzzle: PuzzleId::Sudoku,
            kind: QueryKind::DirectSolution,
            run,
            correct,
            cell_accuracy: Some(if correct { 1.0 } else { 0.0 }),
            parse: ParseOutcome::Structured,
        }
    }

    #[test]
    fn aggregation_matches_hand_computed_statistics() {
        let protocol = RunProtocol { runs: 5, per_run: 5, lenient: false, sample_std: false };
        // One success per run: every run rate is 0.2, so the spread is zero.
        let steady: Vec<_> = (0..5)
            .flat_map(|run| (0..5).map(move |i| synthetic(run, i, i == 0)))
            .collect();
        let report = aggregate(&steady, &protocol).unwrap();
        let stats = &report.puzzles["sudoku"]["direct-solution"];
        assert!((stats.mean - 0.2).abs() < 1e-12);
        assert!(stats.std_dev.abs() < 1e-12);
        assert_eq!(stats.samples, 25);
        assert_eq!(stats.run_rates, vec![0.2; 5]);

        // All successes land in one run: same mean, nonzero spread.
        let bursty: Vec<_> = (0..5)
            .flat_map(|run| (0..5).map(move |i| synthetic(run, i, run == 4)))
            .collect();
        let report = aggregate(&bursty, &protocol).unwrap();
        let stats = &report.puzzles["sudoku"]["direct-solution"];
        assert!((stats.mean - 0.2).abs() < 1e-12);
        assert!((stats.std_dev - 0.4).abs() < 1e-12);

        // The taxonomy view carries the same rate to each of sudoku's tags.
        for tag in PuzzleId::Sudoku.definition().taxonomy {
            let by_kind = &report.taxonomy[tag.name()];
            assert!((by_kind["direct-solution"] - 0.2).abs() < 1e-12);
        }
    }

    #[test]
    fn short_runs_error_strictly_and_flag_leniently() {
        let mut records: Vec<_> =
            (0..5).flat_map(|run| (0..5).map(move |i| synthetic(run, i, i == 0))).collect();
        records.pop(); // run 4 now has 4 records
        let strict = RunProtocol { runs: 5, per_run: 5, lenient: false, sample_std: false };
        assert!(matches!(
            aggregate(&records, &strict),
            Err(GradeError::IncompleteRun { run: 4, got: 4, .. })
        ));

        let lenient = RunProtocol { lenient: true, ..strict };
        let report = aggregate(&records, &lenient).unwrap();
        let stats = &report.puzzles["sudoku"]["direct-solution"];
        assert!(stats.pro_rata);
        assert!((stats.run_rates[4] - 0.25).abs() < 1e-12);

        // An entirely missing run cannot be scored even leniently.
        records.retain(|r| r.run != 4);
        assert!(matches!(
            aggregate(&records, &lenient),
            Err(GradeError::IncompleteRun { run: 4, got: 0, .. })
        ));
    }

    #[test]
    fn csv_and_plot_files_carry_the_report() {
        let records: Vec<_> = (0..2).map(|i| synthetic(0, i, i == 0)).collect();
        let csv = records_csv(&records);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "query_id,puzzle,kind,run,correct,cell_accuracy,parse");
        assert_eq!(
            lines.next().unwrap(),
            "sudoku-easy-s0-direct-solution,sudoku,direct-solution,0,true,1.000000,structured"
        );
        assert_eq!(csv.lines().count(), 3);

        let protocol = RunProtocol { runs: 1, per_run: 2, lenient: false, sample_std: false };
        let report = aggregate(&records, &protocol).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_plot_data(&report, dir.path()).unwrap();
        for name in ["radar.json", "bars.json"] {
            let body = std::fs::read_to_string(dir.path().join(name)).unwrap();
            let value: Value = serde_json::from_str(&body).unwrap();
            assert!(value.is_object(), "{name} holds an object");
        }
        let bars: Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("bars.json")).unwrap())
                .unwrap();
        assert_eq!(bars["sudoku"]["direct-solution"]["mean"], 0.5);
    }

    #[test]
    fn reports_serialize_deterministically() {
        let records: Vec<_> =
            (0..5).flat_map(|run| (0..5).map(move |i| synthetic(run, i, i == run))).collect();
        let protocol = RunProtocol { runs: 5, per_run: 5, lenient: false, sample_std: false };
        let a = aggregate(&records, &protocol).unwrap().to_json();
        let b = aggregate(&records, &protocol).unwrap().to_json();
        assert_eq!(a, b);
    }

    /// The 4x4 board used by the published before/after fine-tuning
    /// comparison: eleven givens, five blanks.
    fn rl_fixture_instance() -> PuzzleInstance {
        use crate::grid::Coord;
        use crate::instance::{Condition, Structures};
        let givens = [
            (0, 0, 2),
            (0, 1, 4),
            (0, 3, 1),
            (1, 0, 3),
            (1, 2, 2),
            (1, 3, 4),
            (2, 2, 1),
            (2, 3, 2),
            (3, 0, 1),
            (3, 1, 2),
            (3, 2, 4),
        ];
        let conditions = givens
            .iter()
            .map(|&(r, c, v)| Condition { cell: Coord::new(r, c), value: Symbol::digit(v) })
            .collect();
        PuzzleInstance::new(
            PuzzleId::Sudoku,
            4,
            4,
            Structures::default(),
            conditions,
            None,
            11,
            Difficulty::Easy,
        )
        .unwrap()
    }

    #[test]
    fn rewards_match_the_published_fixtures() {
        let inst = rl_fixture_instance();
        let weights = RewardWeights { succ: 1.0, fmt: 1.0, perception: Some(1.0) };

        // Untrained output: an extractable but unfinished (and wrong) grid,
        // no perception read-back.
        let before = "<think>\nFirst, let's look at the first row and first column. The only number that can go in the top left cell is 1, since it's the only number not already present in the top row or column.\nSo the final solution is:\n[[1, 2, 3, 4], [2, *, 4, 1], [3, 4, 1, *], [4, *, 2, 3]]\n</think>\n<answer>\n[[1, 2, 3, 4], [2, *, 4, 1], [3, 4, 1, *], [4, *, 2, 3]]\n</answer>";
        let got = reward(before, &inst, &weights);
        assert_eq!((got.r_succ, got.r_fmt, got.r_perc), (0.0, 1.0, 0.0));
        assert_eq!(got.r_total, 1.0);

        // Trained output: exact perception and a correct solution.
        let after = "<perception>\n[[2, 4, *, 1], [3, *, 2, 4], [*, *, 1, 2], [1, 2, 4, *]]\n</perception>\n<think>\nSince the numbers are 1 to 4, we can start by filling in the numbers one by one.\nSo, the filled-in board looks like this:\n[[2, 4, 3, 1], [3, 1, 2, 4], [4, 3, 1, 2], [1, 2, 4, 3]]\n</think>\n<answer>\n[[2, 4, 3, 1], [3, 1, 2, 4], [4, 3, 1, 2], [1, 2, 4, 3]]\n</answer>";
        let got = reward(after, &inst, &weights);
        assert_eq!((got.r_succ, got.r_fmt, got.r_perc), (1.0, 1.0, 1.0));
        assert_eq!(got.r_total, 3.0);

        // An empty rollout earns nothing.
        let got = reward("", &inst, &weights);
        assert_eq!((got.r_succ, got.r_fmt, got.r_perc, got.r_total), (0.0, 0.0, 0.0, 0.0));

        // Without a perception weight the read-back is not scored.
        let unweighted = RewardWeights { succ: 1.0, fmt: 0.5, perception: None };
        let got = reward(after, &inst, &unweighted);
        assert_eq!(got.r_perc, 0.0);
        assert_eq!(got.r_total, 1.5);
    }

    #[test]
    fn advantages_standardize_within_the_group() {
        let got = group_advantage(&[1.0, 0.0]).unwrap();
        assert!((got[0] - 1.0).abs() < 1e-12 && (got[1] + 1.0).abs() < 1e-12);

        // Zero spread yields zero advantage, not a division by zero.
        assert_eq!(group_advantage(&[0.5, 0.5, 0.5]).unwrap(), vec![0.0; 3]);

        let got = group_advantage(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        let sqrt3 = 3.0_f64.sqrt();
        assert!((got[0] - sqrt3).abs() < 1e-12);
        for v in &got[1..] {
            assert!((v + 1.0 / sqrt3).abs() < 1e-12);
        }

        assert!(matches!(group_advantage(&[1.0]), Err(GradeError::GroupTooSmall { len: 1 })));
    }

    #[test]
    fn response_records_round_trip_jsonl() {
        let body = "{\"query_id\": \"sudoku-easy-s7-cell-at-r0c0\", \"run\": 3, \"response\": \"3\"}\n\n{\"query_id\": \"x\", \"response\": \"y\"}\n";
        let records = read_responses_jsonl(body).unwrap();
        assert_eq!(records.len(), 2);
        assert_eq!(records[0].run, 3);
        assert_eq!(records[1].run, 0);
    }
}
