//! Command bodies. Each returns `Ok(())` after printing its result or a
//! `Failure` that main maps to an exit code and one stderr JSON line.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use gridforge_core::dataset::{build_dataset, DatasetConfig, DatasetError, DedupPolicy, SplitSpec};
use gridforge_core::grade::{self, GradeError, RunProtocol};
use gridforge_core::instance::{Difficulty, PuzzleInstance};
use gridforge_core::query::{self, ModalityChoice, QueryKind, QueryRecord, Target};
use gridforge_core::render::{self, Theme};
use gridforge_core::rules::PuzzleId;
use gridforge_core::sft::{self, SftError, SftKind};
use gridforge_core::solver::{self, CountOutcome, SolveLimits, SolveOutcome, TraceOutcome};
use gridforge_core::symbol::Symbol;
use rayon::prelude::*;

use crate::settings::Settings;
use crate::{Failure, GenerateArgs, GradeArgs, QueryArgs, RenderArgs, SftArgs, SolveArgs, TraceArgs};

pub fn generate(args: &GenerateArgs, settings: &Settings) -> Result<(), Failure> {
    let puzzle = parse_puzzle(&args.puzzle)?;
    let difficulty = settings.difficulty(args.difficulty.as_deref())?;
    let mut config = DatasetConfig::new(puzzle, difficulty, args.out.clone());
    config.base_seed = settings.seed(args.seed);
    config.splits = vec![SplitSpec { name: args.split.clone(), count: args.count }];
    config.reject_multiple_solutions = args.unique;
    if let Some(name) = &args.dedup {
        config.dedup = match name.as_str() {
            "full" => DedupPolicy::Full,
            "conditions" => DedupPolicy::ConditionsOnly,
            other => {
                let detail = format!("unknown policy {other:?} (expected full or conditions)");
                return Err(Failure::schema("dedup", detail));
            }
        };
    }
    let manifest =
        run_in_pool(settings.workers(args.workers), || build_dataset(&config))?.map_err(
            |err| match err {
                DatasetError::Io { path, source } => Failure::io(&path, source),
                DatasetError::BadConfig(detail) => Failure::schema("dataset config", detail),
                other => Failure::Domain(other.to_string()),
            },
        )?;
    let written: usize = manifest.splits.iter().map(|split| split.count).sum();
    let dir = args.out.join(puzzle.id()).join(difficulty.name());
    emit_line(format_args!("wrote {written} instances under {}", dir.display()))
}

pub fn solve(args: &SolveArgs) -> Result<(), Failure> {
    let instance = read_instance(&args.input)?;
    match args.count_solutions {
        Some(0) => Err(Failure::schema("count-solutions", "cap must be at least 1")),
        Some(cap) => match solver::count_solutions(&instance, cap) {
            CountOutcome::Count(n) => emit_line(n),
            CountOutcome::BudgetExceeded { nodes } => {
                Err(Failure::Domain(format!("counting stopped after {nodes} search nodes")))
            }
        },
        None => match solver::solve(&instance, &SolveLimits::default()) {
            SolveOutcome::Solved(grid) => emit_line(grid.to_text()),
            SolveOutcome::Unsat => {
                Err(Failure::Domain("no assignment satisfies the instance".into()))
            }
            SolveOutcome::BudgetExceeded { nodes } => {
                Err(Failure::Domain(format!("search stopped after {nodes} nodes")))
            }
        },
    }
}

pub fn trace(args: &TraceArgs) -> Result<(), Failure> {
    let instance = read_instance(&args.input)?;
    let limits = SolveLimits { max_trace_chars: args.max_chars, ..SolveLimits::default() };
    match solver::solve_with_trace(&instance, &limits) {
        TraceOutcome::Trace(trajectory) => {
            let text = if args.include_undone {
                trajectory.to_text_including_undone()
            } else {
                trajectory.to_text()
            };
            emit_line(text)
        }
        TraceOutcome::Unsat => {
            Err(Failure::Domain("no assignment satisfies the instance".into()))
        }
        TraceOutcome::BudgetExceeded { nodes, rendered_chars: Some(needed) } => {
            Err(Failure::Domain(format!(
                "trace needs {needed} chars, over the {} limit ({nodes} nodes searched)",
                args.max_chars
            )))
        }
        TraceOutcome::BudgetExceeded { nodes, rendered_chars: None } => {
            Err(Failure::Domain(format!("search stopped after {nodes} nodes")))
        }
    }
}

pub fn render(args: &RenderArgs, settings: &Settings) -> Result<(), Failure> {
    let theme = settings.theme(args.theme.as_deref())?;
    let matrix = args.affine.as_deref().map(parse_affine).transpose()?;
    if !args.input.is_dir() {
        let svg = render_one(&args.input, &theme, matrix)?;
        return match &args.out {
            Some(path) => write_file(path, svg),
            None => emit(svg),
        };
    }

    let out = args
        .out
        .as_ref()
        .ok_or_else(|| Failure::schema("out", "rendering a directory needs --out DIR"))?;
    let files = walk_json_files(&args.input)?;
    run_in_pool(settings.workers(args.workers), || {
        files
            .par_iter()
            .map(|path| {
                let svg = render_one(path, &theme, matrix)?;
                let rel = path.strip_prefix(&args.input).expect("walked under input");
                write_file(&out.join(rel).with_extension("svg"), svg)
            })
            .collect::<Result<(), Failure>>()
    })??;
    emit_line(format_args!("rendered {} boards into {}", files.len(), out.display()))
}

fn render_one(path: &Path, theme: &Theme, matrix: Option<[f64; 6]>) -> Result<String, Failure> {
    let instance = read_instance(path)?;
    let svg = render::render_svg(&instance, theme)
        .map_err(|e| Failure::Domain(format!("rendering {}: {e}", path.display())))?;
    match matrix {
        Some(m) => render::augment(&svg, m).map_err(|e| Failure::schema("affine", e)),
        None => Ok(svg),
    }
}

pub fn query(args: &QueryArgs) -> Result<(), Failure> {
    let instance = read_instance(&args.input)?;
    let kind = QueryKind::parse(&args.kind)
        .ok_or_else(|| Failure::schema("kind", format!("unknown query kind {:?}", args.kind)))?;
    let target = build_target(args)?;
    let image_path;
    let modality = match args.modality.as_str() {
        "text" => ModalityChoice::Text,
        "image" => {
            image_path = args
                .image
                .clone()
                .unwrap_or_else(|| args.input.with_extension("svg"))
                .display()
                .to_string();
            ModalityChoice::Image { path: &image_path }
        }
        other => {
            return Err(Failure::schema("modality", format!("expected text or image, got {other:?}")))
        }
    };
    let record = query::emit_query(&instance, kind, target, modality)
        .map_err(|e| Failure::schema("query", e))?;
    emit_line(serde_json::to_string(&record).expect("record serializes"))
}

fn build_target(args: &QueryArgs) -> Result<Option<Target>, Failure> {
    let cell = match args.cell.as_deref() {
        Some(text) => Some(parse_cell(text)?),
        None => None,
    };
    match (cell, args.value.as_deref()) {
        (Some((row, col)), Some(token)) => {
            let value = Symbol::parse(token)
                .ok_or_else(|| Failure::schema("value", format!("unknown cell token {token:?}")))?;
            Ok(Some(Target::assign(row, col, value)))
        }
        (Some((row, col)), None) => Ok(Some(Target::cell(row, col))),
        (None, Some(_)) => Err(Failure::schema("value", "--value needs --cell")),
        (None, None) => Ok(None),
    }
}

pub fn grade(args: &GradeArgs) -> Result<(), Failure> {
    let mut queries: BTreeMap<String, QueryRecord> = BTreeMap::new();
    for (record, _) in read_jsonl::<QueryRecord>(&args.queries)? {
        queries.insert(record.id.clone(), record);
    }
    let responses_body = read_file(&args.responses)?;
    let responses = grade::read_responses_jsonl(&responses_body)
        .map_err(|e| Failure::schema(args.responses.display().to_string(), e))?;
    let instances = match &args.instances {
        Some(path) => load_instances(path)?,
        None => Vec::new(),
    };

    let mut records = Vec::with_capacity(responses.len());
    for response in &responses {
        let query = queries.get(&response.query_id).ok_or_else(|| {
            let detail = format!("response references unknown query {:?}", response.query_id);
            Failure::schema("responses", detail)
        })?;
        let instance = instances
            .iter()
            .find(|(prefix, _)| response.query_id.starts_with(prefix))
            .map(|(_, instance)| instance);
        let graded = grade::grade_record(query, &response.response, response.run, instance)
            .map_err(grade_failure)?;
        records.push(graded);
    }

    let protocol = RunProtocol {
        runs: args.runs,
        per_run: args.per_run,
        lenient: args.lenient,
        sample_std: false,
    };
    let report = grade::aggregate(&records, &protocol).map_err(grade_failure)?;
    write_file(&args.out_report, report.to_json())?;
    if let Some(path) = &args.out_records {
        write_file(path, grade::records_csv(&records))?;
    }
    if let Some(dir) = &args.out_plots {
        grade::write_plot_data(&report, dir).map_err(grade_failure)?;
    }
    emit_line(format_args!(
        "graded {} responses into {}",
        records.len(),
        args.out_report.display()
    ))
}

fn grade_failure(err: GradeError) -> Failure {
    match err {
        GradeError::Io { path, source } => {
            Failure::Io { path: path.into(), detail: source.to_string() }
        }
        GradeError::TruthMismatch { .. }
        | GradeError::MissingInstance { .. }
        | GradeError::UnknownToken { .. } => Failure::schema("grading", err),
        other => Failure::Domain(other.to_string()),
    }
}

/// Instances paired with the query-id prefix they answer for, e.g.
/// `"sudoku-easy-s7-"`. The trailing dash keeps seed 1 from matching seed 11.
fn load_instances(path: &Path) -> Result<Vec<(String, PuzzleInstance)>, Failure> {
    let mut instances = Vec::new();
    if path.is_dir() {
        for file in walk_json_files(path)? {
            instances.push(read_instance(&file)?);
        }
    } else {
        let body = read_file(path)?;
        if let Ok(single) = serde_json::from_str::<PuzzleInstance>(&body) {
            instances.push(single);
        } else {
            for (instance, _) in parse_jsonl(&body, path)? {
                instances.push(instance);
            }
        }
    }
    Ok(instances
        .into_iter()
        .map(|instance| {
            let prefix = format!(
                "{}-{}-s{}-",
                instance.definition_id.id(),
                instance.difficulty,
                instance.seed
            );
            (prefix, instance)
        })
        .collect())
}

pub fn sft(args: &SftArgs) -> Result<(), Failure> {
    let kind = match args.kind.as_str() {
        "s" => SftKind::Solution,
        "r" => SftKind::Reasoning,
        other => return Err(Failure::schema("kind", format!("expected s or r, got {other:?}"))),
    };
    let image = match args.modality.as_str() {
        "text" => false,
        "image" => true,
        other => {
            return Err(Failure::schema("modality", format!("expected text or image, got {other:?}")))
        }
    };
    let files = if args.input.is_dir() {
        walk_json_files(&args.input)?
    } else {
        vec![args.input.clone()]
    };
    let limits = SolveLimits { max_trace_chars: args.max_chars, ..SolveLimits::default() };

    let mut records = Vec::with_capacity(files.len());
    for file in &files {
        let instance = read_instance(file)?;
        let image_path = file.with_extension("svg").display().to_string();
        let modality =
            if image { ModalityChoice::Image { path: &image_path } } else { ModalityChoice::Text };
        let record = match kind {
            SftKind::Solution => sft::emit_ssft(&instance, modality),
            SftKind::Reasoning => sft::emit_rsft(&instance, &limits, args.include_undone, modality),
        }
        .map_err(|err| match err {
            SftError::Query(e) => Failure::schema(format!("instance {}", file.display()), e),
            other => Failure::Domain(format!("{}: {other}", file.display())),
        })?;
        records.push(record);
    }

    let body = sft::to_jsonl(&records);
    match &args.out {
        Some(path) => {
            write_file(path, body)?;
            let source = args
                .input
                .is_dir()
                .then(|| args.input.join("manifest.json"))
                .filter(|p| p.is_file())
                .map(|p| p.display().to_string());
            let manifest = sft::manifest_for(kind, &records, source);
            let pretty = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
            write_file(&path.with_extension("manifest.json"), pretty)?;
            emit_line(format_args!("wrote {} records to {}", records.len(), path.display()))?;
        }
        None => emit(body)?,
    }
    Ok(())
}

pub fn catalog() -> Result<(), Failure> {
    let puzzles: Vec<serde_json::Value> = PuzzleId::ALL
        .iter()
        .map(|&puzzle| {
            let def = puzzle.definition();
            let size = |d| puzzle.size_for(d);
            let alphabet: Vec<&str> = def
                .alphabet(size(Difficulty::Easy).unwrap_or(4))
                .iter()
                .map(|s| s.as_str())
                .collect();
            serde_json::json!({
                "id": puzzle.id(),
                "taxonomy": def.taxonomy.iter().map(|t| t.name()).collect::<Vec<_>>(),
                "rule": def.prompts.rule,
                "sizes": {
                    "easy": size(Difficulty::Easy),
                    "medium": size(Difficulty::Medium),
                    "hard": size(Difficulty::Hard),
                },
                "alphabet": alphabet,
                "reveal_based": def.reveal_based,
                "structures": def.structures_schema,
            })
        })
        .collect();
    let listing = serde_json::json!({ "puzzles": puzzles });
    emit_line(serde_json::to_string_pretty(&listing).expect("catalog serializes"))
}

fn parse_puzzle(name: &str) -> Result<PuzzleId, Failure> {
    PuzzleId::parse(name).ok_or_else(|| {
        Failure::schema("puzzle", format!("unknown puzzle {name:?} (see `gridforge catalog`)"))
    })
}

fn parse_cell(text: &str) -> Result<(usize, usize), Failure> {
    let bad = || Failure::schema("cell", format!("expected \"row,col\", got {text:?}"));
    let (row, col) = text.split_once(',').ok_or_else(bad)?;
    Ok((row.trim().parse().map_err(|_| bad())?, col.trim().parse().map_err(|_| bad())?))
}

fn parse_affine(text: &str) -> Result<[f64; 6], Failure> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse())
        .collect::<Result<_, _>>()
        .map_err(|e| Failure::schema("affine", e))?;
    parts.try_into().map_err(|parts: Vec<f64>| {
        Failure::schema("affine", format!("expected 6 numbers, got {}", parts.len()))
    })
}

/// Runs `job` on a pool of exactly `workers` threads, or inline on the global
/// pool when no count was requested.
fn run_in_pool<R: Send>(
    workers: Option<usize>,
    job: impl FnOnce() -> R + Send,
) -> Result<R, Failure> {
    match workers {
        None => Ok(job()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Failure::schema("workers", e))?;
            Ok(pool.install(job))
        }
    }
}

/// Writes to stdout. A closed pipe (e.g. `gridforge catalog | head`) ends the
/// process quietly instead of panicking.
fn emit(text: impl AsRef<[u8]>) -> Result<(), Failure> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_ref()).and_then(|()| out.flush()) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => std::process::exit(0),
        Err(e) => Err(Failure::Io { path: "stdout".into(), detail: e.to_string() }),
    }
}

fn emit_line(text: impl std::fmt::Display) -> Result<(), Failure> {
    emit(format!("{text}\n"))
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::io(path, e))
}

fn write_file(path: &Path, body: impl AsRef<[u8]>) -> Result<(), Failure> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| Failure::io(parent, e))?;
        }
    }
    fs::write(path, body).map_err(|e| Failure::io(path, e))
}

fn read_instance(path: &Path) -> Result<PuzzleInstance, Failure> {
    let body = read_file(path)?;
    serde_json::from_str(&body)
        .map_err(|e| Failure::schema(format!("instance {}", path.display()), e))
}

fn read_jsonl<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<(T, usize)>, Failure> {
    parse_jsonl(&read_file(path)?, path)
}

fn parse_jsonl<T: serde::de::DeserializeOwned>(
    body: &str,
    path: &Path,
) -> Result<Vec<(T, usize)>, Failure> {
    body.lines()
        .enumerate()
        .filter(|(_, line)| !line.trim().is_empty())
        .map(|(idx, line)| {
            serde_json::from_str(line)
                .map(|value| (value, idx + 1))
                .map_err(|e| Failure::schema(format!("{}:{}", path.display(), idx + 1), e))
        })
        .collect()
}

/// Every `.json` under `root` except manifests, depth-first, sorted for
/// deterministic processing order.
fn walk_json_files(root: &Path) -> Result<Vec<PathBuf>, Failure> {
    let mut files = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).map_err(|e| Failure::io(&dir, e))? {
            let path = entry.map_err(|e| Failure::io(&dir, e))?.path();
            if path.is_dir() {
                stack.push(path);
            } else if path.extension().is_some_and(|ext| ext == "json")
                && path.file_name().is_some_and(|name| name != "manifest.json")
            {
                files.push(path);
            }
        }
    }
    files.sort();
    Ok(files)
}
