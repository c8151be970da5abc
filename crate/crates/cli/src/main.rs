//! gridforge: generate, solve, trace, render, query, grade and package grid
//! puzzles from the command line.
//!
//! Every command is deterministic: the same flags, config and environment
//! produce byte-identical files and stdout.

mod ops;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::settings::Settings;

/// One failure class per exit code. Usage errors (unknown flags, missing
/// required arguments) exit with 2 via clap before any of these are built.
#[derive(Debug)]
pub enum Failure {
    /// A file or directory could not be read or written. Exit 3.
    Io { path: PathBuf, detail: String },
    /// Content exists but does not fit the expected shape: malformed JSON,
    /// out-of-vocabulary names, bad flag payloads. Exit 4.
    Schema { what: String, detail: String },
    /// The request was well-formed but the engine could not satisfy it:
    /// unsolvable instance, exhausted search budget, incomplete protocol.
    /// Exit 5.
    Domain(String),
}

impl Failure {
    fn io(path: &std::path::Path, err: impl std::fmt::Display) -> Failure {
        Failure::Io { path: path.to_path_buf(), detail: err.to_string() }
    }

    fn schema(what: impl Into<String>, detail: impl std::fmt::Display) -> Failure {
        Failure::Schema { what: what.into(), detail: detail.to_string() }
    }

    fn exit_code(&self) -> u8 {
        match self {
            Failure::Io { .. } => 3,
            Failure::Schema { .. } => 4,
            Failure::Domain(_) => 5,
        }
    }

    /// One machine-readable JSON line for stderr.
    fn to_json(&self) -> String {
        let value = match self {
            Failure::Io { path, detail } => serde_json::json!({
                "error": "io", "path": path.display().to_string(), "detail": detail,
            }),
            Failure::Schema { what, detail } => serde_json::json!({
                "error": "schema", "what": what, "detail": detail,
            }),
            Failure::Domain(detail) => serde_json::json!({
                "error": "domain", "detail": detail,
            }),
        };
        value.to_string()
    }
}

#[derive(Parser)]
#[command(
    name = "gridforge",
    version,
    about = "Grid-puzzle pipeline: generate, solve, trace, render, query, grade, package",
    long_about = "Grid-puzzle pipeline: generate, solve, trace, render, query, grade, package.\n\n\
        Option precedence is flags, then the --config file, then the\n\
        GRIDFORGE_SEED environment variable (seed only), then built-in\n\
        defaults. Outputs are deterministic for a fixed seed.\n\n\
        Exit codes: 0 success, 2 usage, 3 missing or unreadable files,\n\
        4 malformed content, 5 domain failures (unsolvable, budget exceeded)."
)]
struct Cli {
    /// JSON config file providing defaults for seed, workers, difficulty and
    /// theme; explicit flags always win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a deduplicated set of instances plus a manifest.
    Generate(GenerateArgs),
    /// Solve an instance file and print the solution grid.
    Solve(SolveArgs),
    /// Print the solver's step-by-step derivation for an instance.
    Trace(TraceArgs),
    /// Render an instance file (or a directory of them) to SVG.
    Render(RenderArgs),
    /// Build one evaluation query for an instance.
    Query(QueryArgs),
    /// Grade model responses against queries and write a metrics report.
    Grade(GradeArgs),
    /// Convert instance files into supervised fine-tuning records.
    Sft(SftArgs),
    /// List every puzzle with its taxonomy, sizes and symbol alphabet.
    Catalog,
}

#[derive(Args)]
pub struct GenerateArgs {
    /// Puzzle id, as listed by `gridforge catalog` (e.g. sudoku).
    #[arg(long)]
    puzzle: String,

    /// Difficulty: easy, medium or hard.
    #[arg(long)]
    difficulty: Option<String>,

    /// Number of instances to generate.
    #[arg(long, default_value_t = 20)]
    count: usize,

    /// Base seed for the deterministic search.
    #[arg(long)]
    seed: Option<u64>,

    /// Output directory root; files land under {out}/{puzzle}/{difficulty}/.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,

    /// Split name for the generated instances.
    #[arg(long, default_value = "train")]
    split: String,

    /// Dedup policy: "full" (conditions and solution both fresh) or
    /// "conditions" (condition sets fresh; solutions may repeat).
    #[arg(long)]
    dedup: Option<String>,

    /// Discard candidates that admit more than one solution.
    #[arg(long)]
    unique: bool,

    /// Worker threads for generation (default: one per core).
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
pub struct SolveArgs {
    /// Instance JSON file.
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,

    /// Print the number of solutions (counted up to CAP) instead of a grid.
    #[arg(long, value_name = "CAP")]
    count_solutions: Option<usize>,
}

#[derive(Args)]
pub struct TraceArgs {
    /// Instance JSON file.
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,

    /// Abandon the solve once the rendered trace exceeds this many
    /// characters.
    #[arg(long, default_value_t = 1 << 20)]
    max_chars: usize,

    /// Keep steps that backtracking later undid.
    #[arg(long)]
    include_undone: bool,
}

#[derive(Args)]
pub struct RenderArgs {
    /// Instance JSON file, or a directory to render recursively.
    #[arg(long = "in", value_name = "PATH")]
    input: PathBuf,

    /// Theme JSON file (defaults to the built-in theme).
    #[arg(long, value_name = "FILE")]
    theme: Option<PathBuf>,

    /// Affine augmentation "a,b,c,d,e,f" applied to the board as the matrix
    /// [a c e; b d f].
    #[arg(long, value_name = "MATRIX")]
    affine: Option<String>,

    /// Output file (single input; defaults to stdout) or directory
    /// (directory input; required).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Worker threads for directory rendering (default: one per core).
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
pub struct QueryArgs {
    /// Instance JSON file.
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,

    /// Query kind: cell-at, direct-solution, valid-action or cot-solution.
    #[arg(long)]
    kind: String,

    /// Target cell "row,col" (cell-at and valid-action).
    #[arg(long, value_name = "R,C")]
    cell: Option<String>,

    /// Value the action places (valid-action on puzzles with a free choice
    /// of symbol).
    #[arg(long)]
    value: Option<String>,

    /// Board presentation: text or image.
    #[arg(long, default_value = "text")]
    modality: String,

    /// Image path to reference from the query (image modality; defaults to
    /// the instance path with an .svg extension).
    #[arg(long, value_name = "FILE")]
    image: Option<PathBuf>,
}

#[derive(Args)]
pub struct GradeArgs {
    /// Query records, one JSON object per line.
    #[arg(long, value_name = "FILE")]
    queries: PathBuf,

    /// Model responses, one {"query_id", "run", "response"} object per line.
    #[arg(long, value_name = "FILE")]
    responses: PathBuf,

    /// Where to write the aggregated metrics report (JSON).
    #[arg(long, value_name = "FILE")]
    out_report: PathBuf,

    /// Instance files backing the queries: a JSON file, a JSONL file or a
    /// directory (needed for solution queries).
    #[arg(long, value_name = "PATH")]
    instances: Option<PathBuf>,

    /// Runs expected per puzzle/kind group.
    #[arg(long, default_value_t = 5)]
    runs: usize,

    /// Responses expected per run.
    #[arg(long, default_value_t = 20)]
    per_run: usize,

    /// Tolerate missing runs and short runs instead of failing.
    #[arg(long)]
    lenient: bool,

    /// Also write every graded record as CSV.
    #[arg(long, value_name = "FILE")]
    out_records: Option<PathBuf>,

    /// Also write per-tag radar and per-puzzle bar chart data.
    #[arg(long, value_name = "DIR")]
    out_plots: Option<PathBuf>,
}

#[derive(Args)]
pub struct SftArgs {
    /// Instance JSON file, or a directory to convert recursively.
    #[arg(long = "in", value_name = "PATH")]
    input: PathBuf,

    /// Record kind: "s" (prompt to final grid) or "r" (prompt to the full
    /// derivation trace).
    #[arg(long)]
    kind: String,

    /// Output JSONL file (defaults to stdout). A sidecar
    /// {out}.manifest.json records the instance hashes.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,

    /// Abandon an instance once its rendered trace exceeds this many
    /// characters (kind r).
    #[arg(long, default_value_t = 1 << 20)]
    max_chars: usize,

    /// Keep steps that backtracking later undid (kind r).
    #[arg(long)]
    include_undone: bool,

    /// Prompt presentation: text or image. Image prompts reference the
    /// instance path with an .svg extension.
    #[arg(long, default_value = "text")]
    modality: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let settings = match Settings::load(cli.config.as_deref()) {
        Ok(settings) => settings,
        Err(failure) => return fail(failure),
    };
    let result = match cli.command {
        Command::Generate(args) => ops::generate(&args, &settings),
        Command::Solve(args) => ops::solve(&args),
        Command::Trace(args) => ops::trace(&args),
        Command::Render(args) => ops::render(&args, &settings),
        Command::Query(args) => ops::query(&args),
        Command::Grade(args) => ops::grade(&args),
        Command::Sft(args) => ops::sft(&args),
        Command::Catalog => ops::catalog(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => fail(failure),
    }
}

fn fail(failure: Failure) -> ExitCode {
    eprintln!("{}", failure.to_json());
    ExitCode::from(failure.exit_code())
}
