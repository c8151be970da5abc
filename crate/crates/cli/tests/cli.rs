//! End-to-end checks of the gridforge binary: every subcommand, the exit-code
//! contract, determinism across runs, and seed precedence.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gridforge_core::instance::{Condition, Difficulty, PuzzleInstance, Structures};
use gridforge_core::solver::{self, SolveLimits, TraceOutcome};
use gridforge_core::{Coord, PuzzleId, Symbol};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_gridforge"));
    // Isolate from the caller's environment; the precedence test sets its own.
    cmd.env_remove("GRIDFORGE_SEED");
    cmd
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn ok(cmd: &mut Command) -> String {
    let out = run(cmd);
    assert!(
        out.status.success(),
        "command failed with {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 stdout")
}

/// Asserts the exit code and returns the parsed stderr JSON line.
fn fails_with(cmd: &mut Command, code: i32) -> serde_json::Value {
    let out = run(cmd);
    assert_eq!(out.status.code(), Some(code), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stderr = String::from_utf8(out.stderr).expect("utf-8 stderr");
    serde_json::from_str(stderr.lines().next().unwrap_or("")).unwrap_or_else(|_| {
        // Usage errors come from clap as prose, not JSON.
        assert_eq!(code, 2, "non-usage failures must emit one JSON line, got: {stderr}");
        serde_json::Value::Null
    })
}

fn worked_instance() -> PuzzleInstance {
    let given = |r, c, d| Condition { cell: Coord::new(r, c), value: Symbol::digit(d) };
    PuzzleInstance::new(
        PuzzleId::Sudoku,
        4,
        4,
        Structures::default(),
        vec![given(0, 0, 3), given(0, 3, 2), given(3, 1, 2), given(3, 2, 3)],
        None,
        7,
        Difficulty::Easy,
    )
    .expect("valid instance")
}

fn write_instance(dir: &Path, name: &str, instance: &PuzzleInstance) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, serde_json::to_string(instance).expect("serializes")).expect("writes");
    path
}

fn read_dir_sorted(dir: &Path) -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .expect("dir exists")
        .map(|e| e.expect("entry").path())
        .filter(|p| p.is_file())
        .collect();
    files.sort();
    files
}

#[test]
fn help_covers_every_flag() {
    let mut full = String::new();
    for subcommand in
        ["", "generate", "solve", "trace", "render", "query", "grade", "sft", "catalog"]
    {
        let mut cmd = bin();
        if !subcommand.is_empty() {
            cmd.arg(subcommand);
        }
        full.push_str(&format!("$ gridforge {subcommand} --help\n").replace("  ", " "));
        full.push_str(&ok(cmd.arg("--help")));
        full.push('\n');
    }
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/help.txt");
    if std::env::var_os("BLESS").is_some() {
        fs::write(&golden, &full).expect("golden writes");
    }
    let expected = fs::read_to_string(&golden).expect("golden help file exists");
    assert_eq!(full, expected, "help text drifted; rerun with BLESS=1 to update");
}

#[test]
fn generate_writes_a_deterministic_dataset() {
    let tmp = tempfile::tempdir().expect("tempdir");
    let out_a = tmp.path().join("a");
    let out_b = tmp.path().join("b");
    for out in [&out_a, &out_b] {
        let stdout = ok(bin().args([
            "generate",
            "--puzzle",
            "sudoku",
            "--difficulty",
            "easy",
            "--count",
            "4",
            "--seed",
            "11",
            "--out",
        ])
        .arg(out));
        assert!(stdout.starts_with("wrote 4 instances under "), "stdout: {stdout}");
    }

    let train_a = out_a.join("sudoku/easy/train");
    let files = read_dir_sorted(&train_a);
    assert_eq!(files.len(), 4);
    for file in &files {
        let twin = out_b.join("sudoku/easy/train").join(file.file_name().expect("name"));
        assert_eq!(
            fs::read(file).expect("read"),
            fs::read(&twin).expect("twin exists"),
            "instance bytes diverged between identical runs"
        );
        let instance: PuzzleInstance =
            serde_json::from_str(&fs::read_to_string(file).expect("read")).expect("parses");
        assert!(instance.solution.is_some(), "generated instances store their solution");
    }
    assert_eq!(
        fs::read(out_a.join("sudoku/easy/manifest.json")).expect("manifest"),
        fs::read(out_b.join("sudoku/easy/manifest.json")).expect("manifest"),
    );
}

#[test]
fn seed_precedence_is_flag_config_env() {
    let tmp = tempfile::tempdir().expect("tempdir");
    let config = tmp.path().join("config.json");
    fs::write(&config, r#"{"seed": 21}"#).expect("config writes");

    let manifest = |name: &str, f: &dyn Fn(&mut Command)| {
        let out = tmp.path().join(name);
        let mut cmd = bin();
        cmd.args(["generate", "--puzzle", "sudoku", "--count", "2", "--out"]).arg(&out);
        f(&mut cmd);
        ok(&mut cmd);
        fs::read_to_string(out.join("sudoku/easy/manifest.json")).expect("manifest")
    };

    let plain_11 = manifest("plain-11", &|cmd| {
        cmd.args(["--seed", "11"]);
    });
    let plain_21 = manifest("plain-21", &|cmd| {
        cmd.args(["--seed", "21"]);
    });
    let plain_31 = manifest("plain-31", &|cmd| {
        cmd.args(["--seed", "31"]);
    });
    assert_ne!(plain_11, plain_21);
    assert_ne!(plain_21, plain_31);

    // Flag beats config and environment.
    let flag_wins = manifest("flag-wins", &|cmd| {
        cmd.args(["--seed", "11", "--config"]).arg(&config).env("GRIDFORGE_SEED", "31");
    });
    assert_eq!(flag_wins, plain_11);

    // Config beats environment.
    let config_wins = manifest("config-wins", &|cmd| {
        cmd.arg("--config").arg(&config).env("GRIDFORGE_SEED", "31");
    });
    assert_eq!(config_wins, plain_21);

    // Environment beats the built-in default.
    let env_wins = manifest("env-wins", &|cmd| {
        cmd.env("GRIDFORGE_SEED", "31");
    });
    assert_eq!(env_wins, plain_31);
}

#[test]
fn solve_prints_the_worked_solution() {
    let tmp = tempfile::tempdir().expect("tempdir");
    let path = write_instance(tmp.path(), "worked.json", &worked_instance());
    let stdout = ok(bin().arg("solve").arg("--in").arg(&path));
    assert_eq!(stdout, "[[3, 1, 4, 2], [2, 4, 1, 3], [1, 3, 2, 4], [4, 2, 3, 1]]\n");
}

#[test]
fn count_solutions_prints_the_exact_count() {
    let tmp = tempfile::tempdir().expect("tempdir");
    let empty = PuzzleInstance::new(
        PuzzleId::Sudoku,
        4,
        4,
        Structures::default(),
        Vec::new(),
        None,
        0,
        Difficulty::Easy,
    )
    .expect("valid instance");
    let path = write_instance(tmp.path(), "empty.json", &empty);
    let stdout = ok(bin().arg("solve").arg("--in").arg(&path).args(["--count-solutions", "500"]));
    assert_eq!(stdout, "288\n");
}

#[test]
fn trace_matches_the_library_trajectory() {
    let tmp = tempfile::tempdir().expect("tempdir");
    let instance = worked_instance();
    let path = write_instance(tmp.path(), "worked.json", &instance);
    let stdout = ok(bin().arg("trace").arg("--in").arg(&path));
    let TraceOutcome::Trace(trajectory) = solver::solve_with_trace(&instance, &SolveLimits::default())
    else {
        panic!("worked instance traces");
    };
    assert_eq!(stdout, format!("{}\n", trajectory.to_text()));
}

#[test]
fn render_is_deterministic_and_affine_is_validated() {
    let tmp = tempfile::tempdir().expect("tempdir");
    let path = write_instance(tmp.path(), "worked.json", &worked_instance());

    let plain = ok(bin().arg("render").arg("--in").arg(&path));
    assert!(plain.starts_with("<svg "), "not an svg: {}", &plain[..60.min(plain.len())]);
    assert_eq!(plain, ok(bin().arg("render").arg("--in").arg(&path)));

    let rotated = ok(bin()
        .arg("render")
        .arg("--in")
        .arg(&path)
        .args(["--affine", "0,1,-1,0,0,192"]));
    assert_ne!(plain, rotated, "a rotation must change the svg");

    let degenerate =
        fails_with(bin().arg("render").arg("--in").arg(&path).args(["--affine", "0,0,0,0,0,0"]), 4);
    assert_eq!(degenerate["error"], "schema");

    // Batch mode mirrors the input tree and needs a destination.
    fails_with(bin().arg("render").arg("--in").arg(tmp.path()), 4);
    let out = tmp.path().join("svgs");
    ok(bin().arg("render").arg("--in").arg(tmp.path()).arg("--out").arg(&out).args([
        "--workers",
        "2",
    ]));
    assert!(out.join("worked.svg").is_file());
}

#[test]
fn query_embeds_board_and_ground_truth() {
    let tmp = tempfile::tempdir().expect("tempdir");
    let path = write_instance(tmp.path(), "worked.json", &worked_instance());
    let stdout = ok(bin()
        .arg("query")
        .arg("--in")
        .arg(&path)
        .args(["--kind", "cell-at", "--cell", "0,0"]));
    let record: serde_json::Value = serde_json::from_str(stdout.trim()).expect("one JSON line");
    assert_eq!(record["id"], "sudoku-easy-s7-cell-at-r0c0");
    assert_eq!(record["kind"], "cell-at");
    assert_eq!(record["ground_truth"]["expected"], "3");
    let board = record["modality"]["board"].as_str().expect("text board");
    assert!(board.contains('3') && board.contains('*'), "board: {board}");

    // Image modality records the svg path instead of inlining a board.
    let stdout = ok(bin().arg("query").arg("--in").arg(&path).args([
        "--kind",
        "direct-solution",
        "--modality",
        "image",
    ]));
    let record: serde_json::Value = serde_json::from_str(stdout.trim()).expect("one JSON line");
    let image = record["modality"]["path"].as_str().expect("image path");
    assert!(image.ends_with("worked.svg"), "path: {image}");
}

#[test]
fn grade_aggregates_the_run_protocol() {
    let tmp = tempfile::tempdir().expect("tempdir");
    let data = tmp.path().join("data");
    ok(bin()
        .args(["generate", "--puzzle", "sudoku", "--count", "4", "--seed", "5", "--out"])
        .arg(&data));
    let train = data.join("sudoku/easy/train");

    let mut queries = String::new();
    let mut responses = String::new();
    for file in read_dir_sorted(&train) {
        let line = ok(bin().arg("query").arg("--in").arg(&file).args(["--kind", "direct-solution"]));
        let id = serde_json::from_str::<serde_json::Value>(line.trim()).expect("query json")["id"]
            .as_str()
            .expect("id")
            .to_string();
        queries.push_str(&line);
        let instance: PuzzleInstance =
            serde_json::from_str(&fs::read_to_string(&file).expect("read")).expect("parses");
        let answer = instance.solution.as_ref().expect("stored solution").to_text();
        for (run, response) in
            [format!("{{\"answer\": {answer}}}"), "no idea".to_string()].into_iter().enumerate()
        {
            let record = serde_json::json!({ "query_id": id, "run": run, "response": response });
            responses.push_str(&format!("{record}\n"));
        }
    }
    let queries_path = tmp.path().join("queries.jsonl");
    let responses_path = tmp.path().join("responses.jsonl");
    fs::write(&queries_path, queries).expect("writes");
    fs::write(&responses_path, responses).expect("writes");

    let report_path = tmp.path().join("report.json");
    let csv_path = tmp.path().join("records.csv");
    let plots = tmp.path().join("plots");
    ok(bin()
        .arg("grade")
        .arg("--queries")
        .arg(&queries_path)
        .arg("--responses")
        .arg(&responses_path)
        .arg("--out-report")
        .arg(&report_path)
        .arg("--instances")
        .arg(&train)
        .args(["--runs", "2", "--per-run", "4"])
        .arg("--out-records")
        .arg(&csv_path)
        .arg("--out-plots")
        .arg(&plots));

    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&report_path).expect("report")).expect("json");
    let stats = &report["puzzles"]["sudoku"]["direct-solution"];
    assert_eq!(stats["samples"], 8);
    assert_eq!(stats["mean"], 0.5);
    assert_eq!(stats["std_dev"], 0.5);
    assert_eq!(stats["run_rates"], serde_json::json!([1.0, 0.0]));

    let csv = fs::read_to_string(&csv_path).expect("csv");
    assert_eq!(csv.lines().count(), 9, "header plus one line per response");
    assert!(plots.join("radar.json").is_file() && plots.join("bars.json").is_file());

    // Without the instances the solution queries cannot be graded.
    let failure = fails_with(
        bin()
            .arg("grade")
            .arg("--queries")
            .arg(&queries_path)
            .arg("--responses")
            .arg(&responses_path)
            .arg("--out-report")
            .arg(tmp.path().join("unused.json"))
            .args(["--runs", "2", "--per-run", "4"]),
        4,
    );
    assert_eq!(failure["error"], "schema");
}

#[test]
fn sft_emits_jsonl_with_a_manifest_sidecar() {
    let tmp = tempfile::tempdir().expect("tempdir");
    let data = tmp.path().join("data");
    ok(bin()
        .args(["generate", "--puzzle", "sudoku", "--count", "3", "--seed", "9", "--out"])
        .arg(&data));
    let source = data.join("sudoku/easy");

    let out = tmp.path().join("solution.jsonl");
    ok(bin().arg("sft").arg("--in").arg(&source).args(["--kind", "s", "--out"]).arg(&out));
    let records = gridforge_core::sft::read_jsonl(&fs::read_to_string(&out).expect("jsonl"))
        .expect("records parse");
    assert_eq!(records.len(), 3);
    for record in &records {
        assert!(record.target.starts_with("{\"answer\": [["), "target: {}", record.target);
    }

    let manifest: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(tmp.path().join("solution.manifest.json")).expect("sidecar"),
    )
    .expect("manifest json");
    assert_eq!(manifest["records"], 3);
    assert_eq!(manifest["instance_hashes"].as_array().map(Vec::len), Some(3));
    assert!(
        manifest["source_manifest"].as_str().expect("links source").ends_with("manifest.json")
    );

    // Reasoning records parse back through the trace grammar.
    let traces = ok(bin().arg("sft").arg("--in").arg(&source).args(["--kind", "r"]));
    let records = gridforge_core::sft::read_jsonl(&traces).expect("records parse");
    assert_eq!(records.len(), 3);
    for record in &records {
        assert!(record.target.starts_with("Initial State: [["), "target: {}", record.target);
    }
}

#[test]
fn catalog_lists_all_twenty_puzzles() {
    let stdout = ok(bin().arg("catalog"));
    let listing: serde_json::Value = serde_json::from_str(&stdout).expect("catalog json");
    let puzzles = listing["puzzles"].as_array().expect("array");
    assert_eq!(puzzles.len(), 20);
    let ids: Vec<&str> = puzzles.iter().map(|p| p["id"].as_str().expect("id")).collect();
    assert!(ids.contains(&"sudoku") && ids.contains(&"trees-and-tents"));
    for puzzle in puzzles {
        assert!(puzzle["taxonomy"].as_array().is_some_and(|t| !t.is_empty()));
        assert!(puzzle["alphabet"].as_array().is_some_and(|a| a.len() >= 2));
        assert!(puzzle["sizes"]["easy"].is_u64());
        assert!(puzzle["rule"].is_string());
    }
}

#[test]
fn failure_classes_map_to_distinct_exit_codes() {
    let tmp = tempfile::tempdir().expect("tempdir");

    // 2: usage.
    assert_eq!(run(bin().args(["solve", "--bogus"])).status.code(), Some(2));
    // 3: missing file.
    let missing = fails_with(bin().args(["solve", "--in", "missing.json"]), 3);
    assert_eq!(missing["error"], "io");
    // 4: malformed content.
    let bad = tmp.path().join("bad.json");
    fs::write(&bad, r#"{"rows": "four"}"#).expect("writes");
    assert_eq!(fails_with(bin().arg("solve").arg("--in").arg(&bad), 4)["error"], "schema");
    // 4: unknown vocabulary.
    assert_eq!(
        fails_with(
            bin().args(["generate", "--puzzle", "tic-tac-toe", "--out", "unused"]),
            4
        )["error"],
        "schema"
    );
    // 4: malformed environment.
    assert_eq!(
        run(bin().arg("catalog").env("GRIDFORGE_SEED", "banana")).status.code(),
        Some(4)
    );
    // 5: well-formed but unsatisfiable.
    let mut clash = worked_instance();
    clash = PuzzleInstance::new(
        clash.definition_id,
        clash.rows,
        clash.cols,
        clash.structures.clone(),
        vec![
            Condition { cell: Coord::new(0, 0), value: Symbol::digit(1) },
            Condition { cell: Coord::new(0, 1), value: Symbol::digit(1) },
        ],
        None,
        7,
        clash.difficulty,
    )
    .expect("constructs");
    let unsat = write_instance(tmp.path(), "unsat.json", &clash);
    assert_eq!(fails_with(bin().arg("solve").arg("--in").arg(&unsat), 5)["error"], "domain");
}
