//! Dataset assembly: batches of generated instances, deduplicated by
//! content hash, persisted one file per instance with a single manifest.
//!
//! Generation fans out across seeds; candidates are merged back in seed
//! order, so the output is identical for any worker count.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::generator::{generate_instance, DifficultyProfile, GenerateError};
use crate::instance::{Difficulty, PuzzleInstance};
use crate::rules::PuzzleId;
use crate::solver::{solve_stats, SolveLimits, SolveOutcome};

/// What must be unique across every entry of a dataset.
///
/// `Full` refuses repeats of either the conditions hash or the solution
/// hash. Some boards cannot satisfy it at scale — a 4x4 Sudoku has only 288
/// completed grids, so a thousand entries must repeat solutions — and those
/// configurations use `ConditionsOnly`, which still refuses repeated
/// conditions.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DedupPolicy {
    Full,
    ConditionsOnly,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SplitSpec {
    pub name: String,
    pub count: usize,
}

#[derive(Clone, Debug)]
pub struct DatasetConfig {
    pub puzzle: PuzzleId,
    pub difficulty: Difficulty,
    /// Overrides the stock profile (size and reveal window) when set.
    pub profile: Option<DifficultyProfile>,
    pub splits: Vec<SplitSpec>,
    pub base_seed: u64,
    pub out_dir: PathBuf,
    pub dedup: DedupPolicy,
    /// Opt-in: drop candidates whose puzzle has more than one solution.
    pub reject_multiple_solutions: bool,
    /// Consecutive rejected candidates tolerated before concluding the
    /// instance space is exhausted.
    pub stall_limit: u64,
}

impl DatasetConfig {
    pub fn new(puzzle: PuzzleId, difficulty: Difficulty, out_dir: PathBuf) -> Self {
        DatasetConfig {
            puzzle,
            difficulty,
            profile: None,
            splits: vec![SplitSpec { name: "train".into(), count: 10 }],
            base_seed: 0,
            out_dir,
            dedup: DedupPolicy::Full,
            reject_multiple_solutions: false,
            stall_limit: 10_000,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub seed: u64,
    pub conditions_hash: String,
    pub solution_hash: String,
    /// Path relative to the dataset root.
    pub path: String,
    /// Search nodes the solver needed; a cheap difficulty proxy.
    pub solve_nodes: u64,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SplitManifest {
    pub name: String,
    pub count: usize,
    pub entries: Vec<ManifestEntry>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub puzzle: PuzzleId,
    pub difficulty: Difficulty,
    pub dedup: DedupPolicy,
    pub splits: Vec<SplitManifest>,
}

impl DatasetManifest {
    /// Re-checks the dedup guarantees over the whole manifest: conditions
    /// hashes never repeat; solution hashes never repeat under `Full`.
    pub fn verify_dedup(&self) -> Result<(), String> {
        let mut conditions = HashSet::new();
        let mut solutions = HashSet::new();
        for split in &self.splits {
            if split.count != split.entries.len() {
                return Err(format!(
                    "split {} claims {} entries but holds {}",
                    split.name,
                    split.count,
                    split.entries.len()
                ));
            }
            for entry in &split.entries {
                if !conditions.insert(&entry.conditions_hash) {
                    return Err(format!("conditions hash {} repeats", entry.conditions_hash));
                }
                if !solutions.insert(&entry.solution_hash) && self.dedup == DedupPolicy::Full {
                    return Err(format!("solution hash {} repeats", entry.solution_hash));
                }
            }
        }
        Ok(())
    }

    pub fn total(&self) -> usize {
        self.splits.iter().map(|s| s.entries.len()).sum()
    }
}

#[derive(Error, Debug)]
pub enum DatasetError {
    #[error(transparent)]
    Generate(#[from] GenerateError),
    #[error("io error at {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(
        "instance space exhausted after {attempts} attempts: \
         produced {produced} of {requested} requested"
    )]
    DuplicateExhaustion { requested: usize, produced: usize, attempts: u64 },
    #[error("bad dataset config: {0}")]
    BadConfig(String),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DatasetError + '_ {
    move |source| DatasetError::Io { path: path.to_path_buf(), source }
}

struct Candidate {
    seed: u64,
    instance: PuzzleInstance,
    solve_nodes: u64,
}

/// Generates, deduplicates, persists, and describes a dataset.
pub fn build_dataset(config: &DatasetConfig) -> Result<DatasetManifest, DatasetError> {
    let profile = match &config.profile {
        Some(p) => p.clone(),
        None => DifficultyProfile::standard(config.puzzle, config.difficulty).ok_or_else(|| {
            DatasetError::BadConfig(format!(
                "{} has no {} difficulty",
                config.puzzle.id(),
                config.difficulty
            ))
        })?,
    };
    if config.splits.is_empty() {
        return Err(DatasetError::BadConfig("no splits requested".into()));
    }
    let requested: usize = config.splits.iter().map(|s| s.count).sum();

    let metadata_limits = SolveLimits { max_nodes: 1_000_000, ..SolveLimits::default() };
    let mut accepted: Vec<Candidate> = Vec::with_capacity(requested);
    let mut seen_conditions: HashSet<String> = HashSet::new();
    let mut seen_solutions: HashSet<String> = HashSet::new();
    let mut attempts: u64 = 0;
    let mut stalled: u64 = 0;
    let mut next_seed = config.base_seed;

    while accepted.len() < requested {
        let batch: Vec<u64> = (0..64).map(|k| next_seed + k).collect();
        next_seed += batch.len() as u64;
        let candidates: Vec<Option<Candidate>> = batch
            .par_iter()
            .map(|&seed| {
                let instance = generate_instance(config.puzzle, &profile, seed).ok()?;
                if config.reject_multiple_solutions {
                    use crate::solver::{count_solutions_within, CountOutcome};
                    match count_solutions_within(&instance, 2, metadata_limits.max_nodes) {
                        CountOutcome::Count(1) => {}
                        _ => return None,
                    }
                }
                match solve_stats(&instance, &metadata_limits) {
                    (SolveOutcome::Solved(_), solve_nodes) => {
                        Some(Candidate { seed, instance, solve_nodes })
                    }
                    _ => None,
                }
            })
            .collect();
        for candidate in candidates {
            attempts += 1;
            let Some(candidate) = candidate else {
                stalled += 1;
                if stalled >= config.stall_limit {
                    return Err(DatasetError::DuplicateExhaustion {
                        requested,
                        produced: accepted.len(),
                        attempts,
                    });
                }
                continue;
            };
            if accepted.len() >= requested {
                break;
            }
            let ch = candidate.instance.conditions_hash();
            let sh = candidate.instance.solution_hash().expect("generated with solution");
            let fresh = !seen_conditions.contains(&ch)
                && (config.dedup == DedupPolicy::ConditionsOnly || !seen_solutions.contains(&sh));
            if fresh {
                seen_conditions.insert(ch);
                seen_solutions.insert(sh);
                accepted.push(candidate);
                stalled = 0;
            } else {
                stalled += 1;
                if stalled >= config.stall_limit {
                    return Err(DatasetError::DuplicateExhaustion {
                        requested,
                        produced: accepted.len(),
                        attempts,
                    });
                }
            }
        }
    }

    // Persist: {puzzle}/{difficulty}/{split}/{conditions-hash}.json
    let mut splits = Vec::new();
    let mut cursor = accepted.into_iter();
    for spec in &config.splits {
        let mut entries = Vec::with_capacity(spec.count);
        let dir = config
            .out_dir
            .join(config.puzzle.id())
            .join(config.difficulty.to_string())
            .join(&spec.name);
        std::fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        for candidate in cursor.by_ref().take(spec.count) {
            let ch = candidate.instance.conditions_hash();
            let sh = candidate.instance.solution_hash().expect("generated with solution");
            let rel = format!(
                "{}/{}/{}/{}.json",
                config.puzzle.id(),
                config.difficulty,
                spec.name,
                ch
            );
            let file = config.out_dir.join(&rel);
            std::fs::write(&file, candidate.instance.to_canonical_json()).map_err(io_err(&file))?;
            entries.push(ManifestEntry {
                seed: candidate.seed,
                conditions_hash: ch,
                solution_hash: sh,
                path: rel,
                solve_nodes: candidate.solve_nodes,
            });
        }
        splits.push(SplitManifest { name: spec.name.clone(), count: entries.len(), entries });
    }
    let manifest = DatasetManifest {
        puzzle: config.puzzle,
        difficulty: config.difficulty,
        dedup: config.dedup,
        splits,
    };
    let manifest_path = config
        .out_dir
        .join(config.puzzle.id())
        .join(config.difficulty.to_string())
        .join("manifest.json");
    let body = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    std::fs::write(&manifest_path, body).map_err(io_err(&manifest_path))?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(puzzle: PuzzleId, dir: &Path) -> DatasetConfig {
        DatasetConfig::new(puzzle, Difficulty::Easy, dir.to_path_buf())
    }

    #[test]
    fn small_dataset_roundtrips() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = config(PuzzleId::Futoshiki, dir.path());
        cfg.splits = vec![
            SplitSpec { name: "train".into(), count: 6 },
            SplitSpec { name: "eval".into(), count: 3 },
        ];
        let manifest = build_dataset(&cfg).unwrap();
        assert_eq!(manifest.total(), 9);
        manifest.verify_dedup().unwrap();
        for split in &manifest.splits {
            for entry in &split.entries {
                let body = std::fs::read_to_string(dir.path().join(&entry.path)).unwrap();
                let inst: PuzzleInstance = serde_json::from_str(&body).unwrap();
                assert_eq!(inst.conditions_hash(), entry.conditions_hash);
                assert_eq!(inst.solution_hash().unwrap(), entry.solution_hash);
            }
        }
        let manifest_body =
            std::fs::read_to_string(dir.path().join("futoshiki/easy/manifest.json")).unwrap();
        let parsed: DatasetManifest = serde_json::from_str(&manifest_body).unwrap();
        assert_eq!(parsed, manifest);
    }

    #[test]
    fn tiny_space_exhausts_with_oracle_agreement() {
        // Oracle: enumerate every 3x3 two-tone grid without a triple run;
        // fully-revealed instances are distinct exactly when solutions are.
        let mut space = 0usize;
        for bits in 0..(1u32 << 9) {
            let cell = |r: usize, c: usize| bits >> (r * 3 + c) & 1 == 1;
            let mut ok = true;
            for i in 0..3 {
                ok &= !(cell(i, 0) == cell(i, 1) && cell(i, 1) == cell(i, 2));
                ok &= !(cell(0, i) == cell(1, i) && cell(1, i) == cell(2, i));
            }
            if ok {
                space += 1;
            }
        }
        assert_eq!(space, 102);

        let dir = tempfile::tempdir().unwrap();
        let mut cfg = config(PuzzleId::Binairo, dir.path());
        cfg.profile = Some(
            crate::generator::DifficultyProfile {
                level: Difficulty::Easy,
                size: (3, 3),
                reveal_ratio_range: ((1, 1), (1, 1)),
            },
        );
        cfg.splits = vec![SplitSpec { name: "train".into(), count: space + 20 }];
        cfg.stall_limit = 400;
        match build_dataset(&cfg) {
            Err(DatasetError::DuplicateExhaustion { requested, produced, attempts }) => {
                assert_eq!(requested, space + 20);
                assert!(produced <= space, "{produced} distinct exceeds the {space}-grid space");
                assert!(attempts as usize > produced);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn conditions_only_tolerates_repeated_solutions() {
        // 4x4 Sudoku has 288 completed grids, so 300 entries under Full are
        // impossible, while ConditionsOnly fills the order and
        // pigeonholes some solution hash into a repeat.
        let dir = tempfile::tempdir().unwrap();
        let mut full = config(PuzzleId::Sudoku, dir.path());
        full.splits = vec![SplitSpec { name: "train".into(), count: 300 }];
        full.stall_limit = 1_500;
        match build_dataset(&full) {
            Err(DatasetError::DuplicateExhaustion { produced, .. }) => assert!(produced < 300),
            other => panic!("unexpected {other:?}"),
        }

        let dir2 = tempfile::tempdir().unwrap();
        let mut relaxed = config(PuzzleId::Sudoku, dir2.path());
        relaxed.splits = vec![SplitSpec { name: "train".into(), count: 300 }];
        relaxed.dedup = DedupPolicy::ConditionsOnly;
        let manifest = build_dataset(&relaxed).unwrap();
        assert_eq!(manifest.total(), 300);
        manifest.verify_dedup().unwrap();
        let distinct_solutions: HashSet<&String> = manifest
            .splits
            .iter()
            .flat_map(|s| s.entries.iter().map(|e| &e.solution_hash))
            .collect();
        assert!(distinct_solutions.len() < 300);
        assert!(distinct_solutions.len() <= 288);
    }

    #[test]
    fn unique_solution_filter_is_opt_in() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = config(PuzzleId::Sudoku, dir.path());
        cfg.splits = vec![SplitSpec { name: "train".into(), count: 5 }];
        cfg.reject_multiple_solutions = true;
        let manifest = build_dataset(&cfg).unwrap();
        for entry in &manifest.splits[0].entries {
            let body = std::fs::read_to_string(dir.path().join(&entry.path)).unwrap();
            let inst: PuzzleInstance = serde_json::from_str(&body).unwrap();
            use crate::solver::{count_solutions, CountOutcome};
            assert_eq!(count_solutions(&inst, 2), CountOutcome::Count(1));
        }
    }

    #[test]
    fn worker_count_does_not_change_output() {
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        let mut cfg_a = config(PuzzleId::Binairo, dir_a.path());
        cfg_a.splits = vec![SplitSpec { name: "train".into(), count: 8 }];
        let mut cfg_b = cfg_a.clone();
        cfg_b.out_dir = dir_b.path().to_path_buf();

        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let serial = pool.install(|| build_dataset(&cfg_a)).unwrap();
        let parallel = build_dataset(&cfg_b).unwrap();
        assert_eq!(serial.splits[0].entries, parallel.splits[0].entries);
        for entry in &serial.splits[0].entries {
            let a = std::fs::read(dir_a.path().join(&entry.path)).unwrap();
            let b = std::fs::read(dir_b.path().join(&entry.path)).unwrap();
            assert_eq!(a, b, "instance files differ between worker counts");
        }
    }

    #[test]
    fn grid_solutions_reach_the_whole_space_sample() {
        // Sanity for the exhaustion fixture: the 3x3 fill hits many distinct
        // grids rather than a handful, and never emits a triple run.
        let mut distinct: HashSet<String> = HashSet::new();
        for seed in 0..400 {
            let (g, _) = crate::generator::generate_solution(PuzzleId::Binairo, (3, 3), seed)
                .unwrap();
            for text in [g.to_text()] {
                assert!(!text.contains("b, b, b") && !text.contains("w, w, w"));
                distinct.insert(text);
            }
        }
        assert!(distinct.len() > 60, "only {} grids sampled", distinct.len());
    }
}
