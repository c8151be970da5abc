//! Layered defaults: flags beat the config file, the config file beats the
//! GRIDFORGE_SEED environment variable (seed only), and built-ins close the
//! gaps.

use std::fs;
use std::path::{Path, PathBuf};

use gridforge_core::instance::Difficulty;
use gridforge_core::render::Theme;
use serde::Deserialize;

use crate::Failure;

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    seed: Option<u64>,
    workers: Option<usize>,
    difficulty: Option<String>,
    theme: Option<PathBuf>,
}

pub struct Settings {
    file: FileConfig,
    env_seed: Option<u64>,
}

impl Settings {
    pub fn load(config: Option<&Path>) -> Result<Settings, Failure> {
        let file = match config {
            Some(path) => {
                let body = fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
                serde_json::from_str(&body)
                    .map_err(|e| Failure::schema(format!("config {}", path.display()), e))?
            }
            None => FileConfig::default(),
        };
        let env_seed = match std::env::var("GRIDFORGE_SEED") {
            Ok(raw) => Some(raw.trim().parse::<u64>().map_err(|_| {
                Failure::schema("GRIDFORGE_SEED", format!("not an unsigned integer: {raw:?}"))
            })?),
            Err(_) => None,
        };
        Ok(Settings { file, env_seed })
    }

    pub fn seed(&self, flag: Option<u64>) -> u64 {
        flag.or(self.file.seed).or(self.env_seed).unwrap_or(0)
    }

    /// `None` leaves the worker count to rayon's global default.
    pub fn workers(&self, flag: Option<usize>) -> Option<usize> {
        flag.or(self.file.workers)
    }

    pub fn difficulty(&self, flag: Option<&str>) -> Result<Difficulty, Failure> {
        let name = flag.or(self.file.difficulty.as_deref()).unwrap_or("easy");
        Difficulty::parse(name)
            .ok_or_else(|| Failure::schema("difficulty", format!("unknown level {name:?}")))
    }

    pub fn theme(&self, flag: Option<&Path>) -> Result<Theme, Failure> {
        let path = match flag.or(self.file.theme.as_deref()) {
            Some(path) => path,
            None => return Ok(Theme::default()),
        };
        let body = fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
        Theme::from_json(&body)
            .map_err(|e| Failure::schema(format!("theme {}", path.display()), e))
    }
}
