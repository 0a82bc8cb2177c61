use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{AppError, AppResult, Status};
use crate::io::{read_json, write_json};

pub const MANIFEST_FILE: &str = "manifest.json";

/// Everything needed to repeat a run, plus its verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub params: Value,
    pub tolerances: Value,
    pub seed: Option<u64>,
    pub threads: usize,
    pub tool_version: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub status: Status,
    pub summary: Value,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_owned(),
            params: Value::Null,
            tolerances: Value::Null,
            seed: None,
            threads: rayon::current_num_threads(),
            tool_version: env!("CARGO_PKG_VERSION").to_owned(),
            timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
            inputs: Vec::new(),
            outputs: Vec::new(),
            status: Status::Pass,
            summary: Value::Null,
        }
    }

    pub fn output(&mut self, path: &Path) {
        self.outputs.push(path.display().to_string());
    }

    pub fn write(&self, dir: &Path) -> AppResult<PathBuf> {
        let path = dir.join(MANIFEST_FILE);
        write_json(&path, self)?;
        Ok(path)
    }
}

/// Manifests below `dir`, in path order.
pub fn collect_manifests(dir: &Path) -> AppResult<Vec<(PathBuf, RunManifest)>> {
    let mut found = Vec::new();
    let mut pending = vec![dir.to_path_buf()];
    while let Some(next) = pending.pop() {
        let entries = fs::read_dir(&next).map_err(|e| AppError::io(&next, e))?;
        for entry in entries {
            let path = entry.map_err(|e| AppError::io(&next, e))?.path();
            if path.is_dir() {
                pending.push(path);
            } else if path.file_name().is_some_and(|n| n == MANIFEST_FILE) {
                found.push(path);
            }
        }
    }
    found.sort();
    found.into_iter().map(|p| read_json(&p).map(|m| (p, m))).collect()
}
