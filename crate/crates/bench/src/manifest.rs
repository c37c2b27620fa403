use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{BenchError, Result};

/// A file written by a run, identified by its path relative to the run
/// directory and its content hash.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Artifact {
    pub file: String,
    pub sha256: String,
}

impl Artifact {
    pub fn of(dir: &Path, file: &str) -> Result<Self> {
        Ok(Artifact {
            file: file.to_string(),
            sha256: sha256_file(&dir.join(file))?,
        })
    }
}

pub fn sha256_bytes(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| BenchError::io(path, e))?;
    Ok(sha256_bytes(&bytes))
}

/// Everything needed to rerun a benchmark and check it reproduced.
///
/// Only deterministic outputs are hashed. Reports carry wall-clock fields,
/// so they are represented by `accuracy_sha256`, a digest of the report with
/// every timing field zeroed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub seeds: Vec<u64>,
    pub artifacts: Vec<Artifact>,
    pub timed_outputs: Vec<String>,
    pub accuracy_sha256: Option<String>,
}

impl RunManifest {
    pub fn new(command: &str, config: &impl Serialize, seeds: Vec<u64>) -> Result<Self> {
        Ok(RunManifest {
            command: command.to_string(),
            config: serde_json::to_value(config).map_err(|e| BenchError::json(command, e))?,
            seeds,
            artifacts: Vec::new(),
            timed_outputs: Vec::new(),
            accuracy_sha256: None,
        })
    }

    pub fn add(&mut self, dir: &Path, file: &str) -> Result<()> {
        self.artifacts.push(Artifact::of(dir, file)?);
        Ok(())
    }
}

pub fn write_json(value: &impl Serialize, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| BenchError::json(path, e))?;
    fs::write(path, text + "\n").map_err(|e| BenchError::io(path, e))
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| BenchError::json(path, e))
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| BenchError::io(dir, e))
}
