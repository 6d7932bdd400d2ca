//! On-disk layout of one (run, seed) cell:
//!
//! - `config.json`: the [`CellConfig`] the cell was started with.
//! - `record.jsonl`: one [`GenerationRecord`] per line, generation 0 first,
//!   flushed as each generation finishes.
//! - `final.json`: the [`FinalFile`]; its presence marks the cell complete.

use std::fs;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{io_err, HarnessError};
use crate::algorithms::{GenerationRecord, Individual, RunConfig, RunRecord};
use crate::bench::{ObjectiveKind, ProblemInstance};
use crate::ObjectiveVector;

pub const CONFIG_FILE: &str = "config.json";
pub const RECORD_FILE: &str = "record.jsonl";
pub const FINAL_FILE: &str = "final.json";

pub fn cell_dir(output_dir: &Path, name: &str, seed: u64) -> PathBuf {
    output_dir.join("runs").join(name).join(seed.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellConfig {
    pub name: String,
    pub variant: String,
    pub problem: ProblemInstance,
    pub config: RunConfig,
}

/// Validation result for one final prompt.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationEntry {
    pub genome_id: String,
    pub objectives: Option<ObjectiveVector>,
    /// Samples whose ranking request failed and fell back to candidate order.
    pub failed_samples: usize,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinalFile {
    pub name: String,
    pub variant: String,
    pub problem: String,
    pub objectives: Vec<ObjectiveKind>,
    pub seed: u64,
    /// Nondominated prompts with their training objective vectors.
    pub final_set: Vec<Individual>,
    pub train_hypervolume: f64,
    pub evaluations: usize,
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
    pub elapsed_ms: u64,
    #[serde(default)]
    pub validation_samples: Option<usize>,
    #[serde(default)]
    pub validation: Vec<ValidationEntry>,
    #[serde(default)]
    pub validation_hypervolume: Option<f64>,
    #[serde(default)]
    pub validation_tokens: u64,
}

impl FinalFile {
    pub fn total_tokens(&self) -> u64 {
        self.prompt_tokens + self.completion_tokens
    }
}

pub(super) fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), HarnessError> {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, text + "\n").map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(io_err(path))
}

pub(super) fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, HarnessError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|source| HarnessError::Json { path: path.to_path_buf(), source })
}

pub fn read_final(cell: &Path) -> Result<FinalFile, HarnessError> {
    read_json(&cell.join(FINAL_FILE))
}

pub fn read_generations(cell: &Path) -> Result<Vec<GenerationRecord>, HarnessError> {
    let path = cell.join(RECORD_FILE);
    let file = fs::File::open(&path).map_err(io_err(&path))?;
    let mut out = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(io_err(&path))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|source| HarnessError::Json { path: path.clone(), source })?);
    }
    Ok(out)
}

/// Rebuilds the in-memory run record of a completed cell.
pub fn load_record(cell: &Path) -> Result<RunRecord, HarnessError> {
    let cfg: CellConfig = read_json(&cell.join(CONFIG_FILE))?;
    let fin = read_final(cell)?;
    Ok(RunRecord {
        config: cfg.config,
        instance: cfg.problem.name,
        generations: read_generations(cell)?,
        final_set: fin.final_set,
    })
}
