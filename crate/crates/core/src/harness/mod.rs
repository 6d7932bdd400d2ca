//! Experiment driver: spec files, dataset ingestion, seeded runs persisted
//! per cell, validation and report generation.

mod commands;
mod report;
mod spec;
mod store;

use std::path::PathBuf;

use thiserror::Error;

pub use commands::{cmd_ingest, cmd_run, cmd_validate, load_bench, RunSummary, ValidateSummary};
pub use report::{cmd_report, ReportCell, ReportRow, ReportTable, Stat};
pub use spec::{
    load_spec, DatasetSources, ExperimentSpec, HvSource, ReportOptions, RunSpec, DEFAULT_SEEDS, SCHEMA_VERSION,
};
pub use store::{
    cell_dir, load_record, read_final, read_generations, CellConfig, FinalFile, ValidationEntry, CONFIG_FILE,
    FINAL_FILE, RECORD_FILE,
};

use crate::algorithms::RunError;
use crate::bench::BenchError;
use crate::dataset::DatasetError;
use crate::provider::ProviderError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("invalid experiment spec: {0}")]
    Spec(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Bench(#[from] BenchError),
    #[error(transparent)]
    Run(#[from] RunError),
    #[error(transparent)]
    Provider(#[from] ProviderError),
}

pub(crate) fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> HarnessError {
    let path = path.into();
    move |source| HarnessError::Io { path, source }
}
