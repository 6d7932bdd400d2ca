use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use super::spec::{ExperimentSpec, RunSpec};
use super::store::{
    cell_dir, read_final, write_json, CellConfig, FinalFile, ValidationEntry, CONFIG_FILE, FINAL_FILE, RECORD_FILE,
};
use super::{io_err, HarnessError};
use crate::algorithms::{run_with, Individual};
use crate::bench::{BenchData, Benchmark, DatasetKind, ProblemInstance};
use crate::dataset::{parse_dataset, read_cache, synthetic_dataset, write_cache, Dataset, DatasetFormat, DatasetStats};
use crate::moea::hypervolume;
use crate::operators::OperatorTemplates;
use crate::provider::TextGenerator;

/// Parses a raw dataset, writes its cache under `out_dir` and returns its
/// statistics.
pub fn cmd_ingest(
    input: &Path,
    format: DatasetFormat,
    metadata: Option<&Path>,
    out_dir: &Path,
    name: &str,
) -> Result<DatasetStats, HarnessError> {
    let report = parse_dataset(input, format, metadata)?;
    let dataset = Dataset::from_report(name, &report);
    let stats = dataset.stats()?;
    write_cache(out_dir, &dataset)?;
    Ok(stats)
}

fn load_dataset(spec: &ExperimentSpec, kind: DatasetKind) -> Result<Dataset, HarnessError> {
    let src = &spec.datasets;
    let path: &Option<PathBuf> = match kind {
        DatasetKind::Synthetic => return Ok(synthetic_dataset(&src.synthetic)),
        DatasetKind::Ml1m => &src.ml1m,
        DatasetKind::Games => &src.games,
        DatasetKind::Bundle => &src.bundle,
    };
    let path = path.as_ref().ok_or_else(|| {
        HarnessError::Usage(format!("no cache directory configured for dataset {}", kind.name()))
    })?;
    Ok(read_cache(path)?)
}

/// Loads and prepares each dataset once.
#[derive(Default)]
struct DataCache(BTreeMap<DatasetKind, Result<Arc<BenchData>, String>>);

impl DataCache {
    fn bench(&mut self, spec: &ExperimentSpec, instance: &ProblemInstance) -> Result<Benchmark, HarnessError> {
        let entry = self.0.entry(instance.dataset).or_insert_with(|| {
            load_dataset(spec, instance.dataset)
                .and_then(|d| Ok(BenchData::prepare(&d, spec.split_ratio, spec.split_seed)?))
                .map(Arc::new)
                .map_err(|e| e.to_string())
        });
        let data = entry.clone().map_err(HarnessError::Usage)?;
        let mut bench = Benchmark::new(instance.clone(), data)?;
        bench.max_tokens = spec.provider.max_tokens;
        Ok(bench)
    }
}

/// Benchmark for one run spec, loading its dataset as the spec says.
pub fn load_bench(spec: &ExperimentSpec, run: &RunSpec) -> Result<Benchmark, HarnessError> {
    DataCache::default().bench(spec, &run.instance()?)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunSummary {
    pub completed: Vec<String>,
    pub skipped: Vec<String>,
    pub failed: Vec<(String, String)>,
}

fn cell_label(name: &str, seed: u64) -> String {
    format!("{name}/{seed}")
}

fn final_hypervolume(set: &[Individual], m: usize) -> Result<f64, HarnessError> {
    let points: Vec<&[f64]> = set.iter().map(|i| i.objectives.as_slice()).collect();
    Ok(hypervolume(&points, &vec![0.0; m]).map_err(crate::algorithms::RunError::from)?)
}

fn run_cell(
    spec: &ExperimentSpec,
    run: &RunSpec,
    bench: &Benchmark,
    seed: u64,
    provider: &dyn TextGenerator,
    templates: &OperatorTemplates,
) -> Result<(), HarnessError> {
    let dir = cell_dir(&spec.output_dir, &run.cell_name(), seed);
    fs::create_dir_all(&dir).map_err(io_err(&dir))?;
    let config = run.config(seed, &spec.provider);
    let cell = CellConfig {
        name: run.cell_name(),
        variant: run.variant(),
        problem: bench.instance.clone(),
        config: config.clone(),
    };
    write_json(&dir.join(CONFIG_FILE), &cell)?;
    let record_path = dir.join(RECORD_FILE);
    let mut file = fs::File::create(&record_path).map_err(io_err(&record_path))?;
    let record = run_with(&config, bench, provider, templates, &mut |g| {
        let line = serde_json::to_string(g).map_err(|e| e.to_string())?;
        writeln!(file, "{line}").and_then(|_| file.flush()).map_err(|e| e.to_string())
    })?;
    let last = record.last().expect("generation 0 recorded");
    let fin = FinalFile {
        name: cell.name,
        variant: cell.variant,
        problem: bench.instance.name.clone(),
        objectives: bench.instance.objectives.clone(),
        seed,
        train_hypervolume: final_hypervolume(&record.final_set, bench.m())?,
        evaluations: last.evaluations,
        prompt_tokens: last.prompt_tokens,
        completion_tokens: last.completion_tokens,
        elapsed_ms: last.elapsed_ms,
        final_set: record.final_set.clone(),
        validation_samples: None,
        validation: Vec::new(),
        validation_hypervolume: None,
        validation_tokens: 0,
    };
    write_json(&dir.join(FINAL_FILE), &fin)
}

/// Runs every (run, seed) cell that has no `final.json` yet. A failing cell
/// is reported in the summary and does not stop the others.
pub fn cmd_run(spec: &ExperimentSpec, provider: &dyn TextGenerator) -> Result<RunSummary, HarnessError> {
    spec.validate()?;
    let templates = OperatorTemplates::default();
    let mut data = DataCache::default();
    let mut summary = RunSummary::default();
    for run in &spec.runs {
        let name = run.cell_name();
        let bench = run.instance().and_then(|i| data.bench(spec, &i));
        for &seed in &spec.seeds {
            let label = cell_label(&name, seed);
            if cell_dir(&spec.output_dir, &name, seed).join(FINAL_FILE).exists() {
                summary.skipped.push(label);
                continue;
            }
            let outcome = match &bench {
                Ok(b) => run_cell(spec, run, b, seed, provider, &templates),
                Err(e) => Err(HarnessError::Usage(e.to_string())),
            };
            match outcome {
                Ok(()) => summary.completed.push(label),
                Err(e) => summary.failed.push((label, e.to_string())),
            }
        }
    }
    Ok(summary)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidateSummary {
    pub validated: Vec<String>,
    /// Prompts whose validation failed or saw failed samples.
    pub flagged: Vec<String>,
    pub missing: Vec<String>,
}

/// Evaluates every final prompt of every completed cell on `n_val`
/// validation sessions and stores the results in `final.json`.
pub fn cmd_validate(
    spec: &ExperimentSpec,
    n_val: usize,
    provider: &dyn TextGenerator,
) -> Result<ValidateSummary, HarnessError> {
    spec.validate()?;
    let mut data = DataCache::default();
    let mut summary = ValidateSummary::default();
    for run in &spec.runs {
        let name = run.cell_name();
        for &seed in &spec.seeds {
            let dir = cell_dir(&spec.output_dir, &name, seed);
            let label = cell_label(&name, seed);
            if !dir.join(FINAL_FILE).exists() {
                summary.missing.push(label);
                continue;
            }
            let bench = data.bench(spec, &run.instance()?)?;
            let mut fin: FinalFile = read_final(&dir)?;
            let mut tokens = 0;
            fin.validation = fin
                .final_set
                .iter()
                .map(|ind| match bench.validate(&ind.genome.text, n_val, seed, provider) {
                    Ok(eval) => {
                        let (p, c) = eval.tokens();
                        tokens += p + c;
                        let failed_samples = eval.trace.iter().filter(|t| t.failed).count();
                        if failed_samples > 0 {
                            summary.flagged.push(format!("{label}/{}", ind.genome.id));
                        }
                        ValidationEntry {
                            genome_id: ind.genome.id.clone(),
                            objectives: Some(eval.objectives),
                            failed_samples,
                            error: None,
                        }
                    }
                    Err(e) => {
                        summary.flagged.push(format!("{label}/{}", ind.genome.id));
                        ValidationEntry {
                            genome_id: ind.genome.id.clone(),
                            objectives: None,
                            failed_samples: 0,
                            error: Some(e.to_string()),
                        }
                    }
                })
                .collect();
            let vals: Option<Vec<Individual>> = fin
                .validation
                .iter()
                .zip(&fin.final_set)
                .map(|(v, ind)| v.objectives.clone().map(|o| Individual { objectives: o, ..ind.clone() }))
                .collect();
            fin.validation_hypervolume = vals.map(|v| final_hypervolume(&v, bench.m())).transpose()?;
            fin.validation_samples = Some(n_val);
            fin.validation_tokens = tokens;
            write_json(&dir.join(FINAL_FILE), &fin)?;
            summary.validated.push(label);
        }
    }
    Ok(summary)
}
