use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{io_err, HarnessError};
use crate::algorithms::{Ablation, Algorithm, RunConfig, DEFAULT_NEIGHBORHOOD_SIZE};
use crate::bench::{instance_registry, ProblemInstance, DEFAULT_SPLIT_RATIO, DEFAULT_VALIDATION_SAMPLES};
use crate::dataset::SyntheticConfig;
use crate::moea::Scalarization;
use crate::provider::ProviderConfig;

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_SEEDS: [u64; 5] = [0, 10, 42, 625, 2023];

/// Where each dataset's ingested cache lives.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DatasetSources {
    #[serde(rename = "ml-1m", skip_serializing_if = "Option::is_none")]
    pub ml1m: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub games: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bundle: Option<PathBuf>,
    pub synthetic: SyntheticConfig,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HvSource {
    #[default]
    Train,
    Validation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ReportOptions {
    pub validation_samples: usize,
    /// Which objective vectors the scatter files carry.
    pub scatter_source: HvSource,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self { validation_samples: DEFAULT_VALIDATION_SAMPLES, scatter_source: HvSource::Train }
    }
}

/// One run configuration, executed once per seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunSpec {
    /// Cell name; derived from problem, algorithm and switches when empty.
    pub name: String,
    pub problem: String,
    pub algorithm: Algorithm,
    pub population_size: usize,
    pub max_generations: u32,
    pub neighborhood_size: usize,
    pub kappa: f64,
    pub ablation: Ablation,
    pub scalarization: Scalarization,
    pub reevaluate_each_generation: bool,
}

impl Default for RunSpec {
    fn default() -> Self {
        let c = RunConfig::default();
        Self {
            name: String::new(),
            problem: "RSBench-1".into(),
            algorithm: c.algorithm,
            population_size: c.population_size,
            max_generations: c.max_generations,
            neighborhood_size: c.neighborhood_size,
            kappa: c.kappa,
            ablation: c.ablation,
            scalarization: c.scalarization,
            reevaluate_each_generation: c.reevaluate_each_generation,
        }
    }
}

impl RunSpec {
    pub fn new(problem: &str, algorithm: Algorithm) -> Self {
        Self { problem: problem.into(), algorithm, ..Self::default() }
    }

    pub fn config(&self, run_seed: u64, provider: &ProviderConfig) -> RunConfig {
        RunConfig {
            algorithm: self.algorithm,
            population_size: self.population_size,
            max_generations: self.max_generations,
            run_seed,
            neighborhood_size: self.neighborhood_size,
            kappa: self.kappa,
            ablation: self.ablation,
            scalarization: self.scalarization,
            reevaluate_each_generation: self.reevaluate_each_generation,
            provider: provider.clone(),
        }
    }

    fn switches(&self) -> String {
        let mut s = String::new();
        if self.ablation.wo_init {
            s.push_str("-wo-init");
        }
        if self.ablation.wo_cm {
            s.push_str("-wo-cm");
        }
        if self.algorithm == Algorithm::Moead && self.neighborhood_size != DEFAULT_NEIGHBORHOOD_SIZE {
            s.push_str(&format!("-t{}", self.neighborhood_size));
        }
        s
    }

    pub fn cell_name(&self) -> String {
        if self.name.is_empty() {
            format!("{}-{}{}", self.problem, self.algorithm.key(), self.switches())
        } else {
            self.name.clone()
        }
    }

    /// Column label in reports, e.g. `LLM-IBEA-wo-Init` or `LLM-MOEA/D (T=5)`.
    pub fn variant(&self) -> String {
        let mut v = self.algorithm.display_name().to_string();
        if self.ablation.wo_init {
            v.push_str("-wo-Init");
        }
        if self.ablation.wo_cm {
            v.push_str("-wo-C&M");
        }
        if self.algorithm == Algorithm::Moead && self.neighborhood_size != DEFAULT_NEIGHBORHOOD_SIZE {
            v.push_str(&format!(" (T={})", self.neighborhood_size));
        }
        v
    }

    pub fn instance(&self) -> Result<ProblemInstance, HarnessError> {
        ProblemInstance::by_name(&self.problem)
            .ok_or_else(|| HarnessError::Spec(format!("unknown problem {:?}", self.problem)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentSpec {
    pub schema_version: u32,
    pub output_dir: PathBuf,
    pub seeds: Vec<u64>,
    pub split_ratio: f64,
    pub split_seed: u64,
    pub provider: ProviderConfig,
    pub datasets: DatasetSources,
    pub report: ReportOptions,
    pub runs: Vec<RunSpec>,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self::rsbench_protocol()
    }
}

impl ExperimentSpec {
    fn with_runs(runs: Vec<RunSpec>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            output_dir: PathBuf::from("experiments"),
            seeds: DEFAULT_SEEDS.to_vec(),
            split_ratio: DEFAULT_SPLIT_RATIO,
            split_seed: 0,
            provider: ProviderConfig::default(),
            datasets: DatasetSources::default(),
            report: ReportOptions::default(),
            runs,
        }
    }

    /// The three algorithms on all nine RSBench problems.
    pub fn rsbench_protocol() -> Self {
        let runs = instance_registry()
            .iter()
            .flat_map(|i| Algorithm::ALL.map(|a| RunSpec::new(&i.name, a)))
            .collect();
        Self::with_runs(runs)
    }

    /// The three algorithms on the synthetic problems; runs offline.
    pub fn synthetic_demo() -> Self {
        let runs = ["synthetic-acc-div", "synthetic-acc-fair", "synthetic-acc-div-fair"]
            .iter()
            .flat_map(|p| Algorithm::ALL.map(|a| RunSpec::new(p, a)))
            .collect();
        Self::with_runs(runs)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(HarnessError::Spec(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.seeds.is_empty() {
            return Err(HarnessError::Spec("seed list is empty".into()));
        }
        if self.seeds.iter().collect::<BTreeSet<_>>().len() != self.seeds.len() {
            return Err(HarnessError::Spec("seeds must be distinct".into()));
        }
        if !(self.split_ratio > 0.0 && self.split_ratio < 1.0) {
            return Err(HarnessError::Spec(format!("split_ratio must lie in (0, 1), got {}", self.split_ratio)));
        }
        let mut names = BTreeSet::new();
        for r in &self.runs {
            r.instance()?;
            r.config(0, &self.provider).validate().map_err(|e| HarnessError::Spec(e.to_string()))?;
            if !names.insert(r.cell_name()) {
                return Err(HarnessError::Spec(format!("duplicate run name {}", r.cell_name())));
            }
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("spec serializes")
    }

    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let spec: Self = toml::from_str(text).map_err(|e| HarnessError::Spec(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }
}

pub fn load_spec(path: &Path) -> Result<ExperimentSpec, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    ExperimentSpec::from_toml(&text)
}
