//! The three prompt-optimization loops (NSGA-II, MOEA/D and IBEA driven by LLM
//! operators) and their ablation switches.

mod engine;
mod ibea;
mod moead;
mod nsga2;
mod record;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use engine::TokenMeter;
pub use record::{EvaluationLog, GenerationRecord, Individual, RunRecord};

use crate::bench::{BenchError, Benchmark};
use crate::moea::{MoeaError, Scalarization, DEFAULT_KAPPA};
use crate::operators::{OperatorError, OperatorTemplates};
use crate::provider::{ProviderConfig, TextGenerator};

pub const DEFAULT_POPULATION_SIZE: usize = 10;
pub const DEFAULT_MAX_GENERATIONS: u32 = 20;
pub const DEFAULT_NEIGHBORHOOD_SIZE: usize = 3;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    #[default]
    Nsga2,
    Moead,
    Ibea,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Nsga2, Algorithm::Moead, Algorithm::Ibea];

    pub fn key(self) -> &'static str {
        match self {
            Self::Nsga2 => "nsga2",
            Self::Moead => "moead",
            Self::Ibea => "ibea",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            Self::Nsga2 => "LLM-NSGA-II",
            Self::Moead => "LLM-MOEA/D",
            Self::Ibea => "LLM-IBEA",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Algorithm {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace(['-', '_', '/'], "").as_str() {
            "nsga2" | "nsgaii" | "llmnsgaii" | "llmnsga2" => Ok(Self::Nsga2),
            "moead" | "llmmoead" => Ok(Self::Moead),
            "ibea" | "llmibea" => Ok(Self::Ibea),
            _ => Err(format!("unknown algorithm {s:?}")),
        }
    }
}

/// Ablation switches.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Ablation {
    /// Initialize without the example prompt.
    pub wo_init: bool,
    /// Replace crossover and mutation with one population-conditioned request.
    pub wo_cm: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    pub population_size: usize,
    pub max_generations: u32,
    pub run_seed: u64,
    pub neighborhood_size: usize,
    pub kappa: f64,
    pub ablation: Ablation,
    pub scalarization: Scalarization,
    /// Re-evaluate surviving parents on a fresh batch every generation.
    pub reevaluate_each_generation: bool,
    pub provider: ProviderConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::default(),
            population_size: DEFAULT_POPULATION_SIZE,
            max_generations: DEFAULT_MAX_GENERATIONS,
            run_seed: 0,
            neighborhood_size: DEFAULT_NEIGHBORHOOD_SIZE,
            kappa: DEFAULT_KAPPA,
            ablation: Ablation::default(),
            scalarization: Scalarization::default(),
            reevaluate_each_generation: false,
            provider: ProviderConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn new(algorithm: Algorithm, run_seed: u64) -> Self {
        Self { algorithm, run_seed, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), RunError> {
        if self.population_size < 2 {
            return Err(RunError::Config(format!("population_size must be >= 2, got {}", self.population_size)));
        }
        if self.algorithm == Algorithm::Moead
            && !(2..=self.population_size).contains(&self.neighborhood_size)
        {
            return Err(RunError::Config(format!(
                "neighborhood_size must lie in 2..={}, got {}",
                self.population_size, self.neighborhood_size
            )));
        }
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return Err(RunError::Config(format!("kappa must be positive, got {}", self.kappa)));
        }
        Ok(())
    }

    /// Evaluations a run will perform: initial population plus one offspring
    /// per slot per generation, plus re-evaluations when enabled.
    pub fn expected_evaluations(&self) -> usize {
        let per_generation = if self.reevaluate_each_generation { 2 } else { 1 };
        self.population_size * (1 + per_generation * self.max_generations as usize)
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("invalid run configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Bench(#[from] BenchError),
    #[error(transparent)]
    Moea(#[from] MoeaError),
    #[error("generation sink failed: {0}")]
    Sink(String),
}

/// Called once per finished generation, in order. An error aborts the run.
pub type GenerationSink<'a> = dyn FnMut(&GenerationRecord) -> Result<(), String> + 'a;

/// Runs the configured algorithm with the default operator templates.
pub fn run(cfg: &RunConfig, bench: &Benchmark, provider: &dyn TextGenerator) -> Result<RunRecord, RunError> {
    run_with(cfg, bench, provider, &OperatorTemplates::default(), &mut |_| Ok(()))
}

/// Runs the configured algorithm, handing every generation to `sink` as soon
/// as it is complete.
pub fn run_with(
    cfg: &RunConfig,
    bench: &Benchmark,
    provider: &dyn TextGenerator,
    templates: &OperatorTemplates,
    sink: &mut GenerationSink<'_>,
) -> Result<RunRecord, RunError> {
    cfg.validate()?;
    let mut engine = engine::Engine::new(cfg, bench, provider, templates, sink);
    match cfg.algorithm {
        Algorithm::Nsga2 => nsga2::run(&mut engine),
        Algorithm::Moead => moead::run(&mut engine),
        Algorithm::Ibea => ibea::run(&mut engine),
    }
}

pub fn run_nsga2(cfg: &RunConfig, bench: &Benchmark, provider: &dyn TextGenerator) -> Result<RunRecord, RunError> {
    run(&RunConfig { algorithm: Algorithm::Nsga2, ..cfg.clone() }, bench, provider)
}

pub fn run_moead(cfg: &RunConfig, bench: &Benchmark, provider: &dyn TextGenerator) -> Result<RunRecord, RunError> {
    run(&RunConfig { algorithm: Algorithm::Moead, ..cfg.clone() }, bench, provider)
}

pub fn run_ibea(cfg: &RunConfig, bench: &Benchmark, provider: &dyn TextGenerator) -> Result<RunRecord, RunError> {
    run(&RunConfig { algorithm: Algorithm::Ibea, ..cfg.clone() }, bench, provider)
}
