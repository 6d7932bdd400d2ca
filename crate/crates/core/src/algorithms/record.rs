use serde::{Deserialize, Serialize};

use super::RunConfig;
use crate::bench::SampleTrace;
use crate::moea::ArchiveMember;
use crate::operators::PromptGenome;
use crate::ObjectiveVector;

/// An evaluated genome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub genome: PromptGenome,
    pub objectives: ObjectiveVector,
    pub batch_seed: u64,
}

impl ArchiveMember<f64> for Individual {
    fn objectives(&self) -> &[f64] {
        &self.objectives
    }
    fn identity(&self) -> &str {
        &self.genome.text
    }
}

/// One evaluation with its per-sample trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationLog {
    pub genome: PromptGenome,
    pub batch_seed: u64,
    pub objectives: ObjectiveVector,
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
    pub samples: Vec<SampleTrace>,
}

/// State after one generation (generation 0 is the initial population).
/// Counters are cumulative from the start of the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: u32,
    pub population: Vec<Individual>,
    pub archive: Vec<Individual>,
    pub hypervolume: f64,
    pub population_hypervolume: f64,
    pub evaluated: Vec<EvaluationLog>,
    pub evaluations: usize,
    pub provider_calls: u64,
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
    pub fallbacks: usize,
    pub elapsed_ms: u64,
}

impl GenerationRecord {
    pub fn total_tokens(&self) -> u64 {
        self.prompt_tokens + self.completion_tokens
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub config: RunConfig,
    pub instance: String,
    pub generations: Vec<GenerationRecord>,
    /// Nondominated result set: the final population's front for NSGA-II and
    /// IBEA, the external population for MOEA/D.
    pub final_set: Vec<Individual>,
}

impl RunRecord {
    pub fn last(&self) -> Option<&GenerationRecord> {
        self.generations.last()
    }

    pub fn evaluations(&self) -> usize {
        self.last().map_or(0, |g| g.evaluations)
    }

    /// Every evaluation of the run in order.
    pub fn all_evaluations(&self) -> impl Iterator<Item = &EvaluationLog> {
        self.generations.iter().flat_map(|g| g.evaluated.iter())
    }

    /// Objective vectors only, one line per generation: population, then
    /// archive. Independent of wall time.
    pub fn objective_log(&self) -> String {
        let mut out = String::new();
        for g in &self.generations {
            let pop: Vec<&[f64]> = g.population.iter().map(|i| i.objectives.as_slice()).collect();
            let arc: Vec<&[f64]> = g.archive.iter().map(|i| i.objectives.as_slice()).collect();
            out.push_str(&serde_json::to_string(&(g.generation, pop, arc, g.hypervolume)).expect("serializable"));
            out.push('\n');
        }
        out
    }
}
