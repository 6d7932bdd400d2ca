//! The RSBench benchmark: evaluation samples, the ranking protocol, the three
//! recommendation objectives, batched Monte Carlo evaluation and the
//! nine-instance registry.

mod objectives;
mod protocol;
mod registry;

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use objectives::{f_acc, f_div, f_fair, target_rank};
pub use protocol::{build_sample, parse_ranking, render_request, EvalSample, RankedList, RankingRequest};
pub use registry::{
    instance_registry, DatasetCatalog, DatasetKind, ObjectiveKind, ProblemInstance, DEFAULT_BATCH_SIZE,
    DEFAULT_CANDIDATE_SIZE, DEFAULT_K,
};

use crate::dataset::{popularity_partition, split_train_val, Dataset, DatasetError, ItemTable, PopularityPartition, Session};
use crate::moea::MoeaError;
use crate::parallel::map_indexed;
use crate::provider::TextGenerator;
use crate::seed::{derive_seed, tag};
use crate::ObjectiveVector;

pub const DEFAULT_TEMPERATURE: f64 = 0.7;
pub const DEFAULT_SPLIT_RATIO: f64 = 0.8;
pub const DEFAULT_VALIDATION_SAMPLES: usize = 200;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Objectives(#[from] MoeaError),
}

/// A dataset prepared for benchmarking: items, popularity partition and the
/// train/validation session pools.
#[derive(Debug, Clone)]
pub struct BenchData {
    pub name: String,
    pub items: ItemTable,
    pub partition: PopularityPartition,
    pub train: Vec<Session>,
    pub validation: Vec<Session>,
}

impl BenchData {
    pub fn prepare(dataset: &Dataset, split_ratio: f64, split_seed: u64) -> Result<Self, BenchError> {
        let partition = popularity_partition(&dataset.items)?;
        let (train, validation) = split_train_val(&dataset.sessions, split_ratio, split_seed)?;
        Ok(Self { name: dataset.name.clone(), items: dataset.items.clone(), partition, train, validation })
    }
}

/// Per-sample record of one evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleTrace {
    pub sample_index: usize,
    pub session_index: usize,
    pub target: u64,
    pub target_rank: usize,
    pub top_k: Vec<u64>,
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
    pub latency_ms: u64,
    /// The provider failed; the ranking fell back to candidate order.
    pub failed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub objectives: ObjectiveVector,
    pub trace: Vec<SampleTrace>,
}

impl Evaluation {
    pub fn tokens(&self) -> (u64, u64) {
        self.trace.iter().fold((0, 0), |(p, c), t| (p + t.prompt_tokens, c + t.completion_tokens))
    }
}

/// A problem instance bound to its prepared data.
#[derive(Debug, Clone)]
pub struct Benchmark {
    pub instance: ProblemInstance,
    pub data: Arc<BenchData>,
    pub temperature: f64,
    pub max_tokens: u32,
}

impl Benchmark {
    pub fn new(instance: ProblemInstance, data: Arc<BenchData>) -> Result<Self, BenchError> {
        instance.validate()?;
        if data.train.is_empty() {
            return Err(BenchError::Config(format!("dataset {} has an empty training pool", data.name)));
        }
        Ok(Self { instance, data, temperature: DEFAULT_TEMPERATURE, max_tokens: 1024 })
    }

    pub fn m(&self) -> usize {
        self.instance.objectives.len()
    }

    /// Objective vector of `genome` on a seeded batch of training sessions.
    pub fn evaluate(&self, genome: &str, batch_seed: u64, provider: &dyn TextGenerator) -> Result<Evaluation, BenchError> {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(&[batch_seed, tag::EVAL]));
        let indices: Vec<usize> = if self.instance.batch_size >= self.data.train.len() {
            (0..self.data.train.len()).collect()
        } else {
            rand::seq::index::sample(&mut rng, self.data.train.len(), self.instance.batch_size).into_vec()
        };
        self.run_samples(genome, &self.data.train, &indices, batch_seed, provider)
    }

    /// Objective vector on `n_val` validation sessions fixed by `seed`. Only
    /// used for reporting.
    pub fn validate(&self, genome: &str, n_val: usize, seed: u64, provider: &dyn TextGenerator) -> Result<Evaluation, BenchError> {
        let pool = &self.data.validation;
        if pool.len() < n_val || n_val == 0 {
            return Err(BenchError::Config(format!(
                "validation needs {n_val} sessions, pool has {}",
                pool.len()
            )));
        }
        let mut order: Vec<usize> = (0..pool.len()).collect();
        let vseed = derive_seed(&[seed, tag::VALIDATE]);
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(vseed));
        order.truncate(n_val);
        self.run_samples(genome, pool, &order, vseed, provider)
    }

    fn run_samples(
        &self,
        genome: &str,
        pool: &[Session],
        indices: &[usize],
        seed: u64,
        provider: &dyn TextGenerator,
    ) -> Result<Evaluation, BenchError> {
        let samples = indices
            .iter()
            .enumerate()
            .map(|(l, &si)| {
                build_sample(
                    &pool[si],
                    &self.data.items,
                    derive_seed(&[seed, tag::CANDIDATES, l as u64]),
                    self.instance.candidate_size,
                )
            })
            .collect::<Result<Vec<_>, _>>()?;
        let answers = map_indexed(samples.len(), provider.parallelism(), |l| {
            let req = render_request(&RankingRequest {
                genome,
                sample: &samples[l],
                items: &self.data.items,
                temperature: self.temperature,
                max_tokens: self.max_tokens,
                request_seed: derive_seed(&[seed, tag::SAMPLE, l as u64]),
            });
            provider.complete(&req)
        });
        let k = self.instance.k_cutoff;
        let mut rankings = Vec::with_capacity(samples.len());
        let mut trace = Vec::with_capacity(samples.len());
        for (l, (sample, answer)) in samples.iter().zip(answers).enumerate() {
            let (ranking, tokens, failed) = match answer {
                Ok(r) => (parse_ranking(&r.text, sample), (r.prompt_tokens, r.completion_tokens, r.latency_ms), false),
                Err(_) => (RankedList::identity(sample), (0, 0, 0), true),
            };
            trace.push(SampleTrace {
                sample_index: l,
                session_index: indices[l],
                target: sample.target,
                target_rank: target_rank(&ranking, sample.target),
                top_k: ranking.top(k).to_vec(),
                prompt_tokens: tokens.0,
                completion_tokens: tokens.1,
                latency_ms: tokens.2,
                failed,
            });
            rankings.push(ranking);
        }
        let values = self
            .instance
            .objectives
            .iter()
            .map(|o| match o {
                ObjectiveKind::Acc => f_acc::<f64>(&rankings, &samples, k),
                ObjectiveKind::Div => f_div::<f64>(&rankings, &self.data.items, k),
                ObjectiveKind::Fair => f_fair::<f64>(&rankings, &self.data.partition, k),
            })
            .collect();
        Ok(Evaluation { objectives: ObjectiveVector::new(values)?, trace })
    }
}
