use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use super::record::{EvaluationLog, GenerationRecord, Individual, RunRecord};
use super::{GenerationSink, RunConfig, RunError};
use crate::bench::Benchmark;
use crate::moea::{hypervolume, nondominated_indices, update_archive};
use crate::operators::{
    ablation_generate, crossover_mutate, genome_id, initialize_population, OperatorContext, OperatorTemplates, Offspring,
    PromptGenome,
};
use crate::provider::{ChatRequest, ChatResponse, ProviderError, TextGenerator};
use crate::seed::{derive_seed, tag};

/// Counts calls and provider-reported token usage passing through it.
pub struct TokenMeter<'a> {
    inner: &'a dyn TextGenerator,
    calls: AtomicU64,
    prompt: AtomicU64,
    completion: AtomicU64,
}

impl<'a> TokenMeter<'a> {
    pub fn new(inner: &'a dyn TextGenerator) -> Self {
        Self { inner, calls: AtomicU64::new(0), prompt: AtomicU64::new(0), completion: AtomicU64::new(0) }
    }

    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::SeqCst)
    }

    pub fn tokens(&self) -> (u64, u64) {
        (self.prompt.load(Ordering::SeqCst), self.completion.load(Ordering::SeqCst))
    }
}

impl TextGenerator for TokenMeter<'_> {
    fn complete(&self, req: &ChatRequest) -> Result<ChatResponse, ProviderError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        let out = self.inner.complete(req)?;
        self.prompt.fetch_add(out.prompt_tokens, Ordering::SeqCst);
        self.completion.fetch_add(out.completion_tokens, Ordering::SeqCst);
        Ok(out)
    }
    fn parallelism(&self) -> usize {
        self.inner.parallelism()
    }
}

/// Shared run state: evaluation, archive maintenance and recording.
pub(super) struct Engine<'a, 's> {
    pub cfg: &'a RunConfig,
    pub bench: &'a Benchmark,
    templates: &'a OperatorTemplates,
    meter: TokenMeter<'a>,
    sink: &'a mut GenerationSink<'s>,
    start: Instant,
    pub archive: Vec<Individual>,
    generations: Vec<GenerationRecord>,
    pending: Vec<EvaluationLog>,
    evaluations: usize,
    fallbacks: usize,
}

impl<'a, 's> Engine<'a, 's> {
    pub fn new(
        cfg: &'a RunConfig,
        bench: &'a Benchmark,
        provider: &'a dyn TextGenerator,
        templates: &'a OperatorTemplates,
        sink: &'a mut GenerationSink<'s>,
    ) -> Self {
        Self {
            cfg,
            bench,
            templates,
            meter: TokenMeter::new(provider),
            sink,
            start: Instant::now(),
            archive: Vec::new(),
            generations: Vec::new(),
            pending: Vec::new(),
            evaluations: 0,
            fallbacks: 0,
        }
    }

    fn context(&self) -> OperatorContext<'_> {
        let mut ctx = OperatorContext::new(self.templates, &self.meter);
        ctx.temperature = self.bench.temperature;
        ctx.max_tokens = self.bench.max_tokens;
        ctx
    }

    pub fn m(&self) -> usize {
        self.bench.m()
    }

    pub fn initialize(&mut self) -> Result<Vec<Individual>, RunError> {
        let (genomes, fallbacks) = {
            let ctx = self.context();
            initialize_population(&ctx, !self.cfg.ablation.wo_init, self.cfg.population_size, self.cfg.run_seed)?
        };
        self.fallbacks += fallbacks;
        genomes.into_iter().enumerate().map(|(i, g)| self.evaluate(g, 0, i)).collect()
    }

    /// Evaluates on the batch fixed by (run seed, generation, index).
    pub fn evaluate(&mut self, genome: PromptGenome, generation: u32, index: usize) -> Result<Individual, RunError> {
        let batch_seed = derive_seed(&[self.cfg.run_seed, generation as u64, index as u64]);
        self.evaluate_on(genome, batch_seed)
    }

    /// Fresh-batch re-evaluation of a surviving individual.
    pub fn reevaluate(&mut self, ind: &Individual, generation: u32, index: usize) -> Result<Individual, RunError> {
        let batch_seed = derive_seed(&[self.cfg.run_seed, tag::REEVAL, generation as u64, index as u64]);
        self.evaluate_on(ind.genome.clone(), batch_seed)
    }

    fn evaluate_on(&mut self, genome: PromptGenome, batch_seed: u64) -> Result<Individual, RunError> {
        let eval = self.bench.evaluate(&genome.text, batch_seed, &self.meter)?;
        let (prompt_tokens, completion_tokens) = eval.tokens();
        self.evaluations += 1;
        self.pending.push(EvaluationLog {
            genome: genome.clone(),
            batch_seed,
            objectives: eval.objectives.clone(),
            prompt_tokens,
            completion_tokens,
            samples: eval.trace,
        });
        Ok(Individual { genome, objectives: eval.objectives, batch_seed })
    }

    /// Offspring for each parent pair, generated concurrently; slot numbers
    /// (ids and request seeds) start at `first_slot`. With the
    /// no-crossover ablation each slot instead sees the whole population.
    pub fn breed(
        &mut self,
        population: &[Individual],
        pairs: &[(usize, usize)],
        generation: u32,
        first_slot: usize,
    ) -> Result<Vec<PromptGenome>, RunError> {
        let offspring: Vec<Result<Offspring, RunError>> = {
            let ctx = self.context();
            let genomes: Vec<PromptGenome> = population.iter().map(|i| i.genome.clone()).collect();
            let (run_seed, wo_cm) = (self.cfg.run_seed, self.cfg.ablation.wo_cm);
            crate::parallel::map_indexed(pairs.len(), ctx.provider.parallelism(), |k| {
                let id = genome_id(generation, first_slot + k);
                let seed = request_seed(run_seed, generation, first_slot + k);
                if wo_cm {
                    Ok(ablation_generate(&ctx, &genomes, seed, id, generation)?)
                } else {
                    let (a, b) = pairs[k];
                    Ok(crossover_mutate(&ctx, &genomes[a], &genomes[b], seed, id, generation))
                }
            })
        };
        let mut out = Vec::with_capacity(offspring.len());
        for o in offspring {
            let o = o?;
            self.fallbacks += o.fallback as usize;
            out.push(o.genome);
        }
        Ok(out)
    }

    pub fn update_archive(&mut self, candidates: &[Individual]) {
        self.archive = update_archive(&self.archive, candidates);
    }

    fn hv(&self, set: &[Individual]) -> Result<f64, RunError> {
        let points: Vec<&[f64]> = set.iter().map(|i| i.objectives.as_slice()).collect();
        Ok(hypervolume(&points, &vec![0.0; self.m()])?)
    }

    /// Closes a generation: snapshots state and hands it to the sink.
    pub fn record(&mut self, generation: u32, population: &[Individual]) -> Result<(), RunError> {
        let (prompt_tokens, completion_tokens) = self.meter.tokens();
        let rec = GenerationRecord {
            generation,
            population: population.to_vec(),
            archive: self.archive.clone(),
            hypervolume: self.hv(&self.archive)?,
            population_hypervolume: self.hv(population)?,
            evaluated: std::mem::take(&mut self.pending),
            evaluations: self.evaluations,
            provider_calls: self.meter.calls(),
            prompt_tokens,
            completion_tokens,
            fallbacks: self.fallbacks,
            elapsed_ms: self.start.elapsed().as_millis() as u64,
        };
        (self.sink)(&rec).map_err(RunError::Sink)?;
        self.generations.push(rec);
        Ok(())
    }

    pub fn finish(&mut self, final_set: Vec<Individual>) -> RunRecord {
        RunRecord {
            config: self.cfg.clone(),
            instance: self.bench.instance.name.clone(),
            generations: std::mem::take(&mut self.generations),
            final_set,
        }
    }
}

fn request_seed(run_seed: u64, generation: u32, index: usize) -> u64 {
    derive_seed(&[run_seed, tag::VARY, generation as u64, index as u64])
}

/// Nondominated members of `population`, in population order.
pub(super) fn nondominated_members(population: &[Individual]) -> Result<Vec<Individual>, RunError> {
    let points: Vec<&[f64]> = population.iter().map(|i| i.objectives.as_slice()).collect();
    Ok(nondominated_indices(&points)?.into_iter().map(|i| population[i].clone()).collect())
}

/// Replaces every member with a fresh-batch evaluation when the config asks
/// for it.
pub(super) fn maybe_reevaluate(
    engine: &mut Engine,
    population: Vec<Individual>,
    generation: u32,
) -> Result<Vec<Individual>, RunError> {
    if !engine.cfg.reevaluate_each_generation {
        return Ok(population);
    }
    let fresh = population
        .iter()
        .enumerate()
        .map(|(i, ind)| engine.reevaluate(ind, generation, i))
        .collect::<Result<Vec<_>, _>>()?;
    engine.update_archive(&fresh);
    Ok(fresh)
}
