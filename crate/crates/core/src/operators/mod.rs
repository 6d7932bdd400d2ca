//! LLM-driven variation operators: population initialization, crossover plus
//! mutation, and the population-conditioned ablation generator.

mod extract;
mod templates;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use extract::{extract_bracketed, ExtractionFailure};
pub use templates::{OperatorTemplates, TemplateError};

use crate::parallel::map_indexed;
use crate::provider::{ChatRequest, ProviderError, Task, TextGenerator};
use crate::seed::{derive_seed, tag};
use crate::text::{normalize_whitespace, truncate_to_sentences};

pub const DEFAULT_MAX_GENOME_CHARS: usize = 4000;
/// Extra attempts after the first when a response yields no prompt.
pub const EXTRACTION_RETRIES: u64 = 3;

/// Used in place of the example when initialization runs without it and
/// every attempt failed to produce a prompt.
pub const BARE_PROMPT: &str =
    "Rank the 20 items in the candidate set by how likely the user is to interact with them next, using the session interactions.";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptGenome {
    pub id: String,
    pub text: String,
    pub parent_ids: Vec<String>,
    pub generation_born: u32,
}

#[derive(Debug, Error)]
pub enum OperatorError {
    #[error("initialization of genome {index} failed: {source}")]
    Initialization { index: usize, source: ProviderError },
    #[error("empty population")]
    EmptyPopulation,
}

/// Shared settings for every operator request.
pub struct OperatorContext<'a> {
    pub templates: &'a OperatorTemplates,
    pub provider: &'a dyn TextGenerator,
    pub temperature: f64,
    pub max_tokens: u32,
    pub max_genome_chars: usize,
    pub system_text: String,
}

impl<'a> OperatorContext<'a> {
    pub fn new(templates: &'a OperatorTemplates, provider: &'a dyn TextGenerator) -> Self {
        Self {
            templates,
            provider,
            temperature: 0.7,
            max_tokens: 1024,
            max_genome_chars: DEFAULT_MAX_GENOME_CHARS,
            system_text: "You are an expert prompt engineer for recommender systems.".into(),
        }
    }

    fn request(&self, task: Task, body: String, request_seed: u64) -> ChatRequest {
        ChatRequest {
            system_text: self.system_text.clone(),
            user_text: task.tag(&body),
            temperature: self.temperature,
            max_tokens: self.max_tokens,
            request_seed,
        }
    }

    /// Sends `body` until a prompt can be extracted, at most
    /// `1 + EXTRACTION_RETRIES` times. `Err` means every attempt failed at the
    /// provider; `Ok(None)` means responses came back but none was usable.
    fn generate(&self, task: Task, body: &str, seed: u64) -> Result<Option<String>, ProviderError> {
        let mut last_error = None;
        let mut answered = false;
        for attempt in 0..=EXTRACTION_RETRIES {
            let req = self.request(task, body.to_string(), derive_seed(&[seed, attempt]));
            match self.provider.complete(&req) {
                Ok(resp) => {
                    answered = true;
                    if let Ok(text) = extract_bracketed(&resp.text) {
                        let text = truncate_to_sentences(&normalize_whitespace(&text), self.max_genome_chars);
                        if !text.is_empty() {
                            return Ok(Some(text));
                        }
                    }
                }
                Err(e) => last_error = Some(e),
            }
        }
        match (answered, last_error) {
            (false, Some(e)) => Err(e),
            _ => Ok(None),
        }
    }
}

/// Result of one offspring request.
#[derive(Debug, Clone)]
pub struct Offspring {
    pub genome: PromptGenome,
    /// The documented fallback replaced the model output.
    pub fallback: bool,
}

/// The built-in four-step chain-of-thought recommendation prompt.
pub fn default_example_prompt() -> String {
    OperatorTemplates::default().example_prompt
}

/// Generates `n` initial genomes. With `use_example == false` the example
/// slot of the template is left empty.
pub fn initialize_population(
    ctx: &OperatorContext,
    use_example: bool,
    n: usize,
    run_seed: u64,
) -> Result<(Vec<PromptGenome>, usize), OperatorError> {
    let example = ctx.templates.example_prompt.as_str();
    let body = ctx.templates.render_init(if use_example { example } else { "" });
    let fallback_text = if use_example { normalize_whitespace(example) } else { BARE_PROMPT.to_string() };
    let results = map_indexed(n, ctx.provider.parallelism(), |i| {
        ctx.generate(Task::Init, &body, derive_seed(&[run_seed, tag::INIT, i as u64]))
    });
    let mut fallbacks = 0;
    let mut population = Vec::with_capacity(n);
    for (index, r) in results.into_iter().enumerate() {
        let text = match r.map_err(|source| OperatorError::Initialization { index, source })? {
            Some(t) => t,
            None => {
                fallbacks += 1;
                fallback_text.clone()
            }
        };
        population.push(PromptGenome { id: genome_id(0, index), text, parent_ids: Vec::new(), generation_born: 0 });
    }
    Ok((population, fallbacks))
}

pub fn genome_id(generation: u32, index: usize) -> String {
    format!("g{generation}-{index}")
}

/// One LLM crossover-and-mutation request over two parents. Any failure
/// yields a copy of parent `a`.
pub fn crossover_mutate(
    ctx: &OperatorContext,
    a: &PromptGenome,
    b: &PromptGenome,
    request_seed: u64,
    id: String,
    generation: u32,
) -> Offspring {
    let body = ctx.templates.render_vary(&a.text, &b.text);
    let (text, fallback) = match ctx.generate(Task::Vary, &body, request_seed) {
        Ok(Some(t)) => (t, false),
        _ => (a.text.clone(), true),
    };
    Offspring {
        genome: PromptGenome { id, text, parent_ids: vec![a.id.clone(), b.id.clone()], generation_born: generation },
        fallback,
    }
}

/// One request conditioned on the whole population (the no-crossover
/// ablation). Any failure yields a copy of the first member.
pub fn ablation_generate(
    ctx: &OperatorContext,
    population: &[PromptGenome],
    request_seed: u64,
    id: String,
    generation: u32,
) -> Result<Offspring, OperatorError> {
    let first = population.first().ok_or(OperatorError::EmptyPopulation)?;
    let texts: Vec<&str> = population.iter().map(|g| g.text.as_str()).collect();
    let body = ctx.templates.render_ablation(&texts);
    let (text, fallback) = match ctx.generate(Task::Vary, &body, request_seed) {
        Ok(Some(t)) => (t, false),
        _ => (first.text.clone(), true),
    };
    Ok(Offspring {
        genome: PromptGenome { id, text, parent_ids: Vec::new(), generation_born: generation },
        fallback,
    })
}
