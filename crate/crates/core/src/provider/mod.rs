//! Text generation: one interface, an OpenAI-compatible HTTP client and a
//! deterministic offline mock.

mod http;
mod mock;

use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use http::HttpProvider;
pub use mock::{mock_rules, MockProvider, SYNONYMS};

pub const TASK_INIT: &str = "#TASK:INIT";
pub const TASK_VARY: &str = "#TASK:VARY";
pub const TASK_RANK: &str = "#TASK:RANK";

#[derive(Debug, Error)]
pub enum ProviderError {
    #[error("provider configuration: {0}")]
    Config(String),
    #[error("transport failure after {attempts} attempt(s): {message}")]
    Transport { attempts: usize, message: String },
    #[error("protocol error: {0}")]
    Protocol(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub system_text: String,
    pub user_text: String,
    pub temperature: f64,
    pub max_tokens: u32,
    pub request_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatResponse {
    pub text: String,
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
    pub latency_ms: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProviderKind {
    Http,
    #[default]
    Mock,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProviderConfig {
    pub kind: ProviderKind,
    pub endpoint_url: String,
    pub model_name: String,
    /// Name of the environment variable holding the API key. Empty means the
    /// endpoint needs no authentication.
    pub api_key_env_var: String,
    pub timeout_ms: u64,
    pub max_retries: u32,
    pub parallelism_limit: usize,
    pub backoff_base_ms: u64,
    pub max_tokens: u32,
}

impl Default for ProviderConfig {
    fn default() -> Self {
        Self {
            kind: ProviderKind::Mock,
            endpoint_url: String::new(),
            model_name: String::new(),
            api_key_env_var: "OPENAI_API_KEY".into(),
            timeout_ms: 60_000,
            max_retries: 5,
            parallelism_limit: 4,
            backoff_base_ms: 1_000,
            max_tokens: 1_024,
        }
    }
}

impl ProviderConfig {
    pub fn mock() -> Self {
        Self::default()
    }

    pub fn validate(&self) -> Result<(), ProviderError> {
        if self.kind == ProviderKind::Http {
            if self.endpoint_url.trim().is_empty() {
                return Err(ProviderError::Config("http provider requires endpoint_url".into()));
            }
            if self.model_name.trim().is_empty() {
                return Err(ProviderError::Config("http provider requires model_name".into()));
            }
        }
        if self.parallelism_limit == 0 {
            return Err(ProviderError::Config("parallelism_limit must be >= 1".into()));
        }
        Ok(())
    }
}

/// A source of chat completions.
pub trait TextGenerator: Send + Sync {
    fn complete(&self, req: &ChatRequest) -> Result<ChatResponse, ProviderError>;

    /// Maximum number of concurrent `complete` calls the caller should issue.
    fn parallelism(&self) -> usize {
        1
    }
}

impl<G: TextGenerator + ?Sized> TextGenerator for Arc<G> {
    fn complete(&self, req: &ChatRequest) -> Result<ChatResponse, ProviderError> {
        (**self).complete(req)
    }
    fn parallelism(&self) -> usize {
        (**self).parallelism()
    }
}

pub fn build_provider(cfg: &ProviderConfig) -> Result<Arc<dyn TextGenerator>, ProviderError> {
    cfg.validate()?;
    Ok(match cfg.kind {
        ProviderKind::Mock => Arc::new(MockProvider::with_parallelism(cfg.parallelism_limit)),
        ProviderKind::Http => Arc::new(HttpProvider::new(cfg.clone())?),
    })
}

/// One-shot completion against the provider described by `cfg`.
pub fn complete(cfg: &ProviderConfig, req: &ChatRequest) -> Result<ChatResponse, ProviderError> {
    build_provider(cfg)?.complete(req)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Init,
    Vary,
    Rank,
}

impl Task {
    pub fn marker(self) -> &'static str {
        match self {
            Task::Init => TASK_INIT,
            Task::Vary => TASK_VARY,
            Task::Rank => TASK_RANK,
        }
    }

    /// Prefixes `body` with this task's marker line.
    pub fn tag(self, body: &str) -> String {
        format!("{}\n{}", self.marker(), body)
    }
}

/// Splits the task marker line off a user message.
pub fn split_task(user_text: &str) -> Result<(Task, &str), ProviderError> {
    let (first, rest) = user_text.split_once('\n').unwrap_or((user_text, ""));
    let task = match first.trim_end() {
        TASK_INIT => Task::Init,
        TASK_VARY => Task::Vary,
        TASK_RANK => Task::Rank,
        other => return Err(ProviderError::Protocol(format!("unknown task marker {other:?}"))),
    };
    Ok((task, rest))
}

pub(crate) fn whitespace_tokens(text: &str) -> u64 {
    text.split_whitespace().count() as u64
}

/// Wraps a provider and keeps every request and response it served.
pub struct Recorder<G> {
    inner: G,
    log: Mutex<Vec<(ChatRequest, Option<ChatResponse>)>>,
}

impl<G: TextGenerator> Recorder<G> {
    pub fn new(inner: G) -> Self {
        Self { inner, log: Mutex::new(Vec::new()) }
    }

    pub fn requests(&self) -> Vec<ChatRequest> {
        self.log.lock().expect("log poisoned").iter().map(|(r, _)| r.clone()).collect()
    }

    pub fn calls(&self) -> usize {
        self.log.lock().expect("log poisoned").len()
    }

    /// Sum of (prompt, completion) tokens over all successful responses.
    pub fn token_totals(&self) -> (u64, u64) {
        self.log
            .lock()
            .expect("log poisoned")
            .iter()
            .filter_map(|(_, r)| r.as_ref())
            .fold((0, 0), |(p, c), r| (p + r.prompt_tokens, c + r.completion_tokens))
    }
}

impl<G: TextGenerator> TextGenerator for Recorder<G> {
    fn complete(&self, req: &ChatRequest) -> Result<ChatResponse, ProviderError> {
        let out = self.inner.complete(req);
        let kept = out.as_ref().ok().cloned();
        self.log.lock().expect("log poisoned").push((req.clone(), kept));
        out
    }
    fn parallelism(&self) -> usize {
        self.inner.parallelism()
    }
}
