use std::time::{Duration, Instant};

use serde::Deserialize;
use serde_json::json;

use super::{ChatRequest, ChatResponse, ProviderConfig, ProviderError, TextGenerator};
use crate::seed::{derive_seed, unit_interval};

/// Client for OpenAI-compatible `/chat/completions` endpoints.
///
/// Transport failures, 5xx and 429 are retried with exponential backoff
/// (base `backoff_base_ms`, factor 2, up to +50% jitter). The total time spent
/// on one call never exceeds `timeout_ms * (max_retries + 1)`.
pub struct HttpProvider {
    cfg: ProviderConfig,
    agent: ureq::Agent,
    api_key: Option<String>,
}

#[derive(Deserialize)]
struct CompletionBody {
    choices: Vec<Choice>,
    #[serde(default)]
    usage: Option<Usage>,
}

#[derive(Deserialize)]
struct Choice {
    message: Message,
}

#[derive(Deserialize)]
struct Message {
    #[serde(default)]
    content: Option<String>,
}

#[derive(Deserialize)]
struct Usage {
    #[serde(default)]
    prompt_tokens: u64,
    #[serde(default)]
    completion_tokens: u64,
}

enum Failure {
    Retryable(String),
    Fatal(ProviderError),
}

impl HttpProvider {
    pub fn new(cfg: ProviderConfig) -> Result<Self, ProviderError> {
        if cfg.endpoint_url.trim().is_empty() || cfg.model_name.trim().is_empty() {
            return Err(ProviderError::Config("http provider requires endpoint_url and model_name".into()));
        }
        let api_key = if cfg.api_key_env_var.is_empty() {
            None
        } else {
            let key = std::env::var(&cfg.api_key_env_var).map_err(|_| {
                ProviderError::Config(format!("environment variable {} is not set", cfg.api_key_env_var))
            })?;
            Some(key)
        };
        let agent = ureq::AgentBuilder::new()
            .timeout(Duration::from_millis(cfg.timeout_ms))
            .build();
        Ok(Self { cfg, agent, api_key })
    }

    fn url(&self) -> String {
        let base = self.cfg.endpoint_url.trim_end_matches('/');
        if base.ends_with("/chat/completions") {
            base.to_string()
        } else {
            format!("{base}/chat/completions")
        }
    }

    fn attempt(&self, req: &ChatRequest, timeout: Duration) -> Result<ChatResponse, Failure> {
        let body = json!({
            "model": self.cfg.model_name,
            "messages": [
                {"role": "system", "content": req.system_text},
                {"role": "user", "content": req.user_text},
            ],
            "temperature": req.temperature,
            "max_tokens": req.max_tokens,
            "seed": req.request_seed,
        });
        let mut call = self.agent.post(&self.url()).timeout(timeout).set("Content-Type", "application/json");
        if let Some(key) = &self.api_key {
            call = call.set("Authorization", &format!("Bearer {key}"));
        }
        let started = Instant::now();
        let response = match call.send_json(body) {
            Ok(r) => r,
            Err(ureq::Error::Status(code, r)) => {
                let detail = r.into_string().unwrap_or_default();
                let msg = format!("status {code}: {}", detail.chars().take(200).collect::<String>());
                return Err(if code == 429 || code >= 500 {
                    Failure::Retryable(msg)
                } else {
                    Failure::Fatal(ProviderError::Protocol(msg))
                });
            }
            Err(e) => return Err(Failure::Retryable(e.to_string())),
        };
        let raw = response.into_string().map_err(|e| Failure::Retryable(e.to_string()))?;
        let latency_ms = started.elapsed().as_millis() as u64;
        let parsed: CompletionBody = serde_json::from_str(&raw)
            .map_err(|e| Failure::Fatal(ProviderError::Protocol(format!("unparseable completion body: {e}"))))?;
        let text = parsed
            .choices
            .into_iter()
            .next()
            .and_then(|c| c.message.content)
            .ok_or_else(|| Failure::Fatal(ProviderError::Protocol("completion has no choices".into())))?;
        let (prompt_tokens, completion_tokens) =
            parsed.usage.map_or((0, 0), |u| (u.prompt_tokens, u.completion_tokens));
        Ok(ChatResponse { text, prompt_tokens, completion_tokens, latency_ms })
    }
}

impl TextGenerator for HttpProvider {
    fn complete(&self, req: &ChatRequest) -> Result<ChatResponse, ProviderError> {
        let per_call = Duration::from_millis(self.cfg.timeout_ms);
        let deadline = Instant::now() + per_call * (self.cfg.max_retries + 1);
        let mut last = String::new();
        let mut attempts = 0;
        for attempt in 0..=self.cfg.max_retries {
            let remaining = deadline.saturating_duration_since(Instant::now());
            if remaining.is_zero() {
                break;
            }
            attempts += 1;
            match self.attempt(req, remaining.min(per_call)) {
                Ok(r) => return Ok(r),
                Err(Failure::Fatal(e)) => return Err(e),
                Err(Failure::Retryable(msg)) => last = msg,
            }
            if attempt < self.cfg.max_retries {
                let base = self.cfg.backoff_base_ms as f64 * 2f64.powi(attempt as i32);
                let jitter = 1.0 + 0.5 * unit_interval(derive_seed(&[req.request_seed, u64::from(attempt)]));
                let wait = Duration::from_millis((base * jitter) as u64);
                std::thread::sleep(wait.min(deadline.saturating_duration_since(Instant::now())));
            }
        }
        Err(ProviderError::Transport { attempts, message: last })
    }

    fn parallelism(&self) -> usize {
        self.cfg.parallelism_limit
    }
}
