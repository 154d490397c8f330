//! Model backends, response caching and bounded-parallel execution.

mod cache;
mod http;
mod mock;

pub use cache::{CacheEntry, ResponseCache};
pub use http::HttpChat;
pub use mock::{adversary_answer, oracle_answer};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::str::FromStr;
use std::time::{Duration, Instant, SystemTime};

use crate::dataset::TaskInstance;
use crate::error::ClientError;
use crate::prompt::PromptBundle;

pub const DEFAULT_MAX_TOKENS: u32 = 4096;
pub const DEFAULT_MAX_RETRIES: u32 = 5;
pub const DEFAULT_API_KEY_ENV: &str = "OPENAI_API_KEY";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelConfig {
    /// Full chat-completions URL, e.g. `https://host/v1/chat/completions`.
    pub endpoint: String,
    pub model: String,
    pub temperature: f64,
    pub max_tokens: u32,
    pub timeout_secs: u64,
    pub max_retries: u32,
    /// Name of the environment variable holding the API key.
    pub api_key_env: String,
    /// First retry delay; doubles on every further attempt.
    pub backoff_base_ms: u64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            endpoint: "https://api.openai.com/v1/chat/completions".into(),
            model: "gpt-3.5-turbo".into(),
            temperature: 0.0,
            max_tokens: DEFAULT_MAX_TOKENS,
            timeout_secs: 120,
            max_retries: DEFAULT_MAX_RETRIES,
            api_key_env: DEFAULT_API_KEY_ENV.into(),
            backoff_base_ms: 1000,
        }
    }
}

impl ModelConfig {
    pub fn params(&self) -> DecodingParams {
        DecodingParams { temperature: self.temperature, max_tokens: self.max_tokens }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecodingParams {
    pub temperature: f64,
    pub max_tokens: u32,
}

/// Stable digest of (prompt text, model id, decoding params).
pub fn cache_key(prompt: &str, model: &str, params: &DecodingParams) -> String {
    let mut h = Sha256::new();
    // Length prefixes keep field boundaries unambiguous.
    for field in [prompt.as_bytes(), model.as_bytes()] {
        h.update((field.len() as u64).to_le_bytes());
        h.update(field);
    }
    h.update(params.temperature.to_bits().to_le_bytes());
    h.update(params.max_tokens.to_le_bytes());
    hex::encode(h.finalize())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub instance_id: String,
    pub strategy: crate::prompt::Strategy,
    pub prompt_hash: String,
    pub label_base: usize,
    pub mst_mode: crate::prompt::MstMode,
    pub model: String,
    pub params: DecodingParams,
    pub response: String,
    pub latency_ms: u64,
    /// RFC 3339, UTC, of the original model call.
    pub timestamp: String,
    pub backend: String,
    /// Served from the response cache rather than a fresh call.
    pub cached: bool,
}

#[derive(Debug, Clone)]
pub enum Backend {
    HttpChat(HttpChat),
    /// Always answers with the correctly formatted gold answer.
    MockOracle,
    /// Always answers with a well-formed wrong answer.
    MockAdversary,
    /// Serves only from the cache; a miss is an error.
    Replay,
}

impl Backend {
    pub fn kind(&self) -> &'static str {
        match self {
            Backend::HttpChat(_) => "http",
            Backend::MockOracle => "mock:oracle",
            Backend::MockAdversary => "mock:adversary",
            Backend::Replay => "replay",
        }
    }
}

/// Parsed `--backend` value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BackendSpec {
    MockOracle,
    MockAdversary,
    Replay(std::path::PathBuf),
    Http(Option<String>),
}

impl FromStr for BackendSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mock:oracle" => Ok(BackendSpec::MockOracle),
            "mock:adversary" => Ok(BackendSpec::MockAdversary),
            "http" => Ok(BackendSpec::Http(None)),
            _ => {
                if let Some(p) = s.strip_prefix("replay:") {
                    Ok(BackendSpec::Replay(p.into()))
                } else if s.starts_with("http://") || s.starts_with("https://") {
                    Ok(BackendSpec::Http(Some(s.to_string())))
                } else if let Some(url) = s.strip_prefix("http:").filter(|u| !u.is_empty()) {
                    Ok(BackendSpec::Http(Some(url.to_string())))
                } else {
                    Err(format!("unknown backend `{s}` (expected mock:oracle, mock:adversary, replay:<path>, http[:<url>])"))
                }
            }
        }
    }
}

/// What a backend sees for one query. Mocks read the instance; real
/// backends only ever send `bundle.text`.
#[derive(Debug, Clone, Copy)]
pub struct Request<'a> {
    pub bundle: &'a PromptBundle,
    pub instance: &'a TaskInstance,
}

pub fn now_rfc3339() -> String {
    humantime::format_rfc3339_seconds(SystemTime::now()).to_string()
}

/// A backend plus its cache. Cache hits never reach the backend.
#[derive(Debug)]
pub struct Client {
    pub backend: Backend,
    pub config: ModelConfig,
    pub cache: Option<ResponseCache>,
}

impl Client {
    pub fn new(backend: Backend, config: ModelConfig, cache: Option<ResponseCache>) -> Self {
        Client { backend, config, cache }
    }

    /// Model id used in cache keys. Mocks key under their own name so their
    /// responses never masquerade as a real model's.
    pub fn model_id(&self) -> String {
        match self.backend {
            Backend::MockOracle | Backend::MockAdversary => self.backend.kind().to_string(),
            Backend::HttpChat(_) | Backend::Replay => self.config.model.clone(),
        }
    }

    pub fn key_for(&self, bundle: &PromptBundle) -> String {
        cache_key(&bundle.text, &self.model_id(), &self.config.params())
    }

    pub fn is_cached(&self, bundle: &PromptBundle) -> bool {
        self.cache.as_ref().is_some_and(|c| c.get(&self.key_for(bundle)).is_some())
    }

    pub fn complete(&self, req: Request<'_>) -> Result<Transcript, ClientError> {
        let model = self.model_id();
        let params = self.config.params();
        let key = cache_key(&req.bundle.text, &model, &params);
        let transcript = |response: String, latency_ms: u64, timestamp: String, cached: bool| Transcript {
            instance_id: req.instance.id.clone(),
            strategy: req.bundle.strategy,
            prompt_hash: key.clone(),
            label_base: req.bundle.label_base,
            mst_mode: req.bundle.mst_mode,
            model: model.clone(),
            params,
            response,
            latency_ms,
            timestamp,
            backend: self.backend.kind().to_string(),
            cached,
        };
        if let Some(hit) = self.cache.as_ref().and_then(|c| c.get(&key)) {
            return Ok(transcript(hit.response, hit.latency_ms, hit.timestamp, true));
        }
        let started = Instant::now();
        let response = match &self.backend {
            Backend::MockOracle => oracle_answer(req),
            Backend::MockAdversary => adversary_answer(req),
            Backend::HttpChat(http) => http.complete(&req.bundle.text, &self.config)?,
            Backend::Replay => return Err(ClientError::CacheMiss(key)),
        };
        let latency_ms = started.elapsed().as_millis() as u64;
        let timestamp = now_rfc3339();
        if let Some(cache) = &self.cache {
            cache.append(CacheEntry {
                key: key.clone(),
                model: model.clone(),
                params,
                prompt: req.bundle.text.clone(),
                response: response.clone(),
                latency_ms,
                timestamp: timestamp.clone(),
                backend: self.backend.kind().to_string(),
            })?;
        }
        Ok(transcript(response, latency_ms, timestamp, false))
    }
}

pub(crate) fn backoff_delay(base_ms: u64, attempt: u32) -> Duration {
    Duration::from_millis(base_ms.saturating_mul(1u64 << attempt.min(16)).min(60_000))
}
