//! Completion client: one interface over chat-completion HTTP backends
//! and deterministic test mocks, with content-addressed disk caching and
//! token-bucket rate limiting.

mod cache;
mod http;
mod mock;
mod ratelimit;

pub use cache::DiskCache;
pub use http::HttpBackend;
pub use mock::{FnBackend, ScriptEntry, ScriptedBackend};
pub use ratelimit::{Clock, FakeClock, RateLimiter, SystemClock};

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ClientError {
    #[error("missing credentials: set {0}")]
    MissingCredentials(String),
    #[error("http status {status}: {body}")]
    Http { status: u16, body: String },
    #[error("transport failure: {0}")]
    Transport(String),
    #[error("malformed completion response: {0}")]
    BadResponse(String),
    #[error("mock script exhausted after {0} calls")]
    ScriptExhausted(usize),
    #[error("mock script mismatch at call {call}: {reason}")]
    ScriptMismatch { call: usize, reason: String },
    #[error("cache io error on {path}: {source}")]
    CacheIo {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("request failed after {attempts} attempts: {last}")]
    Exhausted {
        attempts: u32,
        #[source]
        last: Box<ClientError>,
    },
}

impl ClientError {
    /// Transient failures are retried; everything else aborts immediately.
    fn is_transient(&self) -> bool {
        match self {
            ClientError::Transport(_) => true,
            ClientError::Http { status, .. } => *status == 429 || *status >= 500,
            _ => false,
        }
    }
}

/// Decoding and sampling parameters; part of the cache key.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionParams {
    pub model: String,
    pub temperature: f64,
    pub max_tokens: u32,
    /// Retry counter: bumping it makes a repeat request a distinct cache
    /// entry, so parse-failure retries are not served the cached miss.
    pub attempt: u32,
}

impl Default for CompletionParams {
    fn default() -> Self {
        CompletionParams {
            model: "default".to_string(),
            // Zero temperature by default so verification-style calls are
            // reproducible; generation callers opt in to sampling.
            temperature: 0.0,
            max_tokens: 2048,
            attempt: 0,
        }
    }
}

/// A single completion request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionRequest {
    pub prompt: String,
    pub params: CompletionParams,
}

impl CompletionRequest {
    pub fn new(prompt: impl Into<String>) -> Self {
        CompletionRequest {
            prompt: prompt.into(),
            params: CompletionParams::default(),
        }
    }

    pub fn with_params(mut self, params: CompletionParams) -> Self {
        self.params = params;
        self
    }

    pub fn with_attempt(mut self, attempt: u32) -> Self {
        self.params.attempt = attempt;
        self
    }

    /// Content hash of (prompt, params); a pure function of its inputs.
    pub fn cache_key(&self) -> String {
        let canonical = serde_json::json!({
            "prompt": self.prompt,
            "model": self.params.model,
            "temperature": self.params.temperature,
            "max_tokens": self.params.max_tokens,
            "attempt": self.params.attempt,
        });
        let mut hasher = Sha256::new();
        hasher.update(canonical.to_string().as_bytes());
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn prompt_sha256(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.prompt.as_bytes());
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Something that can answer completion requests.
pub trait CompletionBackend: Send + Sync {
    fn complete(&self, request: &CompletionRequest) -> Result<String, ClientError>;
    fn name(&self) -> &str;
}

/// Backend plus cache, rate limiter, and retry policy.
pub struct LlmClient {
    backend: Arc<dyn CompletionBackend>,
    cache: Option<DiskCache>,
    limiter: Option<RateLimiter>,
    max_attempts: u32,
}

impl LlmClient {
    pub fn new(backend: Arc<dyn CompletionBackend>) -> Self {
        LlmClient {
            backend,
            cache: None,
            limiter: None,
            max_attempts: 3,
        }
    }

    pub fn with_cache(mut self, cache: DiskCache) -> Self {
        self.cache = Some(cache);
        self
    }

    pub fn with_rate_limiter(mut self, limiter: RateLimiter) -> Self {
        self.limiter = Some(limiter);
        self
    }

    pub fn with_max_attempts(mut self, attempts: u32) -> Self {
        self.max_attempts = attempts.max(1);
        self
    }

    pub fn backend_name(&self) -> &str {
        self.backend.name()
    }

    /// Serve from cache when possible; otherwise issue the request under
    /// the rate limit with bounded retries on transient failures, and
    /// persist the response before returning it.
    pub fn complete(&self, request: &CompletionRequest) -> Result<String, ClientError> {
        let key = request.cache_key();
        if let Some(cache) = &self.cache {
            if let Some(hit) = cache.get(&key)? {
                return Ok(hit);
            }
        }

        let mut last_err: Option<ClientError> = None;
        for _ in 0..self.max_attempts {
            if let Some(limiter) = &self.limiter {
                limiter.acquire();
            }
            match self.backend.complete(request) {
                Ok(response) => {
                    if let Some(cache) = &self.cache {
                        cache.put(&key, &response)?;
                    }
                    return Ok(response);
                }
                Err(e) if e.is_transient() => last_err = Some(e),
                Err(e) => return Err(e),
            }
        }
        Err(ClientError::Exhausted {
            attempts: self.max_attempts,
            last: Box::new(last_err.expect("at least one attempt ran")),
        })
    }
}
