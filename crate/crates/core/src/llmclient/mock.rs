//! Deterministic test backends: ordered scripts and closure-driven mocks.
//! Every pipeline test runs against these; no test touches the network.

use std::collections::VecDeque;
use std::fs;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::{ClientError, CompletionBackend, CompletionRequest};

/// One scripted response, optionally pinned to the prompt that should
/// trigger it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScriptEntry {
    pub response: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prompt_contains: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prompt_sha256: Option<String>,
}

impl ScriptEntry {
    pub fn response(text: impl Into<String>) -> Self {
        ScriptEntry {
            response: text.into(),
            prompt_contains: None,
            prompt_sha256: None,
        }
    }
}

/// Replays scripted responses in order, verifying any per-entry match
/// conditions against the incoming prompt.
pub struct ScriptedBackend {
    script: Mutex<VecDeque<ScriptEntry>>,
    calls: AtomicUsize,
}

impl ScriptedBackend {
    pub fn new(entries: Vec<ScriptEntry>) -> Self {
        ScriptedBackend {
            script: Mutex::new(entries.into()),
            calls: AtomicUsize::new(0),
        }
    }

    pub fn from_responses(responses: Vec<String>) -> Self {
        ScriptedBackend::new(responses.into_iter().map(ScriptEntry::response).collect())
    }

    /// Load a JSONL script file: one `ScriptEntry` object per line.
    pub fn from_script_file(path: impl AsRef<Path>) -> Result<Self, ClientError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| ClientError::CacheIo {
            path: path.display().to_string(),
            source,
        })?;
        let mut entries = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let entry: ScriptEntry = serde_json::from_str(line).map_err(|e| {
                ClientError::BadResponse(format!(
                    "{}:{}: {e}",
                    path.display(),
                    idx + 1
                ))
            })?;
            entries.push(entry);
        }
        Ok(ScriptedBackend::new(entries))
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }

    pub fn remaining(&self) -> usize {
        self.script.lock().expect("script lock").len()
    }
}

impl CompletionBackend for ScriptedBackend {
    fn complete(&self, request: &CompletionRequest) -> Result<String, ClientError> {
        let call = self.calls.fetch_add(1, Ordering::SeqCst);
        let entry = self
            .script
            .lock()
            .expect("script lock")
            .pop_front()
            .ok_or(ClientError::ScriptExhausted(call))?;
        if let Some(needle) = &entry.prompt_contains {
            if !request.prompt.contains(needle) {
                return Err(ClientError::ScriptMismatch {
                    call,
                    reason: format!("prompt does not contain {needle:?}"),
                });
            }
        }
        if let Some(expected) = &entry.prompt_sha256 {
            let got = request.prompt_sha256();
            if &got != expected {
                return Err(ClientError::ScriptMismatch {
                    call,
                    reason: format!("prompt hash {got} != expected {expected}"),
                });
            }
        }
        Ok(entry.response)
    }

    fn name(&self) -> &str {
        "mock:scripted"
    }
}

/// A backend computed by a closure; handy for echo-style mocks.
pub struct FnBackend<F> {
    f: F,
    calls: AtomicUsize,
}

impl<F> FnBackend<F>
where
    F: Fn(&CompletionRequest) -> Result<String, ClientError> + Send + Sync,
{
    pub fn new(f: F) -> Self {
        FnBackend {
            f,
            calls: AtomicUsize::new(0),
        }
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

impl<F> CompletionBackend for FnBackend<F>
where
    F: Fn(&CompletionRequest) -> Result<String, ClientError> + Send + Sync,
{
    fn complete(&self, request: &CompletionRequest) -> Result<String, ClientError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        (self.f)(request)
    }

    fn name(&self) -> &str {
        "mock:fn"
    }
}
