//! Chat-completion HTTP backend.
//!
//! Speaks the provider-standard `POST {base}/chat/completions` JSON
//! protocol. Credentials come from the environment; construction fails
//! fast without them, which is also what keeps the test suite offline.

use serde_json::json;

use super::{ClientError, CompletionBackend, CompletionRequest};

/// Environment variable holding the API key.
pub const API_KEY_VAR: &str = "LLM_API_KEY";
/// Environment variable overriding the API base URL.
pub const API_BASE_VAR: &str = "LLM_API_BASE";
const DEFAULT_BASE: &str = "https://api.openai.com/v1";

pub struct HttpBackend {
    base_url: String,
    api_key: String,
    agent: ureq::Agent,
}

impl HttpBackend {
    /// Build from explicit credentials.
    pub fn new(base_url: impl Into<String>, api_key: impl Into<String>) -> Result<Self, ClientError> {
        let api_key = api_key.into();
        if api_key.is_empty() {
            return Err(ClientError::MissingCredentials(API_KEY_VAR.to_string()));
        }
        Ok(HttpBackend {
            base_url: base_url.into().trim_end_matches('/').to_string(),
            api_key,
            agent: ureq::AgentBuilder::new()
                .timeout(std::time::Duration::from_secs(120))
                .build(),
        })
    }

    /// Build from `LLM_API_KEY` / `LLM_API_BASE`.
    pub fn from_env() -> Result<Self, ClientError> {
        let api_key = std::env::var(API_KEY_VAR)
            .map_err(|_| ClientError::MissingCredentials(API_KEY_VAR.to_string()))?;
        let base = std::env::var(API_BASE_VAR).unwrap_or_else(|_| DEFAULT_BASE.to_string());
        HttpBackend::new(base, api_key)
    }
}

impl CompletionBackend for HttpBackend {
    fn complete(&self, request: &CompletionRequest) -> Result<String, ClientError> {
        let url = format!("{}/chat/completions", self.base_url);
        let body = json!({
            "model": request.params.model,
            "temperature": request.params.temperature,
            "max_tokens": request.params.max_tokens,
            "messages": [{"role": "user", "content": request.prompt}],
        });
        let response = self
            .agent
            .post(&url)
            .set("Authorization", &format!("Bearer {}", self.api_key))
            .set("Content-Type", "application/json")
            .send_string(&body.to_string());
        match response {
            Ok(resp) => {
                let text = resp
                    .into_string()
                    .map_err(|e| ClientError::Transport(e.to_string()))?;
                let value: serde_json::Value = serde_json::from_str(&text)
                    .map_err(|e| ClientError::BadResponse(e.to_string()))?;
                value["choices"][0]["message"]["content"]
                    .as_str()
                    .map(str::to_string)
                    .ok_or_else(|| {
                        ClientError::BadResponse("missing choices[0].message.content".to_string())
                    })
            }
            Err(ureq::Error::Status(status, resp)) => Err(ClientError::Http {
                status,
                body: resp.into_string().unwrap_or_default(),
            }),
            Err(ureq::Error::Transport(t)) => Err(ClientError::Transport(t.to_string())),
        }
    }

    fn name(&self) -> &str {
        "http"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_without_credentials_fails_fast() {
        // The offline gate: any accidental real-backend use in tests dies
        // here instead of reaching the network.
        match HttpBackend::new("https://example.invalid", "") {
            Err(ClientError::MissingCredentials(var)) => assert_eq!(var, API_KEY_VAR),
            Err(other) => panic!("unexpected error: {other}"),
            Ok(_) => panic!("empty key must not construct a backend"),
        }
    }
}
