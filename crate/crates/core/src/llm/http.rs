use std::env;
use std::io::{BufRead, BufReader};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value as Json};

use super::{Backend, BackendError, GenerationRequest, GenerationResult, StreamTimer};

pub const DEFAULT_ENDPOINT: &str = "https://api.openai.com/v1";
pub const DEFAULT_CREDENTIAL_ENV: &str = "OPENAI_API_KEY";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HttpConfig {
    /// Base URL of an OpenAI-compatible API; `/chat/completions` is appended.
    pub endpoint: String,
    /// Name of the environment variable holding the API key.
    pub credential_env: String,
}

impl Default for HttpConfig {
    fn default() -> Self {
        HttpConfig {
            endpoint: DEFAULT_ENDPOINT.to_string(),
            credential_env: DEFAULT_CREDENTIAL_ENV.to_string(),
        }
    }
}

/// Streaming chat-completions client.
#[derive(Debug, Clone)]
pub struct HttpBackend {
    config: HttpConfig,
}

impl HttpBackend {
    pub fn new(config: HttpConfig) -> Self {
        HttpBackend { config }
    }

    pub fn url(&self) -> String {
        format!("{}/chat/completions", self.config.endpoint.trim_end_matches('/'))
    }

    fn credential(&self) -> Result<String, BackendError> {
        match env::var(&self.config.credential_env) {
            Ok(key) if !key.trim().is_empty() => Ok(key),
            _ => Err(BackendError::AuthError(format!(
                "environment variable {} is not set",
                self.config.credential_env
            ))),
        }
    }
}

fn network(e: impl std::fmt::Display) -> BackendError {
    BackendError::NetworkError(e.to_string())
}

/// Content delta of one `data:` payload, if any.
fn delta_content(payload: &str) -> Result<Option<String>, BackendError> {
    let v: Json = serde_json::from_str(payload).map_err(|e| network(format!("bad stream chunk: {e}")))?;
    if let Some(err) = v.get("error") {
        return Err(network(format!("stream error: {err}")));
    }
    Ok(v.pointer("/choices/0/delta/content")
        .and_then(Json::as_str)
        .filter(|s| !s.is_empty())
        .map(str::to_string))
}

impl Backend for HttpBackend {
    fn name(&self) -> &str {
        "http"
    }

    fn generate(&self, request: &GenerationRequest<'_>) -> Result<GenerationResult, BackendError> {
        request.params.validate()?;
        let key = self.credential()?;
        let client = reqwest::blocking::Client::builder()
            .timeout(request.params.timeout)
            .build()
            .map_err(network)?;
        let body = json!({
            "model": request.params.model,
            "temperature": request.params.temperature,
            "max_tokens": request.params.max_tokens,
            "stream": true,
            "messages": [
                {"role": "system", "content": request.prompt.role},
                {"role": "user", "content": request.prompt.body},
            ],
        });

        let mut timer = StreamTimer::start();
        let resp = client
            .post(self.url())
            .bearer_auth(key)
            .json(&body)
            .send()
            .map_err(network)?;
        let status = resp.status();
        if status == reqwest::StatusCode::UNAUTHORIZED || status == reqwest::StatusCode::FORBIDDEN {
            return Err(BackendError::AuthError(format!("credential rejected ({status})")));
        }
        if !status.is_success() {
            let detail = resp.text().unwrap_or_default();
            return Err(network(format!("{status}: {}", detail.trim())));
        }

        let mut text = String::new();
        for line in BufReader::new(resp).lines() {
            let line = line.map_err(network)?;
            let Some(payload) = line.strip_prefix("data:") else { continue };
            let payload = payload.trim();
            if payload == "[DONE]" {
                break;
            }
            if let Some(chunk) = delta_content(payload)? {
                timer.mark_content();
                text.push_str(&chunk);
            }
        }
        let (ttft, total_time) = timer.finish();
        if text.trim().is_empty() {
            return Err(BackendError::EmptyResponse);
        }
        Ok(GenerationResult {
            raw_text: text,
            ttft,
            total_time,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn url_joins_cleanly() {
        let b = HttpBackend::new(HttpConfig {
            endpoint: "http://localhost:1/v1/".into(),
            ..Default::default()
        });
        assert_eq!(b.url(), "http://localhost:1/v1/chat/completions");
    }

    #[test]
    fn delta_parsing() {
        let chunk = r#"{"choices":[{"delta":{"content":"x = "}}]}"#;
        assert_eq!(delta_content(chunk).unwrap().as_deref(), Some("x = "));
        let role_only = r#"{"choices":[{"delta":{"role":"assistant"}}]}"#;
        assert_eq!(delta_content(role_only).unwrap(), None);
        assert!(delta_content("{not json").is_err());
        assert!(delta_content(r#"{"error":{"message":"boom"}}"#).is_err());
    }
}
