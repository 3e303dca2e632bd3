//! Chat-completion backend.
//!
//! Requests follow the widely used `/chat/completions` contract: a model
//! name, `temperature: 0` and a system + user message pair. The reply text is
//! read from `choices[0].message.content`.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{BackendError, PlanBackend, PlanRequest};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RemoteConfig {
    pub base_url: String,
    pub model: String,
    pub timeout_s: f64,
    /// Environment variable holding the API key.
    pub api_key_env: String,
}

impl Default for RemoteConfig {
    fn default() -> Self {
        Self {
            base_url: "https://api.openai.com/v1".into(),
            model: "gpt-4".into(),
            timeout_s: 60.0,
            api_key_env: "OPENAI_API_KEY".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: String,
    pub content: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub model: String,
    pub temperature: f64,
    pub messages: Vec<ChatMessage>,
}

/// One logged round trip. `response` holds the raw body or the error text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exchange {
    pub request: ChatRequest,
    pub response: Result<String, String>,
}

/// Sends a chat request and returns the raw response body.
pub trait ChatTransport {
    fn send(&mut self, request: &ChatRequest) -> Result<String, BackendError>;
}

/// HTTPS transport with bearer authentication.
pub struct HttpTransport {
    client: reqwest::blocking::Client,
    endpoint: String,
    api_key: String,
}

impl HttpTransport {
    pub fn new(config: &RemoteConfig, api_key: String) -> Result<Self, BackendError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs_f64(config.timeout_s))
            .build()
            .map_err(|e| BackendError::Transport(e.to_string()))?;
        Ok(Self {
            client,
            endpoint: format!("{}/chat/completions", config.base_url.trim_end_matches('/')),
            api_key,
        })
    }

    /// Reads the key from the configured environment variable.
    pub fn from_env(config: &RemoteConfig) -> Result<Self, BackendError> {
        let key = std::env::var(&config.api_key_env)
            .ok()
            .filter(|k| !k.is_empty())
            .ok_or_else(|| {
                BackendError::Unsupported(format!(
                    "environment variable {} is not set",
                    config.api_key_env
                ))
            })?;
        Self::new(config, key)
    }

    pub fn api_key(&self) -> &str {
        &self.api_key
    }
}

impl ChatTransport for HttpTransport {
    fn send(&mut self, request: &ChatRequest) -> Result<String, BackendError> {
        let response = self
            .client
            .post(&self.endpoint)
            .bearer_auth(&self.api_key)
            .json(request)
            .send()
            .map_err(|e| {
                if e.is_timeout() {
                    BackendError::Timeout
                } else {
                    BackendError::Transport(redact(&e.to_string(), &self.api_key))
                }
            })?;
        let status = response.status();
        let body = response
            .text()
            .map_err(|e| BackendError::Transport(e.to_string()))?;
        if !status.is_success() {
            return Err(BackendError::Http {
                status: status.as_u16(),
                body: redact(&body, &self.api_key),
            });
        }
        Ok(redact(&body, &self.api_key))
    }
}

fn redact(text: &str, key: &str) -> String {
    if key.is_empty() {
        text.to_string()
    } else {
        text.replace(key, "[REDACTED]")
    }
}

/// Extracts `choices[0].message.content` from a response body.
pub fn completion_text(body: &str) -> Result<String, BackendError> {
    let value: serde_json::Value =
        serde_json::from_str(body).map_err(|e| BackendError::Response(e.to_string()))?;
    value
        .pointer("/choices/0/message/content")
        .and_then(serde_json::Value::as_str)
        .map(str::to_string)
        .ok_or_else(|| BackendError::Response("missing choices[0].message.content".into()))
}

pub struct RemoteBackend<T = HttpTransport> {
    transport: T,
    model: String,
    exchanges: Vec<Exchange>,
}

impl<T: ChatTransport> RemoteBackend<T> {
    pub fn new(transport: T, model: impl Into<String>) -> Self {
        Self {
            transport,
            model: model.into(),
            exchanges: Vec::new(),
        }
    }

    pub fn transport(&self) -> &T {
        &self.transport
    }

    pub fn build_request(&self, request: &PlanRequest<'_>) -> ChatRequest {
        let mut user = request.prompt.user_text();
        if let Some(note) = request.correction {
            user.push_str("\n\n");
            user.push_str(note);
        }
        ChatRequest {
            model: self.model.clone(),
            temperature: 0.0,
            messages: vec![
                ChatMessage {
                    role: "system".into(),
                    content: request.prompt.system_text.clone(),
                },
                ChatMessage {
                    role: "user".into(),
                    content: user,
                },
            ],
        }
    }
}

impl<T: ChatTransport> PlanBackend for RemoteBackend<T> {
    fn name(&self) -> &'static str {
        "remote"
    }

    fn reprompt_on_rejection(&self) -> bool {
        true
    }

    fn complete(&mut self, request: &PlanRequest<'_>) -> Result<String, BackendError> {
        let chat = self.build_request(request);
        let result = self.transport.send(&chat);
        self.exchanges.push(Exchange {
            request: chat,
            response: result.clone().map_err(|e| e.to_string()),
        });
        completion_text(&result?)
    }

    fn transcript(&self) -> &[Exchange] {
        &self.exchanges
    }
}
